#include <benchmark/benchmark.h>

#include "apery/certificate.hpp"
#include "apery/lattice.hpp"
#include "apery/primes.hpp"
#include "apery/quadrature.hpp"
#include "apery/recurrence.hpp"

using namespace apery;

namespace {

IntPoly P(std::vector<long> c) {
  std::vector<BigInt> v(c.begin(), c.end());
  return IntPoly(v);
}

PolyRecurrence zeta3_rec() {
  return PolyRecurrence({P({1, 3, 3, 1}), P({-117, -231, -153, -34}), P({8, 12, 6, 1})});
}

void BM_LcmTable(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(lcm_table(st.range(0)));
}
BENCHMARK(BM_LcmTable)->Arg(2000)->Arg(10000);

void BM_PpProduct(benchmark::State& st) {
  PpSpec s;
  s.e1 = BigRational(1, 2);
  for (auto _ : st) benchmark::DoNotOptimize(pp_product(s, st.range(0)));
}
BENCHMARK(BM_PpProduct)->Arg(100000)->Arg(1000000);

void BM_IterateApery(benchmark::State& st) {
  auto rec = zeta3_rec();
  for (auto _ : st)
    benchmark::DoNotOptimize(iterate(rec, {BigRational(0), BigRational(6)}, st.range(0)));
}
BENCHMARK(BM_IterateApery)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_TanhSinh(benchmark::State& st) {
  const int d = static_cast<int>(st.range(0));
  for (auto _ : st)
    benchmark::DoNotOptimize(
        tanh_sinh_1d([](const Real& x, const Real& omx) { return log(x) / sqrt(omx); }, d));
}
BENCHMARK(BM_TanhSinh)->Arg(50)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_IntegerRelation(benchmark::State& st) {
  const int d = 100;
  std::vector<Real> xs = {Real(1L, d + 50), pi(d + 50), pi(d + 50) * pi(d + 50), log2_const(d + 50),
                          zeta3(d + 50) * 3L - pi(d + 50) * 2L};
  for (auto _ : st) benchmark::DoNotOptimize(integer_relation(xs, d, BigInt(1000000)));
}
BENCHMARK(BM_IntegerRelation)->Unit(benchmark::kMillisecond);

void BM_ConjectureIntegerating(benchmark::State& st) {
  auto rec = zeta3_rec();
  auto a = iterate(rec, {BigRational(0), BigRational(6)}, st.range(0));
  auto b = iterate(rec, {BigRational(1), BigRational(5)}, st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(conjecture_integerating(a, b));
}
BENCHMARK(BM_ConjectureIntegerating)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
