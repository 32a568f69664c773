#include <gtest/gtest.h>

#include <random>

#include "apery/family.hpp"
#include "apery/quadrature.hpp"

using namespace apery;

TEST(TanhSinh, EndpointSingularities) {
  // x^(-1/2) and log x, both singular at 0.
  auto r = tanh_sinh_1d([](const Real& x, const Real&) { return Real(1L, x.digits()) / sqrt(x); }, 50);
  EXPECT_TRUE(agree_to(r.value, Real(2L, 50), 48));
  auto l = tanh_sinh_1d([](const Real& x, const Real&) { return log(x); }, 50);
  EXPECT_TRUE(agree_to(l.value, Real(-1L, 50), 48));
  // (1-x)^(-1/2) needs the complement to full relative precision.
  auto c = tanh_sinh_1d([](const Real&, const Real& omx) { return Real(1L, omx.digits()) / sqrt(omx); }, 50);
  EXPECT_TRUE(agree_to(c.value, Real(2L, 50), 48));
}

TEST(TanhSinh, SmoothIntegrandAndErrorEstimate) {
  auto r = tanh_sinh_1d([](const Real& x, const Real&) { return Real(1L, x.digits()) / (x + 1L); }, 80);
  EXPECT_TRUE(agree_to(r.value, log2_const(80), 78));
  EXPECT_FALSE(r.error_estimate.sign() < 0);
  EXPECT_LT(r.error_estimate.log_abs(), -78 * std::log(10.0));
}

TEST(TanhSinh, ReportsNonConvergence) {
  QuadratureOptions opt;
  opt.max_level = 3;
  try {
    tanh_sinh_1d([](const Real& x, const Real&) { return log(x) * log(x) / sqrt(x); }, 200, opt);
    FAIL() << "expected ConvergenceError";
  } catch (const ConvergenceError& e) {
    ASSERT_EQ(e.best().size(), 1u);
    EXPECT_TRUE(agree_to(e.best()[0].value, Real(16L, 200), 3));
  }
}

// Property: one tensor pass over a window equals separate 1-D integrals.
TEST(TensorMoments, LinearKernelMatchesOneDimensional) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 4; ++trial) {
    BigRational p(static_cast<long>(rng() % 7) - 3, 4), q(static_cast<long>(rng() % 7) - 3, 4);
    BigRational c(static_cast<long>(rng() % 9) - 1, 3);
    MomentProblem pb;
    pb.kernel = Kernel::linear;
    pb.c = c;
    pb.exponents = {{p, q}};
    pb.powers = {BigRational(1)};
    pb.n_begin = 1;
    pb.n_end = 6;
    auto res = tensor_moments(pb, 40);
    for (unsigned n = pb.n_begin; n < pb.n_end; ++n) {
      auto f = [&](const Real& x, const Real& omx) {
        Real r = x * omx;
        Real d = x * c + 1L;
        return pow(x, Real(p, 60)) * pow(omx, Real(q, 60)) * pow(r / d, static_cast<long>(n)) / d;
      };
      auto one = tanh_sinh_1d(f, 40);
      EXPECT_TRUE(agree_to(res.values[0][n - pb.n_begin].value, one.value, 37))
          << "p=" << p << " q=" << q << " c=" << c << " n=" << n;
    }
  }
}

TEST(TensorMoments, RejectsNonIntegrableInput) {
  MomentProblem pb;
  pb.kernel = Kernel::linear;
  pb.exponents = {{BigRational(-1), BigRational(0)}};
  pb.powers = {BigRational(1)};
  EXPECT_THROW(tensor_moments(pb, 30), DomainError);
  pb.exponents = {{BigRational(0), BigRational(0)}};
  pb.c = -1;
  EXPECT_THROW(tensor_moments(pb, 30), DomainError);
  pb.c = 0;
  pb.exponents.push_back({0, 0});
  EXPECT_THROW(tensor_moments(pb, 30), UsageError);
}

TEST(Family, Log1AtZeroIsLog2) {
  auto f = IntegralFamily::parse("log1", "0,0,1");
  EXPECT_TRUE(agree_to(family_integral(f, 0, 60).value, log2_const(60), 58));
}

TEST(Family, Zeta2TableToTenDigits) {
  // Printed with Digits := 30.
  const char* table[] = {"0.06519779945532069058275450006", "0.0037472701163022929758881663",
                         "0.000247728866269394110526059",  "0.00001762713127202699137347",
                         "0.0000013124634659314676853",    "0.000000100776323486001254",
                         "0.00000000791212964371946",      "0.0000000006317437711206",
                         "5.1111100706e-11",               "4.17922459e-12"};
  auto f = IntegralFamily::parse("zeta2", "0,0,0,0");
  auto values = family_integrals(f, 1, 11, 30);
  for (unsigned n = 1; n <= 10; ++n)
    EXPECT_TRUE(agree_to(values[n - 1].value, Real::parse(table[n - 1], 30), 10)) << "n=" << n;
}

TEST(Family, Zeta3KernelAgainstApery) {
  auto f = IntegralFamily::parse("zeta3k", "0,0,0,0,0");
  // n = 0 is 2 zeta(3); n = 2 is 2 (73 zeta(3) - 351/4).
  EXPECT_TRUE(agree_to(family_integral(f, 0, 40).value, 2L * zeta3(40), 38));
  Real two = (zeta3(60) * 73L - Real(BigRational(351, 4), 60)) * 2L;
  EXPECT_TRUE(agree_to(family_integral(f, 2, 40).value, two, 38));
}

TEST(Family, Zeta3RatioFamily) {
  // Oracle: the z-integral in closed form, then a 2-D mpmath quadrature.
  auto f = IntegralFamily::parse("zeta3k", "0,0,0,1/3,2/3");
  EXPECT_TRUE(agree_to(family_integral(f, 0, 30).value, Real::parse("2.64711924435623226441", 30), 19));
}

TEST(Family, ParameterValidation) {
  EXPECT_THROW(IntegralFamily::parse("zeta2", "1,0,0,0"), DomainError);
  EXPECT_THROW(IntegralFamily::parse("log1", "0,0"), UsageError);
  EXPECT_THROW(IntegralFamily::parse("nope", "0"), UsageError);
  auto f = IntegralFamily::parse("zeta2", "-1/2,0,0,1/2");
  EXPECT_EQ(f.canonical(), IntegralFamily::parse("zeta2", "-2/4,0,0,3/6").canonical());
}
