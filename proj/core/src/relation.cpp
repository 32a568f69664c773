#include <algorithm>
#include <cmath>

#include "apery/errors.hpp"
#include "apery/lattice.hpp"

namespace apery {

namespace {

Real weighted_sum(const std::vector<Real>& xs, const std::vector<BigInt>& r, int digits) {
  Real s(digits);
  for (std::size_t i = 0; i < xs.size(); ++i) s += xs[i].with_digits(digits) * r[i];
  return s;
}

Real max_abs(const std::vector<Real>& xs, int digits) {
  Real m(1L, digits);
  for (auto& x : xs) m = max(m, abs(x.with_digits(digits)));
  return m;
}

}  // namespace

std::vector<IntegerRelation> integer_relations(const std::vector<Real>& xs, int digits,
                                               const BigInt& height_bound) {
  const std::size_t k = xs.size();
  if (k < 2 || k > 8) throw UsageError("integer_relation takes 2 to 8 values");
  if (height_bound < 1) throw UsageError("height bound must be positive");
  int have = xs[0].digits();
  for (auto& x : xs) have = std::min(have, x.digits());
  if (have < digits + 40)
    throw UsageError("integer_relation needs values at " + std::to_string(digits + 40) +
                     " digits for confirmation, got " + std::to_string(have));
  const double lh = std::log10(height_bound.get_d());
  if (static_cast<double>(k) * lh + 12 > digits)
    throw UsageError("precision " + std::to_string(digits) + " is too low for height bound 10^" +
                     std::to_string(static_cast<int>(lh)));

  // Standard relation lattice: identity next to the scaled values.
  const Real scale_max = max_abs(xs, digits);
  Real scale = pow(Real(10L, digits), static_cast<long>(digits - 5)) / scale_max;
  IntMatrix basis(k, std::vector<BigInt>(k + 1, BigInt(0)));
  for (std::size_t i = 0; i < k; ++i) {
    basis[i][i] = 1;
    basis[i][k] = (xs[i].with_digits(digits) * scale).round();
  }
  IntMatrix red = lll_reduce(std::move(basis));

  const Real tol_search = pow(Real(10L, digits), static_cast<long>(12 - digits)) * scale_max;
  const int confirm = have;
  const Real scale_c = max_abs(xs, confirm);
  const Real tol_confirm = pow(Real(10L, confirm), static_cast<long>(12 - 30 - digits)) * scale_c;

  std::vector<IntegerRelation> out;
  for (auto& row : red) {
    std::vector<BigInt> r(row.begin(), row.begin() + static_cast<long>(k));
    BigInt h = 0;
    for (auto& c : r) h = std::max<BigInt>(h, ::abs(c));
    if (h == 0 || h > height_bound) continue;
    if (abs(weighted_sum(xs, r, digits)) >= tol_search) continue;
    Real res = abs(weighted_sum(xs, r, confirm));
    if (res >= tol_confirm) continue;  // numerical coincidence
    // Sign convention: first nonzero coefficient positive.
    for (auto& c : r)
      if (c != 0) {
        if (c < 0)
          for (auto& d : r) d = -d;
        break;
      }
    out.push_back(IntegerRelation{std::move(r), res.with_digits(10), tol_search.with_digits(10), h});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const IntegerRelation& a, const IntegerRelation& b) { return a.height < b.height; });
  return out;
}

std::optional<IntegerRelation> integer_relation(const std::vector<Real>& xs, int digits,
                                                const BigInt& height_bound) {
  auto all = integer_relations(xs, digits, height_bound);
  if (all.empty()) return std::nullopt;
  return all.front();
}

}  // namespace apery
