#include <algorithm>
#include <cmath>
#include <tuple>

#include "apery/errors.hpp"
#include "apery/lattice.hpp"
#include "apery/recurrence.hpp"

namespace apery {

namespace {

constexpr int kHeldOut = 10;

// Rows of the linear system sum_{j,k} c_{jk} n^k v_{n+j} = 0, each row
// divided by |v_n| so that all equations carry comparable weight.
std::vector<std::vector<Real>> equations(const std::vector<Real>& v, unsigned L, unsigned d,
                                         long first, int digits) {
  std::vector<std::vector<Real>> rows;
  for (std::size_t i = 0; i + L < v.size(); ++i) {
    long n = first + static_cast<long>(i);
    Real norm = abs(v[i].with_digits(digits));
    if (norm.is_zero()) norm = Real(1L, digits);
    std::vector<Real> row;
    for (unsigned j = 0; j <= L; ++j) {
      Real base = v[i + j].with_digits(digits) / norm;
      for (unsigned k = 0; k <= d; ++k) {
        row.push_back(base);
        base *= n;
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

// Smallest relative pivot of a column-pivoted Gram-Schmidt QR: a cheap
// stand-in for sigma_min / sigma_max.
double log10_min_pivot(const std::vector<std::vector<Real>>& rows, std::size_t neq, int digits) {
  const std::size_t m = rows[0].size();
  std::vector<std::vector<Real>> cols(m, std::vector<Real>(neq, Real(digits)));
  for (std::size_t e = 0; e < neq; ++e)
    for (std::size_t c = 0; c < m; ++c) cols[c][e] = rows[e][c];
  auto norm2 = [&](const std::vector<Real>& x) {
    Real s(digits);
    for (auto& y : x) s += y * y;
    return s;
  };
  double top = 0, low = 0;
  std::vector<bool> used(m, false);
  for (std::size_t step = 0; step < m; ++step) {
    std::size_t best = m;
    Real bn(digits);
    for (std::size_t c = 0; c < m; ++c) {
      if (used[c]) continue;
      Real nc = norm2(cols[c]);
      if (best == m || nc > bn) best = c, bn = nc;
    }
    used[best] = true;
    double lg = bn.is_zero() ? -1e9 : bn.log_abs() / 2 / 2.302585092994046;
    if (step == 0) top = lg;
    low = lg;
    if (bn.is_zero()) break;
    Real len = sqrt(bn);
    for (auto& y : cols[best]) y /= len;
    for (std::size_t c = 0; c < m; ++c) {
      if (used[c]) continue;
      Real dp(digits);
      for (std::size_t e = 0; e < neq; ++e) dp += cols[best][e] * cols[c][e];
      for (std::size_t e = 0; e < neq; ++e) cols[c][e] -= dp * cols[best][e];
    }
  }
  return low - top;
}

std::optional<PolyRecurrence> to_recurrence(const std::vector<BigInt>& c, unsigned L, unsigned d) {
  std::vector<IntPoly> p;
  for (unsigned j = 0; j <= L; ++j)
    p.emplace_back(std::vector<BigInt>(c.begin() + j * (d + 1), c.begin() + (j + 1) * (d + 1)));
  if (p.back().is_zero() || p.front().is_zero()) return std::nullopt;
  return PolyRecurrence(std::move(p));
}

// Largest relative residual of rec over every window of v.
double worst_residual(const PolyRecurrence& rec, const std::vector<Real>& v, long first,
                      int digits) {
  double worst = -1e9;
  const unsigned L = rec.order();
  for (std::size_t i = 0; i + L < v.size(); ++i) {
    long n = first + static_cast<long>(i);
    Real s(digits), mag(digits);
    for (unsigned j = 0; j <= L; ++j) {
      Real t = v[i + j].with_digits(digits) * rec[j](n);
      s += t;
      mag += abs(t);
    }
    if (mag.is_zero()) continue;
    double r = s.is_zero() ? -static_cast<double>(digits) : (s.log_abs() - mag.log_abs()) / 2.302585092994046;
    worst = std::max(worst, r);
  }
  return worst;
}

}  // namespace

std::optional<PolyRecurrence> guess_recurrence(const std::vector<Real>& values, unsigned order,
                                               unsigned max_degree, int digits, long first_index) {
  if (order < 1) throw UsageError("guess_recurrence needs order >= 1");
  const std::size_t need = (order + 1) * (max_degree + 1) + order + kHeldOut;
  if (values.size() < need)
    throw UsageError("guess_recurrence needs " + std::to_string(need) + " values, got " +
                     std::to_string(values.size()));
  int have = digits;
  for (auto& v : values) have = std::min(have, v.digits());
  digits = have;

  std::vector<std::tuple<unsigned, unsigned, unsigned>> shapes;  // (unknowns, order, degree)
  for (unsigned L = 1; L <= order; ++L)
    for (unsigned d = 0; d <= max_degree; ++d) shapes.emplace_back((L + 1) * (d + 1), L, d);
  std::sort(shapes.begin(), shapes.end());

  // The prefilter only needs a numerical null vector. Acceptance is
  // stricter: exact coefficients reproduce the values to about their own
  // accuracy, while rational-function fits with huge coefficients (the
  // ratio of a minimal solution is very smooth) stall near half precision.
  auto search = [&](unsigned m, unsigned L, unsigned d, int prec) -> std::optional<PolyRecurrence> {
    const double accept = -prec / 2.0;
    const double verify = std::min(accept, 25.0 - prec);
    auto rows = equations(values, L, d, first_index, prec);
    if (rows.size() < m + kHeldOut) return std::nullopt;
    const std::size_t fit = rows.size() - kHeldOut;
    // With no numerical null vector there is nothing for the lattice to find.
    if (log10_min_pivot(rows, fit, prec) > accept) return std::nullopt;

    Real scale = pow(Real(10L, prec), static_cast<long>(prec - 10));
    IntMatrix basis(m, std::vector<BigInt>(m + fit, BigInt(0)));
    for (unsigned u = 0; u < m; ++u) {
      basis[u][u] = 1;
      for (std::size_t e = 0; e < fit; ++e) basis[u][m + e] = (rows[e][u] * scale).round();
    }
    IntMatrix red;
    try {
      red = lll_reduce(std::move(basis));
    } catch (const RankError&) {
      return std::nullopt;
    }
    std::optional<PolyRecurrence> best;
    for (auto& row : red) {
      std::vector<BigInt> c(row.begin(), row.begin() + m);
      if (std::all_of(c.begin(), c.end(), [](const BigInt& x) { return x == 0; })) continue;
      auto rec = to_recurrence(c, L, d);
      if (!rec) continue;
      if (worst_residual(*rec, values, first_index, prec) >= verify) continue;
      if (!best || rec->height() < best->height()) best = std::move(rec);
    }
    return best;
  };

  for (auto [m, L, d] : shapes) {
    auto best = search(m, L, d, digits);
    if (!best) continue;
    // A recurrence with algebraic irrational coefficients (I(n) hypergeometric
    // over a number field) has integer approximations of height about
    // 10^(digits/2) that fit just as well; they move with the precision.
    if (search(m, L, d, digits * 3 / 4) != best) continue;
    return best;
  }
  return std::nullopt;
}

}  // namespace apery
