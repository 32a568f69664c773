#include <algorithm>
#include <cmath>

#include "apery/errors.hpp"
#include "apery/lattice.hpp"

namespace apery {

std::size_t integer_rank(const IntMatrix& in) {
  if (in.empty()) return 0;
  IntMatrix m = in;
  const std::size_t rows = m.size(), cols = m[0].size();
  std::size_t rank = 0;
  BigInt prev = 1;
  // Bareiss elimination keeps every entry an exact minor.
  for (std::size_t c = 0; c < cols && rank < rows; ++c) {
    std::size_t piv = rank;
    while (piv < rows && m[piv][c] == 0) ++piv;
    if (piv == rows) continue;
    std::swap(m[piv], m[rank]);
    for (std::size_t r = rank + 1; r < rows; ++r) {
      for (std::size_t k = c + 1; k < cols; ++k) {
        m[r][k] = m[r][k] * m[rank][c] - m[rank][k] * m[r][c];
        mpz_divexact(m[r][k].get_mpz_t(), m[r][k].get_mpz_t(), prev.get_mpz_t());
      }
      m[r][c] = 0;
    }
    prev = m[rank][c];
    ++rank;
  }
  return rank;
}

namespace {

BigInt dot(const std::vector<BigInt>& a, const std::vector<BigInt>& b) {
  BigInt s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

IntMatrix lll_reduce(IntMatrix b, double delta) {
  const std::size_t m = b.size();
  if (m == 0) return b;
  const std::size_t n = b[0].size();
  for (auto& row : b)
    if (row.size() != n) throw UsageError("lll_reduce: ragged basis");
  if (integer_rank(b) < m) throw RankError("lll_reduce: basis rows are linearly dependent");

  // Exact Gram matrix, updated alongside every row operation.
  IntMatrix G(m, std::vector<BigInt>(m));
  std::size_t maxbits = 1;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j <= i; ++j) G[i][j] = G[j][i] = dot(b[i], b[j]);
    maxbits = std::max(maxbits, mpz_sizeinbase(G[i][i].get_mpz_t(), 2));
  }
  // Gram entries lose up to all their bits to cancellation in r_kk.
  const int digits = static_cast<int>((maxbits + 2 * m + 64) * 0.30103) + 1;

  std::vector<std::vector<Real>> mu(m, std::vector<Real>(m, Real(digits)));
  std::vector<std::vector<Real>> r(m, std::vector<Real>(m, Real(digits)));
  std::vector<Real> B(m, Real(digits));
  const Real half(0.51, digits);
  const Real dl(delta, digits);

  // Cholesky-style row k of the Gram-Schmidt data from the exact Gram row.
  auto gso_row = [&](std::size_t k) {
    for (std::size_t j = 0; j <= k; ++j) {
      Real s(G[k][j], digits);
      for (std::size_t i = 0; i < j; ++i) s -= mu[j][i] * r[k][i];
      r[k][j] = s;
      if (j < k) mu[k][j] = s / B[j];
    }
    B[k] = r[k][k];
  };

  // b_k -= q b_j, with the Gram matrix kept exact.
  auto reduce = [&](std::size_t k, std::size_t j, const BigInt& q) {
    for (std::size_t c = 0; c < n; ++c) b[k][c] -= q * b[j][c];
    BigInt gkk = G[k][k] - 2 * q * G[k][j] + q * q * G[j][j];
    for (std::size_t i = 0; i < m; ++i) {
      if (i == k) continue;
      G[k][i] -= q * G[j][i];
      G[i][k] = G[k][i];
    }
    G[k][k] = gkk;
  };

  auto swap_rows = [&](std::size_t k) {
    std::swap(b[k], b[k - 1]);
    std::swap(G[k], G[k - 1]);
    for (std::size_t i = 0; i < m; ++i) std::swap(G[i][k], G[i][k - 1]);
  };

  gso_row(0);
  std::size_t k = 1;
  std::size_t valid = 1;  // rows < valid have current Gram-Schmidt data
  while (k < m) {
    for (std::size_t row = valid; row <= k; ++row) gso_row(row);
    valid = k + 1;

    // Size reduction; repeated because the floating mu are approximate.
    for (int pass = 0; pass < 100; ++pass) {
      bool changed = false;
      for (std::size_t jj = k; jj-- > 0;) {
        if (abs(mu[k][jj]) <= half) continue;
        BigInt q = mu[k][jj].round();
        reduce(k, jj, q);
        changed = true;
        Real qr(q, digits);
        for (std::size_t i = 0; i < jj; ++i) mu[k][i] -= qr * mu[jj][i];
        mu[k][jj] -= qr;
      }
      if (!changed) break;
      gso_row(k);
    }

    Real rhs = (dl - mu[k][k - 1] * mu[k][k - 1]) * B[k - 1];
    if (B[k] >= rhs) {
      ++k;
    } else {
      swap_rows(k);
      valid = k - 1;
      k = std::max<std::size_t>(k - 1, 1);
      if (valid == 0) {
        gso_row(0);
        valid = 1;
      }
    }
  }
  return b;
}

}  // namespace apery
