#include <gtest/gtest.h>

#include <random>

#include "apery/errors.hpp"
#include "apery/lattice.hpp"

using namespace apery;

namespace {

using QMatrix = std::vector<std::vector<BigRational>>;

QMatrix to_q(const IntMatrix& m) {
  QMatrix q(m.size());
  for (std::size_t i = 0; i < m.size(); ++i)
    for (auto& x : m[i]) q[i].emplace_back(x);
  return q;
}

BigRational det(QMatrix a) {
  const std::size_t n = a.size();
  BigRational d = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && a[p][c] == 0) ++p;
    if (p == n) return 0;
    if (p != c) {
      std::swap(a[p], a[c]);
      d = -d;
    }
    d *= a[c][c];
    for (std::size_t r = c + 1; r < n; ++r) {
      BigRational f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
    }
  }
  return d;
}

QMatrix gram(const QMatrix& b) {
  QMatrix g(b.size(), std::vector<BigRational>(b.size()));
  for (std::size_t i = 0; i < b.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      for (std::size_t k = 0; k < b[i].size(); ++k) g[i][j] += b[i][k] * b[j][k];
  return g;
}

// Exact check of size reduction and the Lovasz condition.
bool lll_conditions(const IntMatrix& m, const BigRational& delta) {
  QMatrix b = to_q(m), bs = b;
  const std::size_t n = b.size();
  std::vector<BigRational> norm(n);
  QMatrix mu(n, std::vector<BigRational>(n));
  auto dot = [](const std::vector<BigRational>& x, const std::vector<BigRational>& y) {
    BigRational s = 0;
    for (std::size_t k = 0; k < x.size(); ++k) s += x[k] * y[k];
    return s;
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      mu[i][j] = dot(b[i], bs[j]) / norm[j];
      for (std::size_t k = 0; k < bs[i].size(); ++k) bs[i][k] -= mu[i][j] * bs[j][k];
    }
    norm[i] = dot(bs[i], bs[i]);
  }
  for (std::size_t i = 1; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j)
      if (abs(mu[i][j]) > BigRational(1, 2)) return false;
    if (norm[i] < (delta - mu[i][i - 1] * mu[i][i - 1]) * norm[i - 1]) return false;
  }
  return true;
}

IntMatrix random_basis(std::mt19937_64& rng, std::size_t rows, std::size_t cols, long range) {
  for (;;) {
    IntMatrix m(rows, std::vector<BigInt>(cols));
    for (auto& r : m)
      for (auto& x : r) x = static_cast<long>(rng() % (2 * range + 1)) - range;
    if (integer_rank(m) == rows) return m;
  }
}

}  // namespace

TEST(Lll, PreservesTheLatticeAndReduces) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 30; ++trial) {
    std::size_t n = 2 + trial % 5;
    IntMatrix b = random_basis(rng, n, n, trial < 15 ? 50 : 100000);
    IntMatrix r = lll_reduce(b);
    ASSERT_EQ(r.size(), n);
    // Same lattice: the transform r b^-1 is unimodular and integral.
    QMatrix B = to_q(b), R = to_q(r);
    EXPECT_EQ(abs(det(B)), abs(det(R)));
    for (std::size_t i = 0; i < n; ++i) {
      // Solve x B = R_i by Cramer's rule.
      for (std::size_t j = 0; j < n; ++j) {
        QMatrix bj = B;
        bj[j] = R[i];
        BigRational x = det(bj) / det(B);
        EXPECT_EQ(x.get_den(), 1) << "trial " << trial;
      }
    }
    EXPECT_TRUE(lll_conditions(r, BigRational(3, 4))) << "trial " << trial;
  }
}

TEST(Lll, RectangularKeepsGramDeterminant) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 10; ++trial) {
    IntMatrix b = random_basis(rng, 3, 6, 1000);
    IntMatrix r = lll_reduce(b);
    EXPECT_EQ(det(gram(to_q(b))), det(gram(to_q(r))));
    EXPECT_EQ(integer_rank(r), 3u);
    EXPECT_TRUE(lll_conditions(r, BigRational(3, 4)));
  }
}

TEST(Lll, DependentRowsRaise) {
  IntMatrix b = {{1, 2, 3}, {2, 4, 6}, {0, 1, 1}};
  EXPECT_EQ(integer_rank(b), 2u);
  EXPECT_THROW(lll_reduce(b), RankError);
}

TEST(Relation, FindsAndConfirmsAtTwoPrecisions) {
  const int d = 60;
  std::vector<Real> xs = {log(Real(2L, d + 50)), log(Real(3L, d + 50)), log(Real(6L, d + 50))};
  auto r = integer_relation(xs, d, BigInt(10000));
  ASSERT_TRUE(r);
  BigInt s = r->coefficients[0] * r->coefficients[2];
  EXPECT_EQ(r->coefficients[0], r->coefficients[1]);
  EXPECT_LT(s, 0);
  EXPECT_LT(r->residual.log_abs(), (12 - d - 30) * std::log(10.0));
}

TEST(Relation, SpuriousAtSearchPrecisionIsRejected) {
  // x2 agrees with 2 x1 + 1 to 70 digits but not beyond: the search at 60
  // digits sees a relation, the confirmation at 110 does not.
  const int d = 60;
  Real x1 = pi(d + 50);
  Real x2 = x1 * 2L + 1L + pow(Real(10L, d + 50), -70L);
  std::vector<Real> xs = {Real(1L, d + 50), x1, x2};
  EXPECT_FALSE(integer_relation(xs, d, BigInt(10000)).has_value());
  Real exact = x1 * 2L + 1L;
  EXPECT_TRUE(integer_relation({Real(1L, d + 50), x1, exact}, d, BigInt(10000)).has_value());
}

TEST(Relation, PiAndEHaveNoSmallRelation) {
  const int d = 60;
  std::vector<Real> xs = {pi(d + 50), exp(Real(1L, d + 50))};
  EXPECT_FALSE(integer_relation(xs, d, BigInt(10000)).has_value());
}

TEST(Relation, Preconditions) {
  std::vector<Real> one = {pi(100)};
  EXPECT_THROW(integer_relation(one, 40, BigInt(100)), UsageError);
  std::vector<Real> coarse = {pi(50), Real(1L, 50)};
  EXPECT_THROW(integer_relation(coarse, 40, BigInt(100)), UsageError);
}

TEST(Lll, RelationsFromTheBasisAreOrdered) {
  const int d = 60;
  Real s2 = sqrt(Real(2L, d + 50));
  std::vector<Real> xs = {Real(1L, d + 50), s2, s2 * s2, s2 * 3L};
  auto rels = integer_relations(xs, d, BigInt(1000));
  ASSERT_GE(rels.size(), 2u);
  for (std::size_t i = 1; i < rels.size(); ++i) EXPECT_LE(rels[i - 1].height, rels[i].height);
}
