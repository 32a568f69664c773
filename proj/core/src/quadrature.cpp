#include "apery/quadrature.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <thread>

namespace apery {

namespace {

constexpr double kLn10 = 2.302585092994046;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Scratch mpfr value with RAII; the hot loops below work on raw mpfr_t to
// avoid an allocation per arithmetic operation.
struct Tmp {
  explicit Tmp(mpfr_prec_t p) { mpfr_init2(v, p); }
  ~Tmp() { mpfr_clear(v); }
  Tmp(const Tmp&) = delete;
  Tmp& operator=(const Tmp&) = delete;
  mpfr_t v;
};

double logaddexp(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == kNegInf) return a;
  return a + std::log1p(std::exp(b - a));
}

// One abscissa of the tanh-sinh rule mapped to (0,1):
//   x = 1/(1+exp(-2u)),  1-x = 1/(1+exp(2u)),  u = (pi/2) sinh t,
//   dx/dt = pi cosh t x (1-x).
struct Abscissa {
  Real x, omx, weight;  // weight = h * dx/dt
  double lx, lomx, lw;  // logs; lw = log(h pi cosh t)
};

Abscissa abscissa(long k, int level, int work) {
  Real h = pow(Real(2L, work), -static_cast<long>(level));
  Real t = h * k;
  Real sh(work), ch(work);
  mpfr_sinh_cosh(sh.get(), ch.get(), t.get(), MPFR_RNDN);
  Real p = pi(work);
  Real u = p * sh / 2L;
  Real e = exp(u * 2L);  // exp(2u)
  Real one(1L, work);
  Real denom = one + e;
  Abscissa a{e / denom, one / denom, Real(work), 0, 0, 0};
  a.weight = h * p * ch * a.x * a.omx;
  a.lx = a.x.log_abs();
  a.lomx = a.omx.log_abs();
  a.lw = (h * p * ch).log_abs();
  return a;
}

// D^-s for rational s, into out. D > 0.
void inv_power(mpfr_ptr out, mpfr_srcptr d, const BigRational& s) {
  long num = s.get_num().get_si();
  unsigned long den = s.get_den().get_ui();
  if (num == 0) {
    mpfr_set_ui(out, 1, MPFR_RNDN);
    return;
  }
  if (den == 1) {
    mpfr_pow_si(out, d, -num, MPFR_RNDN);
    return;
  }
  unsigned long an = static_cast<unsigned long>(num < 0 ? -num : num);
  mpfr_pow_ui(out, d, an, MPFR_RNDN);
  if (den == 2)
    mpfr_sqrt(out, out, MPFR_RNDN);
  else if (den == 3)
    mpfr_cbrt(out, out, MPFR_RNDN);
  else
    mpfr_rootn_ui(out, out, den, MPFR_RNDN);
  if (num > 0) mpfr_ui_div(out, 1, out, MPFR_RNDN);
}

// Richardson-free error estimate from three nested levels, after Bailey:
// with d1, d2 the log10 relative differences to the two coarser sums, the
// error is about 10^(d1^2/d2), never claimed below 10^(2 d1).
Real estimate_error(const Real& s0, const Real& s1, const Real& s2, int work) {
  Real e1 = abs(s0 - s1);
  Real e2 = abs(s0 - s2);
  double ls = s0.log_abs();
  if (e1.is_zero()) return pow(Real(10L, work), -static_cast<long>(work)) * abs(s0);
  double d1 = (e1.log_abs() - ls) / kLn10;
  double d2 = e2.is_zero() ? d1 : (e2.log_abs() - ls) / kLn10;
  double d = d1;
  if (d1 < 0 && d2 < 0) d = std::max(d1 * d1 / d2, 2 * d1);
  d = std::min(d, 0.0);
  d = std::max(d, -static_cast<double>(work));
  Real out(work);
  mpfr_set_d(out.get(), d * kLn10 + ls, MPFR_RNDN);
  return exp(out);
}

bool converged(const QuadratureResult& r, int digits) {
  if (r.value.is_zero()) return r.error_estimate.is_zero();
  return r.error_estimate.log_abs() - r.value.log_abs() <= -digits * kLn10;
}

int default_min_level(unsigned dim) { return dim == 1 ? 5 : dim == 2 ? 4 : 3; }
int default_max_level(unsigned dim) { return dim == 1 ? 14 : dim == 2 ? 10 : 8; }

}  // namespace

unsigned kernel_dimension(Kernel k) noexcept {
  switch (k) {
    case Kernel::linear: return 1;
    case Kernel::zeta2: return 2;
    case Kernel::zeta3: return 3;
  }
  return 0;
}

QuadratureResult tanh_sinh_1d(const Integrand1D& f, int digits, const QuadratureOptions& opt) {
  if (digits < 1) throw UsageError("quadrature precision must be positive");
  const int work = digits + opt.guard_digits;
  const int hi = opt.max_level ? opt.max_level : default_max_level(1);
  const int lo = std::min(hi, opt.min_level ? opt.min_level : default_min_level(1));
  const double cut = -(work + 5) * kLn10;

  QuadratureResult best{Real(work), Real(work), 0};
  for (int level = lo; level <= hi; ++level) {
    Real s[3] = {Real(work), Real(work), Real(work)};
    auto add = [&](long k, const Real& term) {
      s[0] += term;
      if (k % 2 == 0) s[1] += term;
      if (k % 4 == 0) s[2] += term;
    };
    {
      Abscissa a = abscissa(0, level, work);
      add(0, a.weight * f(a.x, a.omx));
    }
    for (int side : {1, -1}) {
      int small = 0;
      for (long j = 1;; ++j) {
        long k = side * j;
        Abscissa a = abscissa(k, level, work);
        if (a.x.is_zero() || a.omx.is_zero()) break;
        Real term = a.weight * f(a.x, a.omx);
        if (!term.is_finite()) break;
        add(k, term);
        double rel = term.log_abs() - s[0].log_abs();
        bool far = std::ldexp(static_cast<double>(j), -level) > 1.0;
        small = (far && rel < cut) ? small + 1 : 0;
        if (small >= 3) break;
        if (std::ldexp(static_cast<double>(j), -level) > 12.0) break;
      }
    }
    s[1] *= 2L;
    s[2] *= 4L;
    best = QuadratureResult{s[0].with_digits(digits), estimate_error(s[0], s[1], s[2], work), level};
    if (level >= lo + 1 && converged(best, digits)) return best;
  }
  throw ConvergenceError("tanh-sinh did not converge by level " + std::to_string(hi), {best});
}

namespace {

struct DimNodes {
  std::vector<Real> x, omx, fac, r;  // fac = weight p-q factor, r = x(1-x)
  std::vector<double> lx, lomx, lfac, lr;
  std::vector<unsigned char> parity;  // bit0: on level-1 grid, bit1: on level-2 grid
  std::size_t size() const { return x.size(); }
};

// Nodes for one coordinate with factor x^p (1-x)^q. A node is dropped
// once even a pessimistic bound on its contribution is below `cut`: `slack`
// extra powers of x(1-x) are assumed available from the moment (negative
// when the kernel can amplify near the boundary).
DimNodes build_dim(const BigRational& p, const BigRational& q, int level, int work, double slack,
                   double cut) {
  const double pd = p.get_d(), qd = q.get_d();
  const double g0 = std::max(1 + pd + slack, (1 + pd) / 2);
  const double g1 = std::max(1 + qd + slack, (1 + qd) / 2);
  Real pr(p, work), qr(q, work);

  std::vector<std::pair<long, Abscissa>> kept;
  kept.emplace_back(0, abscissa(0, level, work));
  for (int side : {1, -1}) {
    for (long j = 1;; ++j) {
      long k = side * j;
      Abscissa a = abscissa(k, level, work);
      double bound = a.lw + g0 * a.lx + g1 * a.lomx;
      if ((bound < cut && std::ldexp(static_cast<double>(j), -level) > 0.5) ||
          std::ldexp(static_cast<double>(j), -level) > 12.0)
        break;
      kept.emplace_back(k, std::move(a));
    }
  }
  std::sort(kept.begin(), kept.end(), [](auto& l, auto& r) { return l.first < r.first; });

  DimNodes d;
  for (auto& [k, a] : kept) {
    Real fac = a.weight;
    if (p != 0) fac *= pow(a.x, pr);
    if (q != 0) fac *= pow(a.omx, qr);
    Real r = a.x * a.omx;
    d.lfac.push_back(fac.log_abs());
    d.lr.push_back(a.lx + a.lomx);
    d.lx.push_back(a.lx);
    d.lomx.push_back(a.lomx);
    d.parity.push_back(static_cast<unsigned char>((k % 2 == 0 ? 1 : 0) | (k % 4 == 0 ? 2 : 0)));
    d.x.push_back(std::move(a.x));
    d.omx.push_back(std::move(a.omx));
    d.fac.push_back(std::move(fac));
    d.r.push_back(std::move(r));
  }
  return d;
}

class MomentPass {
 public:
  MomentPass(const MomentProblem& pb, int level, int work,
             const std::vector<std::vector<double>>& thresholds)
      : pb_(pb), work_(work), prec_(bits_for_digits(work)), thr_(thresholds) {
    dim_ = kernel_dimension(pb.kernel);
    J_ = pb.powers.size();
    W_ = pb.n_end - pb.n_begin;
    double smax = 0;
    for (auto& s : pb.powers) smax = std::max(smax, s.get_d());
    double slack = pb.kernel == Kernel::linear ? pb.n_begin : pb.n_begin - smax;
    const double cut = -(work + 8) * kLn10;
    for (unsigned i = 0; i < dim_; ++i)
      nodes_.push_back(build_dim(pb.exponents[i].first, pb.exponents[i].second, level, work,
                                 slack, cut));
    for (unsigned j = 0; j < J_; ++j) {
      BigRational diff = pb.powers[j] - pb.powers[0];
      if (diff.get_den() != 1) throw UsageError("moment powers must differ by integers");
      shift_.push_back(diff.get_num().get_si());
      sd_.push_back(pb.powers[j].get_d());
    }
    cd_ = pb.c.get_d();
  }

  std::size_t outer_size() const { return nodes_[0].size(); }
  std::size_t total_nodes() const {
    std::size_t n = 1;
    for (auto& d : nodes_) n *= d.size();
    return n;
  }

  // Partial sums over all nodes with outer index i, laid out
  // [grid][power][n] with grid 0 = this level, 1 = even, 2 = multiple of 4.
  std::vector<Real> run_outer(std::size_t i, long long& evaluated) const {
    std::vector<Real> acc(3 * J_ * W_, Real(work_));
    Tmp F(prec_), R(prec_), D(prec_), Dinv(prec_), base(prec_), term(prec_), R2(prec_);
    std::vector<std::pair<int, int>> range(J_);

    const DimNodes& A = nodes_[0];
    auto inner = [&](mpfr_srcptr f, mpfr_srcptr r, double lf, double lr, double ld,
                     unsigned char par) {
      // D already in D.v; decide the useful n-range for each power.
      double lR = lr - ld;
      bool any = false;
      for (unsigned j = 0; j < J_; ++j) {
        double lb = lf - sd_[j] * ld;
        int first = -1, last = -1;
        range[j] = {1, 0};
        for (unsigned m = 0; m < W_; ++m) {
          double v = lb + (pb_.n_begin + m) * lR;
          if (v >= thr_[j][m]) {
            if (first < 0) first = static_cast<int>(m);
            last = static_cast<int>(m);
          }
        }
        if (first >= 0) {
          range[j] = {first, last};
          any = true;
        }
      }
      if (!any) return;
      ++evaluated;
      inv_power(Dinv.v, D.v, pb_.powers[0]);
      mpfr_mul(Dinv.v, Dinv.v, f, MPFR_RNDN);
      mpfr_div(R.v, r, D.v, MPFR_RNDN);
      for (unsigned j = 0; j < J_; ++j) {
        auto [first, last] = range[j];
        if (first > last) continue;
        if (shift_[j] == 0)
          mpfr_set(base.v, Dinv.v, MPFR_RNDN);
        else {
          mpfr_pow_si(base.v, D.v, -shift_[j], MPFR_RNDN);
          mpfr_mul(base.v, base.v, Dinv.v, MPFR_RNDN);
        }
        mpfr_pow_ui(term.v, R.v, pb_.n_begin + first, MPFR_RNDN);
        mpfr_mul(term.v, term.v, base.v, MPFR_RNDN);
        for (int m = first; m <= last; ++m) {
          if (m > first) mpfr_mul(term.v, term.v, R.v, MPFR_RNDN);
          std::size_t idx = j * W_ + m;
          mpfr_add(acc[idx].get(), acc[idx].get(), term.v, MPFR_RNDN);
          if (par & 1) mpfr_add(acc[J_ * W_ + idx].get(), acc[J_ * W_ + idx].get(), term.v, MPFR_RNDN);
          if (par & 2)
            mpfr_add(acc[2 * J_ * W_ + idx].get(), acc[2 * J_ * W_ + idx].get(), term.v, MPFR_RNDN);
        }
      }
    };

    switch (pb_.kernel) {
      case Kernel::linear: {
        mpfr_mul_q(D.v, A.x[i].get(), pb_.c.get_mpq_t(), MPFR_RNDN);
        mpfr_add_ui(D.v, D.v, 1, MPFR_RNDN);
        double ld = std::log1p(cd_ * std::exp(A.lx[i]));
        inner(A.fac[i].get(), A.r[i].get(), A.lfac[i], A.lr[i], ld, A.parity[i]);
        break;
      }
      case Kernel::zeta2: {
        const DimNodes& B = nodes_[1];
        for (std::size_t j = 0; j < B.size(); ++j) {
          mpfr_mul(D.v, A.x[i].get(), B.omx[j].get(), MPFR_RNDN);
          mpfr_add(D.v, D.v, A.omx[i].get(), MPFR_RNDN);
          double ld = logaddexp(A.lomx[i], A.lx[i] + B.lomx[j]);
          mpfr_mul(F.v, A.fac[i].get(), B.fac[j].get(), MPFR_RNDN);
          mpfr_mul(R2.v, A.r[i].get(), B.r[j].get(), MPFR_RNDN);
          inner(F.v, R2.v, A.lfac[i] + B.lfac[j], A.lr[i] + B.lr[j], ld,
                A.parity[i] & B.parity[j]);
        }
        break;
      }
      case Kernel::zeta3:
        break;  // handled by nested_zeta3
    }
    return acc;
  }

 private:
  bool may_contribute(double lf, double lr, double ld) const {
    double lR = lr - ld;
    for (unsigned j = 0; j < J_; ++j) {
      double lb = lf - sd_[j] * ld;
      for (unsigned m = 0; m < W_; ++m)
        if (lb + (pb_.n_begin + m) * lR >= thr_[j][m]) return true;
    }
    return false;
  }

  const MomentProblem& pb_;
  int work_;
  mpfr_prec_t prec_;
  const std::vector<std::vector<double>>& thr_;
  unsigned dim_ = 0, J_ = 0, W_ = 0;
  std::vector<DimNodes> nodes_;
  std::vector<long> shift_;
  std::vector<double> sd_;
  double cd_ = 0;
};


// Unit-weight (no h) tanh-sinh nodes at t = i 2^-top, |t| <= 9, shared by
// every ladder of one moment problem.
struct NodeTable {
  int top = 0;
  long imax = 0;
  std::vector<Abscissa> nodes;

  NodeTable(int top_level, int work) : top(top_level), imax(9L << top_level) {
    nodes.reserve(2 * imax + 1);
    for (long i = -imax; i <= imax; ++i) {
      Abscissa a = abscissa(i, top, work);
      mpfr_mul_2si(a.weight.get(), a.weight.get(), top, MPFR_RNDN);
      a.lw += top * 0.6931471805599453;
      nodes.push_back(std::move(a));
    }
  }
  const Abscissa& at(long i) const { return nodes[static_cast<std::size_t>(i + imax)]; }
};

// Table nodes with the factor x^p (1-x)^q folded into the weight.
struct Decorated {
  std::vector<Real> fac, r;  // indexed like NodeTable::nodes

  Decorated(const NodeTable& tab, const BigRational& p, const BigRational& q, int work) {
    Real pr(p, work), qr(q, work);
    for (auto& a : tab.nodes) {
      Real f = a.weight;
      if (!a.x.is_zero() && !a.omx.is_zero()) {
        if (p != 0) f *= pow(a.x, pr);
        if (q != 0) f *= pow(a.omx, qr);
      } else {
        f = Real(work);
      }
      fac.push_back(std::move(f));
      r.push_back(a.x * a.omx);
    }
  }
};

struct LadderOut {
  std::vector<Real> value, error;
  int level = 0;
  bool ok = false;
  long long nodes = 0;
};

// Tanh-sinh for K integrals at once on the shared table. Each level only
// adds the nodes new to its grid, so no abscissa is summed twice; each side
// walks outward until three consecutive nodes beyond |t| = 1 are negligible
// for every integral. eval(i, c) writes the unit-weight contributions of
// node i; contributions must be nonnegative.
template <class Eval>
LadderOut ladder(const NodeTable& tab, std::size_t K, Eval&& eval, int digits, int work, int lo, int hi,
                 unsigned threads = 1) {
  hi = std::min(hi, tab.top);
  lo = std::min(lo, hi);
  const double cut = -(work + 3) * kLn10;
  std::vector<Real> T(K, Real(work)), c(K, Real(work));
  std::vector<std::vector<Real>> hist;  // scaled sums of the last levels
  LadderOut out;
  long ext[2] = {0, 0};

  auto add = [&](const std::vector<Real>& v) {
    for (std::size_t k = 0; k < K; ++k) mpfr_add(T[k].get(), T[k].get(), v[k].get(), MPFR_RNDN);
  };
  auto negligible = [&](const std::vector<Real>& v) {
    for (std::size_t k = 0; k < K; ++k) {
      if (v[k].is_zero()) continue;
      if (T[k].is_zero() || v[k].log_abs() - T[k].log_abs() >= cut) return false;
    }
    return true;
  };
  auto usable = [&](long i) {
    const Abscissa& a = tab.at(i);
    return !a.x.is_zero() && !a.omx.is_zero();
  };
  // Walks one side from index `from` in steps of `step`.
  auto walk = [&](int side, long from, long step) {
    int small = 0;
    for (long a = from; a <= tab.imax; a += step) {
      long i = side * a;
      if (!usable(i)) break;
      eval(i, c);
      ++out.nodes;
      bool far = std::ldexp(static_cast<double>(a), -tab.top) > 1.0;
      bool tiny = negligible(c);
      add(c);
      ext[side > 0] = a;
      small = (far && tiny) ? small + 1 : 0;
      if (small >= 3) break;
    }
  };

  for (int level = lo; level <= hi; ++level) {
    const long step = 1L << (tab.top - level);
    if (level == lo) {
      eval(0, c);
      ++out.nodes;
      add(c);
      for (int side : {1, -1}) walk(side, step, step);
    } else {
      for (int side : {1, -1}) {
        std::vector<long> todo;
        for (long a = step; a <= ext[side > 0]; a += 2 * step) todo.push_back(side * a);
        std::vector<std::vector<Real>> part(todo.size());
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
          std::vector<Real> local(K, Real(work));
          for (std::size_t t; (t = next.fetch_add(1)) < todo.size();) {
            if (usable(todo[t])) {
              eval(todo[t], local);
              part[t] = local;
            }
          }
        };
        unsigned nt = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(todo.size())));
        if (nt == 1) {
          worker();
        } else {
          std::vector<std::thread> pool;
          for (unsigned t = 0; t < nt; ++t) pool.emplace_back(worker);
          for (auto& th : pool) th.join();
        }
        for (auto& p : part)
          if (!p.empty()) {
            add(p);
            ++out.nodes;
          }
        walk(side, ext[side > 0] + step, step);
      }
    }
    std::vector<Real> S(K, Real(work));
    for (std::size_t k = 0; k < K; ++k) mpfr_mul_2si(S[k].get(), T[k].get(), -level, MPFR_RNDN);
    hist.push_back(std::move(S));
    if (hist.size() > 3) hist.erase(hist.begin());
    out.level = level;
    if (hist.size() < 3) continue;
    out.value = hist[2];
    out.error.assign(K, Real(work));
    bool all = true;
    for (std::size_t k = 0; k < K; ++k) {
      out.error[k] = estimate_error(hist[2][k], hist[1][k], hist[0][k], work);
      QuadratureResult r{hist[2][k], out.error[k], level};
      if (!converged(r, digits)) all = false;
    }
    if (all) {
      out.ok = true;
      return out;
    }
  }
  if (out.value.empty()) {
    out.value = hist.back();
    out.error = hist.back();
  }
  return out;
}

// The zeta3 kernel D = 1 - z + xyz = (1-z) + wz sees x and y only through
// w = xy. With y = w/x and x = w + (1-w)t,
//
//   M(s,n) = int_0^1 dw X_n(w) Z_{s,n}(w),
//   X_n(w) = int_0^1 dt (1-w) x^(p1-1) (1-x)^q1 y^p2 (1-y)^q2 (x(1-x)y(1-y))^n,
//   Z_{s,n}(w) = int_0^1 dz z^p3 (1-z)^q3 D^-s (z(1-z)/D)^n,
//
// so the cost is that of a two-dimensional rule rather than a cube.
// Here 1-x = (1-w)(1-t), 1-y = (1-w)t/x and x(1-x)y(1-y) = w(1-w)^2 t(1-t)/x.
MomentResult nested_zeta3(const MomentProblem& pb, int digits, int work, int lo, int hi,
                          unsigned threads) {
  const unsigned J = pb.powers.size(), W = pb.n_end - pb.n_begin;
  const mpfr_prec_t prec = bits_for_digits(work);
  const auto& [p1, q1] = pb.exponents[0];
  const auto& [p2, q2] = pb.exponents[1];
  const auto& [p3, q3] = pb.exponents[2];
  std::vector<long> shift;
  for (auto& s : pb.powers) {
    BigRational diff = s - pb.powers[0];
    if (diff.get_den() != 1) throw UsageError("moment powers must differ by integers");
    shift.push_back(diff.get_num().get_si());
  }
  const BigRational gamma = p1 - 1 - p2 - q2;
  const BigRational wpow = BigRational(1) + q1 + q2;
  const Real p2r(p2, work), wpowr(wpow, work);

  NodeTable tab(hi, work);
  Decorated dt(tab, q2, q1, work), dz(tab, p3, q3, work), dlow(tab, q3, 0, work);
  const int inner_lo = std::min(4, hi);
  std::atomic<long long> nodes{0};
  // Outer nodes whose inner rules stopped short; acceptable only if their
  // contribution turns out negligible.
  std::mutex failed_mu;
  std::vector<std::vector<Real>> failed;

  auto eval_w = [&](long iw, std::vector<Real>& contrib) {
    const Abscissa& aw = tab.at(iw);
    const Real& w = aw.x;
    const Real& omw = aw.omx;
    Tmp x(prec), omx(prec), xg(prec), R(prec), term(prec), D(prec), base(prec), Dinv(prec), wom2(prec);
    mpfr_mul(wom2.v, omw.get(), omw.get(), MPFR_RNDN);
    mpfr_mul(wom2.v, wom2.v, w.get(), MPFR_RNDN);

    auto eval_t = [&](long it, std::vector<Real>& c) {
      const Abscissa& a = tab.at(it);
      const std::size_t k = static_cast<std::size_t>(it + tab.imax);
      mpfr_fma(x.v, omw.get(), a.x.get(), w.get(), MPFR_RNDN);
      inv_power(xg.v, x.v, -gamma);
      mpfr_mul(base.v, xg.v, dt.fac[k].get(), MPFR_RNDN);
      mpfr_mul(R.v, wom2.v, dt.r[k].get(), MPFR_RNDN);
      mpfr_div(R.v, R.v, x.v, MPFR_RNDN);
      mpfr_pow_ui(term.v, R.v, pb.n_begin, MPFR_RNDN);
      mpfr_mul(term.v, term.v, base.v, MPFR_RNDN);
      for (unsigned m = 0; m < W; ++m) {
        if (m) mpfr_mul(term.v, term.v, R.v, MPFR_RNDN);
        mpfr_set(c[m].get(), term.v, MPFR_RNDN);
      }
    };
    auto eval_z = [&](long iz, std::vector<Real>& c) {
      const Abscissa& a = tab.at(iz);
      const std::size_t k = static_cast<std::size_t>(iz + tab.imax);
      mpfr_fma(D.v, w.get(), a.x.get(), a.omx.get(), MPFR_RNDN);
      inv_power(Dinv.v, D.v, pb.powers[0]);
      mpfr_mul(Dinv.v, Dinv.v, dz.fac[k].get(), MPFR_RNDN);
      mpfr_div(R.v, dz.r[k].get(), D.v, MPFR_RNDN);
      for (unsigned j = 0; j < J; ++j) {
        if (shift[j] == 0) {
          mpfr_set(base.v, Dinv.v, MPFR_RNDN);
        } else {
          mpfr_pow_si(base.v, D.v, -shift[j], MPFR_RNDN);
          mpfr_mul(base.v, base.v, Dinv.v, MPFR_RNDN);
        }
        mpfr_pow_ui(term.v, R.v, pb.n_begin, MPFR_RNDN);
        mpfr_mul(term.v, term.v, base.v, MPFR_RNDN);
        for (unsigned m = 0; m < W; ++m) {
          if (m) mpfr_mul(term.v, term.v, R.v, MPFR_RNDN);
          mpfr_set(c[j * W + m].get(), term.v, MPFR_RNDN);
        }
      }
    };

    // Below w = 1/4 the inner integrands vary on the scale w near an
    // endpoint; graded maps keep them smooth. X uses x = w^(1-u). Z splits
    // s = 1-z at w: s = w sigma below and s = w^(1-u) above.
    const bool graded = aw.lx < -1.3862943611198906;
    Real L(work), negL(work), cw(work);
    std::vector<Real> zw;  // w^(1+q3-s_j) for the lower piece of Z
    if (graded) {
      mpfr_log(L.get(), w.get(), MPFR_RNDN);
      negL = -L;
      for (unsigned j = 0; j < J; ++j) zw.push_back(exp(L * Real(BigRational(1) + q3 - pb.powers[j], work)));
    }
    const Real p1r(p1, work), p2d(p2 - p1, work), q3s(BigRational(1) + q3 - pb.powers[0], work);
    Tmp e(prec), omy(prec), wu(prec), Dp(prec), s(prec), z(prec);

    auto eval_xlog = [&](long iu, std::vector<Real>& c) {
      const Abscissa& a = tab.at(iu);
      mpfr_mul(e.v, a.omx.get(), L.get(), MPFR_RNDN);
      mpfr_expm1(omx.v, e.v, MPFR_RNDN);
      mpfr_neg(omx.v, omx.v, MPFR_RNDN);
      mpfr_mul(e.v, a.x.get(), L.get(), MPFR_RNDN);
      mpfr_expm1(omy.v, e.v, MPFR_RNDN);
      mpfr_neg(omy.v, omy.v, MPFR_RNDN);
      mpfr_mul(base.v, a.weight.get(), negL.get(), MPFR_RNDN);
      if (p1 != 0 || p2 != 0) {  // x^p1 y^p2 = exp(L (p1 + u (p2 - p1)))
        mpfr_fma(e.v, a.x.get(), p2d.get(), p1r.get(), MPFR_RNDN);
        mpfr_mul(e.v, e.v, L.get(), MPFR_RNDN);
        mpfr_exp(e.v, e.v, MPFR_RNDN);
        mpfr_mul(base.v, base.v, e.v, MPFR_RNDN);
      }
      if (q1 != 0) {
        inv_power(e.v, omx.v, -q1);
        mpfr_mul(base.v, base.v, e.v, MPFR_RNDN);
      }
      if (q2 != 0) {
        inv_power(e.v, omy.v, -q2);
        mpfr_mul(base.v, base.v, e.v, MPFR_RNDN);
      }
      mpfr_mul(R.v, omx.v, omy.v, MPFR_RNDN);
      mpfr_mul(R.v, R.v, w.get(), MPFR_RNDN);
      mpfr_pow_ui(term.v, R.v, pb.n_begin, MPFR_RNDN);
      mpfr_mul(term.v, term.v, base.v, MPFR_RNDN);
      for (unsigned m = 0; m < W; ++m) {
        if (m) mpfr_mul(term.v, term.v, R.v, MPFR_RNDN);
        mpfr_set(c[m].get(), term.v, MPFR_RNDN);
      }
    };
    // Shared tail of both Z pieces: base(s_0) in Dinv, the kernel factor
    // whose -shift_j power adjusts it in Dp, and R.
    auto z_terms = [&](std::vector<Real>& c, bool lower) {
      for (unsigned j = 0; j < J; ++j) {
        if (shift[j] == 0) {
          mpfr_set(base.v, Dinv.v, MPFR_RNDN);
        } else {
          mpfr_pow_si(base.v, Dp.v, -shift[j], MPFR_RNDN);
          mpfr_mul(base.v, base.v, Dinv.v, MPFR_RNDN);
          if (lower) {
            mpfr_div(base.v, base.v, zw[0].get(), MPFR_RNDN);
            mpfr_mul(base.v, base.v, zw[j].get(), MPFR_RNDN);
          }
        }
        mpfr_pow_ui(term.v, R.v, pb.n_begin, MPFR_RNDN);
        mpfr_mul(term.v, term.v, base.v, MPFR_RNDN);
        for (unsigned m = 0; m < W; ++m) {
          if (m) mpfr_mul(term.v, term.v, R.v, MPFR_RNDN);
          mpfr_set(c[j * W + m].get(), term.v, MPFR_RNDN);
        }
      }
    };
    auto eval_zlow = [&](long is, std::vector<Real>& c) {
      const Abscissa& a = tab.at(is);
      const std::size_t k = static_cast<std::size_t>(is + tab.imax);
      // z = 1 - w sigma, D = w (1 + sigma (1-w))
      mpfr_fma(z.v, w.get(), a.omx.get(), omw.get(), MPFR_RNDN);
      mpfr_fma(Dp.v, a.x.get(), omw.get(), Real(1L, work).get(), MPFR_RNDN);
      inv_power(Dinv.v, Dp.v, pb.powers[0]);
      mpfr_mul(Dinv.v, Dinv.v, dlow.fac[k].get(), MPFR_RNDN);
      mpfr_mul(Dinv.v, Dinv.v, zw[0].get(), MPFR_RNDN);
      if (p3 != 0) {
        inv_power(e.v, z.v, -p3);
        mpfr_mul(Dinv.v, Dinv.v, e.v, MPFR_RNDN);
      }
      mpfr_mul(R.v, z.v, a.x.get(), MPFR_RNDN);
      mpfr_div(R.v, R.v, Dp.v, MPFR_RNDN);
      z_terms(c, true);
    };
    auto eval_zhigh = [&](long iu, std::vector<Real>& c) {
      const Abscissa& a = tab.at(iu);
      // s = w^(1-u), z = 1 - s, D = s (1 + w^u z)
      mpfr_mul(e.v, a.omx.get(), L.get(), MPFR_RNDN);
      mpfr_expm1(z.v, e.v, MPFR_RNDN);
      mpfr_neg(z.v, z.v, MPFR_RNDN);
      mpfr_mul(wu.v, a.x.get(), L.get(), MPFR_RNDN);
      mpfr_exp(wu.v, wu.v, MPFR_RNDN);
      mpfr_fma(Dp.v, wu.v, z.v, Real(1L, work).get(), MPFR_RNDN);
      inv_power(Dinv.v, Dp.v, pb.powers[0]);
      mpfr_mul(e.v, e.v, q3s.get(), MPFR_RNDN);  // s^(1+q3-s_0)
      mpfr_exp(e.v, e.v, MPFR_RNDN);
      mpfr_mul(Dinv.v, Dinv.v, e.v, MPFR_RNDN);
      mpfr_mul(Dinv.v, Dinv.v, a.weight.get(), MPFR_RNDN);
      mpfr_mul(Dinv.v, Dinv.v, negL.get(), MPFR_RNDN);
      if (p3 != 0) {
        inv_power(e.v, z.v, -p3);
        mpfr_mul(Dinv.v, Dinv.v, e.v, MPFR_RNDN);
      }
      mpfr_div(R.v, z.v, Dp.v, MPFR_RNDN);
      // The extra kernel powers: D^-k = s^-k (1 + w^u z)^-k.
      if (J > 1) {
        mpfr_mul(s.v, a.omx.get(), L.get(), MPFR_RNDN);
        mpfr_exp(s.v, s.v, MPFR_RNDN);
        mpfr_mul(Dp.v, Dp.v, s.v, MPFR_RNDN);
      }
      z_terms(c, false);
    };

    LadderOut X, Z;
    if (graded) {
      X = ladder(tab, W, eval_xlog, digits, work, inner_lo, hi);
      Z = ladder(tab, J * W, eval_zlow, digits, work, inner_lo, hi);
      LadderOut Zh = ladder(tab, J * W, eval_zhigh, digits, work, inner_lo, hi);
      for (std::size_t k = 0; k < Z.value.size(); ++k) Z.value[k] += Zh.value[k];
      Z.ok = Z.ok && Zh.ok;
      Z.nodes += Zh.nodes;
      cw = aw.weight;
    } else {
      X = ladder(tab, W, eval_t, digits, work, inner_lo, hi);
      Z = ladder(tab, J * W, eval_z, digits, work, inner_lo, hi);
      cw = aw.weight;
      if (wpow != 0) cw *= pow(omw, wpowr);
      if (p2 != 0) cw *= pow(w, p2r);
    }
    nodes += X.nodes + Z.nodes;

    for (unsigned j = 0; j < J; ++j)
      for (unsigned m = 0; m < W; ++m) {
        Real& v = contrib[j * W + m];
        mpfr_mul(v.get(), X.value[m].get(), Z.value[j * W + m].get(), MPFR_RNDN);
        mpfr_mul(v.get(), v.get(), cw.get(), MPFR_RNDN);
      }
    if (!X.ok || !Z.ok) {
      std::lock_guard<std::mutex> lock(failed_mu);
      failed.push_back(contrib);
    }
  };

  LadderOut outer = ladder(tab, J * W, eval_w, digits, work, lo, hi, threads);
  MomentResult res;
  res.nodes_evaluated = nodes;
  res.values.assign(J, std::vector<QuadratureResult>(W, QuadratureResult{Real(digits), Real(digits), 0}));
  for (unsigned j = 0; j < J; ++j)
    for (unsigned m = 0; m < W; ++m)
      res.values[j][m] = QuadratureResult{outer.value[j * W + m].with_digits(digits),
                                          outer.error[j * W + m].with_digits(digits), outer.level};
  bool inner_ok = true;
  for (auto& c : failed)
    for (std::size_t k = 0; k < c.size(); ++k)
      if (!c[k].is_zero() && c[k].log_abs() - outer.value[k].log_abs() > -(digits + 2) * kLn10) inner_ok = false;
  if (!outer.ok || !inner_ok) {
    std::vector<QuadratureResult> flat;
    for (auto& row : res.values)
      for (auto& r : row) flat.push_back(r);
    throw ConvergenceError(std::string(outer.ok ? "inner" : "outer") +
                               " tanh-sinh did not converge by level " + std::to_string(hi),
                           std::move(flat));
  }
  return res;
}

}  // namespace

MomentResult tensor_moments(const MomentProblem& pb, int digits, const QuadratureOptions& opt) {
  const unsigned dim = kernel_dimension(pb.kernel);
  if (pb.exponents.size() != dim) throw UsageError("exponent count does not match kernel dimension");
  if (pb.powers.empty() || pb.n_end <= pb.n_begin) throw UsageError("empty moment problem");
  for (auto& [p, q] : pb.exponents)
    if (p <= -1 || q <= -1) throw DomainError("exponent <= -1 is not integrable");
  if (pb.kernel == Kernel::linear && pb.c <= -1)
    throw DomainError("linear kernel 1+cx needs c > -1");

  const int work = digits + opt.guard_digits;
  const int hi = opt.max_level ? opt.max_level : default_max_level(dim);
  const int lo = std::min(hi, opt.min_level ? opt.min_level : default_min_level(dim));
  if (pb.kernel == Kernel::zeta3) {
    const int zhi = opt.max_level ? opt.max_level : 10;
    return nested_zeta3(pb, digits, work, std::min(zhi, opt.min_level ? opt.min_level : 4), zhi,
                        opt.threads);
  }
  const unsigned J = pb.powers.size(), W = pb.n_end - pb.n_begin;

  std::vector<std::vector<double>> thr(J, std::vector<double>(W, kNegInf));
  MomentResult out;
  out.values.assign(J, std::vector<QuadratureResult>(W, QuadratureResult{Real(digits), Real(digits), 0}));

  for (int level = lo; level <= hi; ++level) {
    MomentPass pass(pb, level, work, thr);
    const std::size_t outer = pass.outer_size();
    std::vector<std::vector<Real>> partial(outer);
    std::atomic<std::size_t> next{0};
    std::atomic<long long> evaluated{0};
    auto worker = [&] {
      long long local = 0;
      for (std::size_t i; (i = next.fetch_add(1)) < outer;) partial[i] = pass.run_outer(i, local);
      evaluated += local;
    };
    unsigned nt = std::max(1u, std::min<unsigned>(opt.threads, static_cast<unsigned>(outer)));
    if (nt == 1 || dim == 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (unsigned t = 0; t < nt; ++t) pool.emplace_back(worker);
      for (auto& th : pool) th.join();
    }
    out.nodes_evaluated += evaluated;

    std::vector<Real> sum(3 * J * W, Real(work));
    for (auto& part : partial)
      for (std::size_t idx = 0; idx < sum.size(); ++idx) sum[idx] += part[idx];

    bool all = true;
    // Next level has 2^dim times as many nodes.
    const double lognodes = std::log(static_cast<double>(pass.total_nodes())) + dim * 0.6931471805599453;
    for (unsigned j = 0; j < J; ++j) {
      for (unsigned m = 0; m < W; ++m) {
        std::size_t idx = j * W + m;
        Real s0 = sum[idx];
        Real s1 = sum[J * W + idx] * static_cast<long>(1L << dim);
        Real s2 = sum[2 * J * W + idx] * static_cast<long>(1L << (2 * dim));
        Real err = estimate_error(s0, s1, s2, work);
        out.values[j][m] = QuadratureResult{s0.with_digits(digits), err.with_digits(digits), level};
        if (!converged(out.values[j][m], digits)) all = false;
        thr[j][m] = s0.log_abs() - (work + 2) * kLn10 - lognodes;
      }
    }
    if (all) return out;
  }
  std::vector<QuadratureResult> flat;
  for (auto& row : out.values)
    for (auto& r : row) flat.push_back(r);
  throw ConvergenceError("tensor tanh-sinh did not converge by level " + std::to_string(hi),
                         std::move(flat));
}

}  // namespace apery
