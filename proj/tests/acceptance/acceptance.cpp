// Acceptance run: one PASS/FAIL line per criterion.
//
//   apery_acceptance [--allow-fail N]... [criterion numbers...]
//
// With no numbers every criterion runs. The exit status is nonzero when a
// criterion fails that was not allowed to.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "../common/classical.hpp"
#include "apery/certificate.hpp"
#include "apery/errors.hpp"
#include "apery/family.hpp"
#include "apery/lattice.hpp"
#include "apery/primes.hpp"
#include "apery/serialize.hpp"
#include "cache.hpp"
#include "commands.hpp"

using namespace apery;
using namespace apery::testing;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string sig(const Real& x, int d = 12) { return x.str(d); }

BigRational Q(long p, long q = 1) { return BigRational(p, q); }

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("apery_acceptance_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

// Runs the command-line certify and loads the written certificate.
std::optional<IrrationalityCertificate> cli_certify(const std::string& kind, const std::string& params,
                                                    unsigned terms, int prec, std::string& log) {
  fs::path dir = scratch("certify");
  fs::path out = dir / "cert.json";
  std::ostringstream o, e;
  int code = cli::run({"apery", "certify", kind, params, "--terms", std::to_string(terms), "--prec",
                       std::to_string(prec), "--out", out.string()},
                      o, e);
  log = e.str();
  if (code != 0) return std::nullopt;
  return certificate_from_json(cli::read_file(out));
}

// ---------------------------------------------------------------------------

void criterion1(Outcome& r) {
  const int d = 60;
  Real s2 = sqrt(Real(2L, d)), s5 = sqrt(Real(5L, d));
  struct Case {
    const char* name;
    Real alpha;
    long nu;
    const char *delta, *mu;
  } cases[] = {{"log 2", s2 * 2L + 3L, 1, "0.276082871862633587", "4.622100832454231334"},
               {"zeta(2)", Real(Q(11, 2), d) + s5 * Q(5, 2), 2, "0.09215925473323", "11.8507821910523426959528"},
               {"zeta(3)", s2 * 12L + 17L, 3, "0.080529431189061685186", "13.41782023335376578458"}};
  for (auto& c : cases) {
    auto m = delta_and_measure(c.alpha, c.alpha, Real(c.nu, d));
    r.detail << " " << c.name << ": delta " << sig(m.delta) << " mu " << (m.measure ? sig(*m.measure) : "none")
             << ";";
    r.require(agree_to(m.delta, Real::parse(c.delta, d), 12), std::string(c.name) + " delta");
    r.require(m.measure && agree_to(*m.measure, Real::parse(c.mu, d), 12), std::string(c.name) + " mu");
  }
}

void criterion2(Outcome& r) {
  const char* table[] = {"0.06519779945532069058275450006", "0.0037472701163022929758881663",
                         "0.000247728866269394110526059",  "0.00001762713127202699137347",
                         "0.0000013124634659314676853",    "0.000000100776323486001254",
                         "0.00000000791212964371946",      "0.0000000006317437711206",
                         "5.1111100706e-11",               "4.17922459e-12"};
  auto f = IntegralFamily::parse("zeta2", "0,0,0,0");
  auto values = family_integrals(f, 1, 11, 30);
  double worst = 100;
  for (unsigned n = 1; n <= 10; ++n) {
    Real ref = Real::parse(table[n - 1], 30);
    worst = std::min(worst, agreeing_digits(values[n - 1].value, ref));
    r.require(agree_to(values[n - 1].value, ref, 10), "I(" + std::to_string(n) + ")");
  }
  r.detail << " 10 values, fewest agreeing digits " << worst << ";";
}

void criterion3(Outcome& r) {
  struct Case {
    const char *kind, *params;
    PolyRecurrence expected;
  } cases[] = {{"log1", "0,0,1", log2_rec()},
               {"zeta2", "0,0,0,0", zeta2_rec()},
               {"zeta3k", "0,0,0,0,0", zeta3_rec()}};
  for (auto& c : cases) {
    auto t0 = std::chrono::steady_clock::now();
    auto f = IntegralFamily::parse(c.kind, c.params);
    auto q = family_integrals(f, 2, 42, 100);  // 40 values
    std::vector<Real> v;
    for (auto& x : q) v.push_back(x.value);
    auto g = guess_recurrence(v, 2, 4, 100, 2);
    bool ok = g && *g == c.expected;
    r.detail << " " << f.canonical() << ": " << (g ? g->str() : "none") << " (" << seconds_since(t0) << " s);";
    r.require(ok, f.canonical());
  }
}

void criterion4(Outcome& r) {
  auto t0 = std::chrono::steady_clock::now();
  auto z2 = classical(1, 2000);
  auto z3 = classical(2, 2000);
  double t = seconds_since(t0);
  std::vector<BigInt> b2 = {1, 3, 19, 147}, b3 = {1, 5, 73, 1445};
  for (unsigned n = 0; n < 4; ++n) {
    r.require(abs(z2.b[n]) == b2[n], "zeta(2) b_" + std::to_string(n));
    r.require(abs(z3.b[n]) == b3[n], "zeta(3) b_" + std::to_string(n));
  }
  r.require(z2.a[2] == Q(125, 4), "a_2");
  r.require(z2.a[3] == Q(-8705, 36), "a_3");
  // I(2) = 19 zeta(2) - 125/4 and I(3) = 8705/36 - 147 zeta(2), as printed.
  r.require(z2.b[2] == 19 && z2.b[3] == -147, "signs of b_2, b_3");
  r.detail << " |b| = 1,3,19,147 and 1,5,73,1445; a_2 = " << z2.a[2] << ", a_3 = " << z2.a[3] << "; 2 x 2000 terms in "
           << t << " s;";
  r.require(t < 1.0, "2000 terms in under 1 s");
}

void criterion5(Outcome& r) {
  const unsigned last = 1999;  // 2000 terms
  auto z2 = classical(1, last);
  Real C = z2.constant(6400);  // resolves |C - a_n/b_n| ~ (alpha beta)^-n down to n = 2000
  Real d = empirical_delta(C, z2.a, z2.b, lcm_powers(last, 2));
  r.detail << " empirical delta " << d.str(12) << " (target 0.0921592546 +- 1e-6);";
  r.require(std::abs(d.to_double() - 0.0921592546) <= 1e-6, "empirical delta");

  // Ratio I(n)/I(n-1) = L (1 + c1/n + ...): Richardson extrapolation of order 4.
  auto I = [&](unsigned n) { return Real(z2.b[n], 6400) * C - Real(z2.a[n], 6400); };
  const unsigned N = last - 4;
  const int m = 4;
  Real L(0L, 80);
  static const long fact[] = {1, 1, 2, 6, 24};
  for (int j = 0; j <= m; ++j) {
    Real ratio = (I(N + j) / I(N + j - 1)).with_digits(80);
    Real w = pow(Real(static_cast<long>(N + j), 80), static_cast<long>(m)) / (fact[j] * fact[m - j]);
    L += ((m + j) % 2 ? -w : w) * ratio;
  }
  Real raw = (I(last) / I(last - 1)).with_digits(30);
  r.detail << " ratio at n = 2000 " << raw.str(10) << ", extrapolated limit " << L.str(12)
           << " (target 0.09016994 +- 1e-6);";
  r.require(abs(L - Real::parse("0.09016994", 80)) < Real::parse("1e-6", 80), "ratio limit");

  // The tail-fit cross-check on all three classical cases (reported, same estimator).
  const double exact[] = {0.276082871862633587, 0.09215925473323, 0.080529431189061685186};
  for (int w = 0; w < 3; ++w) {
    auto c = classical(w, last);
    Real e = empirical_delta(c.constant(6400), c.a, c.b, lcm_powers(last, c.k));
    r.detail << " " << c.name << " cross-check " << e.str(8) << " vs " << exact[w]
             << (std::abs(e.to_double() - exact[w]) <= 1e-4 ? " within" : " outside") << " 1e-4;";
  }
}

void criterion6(Outcome& r) {
  auto t0 = std::chrono::steady_clock::now();
  for (int w = 0; w < 3; ++w) {
    auto c = classical(w, 2000);
    auto E = lcm_powers(2000, c.k);
    bool integral = true;
    for (unsigned n = 0; n <= 2000; ++n)
      integral &= BigRational(E[n] * c.a[n]).get_den() == 1 && BigRational(E[n] * c.b[n]).get_den() == 1;
    r.require(integral, std::string(c.name) + " lcm^k clears a_n, b_n");
    // Recurrence residual exactness on the stored sequences.
    const PolyRecurrence rec = w == 0 ? log2_rec() : w == 1 ? zeta2_rec() : zeta3_rec();
    bool exact = true;
    for (long n = 0; n + 2 <= 2000; ++n) exact &= rec.residual(c.a, n) == 0 && rec.residual(c.b, n) == 0;
    r.require(exact, std::string(c.name) + " residuals");
    auto conj = conjecture_integerating(c.a, c.b);
    r.detail << " " << c.name << ": " << conj.str() << ";";
    r.require(conj.lcm_power == c.k && conj.pp_terms.empty(), std::string(c.name) + " conjecture");
  }
  r.detail << " " << seconds_since(t0) << " s;";
}

PpSpec pp(BigRational e1, BigRational e2, BigRational e3, BigRational e4, std::vector<unsigned long> res,
          unsigned long m) {
  PpSpec s;
  s.e1 = e1, s.e2 = e2, s.e3 = e3, s.e4 = e4, s.residues = std::move(res), s.modulus = m;
  return s;
}

void criterion7(Outcome& r) {
  PpSpec lcm = pp(0, 1, 0, 1, {0}, 1);
  BigInt p10 = pp_product(lcm, 10);
  r.detail << " Pp(lcm; 10) = " << p10 << ";";
  r.require(p10 == 21, "Pp(lcm; 10) = 21");
  const unsigned long n = 100000;
  for (auto& s : {lcm, pp(Q(1, 2), 1, 0, 1, {0}, 1), pp(0, 1, 0, 1, {1}, 4)}) {
    Real exact = pp_growth_exact(s, 40);
    double sieve = Real(pp_product(s, n), 30).log_abs() / n;
    r.detail << " " << s.str() << ": exact " << exact.str(10) << " sieve " << sieve << ";";
    r.require(std::abs(exact.to_double() - sieve) < 0.05, s.str());
  }
  r.require(pp_growth_exact(lcm, 40) == Real(1L, 40), "lcm spec gives exactly 1");
}

struct IdCase {
  const char* params;
  std::function<Real(int)> value;  // closed form; empty for the cubic
};

void criterion8(Outcome& r) {
  const int d = 100;
  const unsigned terms = 500;
  std::vector<IdCase> cases = {
      {"0,0,1/2,0", [](int p) { return log2_const(p) * 2L; }},
      {"0,0,1/3,-2/3", [](int p) { return pi(p) * sqrt(Real(3L, p)) * Q(4, 3) - 6L; }},
      {"-3/4,-3/4,-1/4,-3/4", [](int p) { return sqrt(Real(2L, p)) * Q(512, 3) - 240L; }},
      {"-4/5,-4/5,-2/5,-3/5", [](int p) { return sqrt(Real(5L, p)) * Q(2275, 12) - Q(845, 2); }},
      {"-6/7,-6/7,-4/7,-3/7", nullptr}};
  const std::vector<BigInt> cubic = {BigInt("16108505539"), BigInt("-10737789048"), -2757888, 13824};
  for (auto& c : cases) {
    auto t0 = std::chrono::steady_clock::now();
    auto f = IntegralFamily::parse("zeta2", c.params);
    std::string what = f.canonical();
    try {
      auto cert = build_certificate(f, terms, d);
      const auto& id = cert.identification;
      r.detail << " " << what << ": " << (id ? id->str() : "none") << " (" << seconds_since(t0) << " s);";
      if (!id) {
        r.require(false, what + " identified");
        continue;
      }
      if (c.value) {
        Real expect = c.value(d + 40);
        r.require(agree_to(cert.constant_value, expect.with_digits(d), d - 10), what + " constant");
        r.require(agree_to(id->evaluate(d + 40, cert.constant_value), expect, d), what + " form");
      } else {
        r.require(id->kind == Identification::Kind::algebraic && id->polynomial == cubic, what + " cubic");
      }
    } catch (const Error& e) {
      r.require(false, what + ": " + e.what());
    }
  }
  const char* open[] = {"-6/7,-6/7,-4/7,-5/7", "-6/7,-5/7,-3/7,-5/7", "-6/7,-5/7,-2/7,-1/7"};
  int none = 0;
  for (auto* p : open) {
    auto t0 = std::chrono::steady_clock::now();
    auto f = IntegralFamily::parse("zeta2", p);
    try {
      auto cert = build_certificate(f, terms, d);
      none += !cert.identification;
      r.detail << " " << f.canonical() << ": " << (cert.identification ? cert.identification->str() : "none") << " ("
               << seconds_since(t0) << " s);";
    } catch (const Error& e) {
      r.detail << " " << f.canonical() << ": " << e.what() << ";";
    }
  }
  r.require(none >= 3, "three denominator-7 constants unidentified");
}

void criterion9(Outcome& r) {
  std::string log;
  auto t0 = std::chrono::steady_clock::now();
  auto c = cli_certify("zeta3k", "0,0,0,1/2,1/2", 500, 100, log);
  r.detail << " K(0,0,0,1/2,1/2): ";
  if (!c) {
    r.require(false, "certify K(0,0,0,1/2,1/2): " + log);
  } else {
    const auto& id = c->identification;
    r.detail << (id ? id->str() : "none") << " (" << seconds_since(t0) << " s);";
    bool ok = id && id->kind == Identification::Kind::fractional_linear && id->basis == "log(2)";
    if (ok) {
      // (a + b L)/(c + d L) = (-2 + 4L)/(3 - 4L) as polynomials in L.
      const auto& w = id->fractional;
      ok = w[0] * 3 == -2 * w[2] && w[1] * 3 - w[0] * 4 == 4 * w[2] - 2 * w[3] && -4 * w[1] == 4 * w[3];
    }
    r.require(ok, "fractional-linear log 2 witness");
  }
  t0 = std::chrono::steady_clock::now();
  c = cli_certify("zeta3k", "0,0,0,1/3,2/3", 500, 100, log);
  r.detail << " K(0,0,0,1/3,2/3): ";
  if (!c) {
    r.require(false, "certify K(0,0,0,1/3,2/3): " + log);
  } else {
    r.detail << verdict_name(c->verdict) << ", delta " << c->delta.str(6) << ", id "
             << (c->identification ? c->identification->str() : "none") << " (" << seconds_since(t0) << " s);";
    r.require(c->verdict == IrrationalityCertificate::Verdict::irrationality_candidate, "verdict");
    r.require(!c->identification, "identification none");
  }
}

void criterion10(Outcome& r) {
  std::string log;
  auto t0 = std::chrono::steady_clock::now();
  auto c = cli_certify("zeta2", "1/2,0,0,1/2", 500, 100, log);
  if (!c) {
    r.require(false, "certify: " + log);
    return;
  }
  r.detail << " C2(1/2,0,0,1/2): delta " << c->delta.str(8) << ", " << verdict_name(c->verdict) << ", constant "
           << c->constant_value.str(20) << " (2 Catalan = " << (catalan_const(30) * 2L).str(20)
           << "; the integral before the beta normalization is 8 Catalan) ("
           << seconds_since(t0) << " s);";
  r.require(c->delta.sign() < 0, "delta < 0");
  r.require(c->verdict == IrrationalityCertificate::Verdict::approximation_only, "verdict");
}

void criterion11(Outcome& r) {
  auto t0 = std::chrono::steady_clock::now();
  // LLL: same lattice (integral unimodular change of basis) and reduced.
  std::mt19937_64 rng(7);
  int lll_ok = 0, lll_n = 20;
  for (int t = 0; t < lll_n; ++t) {
    std::size_t n = 3 + t % 4;
    IntMatrix b;
    do {
      b.assign(n, std::vector<BigInt>(n));
      for (auto& row : b)
        for (auto& x : row) x = static_cast<long>(rng() % 2001) - 1000;
    } while (integer_rank(b) != n);
    IntMatrix red = lll_reduce(b);
    // Transform T = red * b^-1 via exact Gaussian elimination on [b^T | red^T].
    std::vector<std::vector<BigRational>> m(n, std::vector<BigRational>(2 * n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) m[i][j] = b[j][i], m[i][n + j] = red[j][i];
    for (std::size_t col = 0; col < n; ++col) {
      std::size_t p = col;
      while (m[p][col] == 0) ++p;
      std::swap(m[p], m[col]);
      for (std::size_t i = 0; i < n; ++i) {
        if (i == col || m[i][col] == 0) continue;
        BigRational f = m[i][col] / m[col][col];
        for (std::size_t k = col; k < 2 * n; ++k) m[i][k] -= f * m[col][k];
      }
    }
    bool integral = true;
    std::vector<std::vector<BigRational>> T(n, std::vector<BigRational>(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        T[j][i] = m[i][n + j] / m[i][i];
        integral &= T[j][i].get_den() == 1;
      }
    // det T = +-1 by elimination.
    BigRational det = 1;
    for (std::size_t col = 0; col < n && integral; ++col) {
      std::size_t p = col;
      while (p < n && T[p][col] == 0) ++p;
      if (p == n) {
        det = 0;
        break;
      }
      std::swap(T[p], T[col]);
      det *= T[col][col];
      for (std::size_t i = col + 1; i < n; ++i) {
        BigRational f = T[i][col] / T[col][col];
        for (std::size_t k = col; k < n; ++k) T[i][k] -= f * T[col][k];
      }
    }
    lll_ok += integral && abs(det) == 1;
  }
  r.detail << " LLL lattice preserved " << lll_ok << "/" << lll_n << ";";
  r.require(lll_ok == lll_n, "LLL preservation");

  // Two-precision confirmation: a relation true only to 70 digits is
  // found at the 60-digit search and rejected at 110.
  Real x1 = pi(110);
  Real fake = x1 * 2L + 1L + pow(Real(10L, 110), -70L);
  bool rejected = !integer_relation({Real(1L, 110), x1, fake}, 60, BigInt(10000));
  auto real_rel = integer_relation({log(Real(2L, 110)), log(Real(3L, 110)), log(Real(6L, 110))}, 60, BigInt(10000));
  r.detail << " spurious relation " << (rejected ? "rejected" : "accepted") << ", log 2 + log 3 - log 6 "
           << (real_rel ? "found" : "missed") << ";";
  r.require(rejected && real_rel, "two-precision confirmation");

  // Recurrence residuals on stored sequences (certificate and cache).
  fs::path dir = scratch("cache");
  cli::Cache cache(dir);
  auto f = IntegralFamily::parse("log1", "0,0,1");
  PipelineState st;
  auto cert = build_certificate(f, 500, 60, {}, &st);
  bool residual = true;
  for (long n = 0; n + 2 < static_cast<long>(st.a.size()); ++n)
    residual &= cert.recurrence.residual(st.a, n) == 0 && cert.recurrence.residual(st.b, n) == 0;
  r.require(residual, "recurrence residual on stored sequences");

  // Sieve/digamma agreement at n = 10^5 on a windowed, residue-restricted spec too.
  PpSpec s = pp(Q(1, 3), Q(2, 3), Q(1, 5), 2, {1, 2}, 3);
  double gap = std::abs(pp_growth_exact(s, 30).to_double() - Real(pp_product(s, 100000), 30).log_abs() / 1e5);
  r.detail << " sieve/digamma gap " << gap << " for " << s.str() << ";";
  r.require(gap < 0.05, "sieve/digamma");

  // Cache round trip: bit-exact certificate and state.
  cache.save_state(f, st);
  cache.save_certificate(cert);
  auto st2 = cache.load_state(f);
  auto cert2 = cache.load_certificate(f, 500, 60);
  bool same = st2 && cert2 && state_to_json(*st2) == state_to_json(st) &&
              certificate_to_json(*cert2) == certificate_to_json(cert) && st2->a == st.a && st2->b == st.b;
  if (same)
    for (std::size_t i = 0; i < st.values.size(); ++i) same &= st2->values[i] == st.values[i];
  r.detail << " cache round trip " << (same ? "exact" : "lossy") << "; " << seconds_since(t0) << " s;";
  r.require(same, "cache round trip");
}

}  // namespace

int main(int argc, char** argv) {
  std::map<int, std::pair<const char*, void (*)(Outcome&)>> all = {
      {1, {"classical delta/mu", criterion1}},        {2, {"Zeta2 table", criterion2}},
      {3, {"recurrence recovery", criterion3}},       {4, {"exact sequences", criterion4}},
      {5, {"empirical delta and ratio", criterion5}}, {6, {"integer-ating soundness", criterion6}},
      {7, {"Pp machinery", criterion7}},              {8, {"identification table", criterion8}},
      {9, {"zeta(3) family end to end", criterion9}}, {10, {"negative control", criterion10}},
      {11, {"property suites", criterion11}}};
  std::set<int> run, allowed;
  for (int i = 1; i < argc; ++i) {
    std::string a = argv[i];
    if (a == "--allow-fail" && i + 1 < argc) {
      allowed.insert(std::stoi(argv[++i]));
    } else {
      int k = std::stoi(a);
      if (!all.count(k)) {
        std::cerr << "unknown criterion " << k << "\n";
        return 2;
      }
      run.insert(k);
    }
  }
  if (run.empty())
    for (auto& [k, v] : all) run.insert(k);

  int bad = 0;
  for (int k : run) {
    Outcome r;
    auto t0 = std::chrono::steady_clock::now();
    try {
      all[k].second(r);
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail << " [exception: " << e.what() << "]";
    }
    std::printf("%s %2d %s (%.1f s):%s\n", r.pass ? "PASS" : "FAIL", k, all[k].first, seconds_since(t0),
                r.detail.str().c_str());
    std::fflush(stdout);
    if (!r.pass) {
      if (allowed.count(k))
        std::printf("     %d is allowed to fail\n", k);
      else
        ++bad;
    }
  }
  return bad ? 1 : 0;
}
