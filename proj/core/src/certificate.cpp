#include "apery/certificate.hpp"

#include <algorithm>
#include <cmath>

#include "apery/errors.hpp"

namespace apery {

namespace {

unsigned window_size(const PipelineOptions& o) {
  return (o.max_order + 1) * (o.max_degree + 1) + o.max_order + 10;
}

BigInt pow10(unsigned e) {
  BigInt z;
  mpz_ui_pow_ui(z.get_mpz_t(), 10, e);
  return z;
}

// Worst relative residual sum_j p_j(n) v_{n+j} / sum_j |p_j(n) v_{n+j}|.
Real worst_relative_residual(const PolyRecurrence& rec, const std::vector<Real>& v, long first) {
  int d = v.front().digits();
  Real worst(0L, d);
  for (std::size_t i = 0; i + rec.order() < v.size(); ++i) {
    Real s(0L, d), mag(0L, d);
    for (unsigned j = 0; j <= rec.order(); ++j) {
      Real t = v[i + j] * rec[j](first + static_cast<long>(i));
      s += t;
      mag += abs(t);
    }
    if (!mag.is_zero()) worst = max(worst, abs(s) / mag);
  }
  return worst.with_digits(10);
}

// lim a_n / b_n by floating forward iteration: both sequences are dominant
// solutions, so relative precision survives and a_M/b_M is within
// (alpha beta)^-M of the limit.
Real limit_value(const PolyRecurrence& rec, const BigRational& a1, const BigRational& b1,
                 unsigned steps, int digits) {
  Real a0(0L, digits), a(a1, digits), b0(1L, digits), b(b1, digits);
  for (unsigned n = 0; n + 1 < steps; ++n) {
    BigInt p0 = rec[0](n), p1 = rec[1](n), p2 = rec[2](n);
    if (p2 == 0) throw SingularRecurrenceError("leading coefficient vanishes", n);
    Real an = -(a0 * p0 + a * p1) / Real(p2, digits);
    Real bn = -(b0 * p0 + b * p1) / Real(p2, digits);
    a0 = std::move(a), a = std::move(an);
    b0 = std::move(b), b = std::move(bn);
  }
  return a / b;
}

}  // namespace

Real certificate_constant(const IrrationalityCertificate& cert, int digits) {
  const auto& r = cert.initial_relation;
  const Real ab = cert.alpha * cert.beta;
  const double lab = std::log10(ab.to_double());
  if (!(lab > 0)) throw DomainError("alpha * beta <= 1");
  const auto steps = static_cast<unsigned>((digits + 20) / lab) + 20;
  return limit_value(cert.recurrence, make_rational(-r[2], r[1]), make_rational(-r[0], r[1]), steps,
                     digits + 20)
      .with_digits(digits);
}

IrrationalityCertificate build_certificate(const IntegralFamily& family, unsigned terms, int digits,
                                           const PipelineOptions& opt, PipelineState* state) {
  if (terms < 500) throw UsageError("build_certificate needs at least 500 terms");
  if (digits < 60) throw UsageError("build_certificate needs at least 60 digits");
  if (opt.max_order < 2) throw UsageError("the pipeline needs recurrences of order 2");
  PipelineState local;
  PipelineState& st = state ? *state : local;
  auto note = [&](const std::string& m) {
    if (opt.log) opt.log(m);
  };
  auto save = [&] {
    if (opt.checkpoint) opt.checkpoint(st);
  };

  const int q = digits + opt.guard_digits;
  const unsigned W = window_size(opt);
  const unsigned n0 = opt.first_index;
  const bool closed = family.closed_normalizer(10).has_value();
  const bool norm_sequence = family.ratio_normalized() && !closed && family.dimension() > 1;

  // Quadrature.
  if (st.first_index != n0 || st.values_digits < q || st.values.size() < W ||
      (norm_sequence && st.norm_values.size() < W)) {
    note("quadrature: " + family.canonical() + " n = " + std::to_string(n0) + ".." +
         std::to_string(n0 + W - 1) + " at " + std::to_string(q) + " digits");
    try {
      MomentResult r = tensor_moments(family.moments(n0, n0 + W, norm_sequence), q, opt.quadrature);
      st.values.clear();
      st.norm_values.clear();
      for (auto& v : r.values[0]) st.values.push_back(v.value);
      if (norm_sequence)
        for (auto& v : r.values[1]) st.norm_values.push_back(v.value);
    } catch (const ConvergenceError& e) {
      throw PipelineError(Stage::quadrature, e.what());
    }
    st.first_index = n0;
    st.values_digits = q;
    st.recurrence.reset();
    st.normalizer.reset();
    st.I0.reset();
    st.relation.reset();
    st.a.clear();
    st.b.clear();
    save();
  }
  std::vector<Real> values(st.values.begin(), st.values.begin() + W);

  // Recurrence.
  if (!st.recurrence) {
    note("guessing recurrence");
    auto rec = guess_recurrence(values, opt.max_order, opt.max_degree, q, n0);
    if (!rec) throw PipelineError(Stage::no_recurrence, "no recurrence of order <= " +
                                                           std::to_string(opt.max_order) + " and degree <= " +
                                                           std::to_string(opt.max_degree));
    if (rec->order() != 2)
      throw PipelineError(Stage::no_recurrence, "the integrals satisfy " + rec->str() +
                                                     ", of order " + std::to_string(rec->order()));
    st.recurrence = *rec;
    save();
  }
  const PolyRecurrence& rec = *st.recurrence;
  note("recurrence: " + rec.str());

  // Normalizer.
  if (!st.normalizer) {
    if (closed) {
      st.normalizer = *family.closed_normalizer(q + 5);
    } else if (norm_sequence) {
      std::vector<Real> nv(st.norm_values.begin(), st.norm_values.begin() + W);
      auto nrec = guess_recurrence(nv, opt.max_order, opt.max_degree, q, n0);
      if (!nrec || nrec->order() != 2)
        throw PipelineError(Stage::no_recurrence, "no order-2 recurrence for the normalizer sequence");
      try {
        st.normalizer = iterate_backward(*nrec, nv[0], nv[1], n0)[0];
      } catch (const SingularRecurrenceError&) {
        st.normalizer = family_normalizer(family, q, opt.quadrature);
      }
    } else {
      st.normalizer = family_normalizer(family, q, opt.quadrature);
    }
  }
  const Real& norm = *st.normalizer;

  // I(0), I(1).
  if (!st.I0 || !st.I1) {
    try {
      auto x = iterate_backward(rec, values[0], values[1], n0);
      st.I0 = x[0] / norm;
      st.I1 = x[1] / norm;
    } catch (const SingularRecurrenceError& e) {
      note(std::string("backward iteration blocked (") + e.what() + "); integrating n = 0, 1 directly");
      try {
        auto direct = family_integrals(family, 0, 2, q, opt.quadrature);
        st.I0 = direct[0].value;
        st.I1 = direct[1].value;
      } catch (const ConvergenceError& ce) {
        throw PipelineError(Stage::quadrature, ce.what());
      }
    }
  }

  // Initial relation c0 I(0) + c1 I(1) = c2.
  if (!st.relation) {
    const int search = q - 40;
    const unsigned hexp = static_cast<unsigned>(std::clamp((search - 12) / 3, 1, 30));
    std::optional<std::array<BigInt, 3>> rel;
    try {
      rel = find_initial_relation(*st.I0, *st.I1, search, pow10(hexp));
    } catch (const UsageError& e) {
      throw PipelineError(Stage::no_initial_relation, e.what());
    }
    if (!rel)
      throw PipelineError(Stage::no_initial_relation,
                          "no relation c0 I(0) + c1 I(1) = c2 with height <= 10^" + std::to_string(hexp));
    st.relation = *rel;
    save();
  }
  const auto& rel = *st.relation;

  // Exact sequences.
  if (st.a.size() < terms + 1 || st.b.size() < terms + 1) {
    note("iterating " + std::to_string(terms) + " exact terms");
    try {
      auto s = make_sequences(rec, rel, terms, digits);
      st.a = std::move(s.a);
      st.b = std::move(s.b);
      save();
    } catch (const SingularRecurrenceError& e) {
      throw PipelineError(Stage::no_recurrence, std::string("forward iteration: ") + e.what());
    }
  }
  std::vector<BigRational> a(st.a.begin(), st.a.begin() + terms + 1);
  std::vector<BigRational> b(st.b.begin(), st.b.begin() + terms + 1);

  IrrationalityCertificate cert(family, rec);
  cert.precision = digits;
  cert.initial_relation = rel;
  cert.terms_computed = terms;
  cert.first_index = n0;
  cert.I0 = st.I0->with_digits(digits);
  cert.I1 = st.I1->with_digits(digits);
  for (auto& v : values) cert.quadrature.push_back((v / norm).with_digits(digits));
  cert.recurrence_residual = worst_relative_residual(rec, values, n0);
  cert.relation_residual =
      abs(*st.I0 * rel[0] + *st.I1 * rel[1] - Real(rel[2], q)).with_digits(10);

  // Asymptotics.
  Growth g;
  try {
    g = char_growth(rec, digits + 40);
  } catch (const DegenerateAsymptoticsError& e) {
    throw PipelineError(Stage::degenerate_asymptotics, e.what());
  }
  cert.alpha = g.alpha.with_digits(digits);
  cert.beta = g.beta.with_digits(digits);

  // High-precision limit, good enough to resolve I(terms) = b C - a.
  const double lab = std::log10((g.alpha * g.beta).to_double());
  if (!(lab > 0))
    throw PipelineError(Stage::degenerate_asymptotics, "alpha * beta <= 1; a_n/b_n does not converge");
  const int cdig = std::max(digits + 60, static_cast<int>(terms * lab) + 60);
  const auto steps = static_cast<unsigned>(cdig / lab) + 20;
  Real C;
  try {
    C = limit_value(rec, make_rational(-rel[2], rel[1]), make_rational(-rel[0], rel[1]), steps, cdig + 20)
            .with_digits(cdig);
  } catch (const SingularRecurrenceError& e) {
    throw PipelineError(Stage::no_recurrence, std::string("limit iteration: ") + e.what());
  }
  cert.constant_value = C.with_digits(digits);

  // I(n) against b_n C - a_n over the quadrature window.
  Real worst(0L, 10);
  for (std::size_t i = 0; i < values.size() && n0 + i <= terms; ++i) {
    Real In = values[i] / norm;
    Real pred = C * b[n0 + i] - Real(a[n0 + i], cdig);
    worst = max(worst, abs((pred - In) / In).with_digits(10));
  }
  cert.consistency_residual = worst;

  // Empirical beta from the decay of I(n) = b_n C - a_n.
  {
    const unsigned n1 = terms / 2, n2 = terms;
    auto logI = [&](unsigned n) { return (C * b[n] - Real(a[n], cdig)).log_abs(); };
    double lb = (logI(n1) - logI(n2)) / (n2 - n1);
    cert.empirical_beta = Real(std::exp(lb), 30);
    cert.beta_disagrees = std::fabs(std::exp(lb) / g.beta.to_double() - 1) > 0.01;
  }

  // Integer-ating factor and nu.
  note("integer-ating factor");
  try {
    cert.integerating = conjecture_integerating(a, b);
  } catch (const ConjectureFailure& e) {
    cert.integerating_note = e.what();
  }
  if (cert.integerating && cert.integerating->status == IntegeratingConjecture::Status::exact) {
    Real nu(static_cast<long>(cert.integerating->lcm_power), digits + 20);
    for (auto& t : cert.integerating->pp_terms) nu -= pp_growth_exact(t, digits + 20);
    cert.nu = nu.with_digits(digits);
    cert.nu_source = IrrationalityCertificate::NuSource::exact;
  } else {
    cert.nu = empirical_nu(a, b, digits);
    cert.nu_source = IrrationalityCertificate::NuSource::empirical;
  }

  try {
    auto dm = delta_and_measure(g.alpha.with_digits(digits), g.beta.with_digits(digits), cert.nu);
    cert.delta = dm.delta;
    cert.measure = dm.measure;
  } catch (const DomainError& e) {
    throw PipelineError(Stage::degenerate_asymptotics, e.what());
  }
  cert.verdict = cert.delta.sign() > 0 ? IrrationalityCertificate::Verdict::irrationality_candidate
                                       : IrrationalityCertificate::Verdict::approximation_only;

  try {
    std::vector<BigInt> E(terms + 1);
    for (unsigned n = 0; n <= terms; ++n)
      E[n] = cert.integerating ? cert.integerating->factor(n) : min_clearing_factor(a[n], b[n]);
    cert.empirical_delta = empirical_delta(C, a, b, E);
  } catch (const Error& e) {
    note(std::string("empirical delta unavailable: ") + e.what());
  }

  if (opt.identify) {
    note("identifying constant");
    try {
      cert.identification = identify_constant(C.with_digits(digits + 40), digits);
    } catch (const Error& e) {
      throw PipelineError(Stage::identification, e.what());
    }
  }
  return cert;
}

}  // namespace apery
