#include "search.hpp"

#include <json.hpp>

#include <atomic>
#include <mutex>
#include <sstream>
#include <thread>

#include "apery/errors.hpp"
#include "apery/lattice.hpp"
#include "apery/serialize.hpp"

namespace apery::cli {

namespace {

unsigned arity(FamilyKind k) {
  switch (k) {
    case FamilyKind::Log1: return 3;
    case FamilyKind::LogRatio: return 4;
    case FamilyKind::Zeta2: return 4;
    case FamilyKind::Zeta3K: return 5;
  }
  return 0;
}

bool canonical_orbit(FamilyKind k, const std::vector<BigRational>& p) {
  if (k == FamilyKind::Zeta2)  // x <-> y swaps (a1,a2) with (b1,b2)
    return std::tie(p[0], p[1]) <= std::tie(p[2], p[3]);
  if (k == FamilyKind::Zeta3K && p[0] == p[2])  // with a = c, x <-> y swaps b and e
    return p[1] <= p[4];
  return true;
}

std::string show(const Real& x, int digits = 20) { return x.str(digits); }

std::string witness_str(const std::array<BigInt, 4>& w) {
  return "(" + w[0].get_str() + ", " + w[1].get_str() + ", " + w[2].get_str() + ", " + w[3].get_str() + ")";
}

bool identified(const SearchReport& r, const EquivalenceClass& c) {
  for (auto& [i, w] : c.members)
    if (r.entries[i].certificate->identification) return true;
  return false;
}

// Member with the largest delta.
std::size_t best_member(const SearchReport& r, const EquivalenceClass& c) {
  std::size_t best = c.members.front().first;
  for (auto& [i, w] : c.members)
    if (r.entries[i].certificate->delta > r.entries[best].certificate->delta) best = i;
  return best;
}

}  // namespace

std::pair<long, long> numerator_range(const SearchJob& job) {
  const long D = job.denominator;
  if (job.lo == 0 && job.hi == 0) return {-(D - 1), D - 1};
  return {job.lo, job.hi};
}

std::vector<IntegralFamily> enumerate(const SearchJob& job) {
  if (job.denominator < 1) throw UsageError("denominator must be positive");
  const long D = job.denominator;
  auto [lo, hi] = numerator_range(job);
  if (lo > hi) throw UsageError("empty numerator range");
  const unsigned m = arity(job.kind);
  std::vector<long> num(m, lo);
  std::vector<IntegralFamily> out;
  for (;;) {
    std::vector<BigRational> p;
    bool exact = false;
    for (long j : num) {
      BigRational q(j, D);
      q.canonicalize();
      exact = exact || q.get_den() == D;
      p.push_back(q);
    }
    if (exact && canonical_orbit(job.kind, p)) {
      try {
        out.push_back(IntegralFamily::make(job.kind, p));
      } catch (const DomainError&) {
      } catch (const UsageError&) {
      }
    }
    unsigned i = m;
    while (i > 0 && num[i - 1] == hi) num[--i] = lo;
    if (i == 0) break;
    ++num[i - 1];
  }
  return out;
}

SearchEntry certify_cached(const IntegralFamily& f, unsigned terms, int digits, const Cache& cache,
                           const PipelineOptions& base) {
  SearchEntry e{f, std::nullopt, std::nullopt};
  if ((e.certificate = cache.load_certificate(f, terms, digits))) return e;
  if ((e.failure = cache.load_failure(f, terms, digits))) return e;
  PipelineState state;
  if (auto s = cache.load_state(f)) state = std::move(*s);
  PipelineOptions opt = base;
  opt.checkpoint = [&](const PipelineState& s) { cache.save_state(f, s); };
  try {
    e.certificate = build_certificate(f, terms, digits, opt, &state);
    cache.save_certificate(*e.certificate);
  } catch (const PipelineError& err) {
    e.failure = FailureRecord{stage_name(err.stage()), err.what()};
    cache.save_failure(f, terms, digits, *e.failure);
  }
  return e;
}

std::vector<EquivalenceClass> cluster(const std::vector<SearchEntry>& entries, int digits,
                                      const BigInt& height_bound) {
  std::vector<EquivalenceClass> classes;
  std::vector<Real> constants(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (!entries[i].certificate) continue;
    constants[i] = certificate_constant(*entries[i].certificate, digits + 40);
    bool placed = false;
    for (auto& c : classes) {
      auto w = equivalent_constants(constants[c.representative], constants[i], digits, height_bound);
      if (w) {
        c.members.emplace_back(i, *w);
        placed = true;
        break;
      }
    }
    if (!placed) {
      EquivalenceClass c;
      c.representative = i;
      c.members.emplace_back(i, std::array<BigInt, 4>{0, 1, 1, 0});
      classes.push_back(std::move(c));
    }
  }
  return classes;
}

SearchReport run_search(const SearchJob& job, const Cache& cache,
                        const std::function<void(const std::string&)>& log) {
  SearchReport r{job, {}, {}};
  auto families = enumerate(job);
  std::vector<std::optional<SearchEntry>> slots(families.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mu;
  PipelineOptions base;
  auto worker = [&] {
    for (std::size_t i; (i = next++) < families.size();) {
      slots[i] = certify_cached(families[i], job.terms, job.digits, cache, base);
      if (log) {
        std::lock_guard lock(log_mu);
        const auto& e = *slots[i];
        log("[" + std::to_string(i + 1) + "/" + std::to_string(families.size()) + "] " +
            families[i].canonical() + ": " +
            (e.certificate ? verdict_name(e.certificate->verdict) + ", delta = " + show(e.certificate->delta, 12)
                           : "failed (" + e.failure->stage + ")"));
      }
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(job.jobs, static_cast<unsigned>(families.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& s : slots) r.entries.push_back(std::move(*s));
  r.classes = cluster(r.entries, job.digits, job.height_bound);
  return r;
}

std::string theorem_block(const IrrationalityCertificate& c) {
  std::ostringstream o;
  const auto& rel = c.initial_relation;
  o << "Theorem (conjectural). Let C = " << c.family.canonical() << "(0) = " << c.constant_value.str() << ".\n";
  if (c.identification)
    o << "  Identification: C = " << c.identification->str() << "   (residual "
      << c.identification->residual.str(3) << " at " << c.identification->verification_precision
      << " digits)\n";
  else
    o << "  Identification: none\n";
  o << "  I(n) = b_n C - a_n, where a_n and b_n both satisfy\n"
    << "    " << c.recurrence.str() << "\n"
    << "  with a_0 = 0, a_1 = " << rational_str(make_rational(-rel[2], rel[1])) << ", b_0 = 1, b_1 = "
    << rational_str(make_rational(-rel[0], rel[1])) << ".\n"
    << "  Initial relation: (" << rel[0].get_str() << ") I(0) + (" << rel[1].get_str()
    << ") I(1) = " << rel[2].get_str() << "   (residual " << c.relation_residual.str(3) << ")\n"
    << "  alpha = " << show(c.alpha) << "\n"
    << "  beta  = " << show(c.beta) << "   (empirical " << c.empirical_beta.str(8)
    << (c.beta_disagrees ? ", DISAGREES by more than 1%" : "") << ")\n";
  o << "  nu    = " << show(c.nu) << "   ("
    << (c.nu_source == IrrationalityCertificate::NuSource::exact ? "exact" : "empirical");
  if (c.integerating) o << ", E(n) = " << c.integerating->str();
  if (!c.integerating_note.empty()) o << "; conjecture failed: " << c.integerating_note;
  o << ")\n";
  o << "  delta = " << show(c.delta);
  if (c.empirical_delta) o << "   (empirical " << c.empirical_delta->str(8) << ")";
  o << "\n";
  o << "  mu    = " << (c.measure ? show(*c.measure) : std::string("none")) << "\n";
  o << "  Verdict: " << verdict_name(c.verdict) << " (" << c.terms_computed << " terms, "
    << c.precision << " digits)\n";
  return o.str();
}

std::string report_text(const SearchReport& r) {
  std::ostringstream o;
  std::size_t ok = 0;
  for (auto& e : r.entries) ok += e.certificate.has_value();
  o << "Search " << family_kind_name(r.job.kind) << ", denominator " << r.job.denominator << ": "
    << r.entries.size() << " tuples, " << ok << " certified, " << r.entries.size() - ok << " failed, "
    << r.classes.size() << " classes (relation height bound " << r.job.height_bound.get_str() << ", "
    << r.job.digits << " digits, " << r.job.terms << " terms)\n";
  for (std::size_t k = 0; k < r.classes.size(); ++k) {
    const auto& c = r.classes[k];
    const auto& rep = *r.entries[c.representative].certificate;
    const auto& best = *r.entries[best_member(r, c)].certificate;
    o << "\nClass " << k + 1 << ": representative " << rep.family.canonical() << ", " << c.members.size()
      << (c.members.size() == 1 ? " member\n" : " members\n");
    o << "  C = " << rep.constant_value.str(30) << "\n";
    if (identified(r, c)) {
      for (auto& [i, w] : c.members)
        if (auto& id = r.entries[i].certificate->identification) {
          o << "  identified via " << r.entries[i].family.canonical() << ": " << id->str() << "\n";
          break;
        }
    } else {
      o << "  identification: none"
        << (best.delta.sign() > 0 ? "  ** candidate first-ever irrationality proof **" : "") << "\n";
    }
    o << "  best delta = " << show(best.delta, 15) << ", mu = "
      << (best.measure ? show(*best.measure, 15) : std::string("none")) << " (" << best.family.canonical()
      << ")\n";
    for (auto& [i, w] : c.members) {
      const auto& m = *r.entries[i].certificate;
      o << "    " << m.family.canonical() << "  delta = " << show(m.delta, 12) << "  " << verdict_name(m.verdict)
        << "  witness " << witness_str(w) << "\n";
    }
  }
  bool header = false;
  for (auto& e : r.entries)
    if (e.failure) {
      if (!header) o << "\nFailures:\n", header = true;
      o << "  " << e.family.canonical() << ": " << e.failure->message << "\n";
    }
  return o.str();
}

std::string report_json(const SearchReport& r) {
  using nlohmann::json;
  json classes = json::array();
  for (auto& c : r.classes) {
    const auto& rep = *r.entries[c.representative].certificate;
    const auto& best = *r.entries[best_member(r, c)].certificate;
    json members = json::array();
    json ident = nullptr;
    for (auto& [i, w] : c.members) {
      const auto& m = *r.entries[i].certificate;
      members.push_back({{"family", m.family.canonical()},
                         {"delta", m.delta.str()},
                         {"measure", m.measure ? json(m.measure->str()) : json(nullptr)},
                         {"verdict", verdict_name(m.verdict)},
                         {"witness", {w[0].get_str(), w[1].get_str(), w[2].get_str(), w[3].get_str()}}});
      if (m.identification && ident.is_null())
        ident = {{"family", m.family.canonical()},
                 {"kind", kind_name(m.identification->kind)},
                 {"form", m.identification->str()}};
    }
    const bool candidate = ident.is_null() && best.delta.sign() > 0;
    classes.push_back({{"representative", rep.family.canonical()},
                       {"constant", {{"value", rep.constant_value.str()}, {"digits", rep.precision}}},
                       {"identification", ident},
                       {"candidate_first_ever_irrationality_proof", candidate},
                       {"best", best.family.canonical()},
                       {"delta", best.delta.str()},
                       {"measure", best.measure ? json(best.measure->str()) : json(nullptr)},
                       {"members", members}});
  }
  json failures = json::array();
  std::size_t ok = 0;
  for (auto& e : r.entries) {
    if (e.certificate) ++ok;
    if (e.failure)
      failures.push_back({{"family", e.family.canonical()}, {"stage", e.failure->stage}, {"message", e.failure->message}});
  }
  json j{{"schema_version", kSchemaVersion},
         {"job",
          {{"family", family_kind_name(r.job.kind)},
           {"denominator", r.job.denominator},
           {"numerators", {numerator_range(r.job).first, numerator_range(r.job).second}},
           {"precision", r.job.digits},
           {"terms", r.job.terms},
           {"height_bound", r.job.height_bound.get_str()}}},
         {"counts",
          {{"tuples", r.entries.size()}, {"certified", ok}, {"failed", r.entries.size() - ok},
           {"classes", r.classes.size()}}},
         {"classes", classes},
         {"failures", failures}};
  return j.dump(2);
}

}  // namespace apery::cli
