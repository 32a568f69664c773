#include "apery/serialize.hpp"

#include <json.hpp>

#include "apery/errors.hpp"

namespace apery {

using nlohmann::json;

namespace {

json real_j(const Real& x) { return json{{"value", x.exact_str()}, {"digits", x.digits()}}; }

Real real_of(const json& j) { return Real::parse(j.at("value").get<std::string>(), j.at("digits").get<int>()); }

json ints_j(const std::vector<BigInt>& v) {
  json a = json::array();
  for (auto& x : v) a.push_back(x.get_str());
  return a;
}

std::vector<BigInt> ints_of(const json& j) {
  std::vector<BigInt> v;
  for (auto& x : j) v.emplace_back(x.get<std::string>());
  return v;
}

json rats_j(const std::vector<BigRational>& v) {
  json a = json::array();
  for (auto& x : v) a.push_back(rational_str(x));
  return a;
}

std::vector<BigRational> rats_of(const json& j) {
  std::vector<BigRational> v;
  for (auto& x : j) v.push_back(parse_rational(x.get<std::string>()));
  return v;
}

json reals_j(const std::vector<Real>& v) {
  json a = json::array();
  for (auto& x : v) a.push_back(real_j(x));
  return a;
}

std::vector<Real> reals_of(const json& j) {
  std::vector<Real> v;
  for (auto& x : j) v.push_back(real_of(x));
  return v;
}

json family_j(const IntegralFamily& f) {
  json p = json::array();
  for (auto& x : f.params()) p.push_back(rational_str(x));
  return json{{"kind", f.name()}, {"params", p}};
}

IntegralFamily family_of(const json& j) {
  return IntegralFamily::make(parse_family_kind(j.at("kind").get<std::string>()), rats_of(j.at("params")));
}

json recurrence_j(const PolyRecurrence& r) {
  json a = json::array();
  for (auto& p : r.coeffs()) a.push_back(ints_j(p.coeffs()));
  return a;
}

PolyRecurrence recurrence_of(const json& j) {
  std::vector<IntPoly> p;
  for (auto& c : j) p.emplace_back(ints_of(c));
  return PolyRecurrence(std::move(p));
}

json pp_j(const PpSpec& s) {
  return json{{"e1", rational_str(s.e1)}, {"e2", rational_str(s.e2)}, {"e3", rational_str(s.e3)},
              {"e4", rational_str(s.e4)}, {"residues", s.residues}, {"modulus", s.modulus}};
}

PpSpec pp_of(const json& j) {
  PpSpec s;
  s.e1 = parse_rational(j.at("e1").get<std::string>());
  s.e2 = parse_rational(j.at("e2").get<std::string>());
  s.e3 = parse_rational(j.at("e3").get<std::string>());
  s.e4 = parse_rational(j.at("e4").get<std::string>());
  s.residues = j.at("residues").get<std::vector<unsigned long>>();
  s.modulus = j.at("modulus").get<unsigned long>();
  s.validate();
  return s;
}

Identification::Kind kind_of(const std::string& s) {
  using K = Identification::Kind;
  for (K k : {K::rational, K::algebraic, K::linear_in_basis, K::fractional_linear})
    if (kind_name(k) == s) return k;
  throw UsageError("unknown identification kind " + s);
}

json identification_j(const Identification& id) {
  json j{{"kind", kind_name(id.kind)},
         {"form", id.str()},
         {"verification_precision", id.verification_precision},
         {"residual", real_j(id.residual)}};
  switch (id.kind) {
    case Identification::Kind::rational: j["rational"] = rational_str(id.rational); break;
    case Identification::Kind::algebraic:
      j["polynomial"] = ints_j(id.polynomial);
      j["branch"] = id.linear[1] < 0 ? -1 : 1;
      break;
    case Identification::Kind::linear_in_basis:
      j["basis"] = id.basis;
      j["linear"] = rats_j({id.linear[0], id.linear[1]});
      break;
    case Identification::Kind::fractional_linear:
      j["basis"] = id.basis;
      j["fractional"] = ints_j({id.fractional.begin(), id.fractional.end()});
      break;
  }
  return j;
}

Identification identification_of(const json& j) {
  Identification id;
  id.kind = kind_of(j.at("kind").get<std::string>());
  id.verification_precision = j.at("verification_precision").get<int>();
  id.residual = real_of(j.at("residual"));
  if (j.contains("rational")) id.rational = parse_rational(j["rational"].get<std::string>());
  if (j.contains("polynomial")) {
    id.polynomial = ints_of(j["polynomial"]);
    id.linear[1] = j.value("branch", 1);
  }
  if (j.contains("basis")) id.basis = j["basis"].get<std::string>();
  if (j.contains("linear")) {
    auto l = rats_of(j["linear"]);
    if (l.size() != 2) throw UsageError("linear identification needs two coefficients");
    id.linear = {l[0], l[1]};
  }
  if (j.contains("fractional")) {
    auto f = ints_of(j["fractional"]);
    if (f.size() != 4) throw UsageError("fractional identification needs four coefficients");
    std::copy(f.begin(), f.end(), id.fractional.begin());
  }
  return id;
}

template <class F>
auto guarded(F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw UsageError(std::string("malformed document: ") + e.what());
  }
}

void check_schema(const json& j) {
  int v = j.at("schema_version").get<int>();
  if (v != kSchemaVersion) throw UsageError("unsupported schema_version " + std::to_string(v));
}

}  // namespace

std::string certificate_to_json(const IrrationalityCertificate& c, int indent) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["family"] = family_j(c.family);
  j["precision"] = c.precision;
  j["constant_value"] = real_j(c.constant_value);
  j["identification"] = c.identification ? identification_j(*c.identification) : json(nullptr);
  j["recurrence"] = recurrence_j(c.recurrence);
  j["recurrence_text"] = c.recurrence.str();
  j["initial_relation"] = ints_j({c.initial_relation.begin(), c.initial_relation.end()});
  j["alpha"] = real_j(c.alpha);
  j["beta"] = real_j(c.beta);
  j["nu"] = real_j(c.nu);
  j["nu_source"] = c.nu_source == IrrationalityCertificate::NuSource::exact ? "exact" : "empirical";
  j["delta"] = real_j(c.delta);
  j["measure"] = c.measure ? real_j(*c.measure) : json(nullptr);
  j["terms_computed"] = c.terms_computed;
  j["verdict"] = verdict_name(c.verdict);

  json v;
  if (c.integerating) {
    json pp = json::array();
    for (auto& t : c.integerating->pp_terms) pp.push_back(pp_j(t));
    v["integerating"] = {
        {"lcm_power", c.integerating->lcm_power},
        {"pp_terms", pp},
        {"status", c.integerating->status == IntegeratingConjecture::Status::exact ? "exact-conjecture"
                                                                                   : "empirical-only"},
        {"checked_terms", c.integerating->checked_terms},
        {"form", c.integerating->str()}};
  } else {
    v["integerating"] = nullptr;
  }
  v["integerating_note"] = c.integerating_note;
  v["first_index"] = c.first_index;
  v["quadrature"] = reals_j(c.quadrature);
  v["recurrence_residual"] = real_j(c.recurrence_residual);
  v["relation_residual"] = real_j(c.relation_residual);
  v["consistency_residual"] = real_j(c.consistency_residual);
  v["empirical_beta"] = real_j(c.empirical_beta);
  v["beta_disagrees"] = c.beta_disagrees;
  v["empirical_delta"] = c.empirical_delta ? real_j(*c.empirical_delta) : json(nullptr);
  v["I0"] = real_j(c.I0);
  v["I1"] = real_j(c.I1);
  j["verification"] = v;
  return j.dump(indent);
}

IrrationalityCertificate certificate_from_json(const std::string& text) {
  return guarded([&] {
    json j = json::parse(text);
    check_schema(j);
    IrrationalityCertificate c(family_of(j.at("family")), recurrence_of(j.at("recurrence")));
    c.precision = j.at("precision").get<int>();
    c.constant_value = real_of(j.at("constant_value"));
    c.alpha = real_of(j.at("alpha"));
    c.beta = real_of(j.at("beta"));
    c.nu = real_of(j.at("nu"));
    c.nu_source = j.at("nu_source").get<std::string>() == "exact"
                      ? IrrationalityCertificate::NuSource::exact
                      : IrrationalityCertificate::NuSource::empirical;
    c.delta = real_of(j.at("delta"));
    c.terms_computed = j.at("terms_computed").get<unsigned>();
    c.verdict = j.at("verdict").get<std::string>() == "irrationality-candidate"
                    ? IrrationalityCertificate::Verdict::irrationality_candidate
                    : IrrationalityCertificate::Verdict::approximation_only;
    if (!j.at("identification").is_null()) c.identification = identification_of(j["identification"]);
    auto rel = ints_of(j.at("initial_relation"));
    if (rel.size() != 3) throw UsageError("initial_relation needs three integers");
    std::copy(rel.begin(), rel.end(), c.initial_relation.begin());
    if (!j.at("measure").is_null()) c.measure = real_of(j["measure"]);

    const json& v = j.at("verification");
    if (!v.at("integerating").is_null()) {
      const json& ij = v["integerating"];
      IntegeratingConjecture ic;
      ic.lcm_power = ij.at("lcm_power").get<unsigned>();
      for (auto& t : ij.at("pp_terms")) ic.pp_terms.push_back(pp_of(t));
      ic.status = ij.at("status").get<std::string>() == "exact-conjecture"
                      ? IntegeratingConjecture::Status::exact
                      : IntegeratingConjecture::Status::empirical;
      ic.checked_terms = ij.at("checked_terms").get<unsigned>();
      c.integerating = ic;
    }
    c.integerating_note = v.at("integerating_note").get<std::string>();
    c.first_index = v.at("first_index").get<unsigned>();
    c.quadrature = reals_of(v.at("quadrature"));
    c.recurrence_residual = real_of(v.at("recurrence_residual"));
    c.relation_residual = real_of(v.at("relation_residual"));
    c.consistency_residual = real_of(v.at("consistency_residual"));
    c.empirical_beta = real_of(v.at("empirical_beta"));
    c.beta_disagrees = v.at("beta_disagrees").get<bool>();
    if (!v.at("empirical_delta").is_null()) c.empirical_delta = real_of(v["empirical_delta"]);
    c.I0 = real_of(v.at("I0"));
    c.I1 = real_of(v.at("I1"));
    return c;
  });
}

std::string state_to_json(const PipelineState& s) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["first_index"] = s.first_index;
  j["values_digits"] = s.values_digits;
  j["values"] = reals_j(s.values);
  j["norm_values"] = reals_j(s.norm_values);
  j["recurrence"] = s.recurrence ? recurrence_j(*s.recurrence) : json(nullptr);
  j["normalizer"] = s.normalizer ? real_j(*s.normalizer) : json(nullptr);
  j["I0"] = s.I0 ? real_j(*s.I0) : json(nullptr);
  j["I1"] = s.I1 ? real_j(*s.I1) : json(nullptr);
  j["relation"] = s.relation ? ints_j({s.relation->begin(), s.relation->end()}) : json(nullptr);
  j["a"] = rats_j(s.a);
  j["b"] = rats_j(s.b);
  return j.dump();
}

PipelineState state_from_json(const std::string& text) {
  return guarded([&] {
    json j = json::parse(text);
    check_schema(j);
    PipelineState s;
    s.first_index = j.at("first_index").get<unsigned>();
    s.values_digits = j.at("values_digits").get<int>();
    s.values = reals_of(j.at("values"));
    s.norm_values = reals_of(j.at("norm_values"));
    if (!j.at("recurrence").is_null()) s.recurrence = recurrence_of(j["recurrence"]);
    if (!j.at("normalizer").is_null()) s.normalizer = real_of(j["normalizer"]);
    if (!j.at("I0").is_null()) s.I0 = real_of(j["I0"]);
    if (!j.at("I1").is_null()) s.I1 = real_of(j["I1"]);
    if (!j.at("relation").is_null()) {
      auto r = ints_of(j["relation"]);
      if (r.size() != 3) throw UsageError("relation needs three integers");
      s.relation = std::array<BigInt, 3>{r[0], r[1], r[2]};
    }
    s.a = rats_of(j.at("a"));
    s.b = rats_of(j.at("b"));
    return s;
  });
}

std::string family_to_json(const IntegralFamily& f) { return family_j(f).dump(); }

IntegralFamily family_from_json(const std::string& text) {
  return guarded([&] { return family_of(json::parse(text)); });
}

}  // namespace apery
