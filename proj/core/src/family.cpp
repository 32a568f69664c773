#include "apery/family.hpp"

#include <map>
#include <mutex>
#include <sstream>

#include "apery/special.hpp"

namespace apery {

namespace {

std::size_t arity(FamilyKind k) {
  switch (k) {
    case FamilyKind::Log1: return 3;
    case FamilyKind::LogRatio: return 4;
    case FamilyKind::Zeta2: return 4;
    case FamilyKind::Zeta3K: return 5;
  }
  return 0;
}

void require(bool ok, const std::string& family, const std::string& why) {
  if (!ok) throw DomainError(family + ": " + why);
}

}  // namespace

std::string family_kind_name(FamilyKind k) {
  switch (k) {
    case FamilyKind::Log1: return "log1";
    case FamilyKind::LogRatio: return "logratio";
    case FamilyKind::Zeta2: return "zeta2";
    case FamilyKind::Zeta3K: return "zeta3k";
  }
  return "?";
}

FamilyKind parse_family_kind(std::string_view name) {
  std::string s;
  for (char ch : name) s += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  if (s == "log1") return FamilyKind::Log1;
  if (s == "logratio") return FamilyKind::LogRatio;
  if (s == "zeta2") return FamilyKind::Zeta2;
  if (s == "zeta3k" || s == "zeta3") return FamilyKind::Zeta3K;
  throw UsageError("unknown family: " + std::string(name));
}

IntegralFamily IntegralFamily::make(FamilyKind kind, std::vector<BigRational> p) {
  const std::string nm = family_kind_name(kind);
  if (p.size() != arity(kind))
    throw UsageError(nm + " takes " + std::to_string(arity(kind)) + " parameters");
  for (auto& q : p) q.canonicalize();
  switch (kind) {
    case FamilyKind::Log1:
    case FamilyKind::LogRatio:
      require(p[0] > -1 && p[1] > -1, nm, "exponents a, b must exceed -1");
      require(p[2] > -1, nm, "c must exceed -1 so that 1+cx stays positive");
      break;
    case FamilyKind::Zeta2:
      for (auto& q : p) require(q < 1, nm, "every parameter must be below 1");
      require(p[1] + p[3] < 1, nm, "a2 + b2 must be below 1 (corner x = y = 1)");
      break;
    case FamilyKind::Zeta3K: {
      const auto &a = p[0], &b = p[1], &c = p[2], &d = p[3], &e = p[4];
      require(a > -1 && b > -1 && c > -1 && e > -1, nm, "a, b, c, e must exceed -1");
      // Edge z = 1 with x = 0 (resp. y = 0): D ~ (1-z) + xy.
      require(b + c > d - 1, nm, "b + c must exceed d - 1");
      require(e + c > d - 1, nm, "e + c must exceed d - 1");
      break;
    }
  }
  return IntegralFamily(kind, std::move(p));
}

IntegralFamily IntegralFamily::parse(std::string_view kind, std::string_view params) {
  std::vector<BigRational> p;
  std::string item;
  std::stringstream ss{std::string(params)};
  while (std::getline(ss, item, ',')) p.push_back(parse_rational(item));
  return make(parse_family_kind(kind), std::move(p));
}

unsigned IntegralFamily::dimension() const noexcept {
  switch (kind_) {
    case FamilyKind::Log1:
    case FamilyKind::LogRatio: return 1;
    case FamilyKind::Zeta2: return 2;
    case FamilyKind::Zeta3K: return 3;
  }
  return 0;
}

std::string IntegralFamily::name() const { return family_kind_name(kind_); }

std::string IntegralFamily::params_str() const {
  std::string s;
  for (std::size_t i = 0; i < params_.size(); ++i) {
    if (i) s += ',';
    s += rational_str(params_[i]);
  }
  return s;
}

std::string IntegralFamily::canonical() const { return name() + "(" + params_str() + ")"; }

BigRational IntegralFamily::power() const {
  switch (kind_) {
    case FamilyKind::Log1:
    case FamilyKind::Zeta2: return 1;
    case FamilyKind::LogRatio: return params_[3] + 1;
    case FamilyKind::Zeta3K: return params_[3] + 1;
  }
  return 1;
}

bool IntegralFamily::ratio_normalized() const noexcept {
  return kind_ == FamilyKind::LogRatio || kind_ == FamilyKind::Zeta3K;
}

MomentProblem IntegralFamily::moments(unsigned n_begin, unsigned n_end, bool with_norm) const {
  MomentProblem pb;
  pb.n_begin = n_begin;
  pb.n_end = n_end;
  pb.powers = {power()};
  const auto& p = params_;
  switch (kind_) {
    case FamilyKind::Log1:
    case FamilyKind::LogRatio:
      pb.kernel = Kernel::linear;
      pb.c = p[2];
      pb.exponents = {{p[0], p[1]}};
      break;
    case FamilyKind::Zeta2:
      pb.kernel = Kernel::zeta2;
      pb.exponents = {{-p[0], -p[1]}, {-p[2], -p[3]}};
      break;
    case FamilyKind::Zeta3K:
      pb.kernel = Kernel::zeta3;
      pb.exponents = {{p[1], p[2]}, {p[4], p[0]}, {p[0], p[2]}};
      break;
  }
  if (with_norm && ratio_normalized()) pb.powers.push_back(power() - 1);
  return pb;
}

std::optional<Real> IntegralFamily::closed_normalizer(int digits) const {
  const auto& p = params_;
  const BigRational one = 1;
  switch (kind_) {
    case FamilyKind::Log1: return beta(one + p[0], one + p[1], digits);
    case FamilyKind::LogRatio:
      if (p[3] == 0) return beta(one + p[0], one + p[1], digits);
      return std::nullopt;
    case FamilyKind::Zeta2:
      return beta(one - p[0], one - p[1], digits) * beta(one - p[2], one - p[3], digits);
    case FamilyKind::Zeta3K:
      if (p[3] == 0)
        return beta(one + p[1], one + p[2], digits) * beta(one + p[4], one + p[0], digits) *
               beta(one + p[0], one + p[2], digits);
      return std::nullopt;
  }
  return std::nullopt;
}

namespace {

std::mutex norm_mutex;
std::map<std::string, Real> norm_cache;  // canonical -> best known value

}  // namespace

Real family_normalizer(const IntegralFamily& f, int digits, const QuadratureOptions& opt) {
  if (auto closed = f.closed_normalizer(digits)) return *closed;
  const std::string key = f.canonical();
  {
    std::lock_guard lock(norm_mutex);
    auto it = norm_cache.find(key);
    if (it != norm_cache.end() && it->second.digits() >= digits) return it->second.with_digits(digits);
  }
  MomentProblem pb = f.moments(0, 1);
  pb.powers = {f.power() - 1};
  MomentResult r = tensor_moments(pb, digits, opt);
  Real value = r.values[0][0].value;
  std::lock_guard lock(norm_mutex);
  auto [it, fresh] = norm_cache.emplace(key, value);
  if (!fresh && it->second.digits() < digits) it->second = value;
  return value;
}

std::vector<QuadratureResult> family_integrals(const IntegralFamily& f, unsigned n_begin,
                                               unsigned n_end, int digits,
                                               const QuadratureOptions& opt) {
  MomentResult r = tensor_moments(f.moments(n_begin, n_end), digits, opt);
  Real norm = family_normalizer(f, digits + 5, opt);
  std::vector<QuadratureResult> out;
  for (auto& q : r.values[0])
    out.push_back(QuadratureResult{(q.value / norm).with_digits(digits),
                                   (q.error_estimate / norm).with_digits(digits), q.levels_used});
  return out;
}

QuadratureResult family_integral(const IntegralFamily& f, unsigned n, int digits,
                                 const QuadratureOptions& opt) {
  return family_integrals(f, n, n + 1, digits, opt).front();
}

}  // namespace apery
