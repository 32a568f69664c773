#include "cache.hpp"

#include <json.hpp>

#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>

#include "apery/serialize.hpp"

namespace apery::cli {

namespace fs = std::filesystem;

void write_atomic(const fs::path& path, const std::string& text) {
  static std::atomic<unsigned long> counter{0};
  std::ostringstream tag;
  tag << ".tmp." << std::hash<std::thread::id>{}(std::this_thread::get_id()) << "." << counter++;
  fs::path tmp = path;
  tmp += tag.str();
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << text;
    out.flush();
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot rename onto " + path.string());
  }
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Cache::Cache(fs::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) throw IoError("cannot create cache directory " + dir_.string());
}

std::string Cache::key(const IntegralFamily& f) {
  std::string k = f.canonical();
  for (auto& ch : k)
    if (ch == '/') ch = '_';
  return k;
}

namespace {

std::string run_suffix(unsigned terms, int digits) {
  return ".t" + std::to_string(terms) + ".p" + std::to_string(digits);
}

}  // namespace

std::optional<PipelineState> Cache::load_state(const IntegralFamily& f) const {
  if (!enabled()) return std::nullopt;
  auto p = path(key(f) + ".state.json");
  if (!fs::exists(p)) return std::nullopt;
  return state_from_json(read_file(p));
}

void Cache::save_state(const IntegralFamily& f, const PipelineState& s) const {
  if (enabled()) write_atomic(path(key(f) + ".state.json"), state_to_json(s));
}

std::optional<IrrationalityCertificate> Cache::load_certificate(const IntegralFamily& f, unsigned terms,
                                                                int digits) const {
  if (!enabled()) return std::nullopt;
  auto p = path(key(f) + run_suffix(terms, digits) + ".cert.json");
  if (!fs::exists(p)) return std::nullopt;
  return certificate_from_json(read_file(p));
}

void Cache::save_certificate(const IrrationalityCertificate& c) const {
  if (enabled())
    write_atomic(path(key(c.family) + run_suffix(c.terms_computed, c.precision) + ".cert.json"),
                 certificate_to_json(c));
}

std::optional<FailureRecord> Cache::load_failure(const IntegralFamily& f, unsigned terms, int digits) const {
  if (!enabled()) return std::nullopt;
  auto p = path(key(f) + run_suffix(terms, digits) + ".fail.json");
  if (!fs::exists(p)) return std::nullopt;
  try {
    auto j = nlohmann::json::parse(read_file(p));
    return FailureRecord{j.at("stage").get<std::string>(), j.at("message").get<std::string>()};
  } catch (const nlohmann::json::exception&) {
    return std::nullopt;  // unreadable record: recompute
  }
}

void Cache::save_failure(const IntegralFamily& f, unsigned terms, int digits, const FailureRecord& r) const {
  if (!enabled()) return;
  nlohmann::json j{{"schema_version", kSchemaVersion}, {"stage", r.stage}, {"message", r.message}};
  write_atomic(path(key(f) + run_suffix(terms, digits) + ".fail.json"), j.dump(2));
}

}  // namespace apery::cli
