#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "apery/certificate.hpp"

namespace apery::cli {

class IoError : public Error {
 public:
  using Error::Error;
};

/// Writes to a temporary file in the same directory, then renames over path.
void write_atomic(const std::filesystem::path& path, const std::string& text);
std::string read_file(const std::filesystem::path& path);

/// Outcome of one failed pipeline, kept so that reruns reproduce it.
struct FailureRecord {
  std::string stage;
  std::string message;
};

/// One directory, files named after the family's canonical string. A
/// cache without a directory stores nothing.
class Cache {
 public:
  Cache() = default;
  explicit Cache(std::filesystem::path dir);

  bool enabled() const noexcept { return !dir_.empty(); }

  std::optional<PipelineState> load_state(const IntegralFamily& f) const;
  void save_state(const IntegralFamily& f, const PipelineState& s) const;

  std::optional<IrrationalityCertificate> load_certificate(const IntegralFamily& f, unsigned terms,
                                                           int digits) const;
  void save_certificate(const IrrationalityCertificate& c) const;

  std::optional<FailureRecord> load_failure(const IntegralFamily& f, unsigned terms, int digits) const;
  void save_failure(const IntegralFamily& f, unsigned terms, int digits, const FailureRecord& r) const;

  /// File stem for a family: canonical string with '/' replaced by '_'.
  static std::string key(const IntegralFamily& f);

 private:
  std::filesystem::path path(const std::string& name) const { return dir_ / name; }
  std::filesystem::path dir_;
};

}  // namespace apery::cli
