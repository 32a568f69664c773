#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "apery/certificate.hpp"
#include "cache.hpp"

namespace apery::cli {

struct SearchJob {
  FamilyKind kind = FamilyKind::Zeta2;
  unsigned denominator = 2;
  long lo = 0, hi = 0;  // numerator range; lo = hi = 0 means -(D-1)..(D-1)
  int digits = 100;
  unsigned terms = 2000;
  unsigned jobs = 1;
  BigInt height_bound = 1000000;
};

/// Numerator range after applying the default.
std::pair<long, long> numerator_range(const SearchJob& job);

/// Parameter tuples j/D with numerators in range, at least one of them of
/// exact denominator D, valid for the family, one per symmetry orbit.
std::vector<IntegralFamily> enumerate(const SearchJob& job);

struct SearchEntry {
  IntegralFamily family;
  std::optional<IrrationalityCertificate> certificate;
  std::optional<FailureRecord> failure;
};

struct EquivalenceClass {
  std::size_t representative = 0;  // index into entries
  // (entry index, witness (a,b,c,d) with C_member = (a + b C_rep)/(c + d C_rep))
  std::vector<std::pair<std::size_t, std::array<BigInt, 4>>> members;
};

struct SearchReport {
  SearchJob job;
  std::vector<SearchEntry> entries;
  std::vector<EquivalenceClass> classes;
};

/// One certificate, from the cache when present; failures are recorded.
SearchEntry certify_cached(const IntegralFamily& f, unsigned terms, int digits, const Cache& cache,
                           const PipelineOptions& base);

SearchReport run_search(const SearchJob& job, const Cache& cache,
                        const std::function<void(const std::string&)>& log = {});

/// Greedy clustering in entry order against each class representative.
std::vector<EquivalenceClass> cluster(const std::vector<SearchEntry>& entries, int digits,
                                      const BigInt& height_bound);

std::string report_text(const SearchReport& r);
std::string report_json(const SearchReport& r);

/// Plain-text theorem block for one certificate.
std::string theorem_block(const IrrationalityCertificate& c);

}  // namespace apery::cli
