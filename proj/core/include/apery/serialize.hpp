#pragma once

#include <string>

#include "apery/certificate.hpp"

namespace apery {

inline constexpr int kSchemaVersion = 1;

/// Certificate as a JSON document. Rationals are "p/q" strings, reals are
/// {"value": decimal string, "digits": precision}, big integers (recurrence
/// coefficients, relations) are decimal strings.
std::string certificate_to_json(const IrrationalityCertificate& cert, int indent = 2);
/// Inverse of certificate_to_json; throws UsageError on a malformed or
/// incompatible document.
IrrationalityCertificate certificate_from_json(const std::string& text);

/// Pipeline cache entries, same conventions.
std::string state_to_json(const PipelineState& state);
PipelineState state_from_json(const std::string& text);

std::string family_to_json(const IntegralFamily& family);
IntegralFamily family_from_json(const std::string& text);

}  // namespace apery
