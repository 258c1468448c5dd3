#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace frechet {

enum class ErrorCode {
  dimension_mismatch,
  field_mismatch,
  invalid_argument,
  outside_radius,
  outside_third_radius,
  outside_domain,
  unknown_series,
  singular,
  parse_error,
  cap_exceeded,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::dimension_mismatch: return "dimension_mismatch";
    case ErrorCode::field_mismatch: return "field_mismatch";
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::outside_radius: return "outside_radius";
    case ErrorCode::outside_third_radius: return "outside_third_radius";
    case ErrorCode::outside_domain: return "outside_domain";
    case ErrorCode::unknown_series: return "unknown_series";
    case ErrorCode::singular: return "singular";
    case ErrorCode::parse_error: return "parse_error";
    case ErrorCode::cap_exceeded: return "cap_exceeded";
  }
  return "unknown";
}

/// Every failure raised by the library carries a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(detail), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace frechet
