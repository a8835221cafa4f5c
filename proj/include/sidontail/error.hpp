#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace sidontail {

enum class ErrorCode {
  ZeroPolynomial,
  NotIsolating,
  PrecisionExhausted,
  BadDegree,
  WindowViolation,
  NotMonic,
  NotCertified,
  EmptyWindow,
  ExponentOverflow,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ZeroPolynomial: return "ZeroPolynomial";
    case ErrorCode::NotIsolating: return "NotIsolating";
    case ErrorCode::PrecisionExhausted: return "PrecisionExhausted";
    case ErrorCode::BadDegree: return "BadDegree";
    case ErrorCode::WindowViolation: return "WindowViolation";
    case ErrorCode::NotMonic: return "NotMonic";
    case ErrorCode::NotCertified: return "NotCertified";
    case ErrorCode::EmptyWindow: return "EmptyWindow";
    case ErrorCode::ExponentOverflow: return "ExponentOverflow";
  }
  return "Unknown";
}

/// Failure of a certified computation. `index` carries the sequence index
/// for PrecisionExhausted raised while computing a_n or u_n.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what,
        std::optional<std::int64_t> index = std::nullopt)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code),
        index_(index) {}

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::int64_t> index() const noexcept { return index_; }

 private:
  ErrorCode code_;
  std::optional<std::int64_t> index_;
};

}  // namespace sidontail
