#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nnrank {

/// Error categories surfaced by the library; the CLI reports them verbatim
/// in its `{code, message}` error object.
enum class ErrorCode { io, format, precondition, dimension, domain };

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::io: return "io";
    case ErrorCode::format: return "format";
    case ErrorCode::precondition: return "precondition";
    case ErrorCode::dimension: return "dimension";
    case ErrorCode::domain: return "domain";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace nnrank
