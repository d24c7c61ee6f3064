#pragma once

#include <stdexcept>
#include <string>

namespace hexgraph {

enum class ErrorCode {
  kInvalidArgument = 1,
  kIllegalMove,
  kGameOver,
  kInvalidState,
  kResourceLimit,
  kFormatError,
  kIoError,
};

const char* error_code_name(ErrorCode code);

// All recoverable failures in the core library are reported with this type.
// The C API maps the code onto its status enum.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool ok, ErrorCode code, const std::string& what) {
  if (!ok) throw Error(code, what);
}

}  // namespace hexgraph
