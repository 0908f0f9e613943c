#pragma once

#include <stdexcept>
#include <string>

namespace irrkit {

enum class ErrorCode {
  InvalidArgument = 1,
  Io,
  Parse,
  Validation,
  Config,
  Numeric,
  NotFound,
  Internal,
};

const char* error_code_name(ErrorCode code) noexcept;

// Base exception for everything thrown by the library. The code survives the
// trip across the C API boundary.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace irrkit
