#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sharpcs {

enum class ErrorCode {
  kInvalidArgument,
  kRankDeficient,
  kInfeasible,
  kNoNsp,          // nullspace property constant undefined
  kNoGuarantee,    // restart complexity bound does not apply (C >= 2)
  kConvergence,
  kNotCertifiable,
  kUnsupported,
  kParse,
  kIo,
  kSchema,
  kInternal,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

inline void require(bool condition, ErrorCode code, const char* message) {
  if (!condition) fail(code, message);
}

}  // namespace sharpcs
