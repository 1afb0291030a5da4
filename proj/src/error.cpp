#include "sharpcs/error.hpp"

namespace sharpcs {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kRankDeficient: return "rank-deficient";
    case ErrorCode::kInfeasible: return "infeasible";
    case ErrorCode::kNoNsp: return "no-nsp";
    case ErrorCode::kNoGuarantee: return "no-guarantee";
    case ErrorCode::kConvergence: return "convergence";
    case ErrorCode::kNotCertifiable: return "not-certifiable";
    case ErrorCode::kUnsupported: return "unsupported";
    case ErrorCode::kParse: return "parse";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kSchema: return "schema";
    case ErrorCode::kInternal: return "internal";
  }
  return "unknown";
}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace sharpcs
