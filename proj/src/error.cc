#include "patchloc/error.h"

namespace patchloc {

const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
      return "INVALID_ARGUMENT";
    case ErrorCode::kOutOfRange:
      return "OUT_OF_RANGE";
    case ErrorCode::kParse:
      return "PARSE_ERROR";
    case ErrorCode::kIo:
      return "IO_ERROR";
    case ErrorCode::kSeedNotExploit:
      return "SEED_NOT_EXPLOIT";
    case ErrorCode::kTargetLaunchFailure:
      return "TARGET_LAUNCH_FAILURE";
    case ErrorCode::kTraceProtocolError:
      return "TRACE_PROTOCOL_ERROR";
    case ErrorCode::kNoExploitInSuite:
      return "NO_EXPLOIT_IN_SUITE";
    case ErrorCode::kMissingCache:
      return "MISSING_CACHE";
  }
  return "UNKNOWN";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
      code_(code) {}

}  // namespace patchloc
