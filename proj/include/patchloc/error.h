#ifndef PATCHLOC_ERROR_H_
#define PATCHLOC_ERROR_H_

#include <stdexcept>
#include <string>

namespace patchloc {

enum class ErrorCode {
  kInvalidArgument,
  kOutOfRange,
  kParse,
  kIo,
  kSeedNotExploit,
  kTargetLaunchFailure,
  kTraceProtocolError,
  kNoExploitInSuite,
  kMissingCache,
};

const char* ErrorCodeName(ErrorCode code);

// All failures raised by the library carry one of the codes above so that the
// command line front end can map them onto exit statuses.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace patchloc

#endif  // PATCHLOC_ERROR_H_
