#ifndef PATCHLOC_PROCESS_H_
#define PATCHLOC_PROCESS_H_

#include <chrono>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "patchloc/trace.h"

namespace patchloc {

// How a child process ended.
struct ProcessOutcome {
  enum class Kind { kExited, kSignaled, kTimedOut };
  Kind kind = Kind::kExited;
  int exit_code = 0;
  int signal = 0;
};

// A file created with mkstemp and unlinked on destruction.
class TempFile {
 public:
  explicit TempFile(std::string_view tag);
  ~TempFile();
  TempFile(const TempFile&) = delete;
  TempFile& operator=(const TempFile&) = delete;

  const std::string& path() const { return path_; }
  void Write(std::span<const std::uint8_t> data) const;
  std::string ReadAll() const;

 private:
  std::string path_;
};

// Splits a command template on whitespace. Single and double quotes group
// words; a backslash escapes the next character outside single quotes.
std::vector<std::string> SplitCommandLine(std::string_view command);

// Replaces every "{INPUT}" in each argument.
std::vector<std::string> SubstituteInput(std::vector<std::string> argv,
                                         const std::string& input_path);

struct ProcessRequest {
  std::vector<std::string> argv;
  // Added to (or overriding) the inherited environment.
  std::vector<std::pair<std::string, std::string>> extra_env;
  // Connected to the child's stdin when set; /dev/null otherwise.
  std::optional<std::string> stdin_path;
  std::chrono::milliseconds timeout{5000};
};

// Runs the child in its own process group with stdout/stderr discarded.
// The whole group is killed when the timeout expires. Throws
// Error(kTargetLaunchFailure) if the program cannot be executed.
ProcessOutcome RunProcess(const ProcessRequest& request);

// Decodes the trace wire format: one lowercase hexadecimal branch id per
// line. A final line without its newline is dropped; any other malformed
// line throws Error(kTraceProtocolError). At most `max_events` records are
// kept, and the trace is marked truncated if more were present.
ExecutionTrace ParseTraceStream(std::string_view data, std::size_t max_events);

// Encodes a trace in the wire format.
std::string FormatTraceStream(std::span<const BranchId> events);

}  // namespace patchloc

#endif  // PATCHLOC_PROCESS_H_
