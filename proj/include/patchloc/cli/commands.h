#ifndef PATCHLOC_CLI_COMMANDS_H_
#define PATCHLOC_CLI_COMMANDS_H_

#include <iosfwd>
#include <string>

#include "patchloc/cli/run_config.h"
#include "patchloc/error.h"

namespace patchloc::cli {

// Process exit statuses.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;       // config, parse, I/O, missing cache
inline constexpr int kExitNotExploit = 2;  // the exploit does not reproduce
inline constexpr int kExitAdapter = 3;     // target launch or trace protocol

int ExitCodeFor(ErrorCode code);

// Each command reports results on `out` and diagnostics on `err`, and
// returns the process exit status instead of throwing.

// Fuzz, rank and print the report; stores the session when cache_dir is set.
// With `verbose`, one progress line per fuzzing round goes to `err`.
int RunLocalize(const RunConfig& config, std::ostream& out, std::ostream& err,
                bool verbose = false);
// Cluster comparison of the cached suite against its biased derivatives.
int RunBias(const RunConfig& config, std::ostream& out, std::ostream& err);
// Runs one input and prints its trace length, verdict and shared prefix
// with the exploit.
int RunReplay(const RunConfig& config, const std::string& input_path,
              std::ostream& out, std::ostream& err);
// Re-ranks the cached suite.
int RunReport(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace patchloc::cli

#endif  // PATCHLOC_CLI_COMMANDS_H_
