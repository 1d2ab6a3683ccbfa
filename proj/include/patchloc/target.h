#ifndef PATCHLOC_TARGET_H_
#define PATCHLOC_TARGET_H_

#include <chrono>
#include <cstddef>
#include <set>
#include <span>
#include <string>

#include "patchloc/process.h"
#include "patchloc/target_spec.h"
#include "patchloc/trace.h"

namespace patchloc {

enum class OracleMode { kSignalCrash, kExitCodeSet, kExternalCommand };

// Decides whether a run violated the security specification.
//  - kSignalCrash: the target died from one of `signals`.
//  - kExitCodeSet: the target exited normally with one of `exit_codes`.
//  - kExternalCommand: `command` (with {INPUT} substituted) exits non-zero.
struct OracleConfig {
  OracleMode mode = OracleMode::kSignalCrash;
  std::set<int> signals = DefaultCrashSignals();
  std::set<int> exit_codes;
  std::string command;

  static std::set<int> DefaultCrashSignals();
};

struct RunLimits {
  std::chrono::milliseconds timeout{5000};
  std::size_t max_events = 1'000'000;
};

// A program under analysis. Run is const and reentrant: implementations keep
// no mutable state, so one target may serve many worker threads.
class Target {
 public:
  virtual ~Target() = default;

  // Throws Error(kInvalidArgument) on empty input, and the adapter errors
  // kTargetLaunchFailure / kTraceProtocolError for external programs.
  virtual TestCase Run(std::span<const std::uint8_t> input) const = 0;
};

// Evaluates a TargetSpec in process. A CRASH terminal is reported to the
// oracle as death by SIGSEGV, EXIT_OK as exit status 0.
class ToyTarget final : public Target {
 public:
  ToyTarget(TargetSpec spec, OracleConfig oracle, RunLimits limits = {});

  TestCase Run(std::span<const std::uint8_t> input) const override;
  const TargetSpec& spec() const { return spec_; }

 private:
  TargetSpec spec_;
  OracleConfig oracle_;
  RunLimits limits_;
};

struct ExternalTargetConfig {
  // Command line; "{INPUT}" is replaced with the path of a file holding the
  // input.
  std::string command_template;
  // Additionally connect the input file to the target's stdin.
  bool input_via_stdin = false;
};

// Runs a separate executable that reports branches through the file named
// by the TRACE_OUT environment variable.
class ExternalTarget final : public Target {
 public:
  ExternalTarget(ExternalTargetConfig config, OracleConfig oracle,
                 RunLimits limits = {});

  TestCase Run(std::span<const std::uint8_t> input) const override;

 private:
  ExternalTargetConfig config_;
  std::vector<std::string> argv_template_;
  OracleConfig oracle_;
  RunLimits limits_;
};

// Applies the oracle to a finished run. `input_path` names a file holding
// the input (needed by kExternalCommand only). A timed-out run never fires.
bool OracleFires(const OracleConfig& oracle, const ProcessOutcome& outcome,
                 const std::string& input_path, std::chrono::milliseconds
                 timeout);

// True iff running `input` follows the exploit trace through instance j-1,
// i.e. PrefixLength >= j. Throws Error(kOutOfRange) unless
// j < exploit.instance_count().
bool ReplayPrefixCheck(const Target& target,
                       std::span<const std::uint8_t> input,
                       const ExploitReference& exploit, std::size_t j);

}  // namespace patchloc

#endif  // PATCHLOC_TARGET_H_
