#include "patchloc/target.h"

#include <signal.h>

#include <utility>

#include "patchloc/error.h"

namespace patchloc {
namespace {

void RequireInput(std::span<const std::uint8_t> input) {
  if (input.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "empty input");
  }
}

}  // namespace

std::set<int> OracleConfig::DefaultCrashSignals() {
  return {SIGSEGV, SIGABRT, SIGFPE, SIGBUS, SIGILL};
}

bool OracleFires(const OracleConfig& oracle, const ProcessOutcome& outcome,
                 const std::string& input_path,
                 std::chrono::milliseconds timeout) {
  if (outcome.kind == ProcessOutcome::Kind::kTimedOut) return false;
  switch (oracle.mode) {
    case OracleMode::kSignalCrash:
      return outcome.kind == ProcessOutcome::Kind::kSignaled &&
             oracle.signals.count(outcome.signal) > 0;
    case OracleMode::kExitCodeSet:
      return outcome.kind == ProcessOutcome::Kind::kExited &&
             oracle.exit_codes.count(outcome.exit_code) > 0;
    case OracleMode::kExternalCommand: {
      ProcessRequest request;
      request.argv =
          SubstituteInput(SplitCommandLine(oracle.command), input_path);
      request.timeout = timeout;
      ProcessOutcome verdict = RunProcess(request);
      return verdict.kind != ProcessOutcome::Kind::kExited ||
             verdict.exit_code != 0;
    }
  }
  return false;
}

ToyTarget::ToyTarget(TargetSpec spec, OracleConfig oracle, RunLimits limits)
    : spec_(std::move(spec)), oracle_(std::move(oracle)), limits_(limits) {
  ValidateTargetSpec(spec_);
}

TestCase ToyTarget::Run(std::span<const std::uint8_t> input) const {
  RequireInput(input);
  Interpretation run = Interpret(spec_, input, limits_.max_events);
  TestCase result;
  result.input.assign(input.begin(), input.end());
  result.trace = std::move(run.trace);
  if (result.trace.truncated) {
    // The interpreter never reaches a terminal once capped.
    result.verdict = Verdict::kBenign;
    return result;
  }
  ProcessOutcome outcome;
  if (run.terminal == Terminal::kCrash) {
    outcome = {ProcessOutcome::Kind::kSignaled, 0, SIGSEGV};
  } else {
    outcome = {ProcessOutcome::Kind::kExited, 0, 0};
  }
  bool fires;
  if (oracle_.mode == OracleMode::kExternalCommand) {
    TempFile file("input");
    file.Write(input);
    fires = OracleFires(oracle_, outcome, file.path(), limits_.timeout);
  } else {
    fires = OracleFires(oracle_, outcome, {}, limits_.timeout);
  }
  result.verdict = fires ? Verdict::kExploit : Verdict::kBenign;
  return result;
}

ExternalTarget::ExternalTarget(ExternalTargetConfig config,
                               OracleConfig oracle, RunLimits limits)
    : config_(std::move(config)),
      argv_template_(SplitCommandLine(config_.command_template)),
      oracle_(std::move(oracle)),
      limits_(limits) {
  if (argv_template_.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "empty command template");
  }
}

TestCase ExternalTarget::Run(std::span<const std::uint8_t> input) const {
  RequireInput(input);
  TempFile input_file("input");
  input_file.Write(input);
  TempFile trace_file("trace");

  ProcessRequest request;
  request.argv = SubstituteInput(argv_template_, input_file.path());
  request.extra_env.emplace_back("TRACE_OUT", trace_file.path());
  if (config_.input_via_stdin) request.stdin_path = input_file.path();
  request.timeout = limits_.timeout;
  ProcessOutcome outcome = RunProcess(request);

  TestCase result;
  result.input.assign(input.begin(), input.end());
  result.trace = ParseTraceStream(trace_file.ReadAll(), limits_.max_events);
  if (outcome.kind == ProcessOutcome::Kind::kTimedOut) {
    result.trace.truncated = true;
    result.verdict = Verdict::kBenign;
    return result;
  }
  result.verdict =
      OracleFires(oracle_, outcome, input_file.path(), limits_.timeout)
          ? Verdict::kExploit
          : Verdict::kBenign;
  return result;
}

bool ReplayPrefixCheck(const Target& target,
                       std::span<const std::uint8_t> input,
                       const ExploitReference& exploit, std::size_t j) {
  if (j >= exploit.instance_count()) {
    throw Error(ErrorCode::kOutOfRange,
                "instance " + std::to_string(j) + " beyond exploit trace of " +
                    std::to_string(exploit.instance_count()));
  }
  return PrefixLength(target.Run(input).trace, exploit) >= j;
}

}  // namespace patchloc
