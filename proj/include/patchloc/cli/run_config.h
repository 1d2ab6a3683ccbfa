#ifndef PATCHLOC_CLI_RUN_CONFIG_H_
#define PATCHLOC_CLI_RUN_CONFIG_H_

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "patchloc/confuzzer.h"
#include "patchloc/target.h"

namespace patchloc::cli {

enum class ReportFormat { kTable, kRecords };

// Everything one session needs. Read from a flat "key = value" file (see
// KnownKeys) and/or set key by key from command line flags.
struct RunConfig {
  std::string toy_spec;  // target.toy
  std::string command;   // target.command
  bool input_via_stdin = false;
  std::string exploit;
  OracleConfig oracle;
  RunLimits limits;
  FuzzConfig fuzz;
  std::size_t top_k = 5;
  std::string cache_dir;
  ReportFormat format = ReportFormat::kTable;

  // Throws Error(kInvalidArgument) unless exactly one backend is chosen,
  // top_k >= 1 and the fuzzing parameters are usable.
  void Validate() const;
};

const std::vector<std::string>& KnownKeys();

// Throws Error(kParse) for unknown keys and malformed values.
void ApplySetting(RunConfig& config, std::string_view key,
                  std::string_view value);

// Parses the file format: one "key = value" per line, '#' starts a comment.
// Relative target.toy and exploit paths are resolved against `base_dir`.
RunConfig ParseRunConfig(std::string_view text, const std::string& base_dir);
// Throws Error(kIo) if the file cannot be read.
RunConfig LoadRunConfig(const std::string& path);

// Canonical text form; parsing it yields an equal configuration.
std::string FormatRunConfig(const RunConfig& config);

std::unique_ptr<Target> MakeTarget(const RunConfig& config);

}  // namespace patchloc::cli

#endif  // PATCHLOC_CLI_RUN_CONFIG_H_
