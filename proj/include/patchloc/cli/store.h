#ifndef PATCHLOC_CLI_STORE_H_
#define PATCHLOC_CLI_STORE_H_

#include <iosfwd>
#include <string>

#include "patchloc/cli/run_config.h"
#include "patchloc/confuzzer.h"
#include "patchloc/sensitivity_map.h"
#include "patchloc/trace.h"

// Text formats of the session cache directory:
//   config.txt  FormatRunConfig snapshot
//   suite.txt   deduplicated suite
//   sm.txt      sensitivity map set bits
//   stats.txt   fuzzing statistics and round log
//   report.txt  ranking in the records format
namespace patchloc::cli {

void WriteSuite(std::ostream& out, const TestSuite& suite);
// Throws Error(kParse) on malformed input.
TestSuite ReadSuite(std::istream& in);

void WriteSensitivity(std::ostream& out, const SensitivityMap& sm);
SensitivityMap ReadSensitivity(std::istream& in);

void WriteStats(std::ostream& out, const FuzzStats& stats);

std::string HexEncode(std::span<const std::uint8_t> bytes);
Bytes HexDecode(std::string_view hex);

// Reads a whole file; Error(kIo) on failure.
Bytes ReadBinaryFile(const std::string& path);

struct CachedSession {
  TestSuite suite;
  SensitivityMap sensitivity;
};

// Writes config, suite, map and stats; creates the directory if needed.
void SaveSession(const std::string& dir, const RunConfig& config,
                 const TestSuite& deduplicated, const SensitivityMap& sm,
                 const FuzzStats& stats);
// Throws Error(kMissingCache) if the directory holds no session.
CachedSession LoadSession(const std::string& dir);

}  // namespace patchloc::cli

#endif  // PATCHLOC_CLI_STORE_H_
