#include "patchloc/cli/commands.h"

#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

#include "patchloc/bias.h"
#include "patchloc/cli/report.h"
#include "patchloc/cli/store.h"
#include "patchloc/confuzzer.h"
#include "patchloc/ranker.h"

namespace patchloc::cli {
namespace {

int Guard(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return ExitCodeFor(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

RankedReport Rank(const TestSuite& deduplicated, std::size_t k) {
  RankedReport report =
      NormalizeAndRank(Score(deduplicated), deduplicated.exploit, k);
  report.suite_digest = SuiteDigest(deduplicated);
  return report;
}

void Emit(std::ostream& out, const RankedReport& report, ReportFormat format) {
  if (format == ReportFormat::kTable) {
    RenderTable(out, report);
  } else {
    RenderRecords(out, report);
  }
}

}  // namespace

int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kSeedNotExploit:
      return kExitNotExploit;
    case ErrorCode::kTargetLaunchFailure:
    case ErrorCode::kTraceProtocolError:
      return kExitAdapter;
    default:
      return kExitUsage;
  }
}

int RunLocalize(const RunConfig& config, std::ostream& out, std::ostream& err,
                bool verbose) {
  return Guard(err, [&] {
    config.Validate();
    Bytes exploit = ReadBinaryFile(config.exploit);
    std::unique_ptr<Target> target = MakeTarget(config);
    RoundObserver progress;
    if (verbose) {
      progress = [&err](const FuzzRound& r, const FuzzStats& s) {
        err << "round " << r.id << " target " << r.target << " #B "
            << r.width << " goal " << GoalName(r.goal) << " cases "
            << r.case_count << " exploits " << r.exploits << " pool "
            << s.pool_size << '\n';
      };
    }
    FuzzResult result = Fuzz(exploit, *target, config.fuzz, progress);
    if (verbose) {
      err << "stopped: " << StopReasonName(result.stats.stop) << " after "
          << result.stats.executions << " executions\n";
    }
    TestSuite suite = Dedupe(result.suite);
    RankedReport report = Rank(suite, config.top_k);
    Emit(out, report, config.format);
    if (!config.cache_dir.empty()) {
      SaveSession(config.cache_dir, config, suite, result.sensitivity,
                  result.stats);
      std::ofstream records(std::filesystem::path(config.cache_dir) /
                            "report.txt");
      RenderRecords(records, report);
    }
    return kExitOk;
  });
}

int RunBias(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return Guard(err, [&] {
    CachedSession session = LoadSession(config.cache_dir);
    RenderBias(out, AnalyzeBias(session.suite));
    return kExitOk;
  });
}

int RunReplay(const RunConfig& config, const std::string& input_path,
              std::ostream& out, std::ostream& err) {
  return Guard(err, [&] {
    std::unique_ptr<Target> target = MakeTarget(config);
    TestCase run = target->Run(ReadBinaryFile(input_path));
    out << "events=" << run.trace.events.size() << '\n'
        << "truncated=" << (run.trace.truncated ? 1 : 0) << '\n'
        << "verdict=" << (run.is_exploit() ? "exploit" : "benign") << '\n';
    if (!config.exploit.empty()) {
      TestCase reference = target->Run(ReadBinaryFile(config.exploit));
      ExploitReference exploit(reference.input, reference.trace);
      out << "prefix=" << PrefixLength(run.trace, exploit) << '/'
          << exploit.instance_count() << '\n';
    }
    return kExitOk;
  });
}

int RunReport(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return Guard(err, [&] {
    if (config.top_k < 1) {
      throw Error(ErrorCode::kInvalidArgument, "top_k must be >= 1");
    }
    CachedSession session = LoadSession(config.cache_dir);
    Emit(out, Rank(Dedupe(session.suite), config.top_k), config.format);
    return kExitOk;
  });
}

}  // namespace patchloc::cli
