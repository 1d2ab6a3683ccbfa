// Command line front end: localize, bias, replay and report.

#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "patchloc/cli/commands.h"
#include "patchloc/cli/run_config.h"
#include "patchloc/error.h"

namespace {

using patchloc::cli::RunConfig;

// Flags that mirror config keys. They override values from --config.
struct FlagKey {
  const char* flag;
  const char* key;
  const char* help;
};

constexpr FlagKey kFlags[] = {
    {"--toy", "target.toy", "TargetSpec file of an in-process toy target"},
    {"--command", "target.command",
     "command template of an external target; {INPUT} names the input file"},
    {"--stdin", "target.stdin", "also feed the input on stdin (true/false)"},
    {"--exploit", "exploit", "file holding the exploiting input"},
    {"--oracle", "oracle.mode", "signal, exit_code or command"},
    {"--signals", "oracle.signals", "comma-separated crash signals"},
    {"--exit-codes", "oracle.exit_codes", "comma-separated exit codes"},
    {"--oracle-command", "oracle.command",
     "oracle command template; fires on non-zero exit"},
    {"--timeout-ms", "limits.timeout_ms", "per-run wall clock limit"},
    {"--max-events", "limits.max_events", "per-run branch event cap"},
    {"--beta", "fuzz.beta", "maximum bytes mutated together"},
    {"--gamma", "fuzz.gamma", "mutants per byte combination and round"},
    {"--min-obs", "fuzz.min_obs", "cases required to observe each target"},
    {"--min-miss", "fuzz.min_miss", "cases required to miss each target"},
    {"--fuzz-timeout", "fuzz.timeout_s", "fuzzing budget in seconds"},
    {"--max-execs", "fuzz.max_execs", "execution budget, 0 for none"},
    {"--seed", "fuzz.rng_seed", "random seed"},
    {"--workers", "fuzz.workers", "parallel target executions"},
    {"--mutable", "fuzz.mutable",
     "mutable byte ranges, e.g. 0-3,8 (inclusive)"},
    {"--top-k", "top_k", "locations shown in the table"},
    {"--cache", "cache_dir", "session cache directory"},
    {"--format", "report.format", "table or records"},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Patch location ranking from concentrated fuzzing"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  bool verbose = false;
  app.add_option("-c,--config", config_path, "key = value config file");
  app.add_flag("-v,--verbose", verbose, "log one line per fuzzing round");
  std::vector<std::string> overrides(std::size(kFlags));
  std::vector<CLI::Option*> options;
  for (std::size_t i = 0; i < std::size(kFlags); ++i) {
    options.push_back(
        app.add_option(kFlags[i].flag, overrides[i], kFlags[i].help));
  }
  std::vector<std::string> settings;
  app.add_option("--set", settings, "extra key=value settings");

  CLI::App* localize = app.add_subcommand("localize", "fuzz and rank");
  CLI::App* bias = app.add_subcommand("bias", "bias analysis of the cache");
  CLI::App* replay = app.add_subcommand("replay", "run a single input");
  std::string replay_input;
  replay->add_option("input", replay_input, "input file")->required();
  CLI::App* report = app.add_subcommand("report", "re-rank the cache");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help exits 0; every usage error maps onto the config-error status.
    return app.exit(e) == 0 ? patchloc::cli::kExitOk
                            : patchloc::cli::kExitUsage;
  }

  RunConfig config;
  try {
    if (!config_path.empty()) config = patchloc::cli::LoadRunConfig(config_path);
    for (std::size_t i = 0; i < options.size(); ++i) {
      if (options[i]->count() > 0) {
        patchloc::cli::ApplySetting(config, kFlags[i].key, overrides[i]);
      }
    }
    for (const std::string& s : settings) {
      std::size_t eq = s.find('=');
      if (eq == std::string::npos) {
        throw patchloc::Error(patchloc::ErrorCode::kParse,
                              "--set expects key=value, got '" + s + "'");
      }
      patchloc::cli::ApplySetting(config, s.substr(0, eq), s.substr(eq + 1));
    }
  } catch (const patchloc::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return patchloc::cli::ExitCodeFor(e.code());
  }

  if (*localize) {
    return patchloc::cli::RunLocalize(config, std::cout, std::cerr, verbose);
  }
  if (*bias) return patchloc::cli::RunBias(config, std::cout, std::cerr);
  if (*replay) {
    return patchloc::cli::RunReplay(config, replay_input, std::cout,
                                    std::cerr);
  }
  if (*report) return patchloc::cli::RunReport(config, std::cout, std::cerr);
  return patchloc::cli::kExitUsage;
}
