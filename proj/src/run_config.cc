#include "patchloc/cli/run_config.h"

#include <charconv>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "patchloc/error.h"
#include "patchloc/target_spec.h"

namespace patchloc::cli {
namespace {

namespace fs = std::filesystem;

const std::map<std::string, int, std::less<>>& SignalNames() {
  static const std::map<std::string, int, std::less<>> names = {
      {"ABRT", SIGABRT}, {"BUS", SIGBUS},   {"FPE", SIGFPE},
      {"ILL", SIGILL},   {"KILL", SIGKILL}, {"SEGV", SIGSEGV},
      {"SYS", SIGSYS},   {"TRAP", SIGTRAP},
  };
  return names;
}

[[noreturn]] void Bad(std::string_view key, std::string_view value,
                      std::string_view why) {
  throw Error(ErrorCode::kParse, std::string(key) + " = '" +
                                     std::string(value) + "': " +
                                     std::string(why));
}

std::string_view Trim(std::string_view s) {
  const char* ws = " \t\r";
  std::size_t b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  std::size_t e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> SplitList(std::string_view s) {
  std::vector<std::string_view> out;
  if (Trim(s).empty()) return out;
  std::size_t start = 0;
  for (;;) {
    std::size_t comma = s.find(',', start);
    out.push_back(Trim(s.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

template <typename T>
T ParseNumber(std::string_view key, std::string_view value) {
  T out{};
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(),
                                   out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    Bad(key, value, "not a valid number");
  }
  return out;
}

bool ParseBool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  Bad(key, value, "expected true or false");
}

int ParseSignal(std::string_view key, std::string_view value) {
  std::string_view name = value;
  if (name.substr(0, 3) == "SIG") name.remove_prefix(3);
  auto it = SignalNames().find(name);
  if (it != SignalNames().end()) return it->second;
  int sig = ParseNumber<int>(key, value);
  if (sig <= 0 || sig >= NSIG) Bad(key, value, "no such signal");
  return sig;
}

std::vector<ByteRange> ParseRanges(std::string_view key,
                                   std::string_view value) {
  std::vector<ByteRange> ranges;
  for (std::string_view item : SplitList(value)) {
    std::size_t dash = item.find('-');
    ByteRange r;
    if (dash == std::string_view::npos) {
      r.first = r.last = ParseNumber<std::size_t>(key, item);
    } else {
      r.first = ParseNumber<std::size_t>(key, Trim(item.substr(0, dash)));
      r.last = ParseNumber<std::size_t>(key, Trim(item.substr(dash + 1)));
    }
    if (r.first > r.last) Bad(key, value, "reversed range");
    ranges.push_back(r);
  }
  return ranges;
}

template <typename Container>
std::string JoinNumbers(const Container& values) {
  std::string out;
  for (const auto& v : values) {
    if (!out.empty()) out += ',';
    out += std::to_string(v);
  }
  return out;
}

const char* OracleModeName(OracleMode mode) {
  switch (mode) {
    case OracleMode::kSignalCrash:
      return "signal";
    case OracleMode::kExitCodeSet:
      return "exit_code";
    case OracleMode::kExternalCommand:
      return "command";
  }
  return "signal";
}

using Setter = std::function<void(RunConfig&, std::string_view,
                                  std::string_view)>;

const std::map<std::string, Setter, std::less<>>& Setters() {
  static const std::map<std::string, Setter, std::less<>> setters = {
      {"target.toy",
       [](RunConfig& c, auto, auto v) { c.toy_spec = std::string(v); }},
      {"target.command",
       [](RunConfig& c, auto, auto v) { c.command = std::string(v); }},
      {"target.stdin",
       [](RunConfig& c, auto k, auto v) { c.input_via_stdin = ParseBool(k, v); }},
      {"exploit",
       [](RunConfig& c, auto, auto v) { c.exploit = std::string(v); }},
      {"oracle.mode",
       [](RunConfig& c, auto k, auto v) {
         if (v == "signal") {
           c.oracle.mode = OracleMode::kSignalCrash;
         } else if (v == "exit_code") {
           c.oracle.mode = OracleMode::kExitCodeSet;
         } else if (v == "command") {
           c.oracle.mode = OracleMode::kExternalCommand;
         } else {
           Bad(k, v, "expected signal, exit_code or command");
         }
       }},
      {"oracle.signals",
       [](RunConfig& c, auto k, auto v) {
         c.oracle.signals.clear();
         for (auto item : SplitList(v)) c.oracle.signals.insert(ParseSignal(k, item));
       }},
      {"oracle.exit_codes",
       [](RunConfig& c, auto k, auto v) {
         c.oracle.exit_codes.clear();
         for (auto item : SplitList(v)) {
           int code = ParseNumber<int>(k, item);
           if (code < 0 || code > 255) Bad(k, v, "exit codes are 0..255");
           c.oracle.exit_codes.insert(code);
         }
       }},
      {"oracle.command",
       [](RunConfig& c, auto, auto v) { c.oracle.command = std::string(v); }},
      {"limits.timeout_ms",
       [](RunConfig& c, auto k, auto v) {
         c.limits.timeout =
             std::chrono::milliseconds(ParseNumber<std::uint64_t>(k, v));
       }},
      {"limits.max_events",
       [](RunConfig& c, auto k, auto v) {
         c.limits.max_events = ParseNumber<std::size_t>(k, v);
       }},
      {"fuzz.beta",
       [](RunConfig& c, auto k, auto v) { c.fuzz.beta = ParseNumber<std::size_t>(k, v); }},
      {"fuzz.gamma",
       [](RunConfig& c, auto k, auto v) { c.fuzz.gamma = ParseNumber<std::size_t>(k, v); }},
      {"fuzz.min_obs",
       [](RunConfig& c, auto k, auto v) { c.fuzz.min_obs = ParseNumber<std::size_t>(k, v); }},
      {"fuzz.min_miss",
       [](RunConfig& c, auto k, auto v) { c.fuzz.min_miss = ParseNumber<std::size_t>(k, v); }},
      {"fuzz.timeout_s",
       [](RunConfig& c, auto k, auto v) {
         double s = ParseNumber<double>(k, v);
         if (s < 0) Bad(k, v, "must not be negative");
         c.fuzz.timeout = std::chrono::duration<double>(s);
       }},
      {"fuzz.max_execs",
       [](RunConfig& c, auto k, auto v) {
         c.fuzz.max_execs = ParseNumber<std::uint64_t>(k, v);
       }},
      {"fuzz.rng_seed",
       [](RunConfig& c, auto k, auto v) {
         c.fuzz.rng_seed = ParseNumber<std::uint64_t>(k, v);
       }},
      {"fuzz.workers",
       [](RunConfig& c, auto k, auto v) { c.fuzz.workers = ParseNumber<std::size_t>(k, v); }},
      {"fuzz.mutable",
       [](RunConfig& c, auto k, auto v) { c.fuzz.mutable_ranges = ParseRanges(k, v); }},
      {"top_k",
       [](RunConfig& c, auto k, auto v) { c.top_k = ParseNumber<std::size_t>(k, v); }},
      {"cache_dir",
       [](RunConfig& c, auto, auto v) { c.cache_dir = std::string(v); }},
      {"report.format",
       [](RunConfig& c, auto k, auto v) {
         if (v == "table") {
           c.format = ReportFormat::kTable;
         } else if (v == "records") {
           c.format = ReportFormat::kRecords;
         } else {
           Bad(k, v, "expected table or records");
         }
       }},
  };
  return setters;
}

std::string Resolve(const std::string& base_dir, const std::string& path) {
  if (path.empty() || base_dir.empty() || fs::path(path).is_absolute()) {
    return path;
  }
  return (fs::path(base_dir) / path).lexically_normal().string();
}

}  // namespace

void RunConfig::Validate() const {
  if (toy_spec.empty() == command.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "set exactly one of target.toy and target.command");
  }
  if (top_k < 1) throw Error(ErrorCode::kInvalidArgument, "top_k must be >= 1");
  if (oracle.mode == OracleMode::kExternalCommand && oracle.command.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "oracle.mode = command needs oracle.command");
  }
  if (limits.max_events == 0) {
    throw Error(ErrorCode::kInvalidArgument, "limits.max_events must be >= 1");
  }
  fuzz.Validate();
}

const std::vector<std::string>& KnownKeys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> out;
    for (const auto& [key, setter] : Setters()) out.push_back(key);
    return out;
  }();
  return keys;
}

void ApplySetting(RunConfig& config, std::string_view key,
                  std::string_view value) {
  auto it = Setters().find(key);
  if (it == Setters().end()) {
    throw Error(ErrorCode::kParse, "unknown key '" + std::string(key) + "'");
  }
  it->second(config, key, Trim(value));
}

RunConfig ParseRunConfig(std::string_view text, const std::string& base_dir) {
  RunConfig config;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (std::size_t hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = Trim(line);
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::kParse,
                  "line " + std::to_string(line_no) + ": expected key = value");
    }
    try {
      ApplySetting(config, Trim(line.substr(0, eq)), line.substr(eq + 1));
    } catch (const Error& e) {
      throw Error(ErrorCode::kParse,
                  "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  config.toy_spec = Resolve(base_dir, config.toy_spec);
  config.exploit = Resolve(base_dir, config.exploit);
  return config;
}

RunConfig LoadRunConfig(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read config " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return ParseRunConfig(text.str(), fs::path(path).parent_path().string());
}

std::string FormatRunConfig(const RunConfig& c) {
  std::ostringstream out;
  auto line = [&](std::string_view key, const std::string& value) {
    out << key << " = " << value << '\n';
  };
  if (!c.toy_spec.empty()) line("target.toy", c.toy_spec);
  if (!c.command.empty()) line("target.command", c.command);
  line("target.stdin", c.input_via_stdin ? "true" : "false");
  line("exploit", c.exploit);
  line("oracle.mode", OracleModeName(c.oracle.mode));
  line("oracle.signals", JoinNumbers(c.oracle.signals));
  line("oracle.exit_codes", JoinNumbers(c.oracle.exit_codes));
  if (!c.oracle.command.empty()) line("oracle.command", c.oracle.command);
  line("limits.timeout_ms", std::to_string(c.limits.timeout.count()));
  line("limits.max_events", std::to_string(c.limits.max_events));
  line("fuzz.beta", std::to_string(c.fuzz.beta));
  line("fuzz.gamma", std::to_string(c.fuzz.gamma));
  line("fuzz.min_obs", std::to_string(c.fuzz.min_obs));
  line("fuzz.min_miss", std::to_string(c.fuzz.min_miss));
  {
    std::ostringstream t;
    t.precision(17);
    t << c.fuzz.timeout.count();
    line("fuzz.timeout_s", t.str());
  }
  line("fuzz.max_execs", std::to_string(c.fuzz.max_execs));
  line("fuzz.rng_seed", std::to_string(c.fuzz.rng_seed));
  line("fuzz.workers", std::to_string(c.fuzz.workers));
  std::string ranges;
  for (const ByteRange& r : c.fuzz.mutable_ranges) {
    if (!ranges.empty()) ranges += ',';
    ranges += std::to_string(r.first) + "-" + std::to_string(r.last);
  }
  line("fuzz.mutable", ranges);
  line("top_k", std::to_string(c.top_k));
  if (!c.cache_dir.empty()) line("cache_dir", c.cache_dir);
  line("report.format", c.format == ReportFormat::kTable ? "table" : "records");
  return out.str();
}

std::unique_ptr<Target> MakeTarget(const RunConfig& config) {
  config.Validate();
  if (!config.toy_spec.empty()) {
    return std::make_unique<ToyTarget>(LoadTargetSpec(config.toy_spec),
                                       config.oracle, config.limits);
  }
  return std::make_unique<ExternalTarget>(
      ExternalTargetConfig{config.command, config.input_via_stdin},
      config.oracle, config.limits);
}

}  // namespace patchloc::cli
