#include "patchloc/cli/store.h"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "patchloc/error.h"

namespace patchloc::cli {
namespace {

namespace fs = std::filesystem;

constexpr std::string_view kSuiteMagic = "patchloc-suite 1";
constexpr std::string_view kMapMagic = "patchloc-sm 1";

[[noreturn]] void Malformed(std::size_t line_no, const std::string& why) {
  throw Error(ErrorCode::kParse,
              "line " + std::to_string(line_no) + ": " + why);
}

std::string JoinEvents(const std::vector<BranchId>& events) {
  if (events.empty()) return "-";
  std::string out;
  char buf[24];
  for (BranchId id : events) {
    if (!out.empty()) out += ',';
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, ToValue(id), 16);
    out.append(buf, end);
  }
  return out;
}

template <typename T>
T ParseField(std::string_view text, int base, std::size_t line_no) {
  T value{};
  auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value, base);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    Malformed(line_no, "bad number '" + std::string(text) + "'");
  }
  return value;
}

template <typename T>
std::vector<T> ParseList(std::string_view text, int base,
                         std::size_t line_no) {
  std::vector<T> out;
  if (text == "-") return out;
  std::size_t start = 0;
  for (;;) {
    std::size_t comma = text.find(',', start);
    out.push_back(
        ParseField<T>(text.substr(start, comma - start), base, line_no));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::vector<BranchId> ParseEvents(std::string_view text, std::size_t line_no) {
  std::vector<BranchId> out;
  for (std::uint64_t v : ParseList<std::uint64_t>(text, 16, line_no)) {
    out.push_back(BranchId{v});
  }
  return out;
}

bool ParseFlag(std::string_view text, std::size_t line_no) {
  if (text == "0") return false;
  if (text == "1") return true;
  Malformed(line_no, "expected 0 or 1");
}

std::vector<std::string> Words(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> words;
  for (std::string w; in >> w;) words.push_back(w);
  return words;
}

void WriteFile(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out.flush()) throw Error(ErrorCode::kIo, "cannot write " + path.string());
}

}  // namespace

std::string HexEncode(std::span<const std::uint8_t> bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  if (bytes.empty()) return "-";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (std::uint8_t b : bytes) {
    out += kDigits[b >> 4];
    out += kDigits[b & 0xF];
  }
  return out;
}

Bytes HexDecode(std::string_view hex) {
  if (hex == "-") return {};
  if (hex.size() % 2 != 0) {
    throw Error(ErrorCode::kParse, "odd-length hex string");
  }
  Bytes out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    auto [ptr, ec] =
        std::from_chars(hex.data() + 2 * i, hex.data() + 2 * i + 2, out[i], 16);
    if (ec != std::errc() || ptr != hex.data() + 2 * i + 2) {
      throw Error(ErrorCode::kParse, "bad hex digit");
    }
  }
  return out;
}

void WriteSuite(std::ostream& out, const TestSuite& suite) {
  out << kSuiteMagic << '\n';
  out << "exploit " << (suite.exploit.trace().truncated ? 1 : 0) << ' '
      << HexEncode(suite.exploit.input()) << ' '
      << JoinEvents(suite.exploit.trace().events) << '\n';
  for (const TestCase& c : suite.cases) {
    std::string offsets;
    for (std::size_t k : c.mutated_offsets) {
      if (!offsets.empty()) offsets += ',';
      offsets += std::to_string(k);
    }
    out << "case " << (c.is_exploit() ? 'E' : 'B') << ' '
        << (c.provenance == Provenance::kSeed ? 'S' : 'F') << ' '
        << (c.trace.truncated ? 1 : 0) << ' ' << HexEncode(c.input) << ' '
        << JoinEvents(c.trace.events) << ' '
        << (offsets.empty() ? "-" : offsets) << '\n';
  }
}

TestSuite ReadSuite(std::istream& in) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line) || line != kSuiteMagic) {
    Malformed(line_no, "not a suite file");
  }
  ++line_no;
  if (!std::getline(in, line)) Malformed(line_no, "missing exploit line");
  std::vector<std::string> w = Words(line);
  if (w.size() != 4 || w[0] != "exploit") {
    Malformed(line_no, "expected: exploit TRUNCATED INPUT EVENTS");
  }
  ExecutionTrace exploit_trace{ParseEvents(w[3], line_no),
                               ParseFlag(w[1], line_no)};
  TestSuite suite{{}, ExploitReference(HexDecode(w[2]), exploit_trace)};
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    w = Words(line);
    if (w.size() != 7 || w[0] != "case") {
      Malformed(line_no,
                "expected: case VERDICT PROVENANCE TRUNCATED INPUT EVENTS "
                "OFFSETS");
    }
    TestCase c;
    if (w[1] == "E") {
      c.verdict = Verdict::kExploit;
    } else if (w[1] != "B") {
      Malformed(line_no, "verdict must be E or B");
    }
    if (w[2] == "S") {
      c.provenance = Provenance::kSeed;
    } else if (w[2] != "F") {
      Malformed(line_no, "provenance must be S or F");
    }
    c.trace.truncated = ParseFlag(w[3], line_no);
    c.input = HexDecode(w[4]);
    c.trace.events = ParseEvents(w[5], line_no);
    c.mutated_offsets = ParseList<std::size_t>(w[6], 10, line_no);
    suite.cases.push_back(std::move(c));
  }
  return suite;
}

void WriteSensitivity(std::ostream& out, const SensitivityMap& sm) {
  out << kMapMagic << '\n';
  out << "shape " << sm.instance_count() << ' ' << sm.input_len() << '\n';
  for (auto [j, k] : sm.SetBits()) out << j << ' ' << k << '\n';
}

SensitivityMap ReadSensitivity(std::istream& in) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line) || line != kMapMagic) {
    Malformed(line_no, "not a sensitivity map file");
  }
  ++line_no;
  std::vector<std::string> w;
  if (!std::getline(in, line) || (w = Words(line)).size() != 3 ||
      w[0] != "shape") {
    Malformed(line_no, "expected: shape INSTANCES BYTES");
  }
  SensitivityMap sm(ParseField<std::size_t>(w[1], 10, line_no),
                    ParseField<std::size_t>(w[2], 10, line_no));
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    w = Words(line);
    if (w.size() != 2) Malformed(line_no, "expected: INSTANCE BYTE");
    std::size_t j = ParseField<std::size_t>(w[0], 10, line_no);
    std::size_t k = ParseField<std::size_t>(w[1], 10, line_no);
    if (j >= sm.instance_count() || k >= sm.input_len()) {
      Malformed(line_no, "bit outside the map");
    }
    sm.Mark(j, k);
  }
  return sm;
}

void WriteStats(std::ostream& out, const FuzzStats& stats) {
  out << "executions = " << stats.executions << '\n'
      << "exploits = " << stats.exploits << '\n'
      << "pool_size = " << stats.pool_size << '\n'
      << "stop = " << StopReasonName(stats.stop) << '\n'
      << "rounds = " << stats.rounds.size() << '\n';
  out << "\n# target instance location observed missed sufficient\n";
  for (const TargetProgress& t : stats.targets) {
    out << "target " << t.instance << " 0x" << std::hex << ToValue(t.location)
        << std::dec << ' ' << t.count.observed << ' ' << t.count.missed << ' '
        << (t.sufficient ? 1 : 0) << '\n';
  }
  out << "\n# round id seed target goal width bytes cases exploits "
         "new_seeds\n";
  for (const FuzzRound& r : stats.rounds) {
    std::string bytes;
    for (std::size_t k : r.bytes) {
      if (!bytes.empty()) bytes += ',';
      bytes += std::to_string(k);
    }
    out << "round " << r.id << ' ' << r.seed << ' ' << r.target << ' '
        << GoalName(r.goal) << ' ' << r.width << ' ' << bytes << ' '
        << r.case_count << ' ' << r.exploits << ' ' << r.new_seeds << '\n';
  }
}

Bytes ReadBinaryFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path);
  return Bytes(std::istreambuf_iterator<char>(in),
               std::istreambuf_iterator<char>());
}

void SaveSession(const std::string& dir, const RunConfig& config,
                 const TestSuite& deduplicated, const SensitivityMap& sm,
                 const FuzzStats& stats) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + dir + ": " + ec.message());
  fs::path base(dir);
  WriteFile(base / "config.txt", FormatRunConfig(config));
  std::ostringstream suite, map, st;
  WriteSuite(suite, deduplicated);
  WriteSensitivity(map, sm);
  WriteStats(st, stats);
  WriteFile(base / "suite.txt", suite.str());
  WriteFile(base / "sm.txt", map.str());
  WriteFile(base / "stats.txt", st.str());
}

CachedSession LoadSession(const std::string& dir) {
  fs::path base(dir);
  std::ifstream suite_in(base / "suite.txt", std::ios::binary);
  std::ifstream map_in(base / "sm.txt", std::ios::binary);
  if (dir.empty() || !suite_in || !map_in) {
    throw Error(ErrorCode::kMissingCache,
                "no cached session in '" + dir + "'");
  }
  TestSuite suite = ReadSuite(suite_in);
  SensitivityMap sm = ReadSensitivity(map_in);
  return CachedSession{std::move(suite), std::move(sm)};
}

}  // namespace patchloc::cli
