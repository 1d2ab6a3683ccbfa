#include "patchloc/ranker.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <utility>

#include "patchloc/error.h"

namespace patchloc {
namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

class Fnv1a {
 public:
  void Add(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      hash_ ^= (v >> (8 * i)) & 0xFF;
      hash_ *= kFnvPrime;
    }
  }
  void Add(std::span<const std::uint8_t> bytes) {
    Add(bytes.size());
    for (std::uint8_t b : bytes) {
      hash_ ^= b;
      hash_ *= kFnvPrime;
    }
  }
  void Add(const std::vector<BranchId>& events) {
    Add(events.size());
    for (BranchId id : events) Add(ToValue(id));
  }
  std::uint64_t value() const { return hash_; }

 private:
  std::uint64_t hash_ = kFnvOffset;
};

Rational Normalize(const Rational& x, const Rational& lo, const Rational& hi) {
  if (hi == lo) return Rational(0);
  return (x - lo) / (hi - lo);
}

}  // namespace

TestSuite Dedupe(const TestSuite& suite) {
  TestSuite out{{}, suite.exploit};
  std::set<std::pair<std::vector<BranchId>, Verdict>> seen;
  for (const TestCase& c : suite.cases) {
    if (seen.emplace(c.trace.events, c.verdict).second) out.cases.push_back(c);
  }
  return out;
}

std::vector<LocationStats> Score(const TestSuite& suite) {
  std::span<const BranchId> locations = suite.exploit.on_exploit_locations();
  std::vector<LocationStats> stats(locations.size());
  for (std::size_t i = 0; i < locations.size(); ++i) {
    stats[i].location = locations[i];
  }
  std::size_t n_exploit = 0;
  std::vector<BranchId> observed;
  for (const TestCase& c : suite.cases) {
    observed = c.trace.events;
    std::sort(observed.begin(), observed.end());
    observed.erase(std::unique(observed.begin(), observed.end()),
                   observed.end());
    if (c.is_exploit()) ++n_exploit;
    for (LocationStats& s : stats) {
      if (!std::binary_search(observed.begin(), observed.end(), s.location)) {
        continue;
      }
      ++s.n_obs;
      if (c.is_exploit()) ++s.n_obs_exploit;
    }
  }
  if (n_exploit == 0) {
    throw Error(ErrorCode::kNoExploitInSuite, "the suite holds no exploit");
  }
  for (LocationStats& s : stats) {
    s.n_exploit = n_exploit;
    auto as_int = [](std::size_t v) { return static_cast<std::int64_t>(v); };
    s.necessity = Rational(as_int(s.n_obs_exploit), as_int(n_exploit));
    s.sufficiency = s.n_obs == 0
                        ? Rational(0)
                        : Rational(as_int(s.n_obs_exploit), as_int(s.n_obs));
  }
  return stats;
}

std::size_t CrashDistance(BranchId location, const ExploitReference& exploit) {
  const std::vector<BranchId>& events = exploit.trace().events;
  auto it = std::find(events.rbegin(), events.rend(), location);
  if (it == events.rend()) {
    throw Error(ErrorCode::kInvalidArgument,
                "location " + std::to_string(ToValue(location)) +
                    " is not on the exploit trace");
  }
  // it.base() points one past the match, so this is m - 1 - index.
  return static_cast<std::size_t>(events.end() - it.base());
}

RankedReport NormalizeAndRank(std::span<const LocationStats> stats,
                              const ExploitReference& exploit, std::size_t k) {
  if (stats.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "nothing to rank");
  }
  if (k == 0) throw Error(ErrorCode::kInvalidArgument, "top-k must be >= 1");
  auto [n_lo, n_hi] = std::minmax_element(
      stats.begin(), stats.end(),
      [](const auto& a, const auto& b) { return a.necessity < b.necessity; });
  auto [s_lo, s_hi] = std::minmax_element(
      stats.begin(), stats.end(), [](const auto& a, const auto& b) {
        return a.sufficiency < b.sufficiency;
      });

  RankedReport report;
  report.k = k;
  for (const LocationStats& s : stats) {
    RankedEntry e;
    e.location = s.location;
    e.necessity = s.necessity;
    e.sufficiency = s.sufficiency;
    e.nm_necessity = Normalize(s.necessity, n_lo->necessity, n_hi->necessity);
    e.nm_sufficiency =
        Normalize(s.sufficiency, s_lo->sufficiency, s_hi->sufficiency);
    e.l2_squared = e.nm_necessity * e.nm_necessity +
                   e.nm_sufficiency * e.nm_sufficiency;
    e.l2 = std::sqrt(e.l2_squared.ToDouble());
    e.crash_distance = CrashDistance(s.location, exploit);
    report.entries.push_back(std::move(e));
  }
  std::sort(report.entries.begin(), report.entries.end(),
            [](const RankedEntry& a, const RankedEntry& b) {
              if (a.l2_squared != b.l2_squared) {
                return a.l2_squared > b.l2_squared;
              }
              if (a.crash_distance != b.crash_distance) {
                return a.crash_distance < b.crash_distance;
              }
              return ToValue(a.location) < ToValue(b.location);
            });
  for (std::size_t i = 0; i < report.entries.size(); ++i) {
    report.entries[i].rank = i + 1;
  }
  return report;
}

std::uint64_t SuiteDigest(const TestSuite& suite) {
  Fnv1a h;
  h.Add(suite.exploit.input());
  h.Add(suite.exploit.trace().events);
  h.Add(suite.cases.size());
  for (const TestCase& c : suite.cases) {
    h.Add(static_cast<std::uint64_t>(c.verdict));
    h.Add(c.input);
    h.Add(c.trace.events);
  }
  return h.value();
}

Factorization EstimateFactorization(std::span<const TestCase> cases,
                                    const ExploitReference& exploit,
                                    std::size_t j) {
  if (j < 1 || j >= exploit.instance_count()) {
    throw Error(ErrorCode::kOutOfRange,
                "instance " + std::to_string(j) + " outside [1, " +
                    std::to_string(exploit.instance_count()) + ")");
  }
  std::int64_t exploits = 0;
  std::int64_t prev_seen = 0;      // C=1, Y_{j-1}=1
  std::int64_t both_seen = 0;      // C=1, Y_{j-1}=1, Y_j=1
  std::int64_t only_j_seen = 0;    // C=1, Y_{j-1}=0, Y_j=1
  std::int64_t j_seen = 0;         // C=1, Y_j=1
  for (const TestCase& c : cases) {
    if (!c.is_exploit()) continue;
    std::size_t p = PrefixLength(c.trace, exploit);
    bool y_prev = p > j - 1;
    bool y_j = p > j;
    ++exploits;
    if (y_prev) ++prev_seen;
    if (y_j) ++j_seen;
    if (y_prev && y_j) ++both_seen;
    if (!y_prev && y_j) ++only_j_seen;
  }
  Factorization f;
  if (exploits == 0) return f;
  std::int64_t prev_missed = exploits - prev_seen;
  f.lhs = Rational(j_seen, exploits);
  f.p2 = Rational(prev_seen, exploits);
  f.p4 = Rational(prev_missed, exploits);
  if (prev_seen > 0) f.p1 = Rational(both_seen, prev_seen);
  if (prev_missed > 0) f.p3 = Rational(only_j_seen, prev_missed);
  return f;
}

}  // namespace patchloc
