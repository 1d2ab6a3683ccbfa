#ifndef PATCHLOC_RANKER_H_
#define PATCHLOC_RANKER_H_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "patchloc/rational.h"
#include "patchloc/trace.h"

namespace patchloc {

struct LocationStats {
  BranchId location{};
  std::size_t n_obs_exploit = 0;  // cases observing the location and exploiting
  std::size_t n_exploit = 0;
  std::size_t n_obs = 0;
  Rational necessity;    // n_obs_exploit / n_exploit
  Rational sufficiency;  // n_obs_exploit / n_obs, 0 when n_obs is 0

  friend bool operator==(const LocationStats&, const LocationStats&) = default;
};

struct RankedEntry {
  BranchId location{};
  Rational necessity;
  Rational sufficiency;
  Rational nm_necessity;
  Rational nm_sufficiency;
  Rational l2_squared;
  double l2 = 0;
  std::size_t crash_distance = 0;
  std::size_t rank = 0;  // 1-based

  friend bool operator==(const RankedEntry&, const RankedEntry&) = default;
};

struct RankedReport {
  std::vector<RankedEntry> entries;  // full table, best first
  std::size_t k = 5;
  std::uint64_t suite_digest = 0;

  std::span<const RankedEntry> Top() const {
    return std::span<const RankedEntry>(entries).first(
        std::min(k, entries.size()));
  }
};

// One case per distinct (trace events, verdict); first occurrences win, so
// a suite that starts with the seed exploit keeps it.
TestSuite Dedupe(const TestSuite& suite);

// Counts location membership over every case for each on-exploit location,
// in first-occurrence order. Throws Error(kNoExploitInSuite) when no case
// exploits.
std::vector<LocationStats> Score(const TestSuite& suite);

// m - 1 - (index of the last occurrence of `location`). Throws
// Error(kInvalidArgument) if the exploit trace never reaches it.
std::size_t CrashDistance(BranchId location, const ExploitReference& exploit);

// Min-max normalizes both scores over `stats` (a constant dimension becomes
// all zero) and orders by L2 norm descending, crash distance ascending,
// location id ascending. Throws Error(kInvalidArgument) on empty stats or
// k == 0.
RankedReport NormalizeAndRank(std::span<const LocationStats> stats,
                              const ExploitReference& exploit, std::size_t k);

// Stable 64-bit FNV-1a hash of the suite's canonical text form.
std::uint64_t SuiteDigest(const TestSuite& suite);

// Empirical terms of the decomposition
//   P(Y_j=1 | C=1) = P1 * P2 + P3 * P4
// with P1 = P(Y_j=1 | C=1, Y_{j-1}=1), P2 = P(Y_{j-1}=1 | C=1),
// P3 = P(Y_j=1 | C=1, Y_{j-1}=0), P4 = P(Y_{j-1}=0 | C=1), where Y_j is
// prefix observation of instance j. A term whose conditioning set is empty
// is nullopt.
struct Factorization {
  std::optional<Rational> p1, p2, p3, p4, lhs;

  bool defined() const { return p1 && p2 && p3 && p4 && lhs; }
};

// Throws Error(kOutOfRange) unless 1 <= j < m.
Factorization EstimateFactorization(std::span<const TestCase> cases,
                                    const ExploitReference& exploit,
                                    std::size_t j);

}  // namespace patchloc

#endif  // PATCHLOC_RANKER_H_
