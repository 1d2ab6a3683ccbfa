#ifndef PATCHLOC_CONFUZZER_H_
#define PATCHLOC_CONFUZZER_H_

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "patchloc/mutation.h"
#include "patchloc/sensitivity_map.h"
#include "patchloc/target.h"
#include "patchloc/trace.h"

namespace patchloc {

// Inclusive range of input offsets.
struct ByteRange {
  std::size_t first = 0;
  std::size_t last = 0;

  friend bool operator==(const ByteRange&, const ByteRange&) = default;
};

struct FuzzConfig {
  static constexpr std::size_t kMaxBeta = 8;

  std::size_t beta = 2;
  std::size_t gamma = 200;
  std::size_t min_obs = 30;
  std::size_t min_miss = 30;
  std::chrono::duration<double> timeout = std::chrono::hours(4);
  // Total target executions allowed after the seed run; 0 means unlimited.
  std::uint64_t max_execs = 0;
  std::uint64_t rng_seed = 0;
  std::size_t workers = 1;
  // Empty means every byte may be mutated.
  std::vector<ByteRange> mutable_ranges;

  // Throws Error(kInvalidArgument) on an unusable configuration.
  void Validate() const;
  // Sorted offsets below input_len that the ranges allow.
  std::vector<std::size_t> MutableBytes(std::size_t input_len) const;
};

// One batch of mutants of a single seed at a single byte combination.
struct FuzzRound {
  std::size_t id = 0;
  std::size_t seed = 0;       // index into the seed pool
  std::size_t target = 0;     // exploit-trace instance index
  BranchId location{};
  MutationGoal goal = MutationGoal::kObserve;
  std::size_t width = 0;
  ByteCombination bytes;
  std::vector<std::size_t> frozen;  // SensitiveBytesOfPrefix(target) at start
  std::size_t first_case = 0;       // index of the round's first suite case
  std::size_t case_count = 0;
  std::size_t exploits = 0;
  std::size_t new_seeds = 0;
};

// Cases that follow the exploit through instance j (observed) and cases that
// follow it up to j and then diverge (missed).
struct QuotaCount {
  std::size_t observed = 0;
  std::size_t missed = 0;

  friend bool operator==(const QuotaCount&, const QuotaCount&) = default;
};

struct TargetProgress {
  std::size_t instance = 0;
  BranchId location{};
  QuotaCount count;
  bool sufficient = false;
};

enum class StopReason { kQuotasMet, kSeedsChecked, kTimeout, kExecBudget };

const char* StopReasonName(StopReason reason);

struct FuzzStats {
  std::uint64_t executions = 0;
  std::size_t exploits = 0;
  std::size_t pool_size = 0;
  StopReason stop = StopReason::kQuotasMet;
  std::vector<TargetProgress> targets;
  std::vector<FuzzRound> rounds;
};

struct FuzzResult {
  TestSuite suite;
  SensitivityMap sensitivity;
  FuzzStats stats;
  std::vector<TestCase> seeds;
};

using RoundObserver = std::function<void(const FuzzRound&, const FuzzStats&)>;

QuotaCount CountQuota(std::span<const TestCase> cases,
                      const ExploitReference& exploit, std::size_t j);

// Runs `target` on every input with up to `workers` threads. Results come
// back in input order; if several runs throw, the lowest index's error is
// rethrown.
std::vector<TestCase> RunBatch(const Target& target,
                               std::span<const Bytes> inputs,
                               std::size_t workers);

// Concentrated fuzzing around `exploit_input`. The input is run once to
// obtain the exploit trace; Error(kSeedNotExploit) if the oracle does not
// flag it. The returned suite starts with that seed run.
FuzzResult Fuzz(std::span<const std::uint8_t> exploit_input,
                const Target& target, const FuzzConfig& config,
                const RoundObserver& observer = {});

}  // namespace patchloc

#endif  // PATCHLOC_CONFUZZER_H_
