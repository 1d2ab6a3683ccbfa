#ifndef PATCHLOC_MUTATION_H_
#define PATCHLOC_MUTATION_H_

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <tuple>
#include <unordered_set>
#include <utility>
#include <vector>

#include "patchloc/sensitivity_map.h"
#include "patchloc/trace.h"

namespace patchloc {

std::uint64_t SplitMix64(std::uint64_t x);

// Folds the parts into one 64-bit stream key.
std::uint64_t StreamKey(std::initializer_list<std::uint64_t> parts);
std::uint64_t StreamKey(std::span<const std::uint64_t> parts);

// Counter-based generator: the n-th draw depends only on (key, n), so
// results never depend on which thread asked first.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}

  std::uint64_t Next() { return SplitMix64(key_ ^ SplitMix64(++counter_)); }
  // Uniform in [0, bound); bound must be positive.
  std::uint64_t Below(std::uint64_t bound);

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Sorted set of byte offsets mutated together.
using ByteCombination = std::vector<std::size_t>;

enum class MutationGoal { kObserve, kMiss };

const char* GoalName(MutationGoal goal);

// The 255 replacement values for one byte, in trial order: the boundary
// values {0x00, 0xFF, seed+1, seed-1, seed^0x80} (in range, distinct, not the
// seed itself) followed by the remaining non-seed values shuffled by
// `stream`.
std::vector<std::uint8_t> ValueSchedule(std::uint8_t seed_value,
                                        std::uint64_t stream);

// Number of boundary values ValueSchedule puts first for this seed value.
std::size_t BoundaryValueCount(std::uint8_t seed_value);

// Copy of `seed_input` with every offset in `offsets` replaced by a value
// different from the seed's. A single byte walks its ValueSchedule, so
// indices 0..254 yield 255 distinct inputs. Wider combinations try the
// boundary values of all bytes in lock step for the first few indices, then
// draw each byte uniformly from its non-seed values.
Bytes Mutate(std::span<const std::uint8_t> seed_input,
             std::span<const std::size_t> offsets, std::uint64_t stream,
             std::uint64_t value_index);

// Per-seed record of which byte-value tuples were executed for each
// combination, and which (target, goal, combination) rounds were spent.
class MutationCache {
 public:
  // 255^width, saturating.
  static std::uint64_t TupleSpace(std::size_t width);

  // True once every non-seed value tuple of the combination was tried.
  bool IsExhausted(std::size_t seed, const ByteCombination& bytes) const;
  bool IsSpent(std::size_t seed, std::size_t target, MutationGoal goal,
               const ByteCombination& bytes) const;
  bool IsUnavailable(std::size_t seed, std::size_t target, MutationGoal goal,
                     const ByteCombination& bytes) const {
    return IsExhausted(seed, bytes) || IsSpent(seed, target, goal, bytes);
  }

  void MarkSpent(std::size_t seed, std::size_t target, MutationGoal goal,
                 const ByteCombination& bytes);
  // Returns false if this value tuple was already recorded.
  bool RecordTried(std::size_t seed, const ByteCombination& bytes,
                   std::span<const std::uint8_t> values);
  std::uint64_t TriedCount(std::size_t seed, const ByteCombination& bytes) const;
  // Returns the next unused value index of the combination and advances it.
  std::uint64_t TakeValueIndex(std::size_t seed, const ByteCombination& bytes);

 private:
  struct CombinationState {
    std::unordered_set<std::uint64_t> tried;
    std::uint64_t next_index = 0;
  };
  using Key = std::pair<std::size_t, ByteCombination>;
  std::map<Key, CombinationState> combos_;
  std::set<std::tuple<std::size_t, std::size_t, MutationGoal, ByteCombination>>
      spent_;
};

// Picks `count` bytes to mutate while targeting instance `target` of the
// exploit trace. Candidates are the mutable bytes not frozen by the prefix
// (SensitiveBytesOfPrefix(target)); for kObserve only bytes the target is
// not known to be sensitive to, for kMiss only bytes it is sensitive to.
// Combinations the cache marks unavailable for `seed` are skipped. Returns
// nullopt when nothing is left.
std::optional<ByteCombination> SelectMutateBytes(
    const SensitivityMap& sm, std::size_t target, MutationGoal goal,
    std::size_t count, std::span<const std::size_t> mutable_bytes,
    const MutationCache& cache, std::size_t seed, CounterRng& rng);

// Exploit inputs with pairwise distinct traces, handed out round robin.
class SeedPool {
 public:
  explicit SeedPool(TestCase exploit_seed);

  // Adds `candidate` iff it is an exploit whose trace is new to the pool.
  bool Admit(const TestCase& candidate);
  // Index of the next seed in round-robin insertion order.
  std::size_t ChooseIndex();
  const TestCase& Choose() { return seeds_[ChooseIndex()]; }

  std::size_t size() const { return seeds_.size(); }
  const TestCase& operator[](std::size_t i) const { return seeds_[i]; }
  const std::vector<TestCase>& seeds() const { return seeds_; }

 private:
  std::vector<TestCase> seeds_;
  std::set<std::vector<BranchId>> traces_;
  std::size_t cursor_ = 0;
};

}  // namespace patchloc

#endif  // PATCHLOC_MUTATION_H_
