#include "patchloc/mutation.h"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

#include "patchloc/error.h"

namespace patchloc {
namespace {

constexpr std::size_t kEnumerationLimit = 100'000;
constexpr int kSampleAttempts = 256;
// Indices below this use the lock-step boundary values for wide
// combinations.
constexpr std::uint64_t kBoundaryRounds = 5;

std::vector<std::uint8_t> BoundaryValues(std::uint8_t seed) {
  std::vector<std::uint8_t> out;
  auto add = [&](int v) {
    if (v < 0 || v > 255 || v == seed) return;
    auto b = static_cast<std::uint8_t>(v);
    if (std::find(out.begin(), out.end(), b) == out.end()) out.push_back(b);
  };
  add(0x00);
  add(0xFF);
  add(seed + 1);
  add(seed - 1);
  add(seed ^ 0x80);
  return out;
}

std::uint64_t PackValues(std::span<const std::uint8_t> values) {
  std::uint64_t packed = 0;
  for (std::uint8_t v : values) packed = (packed << 8) | v;
  return packed;
}

std::uint64_t Binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  std::uint64_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > kEnumerationLimit) return kEnumerationLimit + 1;
  }
  return r;
}

}  // namespace

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t StreamKey(std::span<const std::uint64_t> parts) {
  std::uint64_t h = 0x5eed5eed5eed5eedULL;
  for (std::uint64_t p : parts) h = SplitMix64(h ^ SplitMix64(p));
  return h;
}

std::uint64_t StreamKey(std::initializer_list<std::uint64_t> parts) {
  return StreamKey(std::span<const std::uint64_t>(parts.begin(), parts.size()));
}

std::uint64_t CounterRng::Below(std::uint64_t bound) {
  // Rejection sampling keeps the draw unbiased.
  std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                        std::numeric_limits<std::uint64_t>::max() % bound;
  for (;;) {
    std::uint64_t v = Next();
    if (v < limit) return v % bound;
  }
}

const char* GoalName(MutationGoal goal) {
  return goal == MutationGoal::kObserve ? "observe" : "miss";
}

std::size_t BoundaryValueCount(std::uint8_t seed_value) {
  return BoundaryValues(seed_value).size();
}

std::vector<std::uint8_t> ValueSchedule(std::uint8_t seed_value,
                                        std::uint64_t stream) {
  std::vector<std::uint8_t> schedule = BoundaryValues(seed_value);
  std::size_t boundary = schedule.size();
  for (int v = 0; v < 256; ++v) {
    auto b = static_cast<std::uint8_t>(v);
    if (b == seed_value) continue;
    if (std::find(schedule.begin(), schedule.begin() + boundary, b) !=
        schedule.begin() + boundary) {
      continue;
    }
    schedule.push_back(b);
  }
  CounterRng rng(stream);
  for (std::size_t i = schedule.size() - 1; i > boundary; --i) {
    std::size_t j = boundary + rng.Below(i - boundary + 1);
    std::swap(schedule[i], schedule[j]);
  }
  return schedule;
}

Bytes Mutate(std::span<const std::uint8_t> seed_input,
             std::span<const std::size_t> offsets, std::uint64_t stream,
             std::uint64_t value_index) {
  Bytes out(seed_input.begin(), seed_input.end());
  for (std::size_t k : offsets) {
    if (k >= out.size()) {
      throw Error(ErrorCode::kOutOfRange,
                  "mutation offset " + std::to_string(k) + " beyond input of " +
                      std::to_string(out.size()) + " bytes");
    }
  }
  if (offsets.size() == 1) {
    std::size_t k = offsets.front();
    out[k] = ValueSchedule(seed_input[k], StreamKey({stream, k}))[value_index %
                                                                  255];
    return out;
  }
  for (std::size_t k : offsets) {
    std::uint8_t seed = seed_input[k];
    if (value_index < kBoundaryRounds) {
      out[k] = ValueSchedule(seed, StreamKey({stream, k}))[value_index];
    } else {
      std::uint64_t draw = SplitMix64(StreamKey({stream, k, value_index}));
      out[k] = static_cast<std::uint8_t>(seed + 1 + draw % 255);
    }
  }
  return out;
}

std::uint64_t MutationCache::TupleSpace(std::size_t width) {
  std::uint64_t space = 1;
  for (std::size_t i = 0; i < width; ++i) {
    if (space > std::numeric_limits<std::uint64_t>::max() / 255) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    space *= 255;
  }
  return space;
}

bool MutationCache::IsExhausted(std::size_t seed,
                                const ByteCombination& bytes) const {
  auto it = combos_.find(Key(seed, bytes));
  return it != combos_.end() &&
         it->second.tried.size() >= TupleSpace(bytes.size());
}

bool MutationCache::IsSpent(std::size_t seed, std::size_t target,
                            MutationGoal goal,
                            const ByteCombination& bytes) const {
  return spent_.count({seed, target, goal, bytes}) > 0;
}

void MutationCache::MarkSpent(std::size_t seed, std::size_t target,
                              MutationGoal goal, const ByteCombination& bytes) {
  spent_.emplace(seed, target, goal, bytes);
}

bool MutationCache::RecordTried(std::size_t seed, const ByteCombination& bytes,
                                std::span<const std::uint8_t> values) {
  return combos_[Key(seed, bytes)].tried.insert(PackValues(values)).second;
}

std::uint64_t MutationCache::TriedCount(std::size_t seed,
                                        const ByteCombination& bytes) const {
  auto it = combos_.find(Key(seed, bytes));
  return it == combos_.end() ? 0 : it->second.tried.size();
}

std::uint64_t MutationCache::TakeValueIndex(std::size_t seed,
                                            const ByteCombination& bytes) {
  return combos_[Key(seed, bytes)].next_index++;
}

std::optional<ByteCombination> SelectMutateBytes(
    const SensitivityMap& sm, std::size_t target, MutationGoal goal,
    std::size_t count, std::span<const std::size_t> mutable_bytes,
    const MutationCache& cache, std::size_t seed, CounterRng& rng) {
  if (count == 0) {
    throw Error(ErrorCode::kInvalidArgument, "cannot select zero bytes");
  }
  std::vector<std::size_t> frozen = sm.SensitiveBytesOfPrefix(target);
  std::vector<std::size_t> eligible;
  for (std::size_t k : mutable_bytes) {
    if (k >= sm.input_len()) continue;
    if (std::binary_search(frozen.begin(), frozen.end(), k)) continue;
    bool sensitive = sm.Get(target, k);
    if (sensitive == (goal == MutationGoal::kMiss)) eligible.push_back(k);
  }
  std::sort(eligible.begin(), eligible.end());
  eligible.erase(std::unique(eligible.begin(), eligible.end()), eligible.end());
  if (eligible.size() < count) return std::nullopt;

  auto unavailable = [&](const ByteCombination& combo) {
    return cache.IsUnavailable(seed, target, goal, combo);
  };

  if (Binomial(eligible.size(), count) <= kEnumerationLimit) {
    std::vector<ByteCombination> open;
    std::vector<std::size_t> idx(count);
    std::iota(idx.begin(), idx.end(), 0);
    for (;;) {
      ByteCombination combo;
      combo.reserve(count);
      for (std::size_t i : idx) combo.push_back(eligible[i]);
      if (!unavailable(combo)) open.push_back(std::move(combo));
      // Advance to the next lexicographic index combination.
      std::size_t pos = count;
      while (pos > 0 && idx[pos - 1] == eligible.size() - count + pos - 1) {
        --pos;
      }
      if (pos == 0) break;
      ++idx[pos - 1];
      for (std::size_t i = pos; i < count; ++i) idx[i] = idx[i - 1] + 1;
    }
    if (open.empty()) return std::nullopt;
    return open[rng.Below(open.size())];
  }

  for (int attempt = 0; attempt < kSampleAttempts; ++attempt) {
    std::vector<std::size_t> pool = eligible;
    ByteCombination combo;
    for (std::size_t i = 0; i < count; ++i) {
      std::size_t pick = i + rng.Below(pool.size() - i);
      std::swap(pool[i], pool[pick]);
      combo.push_back(pool[i]);
    }
    std::sort(combo.begin(), combo.end());
    if (!unavailable(combo)) return combo;
  }
  return std::nullopt;
}

SeedPool::SeedPool(TestCase exploit_seed) {
  traces_.insert(exploit_seed.trace.events);
  seeds_.push_back(std::move(exploit_seed));
}

bool SeedPool::Admit(const TestCase& candidate) {
  if (!candidate.is_exploit()) return false;
  if (!traces_.insert(candidate.trace.events).second) return false;
  seeds_.push_back(candidate);
  return true;
}

std::size_t SeedPool::ChooseIndex() { return cursor_++ % seeds_.size(); }

}  // namespace patchloc
