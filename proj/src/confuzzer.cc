#include "patchloc/confuzzer.h"

#include <algorithm>
#include <atomic>
#include <exception>
#include <optional>
#include <set>
#include <string>
#include <thread>

#include "patchloc/error.h"

namespace patchloc {
namespace {

using Clock = std::chrono::steady_clock;

// Each round draws at most this many value indices per requested mutant
// before giving up on duplicates.
constexpr std::size_t kAttemptFactor = 4;

std::uint64_t ComboStream(std::uint64_t rng_seed, std::size_t seed,
                          const ByteCombination& combo) {
  std::vector<std::uint64_t> parts{rng_seed, seed, combo.size()};
  parts.insert(parts.end(), combo.begin(), combo.end());
  return StreamKey(parts);
}

class Coordinator {
 public:
  Coordinator(const Target& target, const FuzzConfig& config,
              TestCase seed_case, const RoundObserver& observer)
      : target_(target),
        config_(config),
        observer_(observer),
        exploit_(ExploitReference::FromCase(seed_case)),
        sm_(SensitivityMap::Init(exploit_, seed_case.input.size())),
        pool_(seed_case),
        mutable_bytes_(config.MutableBytes(seed_case.input.size())),
        start_(Clock::now()) {
    executed_.insert(seed_case.input);
    cases_.push_back(std::move(seed_case));
    for (std::size_t j : exploit_.first_occurrences()) {
      TargetProgress progress;
      progress.instance = j;
      progress.location = exploit_.trace().events[j];
      stats_.targets.push_back(progress);
    }
    Count(cases_.front());
    stats_.exploits = 1;
  }

  FuzzResult Run() {
    stats_.stop = Loop();
    stats_.pool_size = pool_.size();
    return FuzzResult{TestSuite{std::move(cases_), exploit_}, std::move(sm_),
                      std::move(stats_), pool_.seeds()};
  }

 private:
  StopReason Loop() {
    for (std::size_t session = 0;; ++session) {
      if (AllSufficient()) return StopReason::kQuotasMet;
      if (session >= pool_.size()) return StopReason::kSeedsChecked;
      std::size_t seed = pool_.ChooseIndex();
      if (auto stop = FuzzSeed(seed)) return *stop;
    }
  }

  std::optional<StopReason> FuzzSeed(std::size_t seed) {
    // Copy: admissions during the session may reallocate the pool.
    const TestCase seed_case = pool_[seed];
    std::size_t seed_prefix = PrefixLength(seed_case.trace, exploit_);
    for (std::size_t width = 1; width <= config_.beta; ++width) {
      std::vector<bool> done(stats_.targets.size(), false);
      for (;;) {
        if (AllSufficient()) return StopReason::kQuotasMet;
        if (TimedOut()) return StopReason::kTimeout;
        if (BudgetSpent()) return StopReason::kExecBudget;
        std::optional<std::size_t> t = NextTarget(done, seed_prefix);
        if (!t) break;
        std::size_t j = stats_.targets[*t].instance;
        CounterRng rng(StreamKey({config_.rng_seed, seed, j, width,
                                  stats_.rounds.size()}));
        std::optional<ByteCombination> combo;
        MutationGoal goal = MutationGoal::kObserve;
        for (MutationGoal candidate : Goals(stats_.targets[*t].count)) {
          combo = SelectMutateBytes(sm_, j, candidate, width, mutable_bytes_,
                                    cache_, seed, rng);
          if (combo) {
            goal = candidate;
            break;
          }
        }
        if (!combo) {
          done[*t] = true;
          continue;
        }
        RunRound(seed, seed_case, *t, goal, *combo);
      }
    }
    return std::nullopt;
  }

  // Goals worth trying for a target, in order. When only the miss quota is
  // open but no byte is known to matter yet, observe-mode mutation of the
  // insensitive bytes doubles as a probe that discovers sensitive ones.
  std::vector<MutationGoal> Goals(const QuotaCount& count) const {
    bool need_obs = count.observed < config_.min_obs;
    bool need_miss = count.missed < config_.min_miss;
    std::vector<MutationGoal> goals;
    if (need_obs) goals.push_back(MutationGoal::kObserve);
    if (need_miss) goals.push_back(MutationGoal::kMiss);
    if (need_miss && !need_obs) goals.push_back(MutationGoal::kObserve);
    return goals;
  }

  std::optional<std::size_t> NextTarget(const std::vector<bool>& done,
                                        std::size_t seed_prefix) const {
    for (std::size_t t = 0; t < stats_.targets.size(); ++t) {
      const TargetProgress& p = stats_.targets[t];
      // A seed can only help with instances it observes itself.
      if (p.instance >= seed_prefix) break;
      if (!p.sufficient && !done[t]) return t;
    }
    return std::nullopt;
  }

  void RunRound(std::size_t seed, const TestCase& seed_case, std::size_t t,
                MutationGoal goal, const ByteCombination& combo) {
    FuzzRound round;
    round.id = stats_.rounds.size();
    round.seed = seed;
    round.target = stats_.targets[t].instance;
    round.location = stats_.targets[t].location;
    round.goal = goal;
    round.width = combo.size();
    round.bytes = combo;
    round.frozen = sm_.SensitiveBytesOfPrefix(round.target);

    std::size_t wanted = config_.gamma;
    if (config_.max_execs != 0) {
      wanted = static_cast<std::size_t>(std::min<std::uint64_t>(
          wanted, config_.max_execs - stats_.executions));
    }
    std::uint64_t stream = ComboStream(config_.rng_seed, seed, combo);
    std::vector<Bytes> inputs;
    std::vector<std::uint8_t> values(combo.size());
    for (std::size_t attempt = 0;
         inputs.size() < wanted && attempt < kAttemptFactor * wanted;
         ++attempt) {
      if (cache_.IsExhausted(seed, combo)) break;
      std::uint64_t index = cache_.TakeValueIndex(seed, combo);
      Bytes input = Mutate(seed_case.input, combo, stream, index);
      for (std::size_t i = 0; i < combo.size(); ++i) values[i] = input[combo[i]];
      if (!cache_.RecordTried(seed, combo, values)) continue;
      if (!executed_.insert(input).second) continue;
      inputs.push_back(std::move(input));
    }
    cache_.MarkSpent(seed, round.target, goal, combo);
    if (inputs.empty()) return;

    std::vector<TestCase> results = RunBatch(target_, inputs, config_.workers);
    stats_.executions += results.size();
    round.first_case = cases_.size();
    round.case_count = results.size();
    for (TestCase& c : results) {
      c.mutated_offsets = combo;
      c.provenance = Provenance::kFuzzed;
      Count(c);
      sm_.Update(seed_case.trace, combo, c.trace, exploit_);
      if (c.is_exploit()) {
        ++round.exploits;
        ++stats_.exploits;
        if (pool_.Admit(c)) ++round.new_seeds;
      }
      cases_.push_back(std::move(c));
    }
    stats_.pool_size = pool_.size();
    stats_.rounds.push_back(std::move(round));
    if (observer_) observer_(stats_.rounds.back(), stats_);
  }

  void Count(const TestCase& c) {
    std::size_t p = PrefixLength(c.trace, exploit_);
    for (TargetProgress& progress : stats_.targets) {
      if (p > progress.instance) {
        ++progress.count.observed;
      } else if (p == progress.instance) {
        ++progress.count.missed;
      } else {
        break;
      }
      progress.sufficient = progress.count.observed >= config_.min_obs &&
                            progress.count.missed >= config_.min_miss;
    }
  }

  bool AllSufficient() const {
    return std::all_of(stats_.targets.begin(), stats_.targets.end(),
                       [](const TargetProgress& p) { return p.sufficient; });
  }

  bool TimedOut() const { return Clock::now() - start_ >= config_.timeout; }

  bool BudgetSpent() const {
    return config_.max_execs != 0 && stats_.executions >= config_.max_execs;
  }

  const Target& target_;
  const FuzzConfig& config_;
  const RoundObserver& observer_;
  ExploitReference exploit_;
  SensitivityMap sm_;
  SeedPool pool_;
  MutationCache cache_;
  std::vector<std::size_t> mutable_bytes_;
  std::set<Bytes> executed_;
  std::vector<TestCase> cases_;
  FuzzStats stats_;
  Clock::time_point start_;
};

}  // namespace

const char* StopReasonName(StopReason reason) {
  switch (reason) {
    case StopReason::kQuotasMet:
      return "quotas_met";
    case StopReason::kSeedsChecked:
      return "seeds_checked";
    case StopReason::kTimeout:
      return "timeout";
    case StopReason::kExecBudget:
      return "exec_budget";
  }
  return "unknown";
}

void FuzzConfig::Validate() const {
  auto fail = [](const std::string& what) {
    throw Error(ErrorCode::kInvalidArgument, what);
  };
  if (beta < 1 || beta > kMaxBeta) {
    fail("beta must be between 1 and " + std::to_string(kMaxBeta));
  }
  if (gamma < 1) fail("gamma must be at least 1");
  if (min_obs < 1 || min_miss < 1) fail("quotas must be at least 1");
  if (workers < 1) fail("workers must be at least 1");
  if (timeout.count() < 0) fail("timeout must not be negative");
  for (const ByteRange& r : mutable_ranges) {
    if (r.first > r.last) {
      fail("mutable range " + std::to_string(r.first) + "-" +
           std::to_string(r.last) + " is reversed");
    }
  }
}

std::vector<std::size_t> FuzzConfig::MutableBytes(std::size_t input_len) const {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < input_len; ++k) {
    bool allowed = mutable_ranges.empty() ||
                   std::any_of(mutable_ranges.begin(), mutable_ranges.end(),
                               [k](const ByteRange& r) {
                                 return r.first <= k && k <= r.last;
                               });
    if (allowed) out.push_back(k);
  }
  return out;
}

QuotaCount CountQuota(std::span<const TestCase> cases,
                      const ExploitReference& exploit, std::size_t j) {
  QuotaCount count;
  for (const TestCase& c : cases) {
    std::size_t p = PrefixLength(c.trace, exploit);
    if (p > j) {
      ++count.observed;
    } else if (p == j) {
      ++count.missed;
    }
  }
  return count;
}

std::vector<TestCase> RunBatch(const Target& target,
                               std::span<const Bytes> inputs,
                               std::size_t workers) {
  std::vector<TestCase> results(inputs.size());
  if (workers <= 1 || inputs.size() <= 1) {
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      results[i] = target.Run(inputs[i]);
    }
    return results;
  }
  std::vector<std::exception_ptr> errors(inputs.size());
  std::atomic<std::size_t> next{0};
  {
    std::vector<std::jthread> threads;
    std::size_t n = std::min(workers, inputs.size());
    threads.reserve(n);
    for (std::size_t w = 0; w < n; ++w) {
      threads.emplace_back([&] {
        for (std::size_t i = next++; i < inputs.size(); i = next++) {
          try {
            results[i] = target.Run(inputs[i]);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
  }
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

FuzzResult Fuzz(std::span<const std::uint8_t> exploit_input,
                const Target& target, const FuzzConfig& config,
                const RoundObserver& observer) {
  config.Validate();
  TestCase seed_case = target.Run(exploit_input);
  seed_case.provenance = Provenance::kSeed;
  seed_case.mutated_offsets.clear();
  if (!seed_case.is_exploit()) {
    throw Error(ErrorCode::kSeedNotExploit,
                "the oracle does not flag the exploit input");
  }
  if (seed_case.trace.events.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "the exploit run reported no branch events");
  }
  Coordinator coordinator(target, config, std::move(seed_case), observer);
  return coordinator.Run();
}

}  // namespace patchloc
