#ifndef PATCHLOC_TRACE_H_
#define PATCHLOC_TRACE_H_

#include <cstddef>
#include <cstdint>
#include <set>
#include <span>
#include <vector>

namespace patchloc {

// Static identifier of a conditional branch: an instruction address for
// instrumented binaries, or a hand-assigned id for toy targets.
enum class BranchId : std::uint64_t {};

constexpr std::uint64_t ToValue(BranchId id) {
  return static_cast<std::uint64_t>(id);
}

using Bytes = std::vector<std::uint8_t>;

// Branch locations in the order one run executed them. `truncated` is set
// when the run was cut short by the event cap or the wall-clock limit.
struct ExecutionTrace {
  std::vector<BranchId> events;
  bool truncated = false;

  friend bool operator==(const ExecutionTrace&, const ExecutionTrace&) =
      default;
};

enum class Verdict : std::uint8_t { kBenign, kExploit };
enum class Provenance : std::uint8_t { kSeed, kFuzzed };

struct TestCase {
  Bytes input;
  ExecutionTrace trace;
  Verdict verdict = Verdict::kBenign;
  // Sorted, duplicate free. Empty for seeds.
  std::vector<std::size_t> mutated_offsets;
  Provenance provenance = Provenance::kFuzzed;

  bool is_exploit() const { return verdict == Verdict::kExploit; }

  friend bool operator==(const TestCase&, const TestCase&) = default;
};

// The exploiting input a localization session starts from, together with
// its trace. Instance j of the session is trace().events[j]; the
// on-exploit locations are the distinct ids of that trace in
// first-occurrence order.
class ExploitReference {
 public:
  // The caller vouches that the oracle flagged `input`. Prefer FromCase,
  // which checks the verdict.
  ExploitReference(Bytes input, ExecutionTrace trace);

  // Throws Error(kSeedNotExploit) unless the case was judged an exploit.
  static ExploitReference FromCase(const TestCase& exploit_case);

  const Bytes& input() const { return input_; }
  const ExecutionTrace& trace() const { return trace_; }
  std::span<const BranchId> on_exploit_locations() const {
    return locations_;
  }
  std::size_t instance_count() const { return trace_.events.size(); }
  BranchId crash_location() const;

  // Index of the first instance of every on-exploit location, ascending.
  const std::vector<std::size_t>& first_occurrences() const {
    return first_occurrences_;
  }

  friend bool operator==(const ExploitReference& a,
                         const ExploitReference& b) {
    return a.input_ == b.input_ && a.trace_ == b.trace_;
  }

 private:
  Bytes input_;
  ExecutionTrace trace_;
  std::vector<BranchId> locations_;
  std::vector<std::size_t> first_occurrences_;
};

struct TestSuite {
  std::vector<TestCase> cases;
  ExploitReference exploit;
};

std::set<BranchId> ObservedLocations(const ExecutionTrace& trace);

std::size_t CommonPrefixLength(std::span<const BranchId> a,
                               std::span<const BranchId> b);

// Length of the longest common prefix of `trace` and the exploit trace.
// Instance j counts as observed by a run iff PrefixLength(...) > j.
std::size_t PrefixLength(const ExecutionTrace& trace,
                         const ExploitReference& exploit);

}  // namespace patchloc

#endif  // PATCHLOC_TRACE_H_
