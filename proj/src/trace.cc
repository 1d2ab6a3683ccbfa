#include "patchloc/trace.h"

#include <algorithm>
#include <unordered_set>
#include <utility>

#include "patchloc/error.h"

namespace patchloc {

ExploitReference::ExploitReference(Bytes input, ExecutionTrace trace)
    : input_(std::move(input)), trace_(std::move(trace)) {
  std::unordered_set<BranchId> seen;
  for (std::size_t i = 0; i < trace_.events.size(); ++i) {
    if (seen.insert(trace_.events[i]).second) {
      locations_.push_back(trace_.events[i]);
      first_occurrences_.push_back(i);
    }
  }
}

ExploitReference ExploitReference::FromCase(const TestCase& exploit_case) {
  if (!exploit_case.is_exploit()) {
    throw Error(ErrorCode::kSeedNotExploit,
                "the oracle does not flag the exploit input");
  }
  return ExploitReference(exploit_case.input, exploit_case.trace);
}

BranchId ExploitReference::crash_location() const {
  if (trace_.events.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "exploit trace is empty");
  }
  return trace_.events.back();
}

std::set<BranchId> ObservedLocations(const ExecutionTrace& trace) {
  return std::set<BranchId>(trace.events.begin(), trace.events.end());
}

std::size_t CommonPrefixLength(std::span<const BranchId> a,
                               std::span<const BranchId> b) {
  auto [ia, ib] = std::mismatch(a.begin(), a.end(), b.begin(), b.end());
  return static_cast<std::size_t>(ia - a.begin());
}

std::size_t PrefixLength(const ExecutionTrace& trace,
                         const ExploitReference& exploit) {
  return CommonPrefixLength(trace.events, exploit.trace().events);
}

}  // namespace patchloc
