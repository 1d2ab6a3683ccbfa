#include "patchloc/sensitivity_map.h"

#include <algorithm>
#include <string>

#include "patchloc/error.h"

namespace patchloc {

SensitivityMap::SensitivityMap(std::size_t instance_count,
                               std::size_t input_len,
                               std::uint64_t dense_limit)
    : instance_count_(instance_count),
      input_len_(input_len),
      dense_(static_cast<std::uint64_t>(instance_count) * input_len <=
             dense_limit),
      first_marked_(input_len, instance_count) {
  if (dense_) {
    std::uint64_t total = static_cast<std::uint64_t>(instance_count) * input_len;
    bits_.assign((total + 63) / 64, 0);
  } else {
    intervals_.resize(input_len);
  }
}

SensitivityMap SensitivityMap::Init(const ExploitReference& exploit,
                                    std::size_t input_len) {
  return SensitivityMap(exploit.instance_count(), input_len);
}

void SensitivityMap::CheckBounds(std::size_t j, std::size_t k) const {
  if (j >= instance_count_ || k >= input_len_) {
    throw Error(ErrorCode::kOutOfRange,
                "sensitivity query (" + std::to_string(j) + ", " +
                    std::to_string(k) + ") outside " +
                    std::to_string(instance_count_) + "x" +
                    std::to_string(input_len_));
  }
}

bool SensitivityMap::Get(std::size_t j, std::size_t k) const {
  CheckBounds(j, k);
  if (dense_) {
    std::uint64_t bit = static_cast<std::uint64_t>(j) * input_len_ + k;
    return (bits_[bit / 64] >> (bit % 64)) & 1u;
  }
  const auto& iv = intervals_[k];
  auto it = iv.upper_bound(j);
  if (it == iv.begin()) return false;
  --it;
  return j < it->second;
}

void SensitivityMap::Mark(std::size_t j, std::size_t k) {
  MarkRange(j, j + 1, k);
}

void SensitivityMap::MarkRange(std::size_t first, std::size_t last,
                               std::size_t k) {
  if (first >= last) return;
  CheckBounds(first, k);
  CheckBounds(last - 1, k);
  first_marked_[k] = std::min(first_marked_[k], first);
  if (dense_) {
    for (std::size_t j = first; j < last; ++j) {
      std::uint64_t bit = static_cast<std::uint64_t>(j) * input_len_ + k;
      bits_[bit / 64] |= std::uint64_t{1} << (bit % 64);
    }
    return;
  }
  auto& iv = intervals_[k];
  // Merge with every interval that overlaps or touches [first, last).
  auto it = iv.upper_bound(first);
  if (it != iv.begin()) {
    auto prev = std::prev(it);
    if (prev->second >= first) it = prev;
  }
  while (it != iv.end() && it->first <= last) {
    first = std::min(first, it->first);
    last = std::max(last, it->second);
    it = iv.erase(it);
  }
  iv.emplace(first, last);
}

void SensitivityMap::Update(const ExecutionTrace& seed_trace,
                            std::span<const std::size_t> mutated_offsets,
                            const ExecutionTrace& mutated_trace,
                            const ExploitReference& exploit) {
  std::size_t seed_prefix =
      std::min(PrefixLength(seed_trace, exploit), instance_count_);
  std::size_t mutant_prefix = PrefixLength(mutated_trace, exploit);
  if (mutant_prefix >= seed_prefix) return;
  for (std::size_t k : mutated_offsets) {
    MarkRange(mutant_prefix, seed_prefix, k);
  }
}

std::vector<std::size_t> SensitivityMap::SensitiveBytesOfPrefix(
    std::size_t j) const {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < input_len_; ++k) {
    if (first_marked_[k] < j) out.push_back(k);
  }
  return out;
}

std::vector<std::size_t> SensitivityMap::SensitiveBytesOf(std::size_t j) const {
  if (j >= instance_count_) CheckBounds(j, 0);
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < input_len_; ++k) {
    if (first_marked_[k] <= j && Get(j, k)) out.push_back(k);
  }
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> SensitivityMap::SetBits()
    const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  if (dense_) {
    for (std::size_t j = 0; j < instance_count_; ++j) {
      for (std::size_t k = 0; k < input_len_; ++k) {
        if (first_marked_[k] <= j && Get(j, k)) out.emplace_back(j, k);
      }
    }
    return out;
  }
  for (std::size_t k = 0; k < input_len_; ++k) {
    for (const auto& [first, last] : intervals_[k]) {
      for (std::size_t j = first; j < last; ++j) out.emplace_back(j, k);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t SensitivityMap::CountSetBits() const {
  if (dense_) {
    std::size_t n = 0;
    for (std::uint64_t w : bits_) n += static_cast<std::size_t>(__builtin_popcountll(w));
    return n;
  }
  std::size_t n = 0;
  for (const auto& iv : intervals_) {
    for (const auto& [first, last] : iv) n += last - first;
  }
  return n;
}

bool operator==(const SensitivityMap& a, const SensitivityMap& b) {
  return a.instance_count_ == b.instance_count_ &&
         a.input_len_ == b.input_len_ && a.SetBits() == b.SetBits();
}

}  // namespace patchloc
