#ifndef PATCHLOC_SENSITIVITY_MAP_H_
#define PATCHLOC_SENSITIVITY_MAP_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "patchloc/trace.h"

namespace patchloc {

// Learned relation between exploit-trace instances and input bytes:
// Get(j, k) means some mutation of byte k was seen to make instance j go
// unobserved. Bits only ever go from 0 to 1.
//
// Maps with instance_count * input_len <= dense_limit use a dense bitset.
// Larger ones store, per byte, a set of disjoint instance intervals; updates
// always mark contiguous instance ranges, so this stays small even for
// exploit traces with millions of instances.
class SensitivityMap {
 public:
  static constexpr std::uint64_t kDefaultDenseLimit = std::uint64_t{1} << 26;

  SensitivityMap(std::size_t instance_count, std::size_t input_len,
                 std::uint64_t dense_limit = kDefaultDenseLimit);

  // All-zero map over the exploit's instances and `input_len` bytes.
  static SensitivityMap Init(const ExploitReference& exploit,
                             std::size_t input_len);

  std::size_t instance_count() const { return instance_count_; }
  std::size_t input_len() const { return input_len_; }
  bool is_dense() const { return dense_; }

  // Throws Error(kOutOfRange) when j or k is outside the map.
  bool Get(std::size_t j, std::size_t k) const;
  void Mark(std::size_t j, std::size_t k);
  // Marks instances [first, last) for byte k.
  void MarkRange(std::size_t first, std::size_t last, std::size_t k);

  // Learns from one mutant of `seed_trace` that differed at
  // `mutated_offsets`. Every instance the seed observed but the mutant does
  // not (prefix semantics) becomes sensitive to every mutated byte: with p
  // the mutant's prefix length and s the seed's, bits [p, s) x mutated are
  // set. For the exploit itself as seed, s = instance_count().
  void Update(const ExecutionTrace& seed_trace,
              std::span<const std::size_t> mutated_offsets,
              const ExecutionTrace& mutated_trace,
              const ExploitReference& exploit);

  // Bytes some instance i < j is sensitive to, ascending.
  std::vector<std::size_t> SensitiveBytesOfPrefix(std::size_t j) const;
  // Bytes instance j itself is sensitive to, ascending.
  std::vector<std::size_t> SensitiveBytesOf(std::size_t j) const;

  // Every set bit as (instance, byte), sorted.
  std::vector<std::pair<std::size_t, std::size_t>> SetBits() const;
  std::size_t CountSetBits() const;

  friend bool operator==(const SensitivityMap& a, const SensitivityMap& b);

 private:
  void CheckBounds(std::size_t j, std::size_t k) const;

  std::size_t instance_count_;
  std::size_t input_len_;
  bool dense_;
  std::vector<std::uint64_t> bits_;  // dense: row-major, j * input_len + k
  // sparse: per byte, interval start -> end (exclusive), disjoint and
  // non-adjacent.
  std::vector<std::map<std::size_t, std::size_t>> intervals_;
  // Smallest marked instance per byte; instance_count_ when none.
  std::vector<std::size_t> first_marked_;
};

}  // namespace patchloc

#endif  // PATCHLOC_SENSITIVITY_MAP_H_
