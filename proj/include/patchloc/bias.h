#ifndef PATCHLOC_BIAS_H_
#define PATCHLOC_BIAS_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "patchloc/ranker.h"
#include "patchloc/rational.h"
#include "patchloc/trace.h"

namespace patchloc {

// Cases the oracle flagged, in suite order.
TestSuite DeriveExploitOnly(const TestSuite& suite);

// Cases whose trace contains `crash_location`, in suite order.
TestSuite DeriveReachingCrash(const TestSuite& suite, BranchId crash_location);

// Number of distinct (necessity, sufficiency) pairs.
std::size_t ClusterCount(std::span<const LocationStats> stats);

struct BiasReport {
  std::size_t clusters_t1 = 0;  // exploit-only suite
  std::size_t clusters_t2 = 0;  // crash-reaching suite
  std::size_t clusters_t3 = 0;  // the concentrated suite itself
  Rational ratio_t1;            // clusters_t1 / clusters_t3
  Rational ratio_t2;            // clusters_t2 / clusters_t3
};

// Deduplicates `concentrated`, derives both biased suites from it and
// compares their cluster counts.
BiasReport AnalyzeBias(const TestSuite& concentrated);

// Text histogram of ratios over [0, 1] in `buckets` equal-width bins; the
// last bin is closed and ratios above 1 get their own "> 1" row.
std::string RatioHistogram(std::span<const Rational> ratios,
                           std::size_t buckets = 10);

}  // namespace patchloc

#endif  // PATCHLOC_BIAS_H_
