#include "patchloc/bias.h"

#include <algorithm>
#include <cstdio>
#include <iterator>
#include <set>
#include <utility>

#include "patchloc/error.h"

namespace patchloc {

TestSuite DeriveExploitOnly(const TestSuite& suite) {
  TestSuite out{{}, suite.exploit};
  std::copy_if(suite.cases.begin(), suite.cases.end(),
               std::back_inserter(out.cases),
               [](const TestCase& c) { return c.is_exploit(); });
  return out;
}

TestSuite DeriveReachingCrash(const TestSuite& suite,
                              BranchId crash_location) {
  TestSuite out{{}, suite.exploit};
  std::copy_if(suite.cases.begin(), suite.cases.end(),
               std::back_inserter(out.cases), [&](const TestCase& c) {
                 return std::find(c.trace.events.begin(), c.trace.events.end(),
                                  crash_location) != c.trace.events.end();
               });
  return out;
}

std::size_t ClusterCount(std::span<const LocationStats> stats) {
  std::set<std::pair<Rational, Rational>> clusters;
  for (const LocationStats& s : stats) {
    clusters.emplace(s.necessity, s.sufficiency);
  }
  return clusters.size();
}

BiasReport AnalyzeBias(const TestSuite& concentrated) {
  TestSuite t3 = Dedupe(concentrated);
  TestSuite t1 = DeriveExploitOnly(t3);
  TestSuite t2 = DeriveReachingCrash(t3, t3.exploit.crash_location());
  BiasReport report;
  report.clusters_t1 = ClusterCount(Score(t1));
  report.clusters_t2 = ClusterCount(Score(t2));
  report.clusters_t3 = ClusterCount(Score(t3));
  auto ratio = [&](std::size_t c) {
    return Rational(static_cast<std::int64_t>(c),
                    static_cast<std::int64_t>(report.clusters_t3));
  };
  report.ratio_t1 = ratio(report.clusters_t1);
  report.ratio_t2 = ratio(report.clusters_t2);
  return report;
}

std::string RatioHistogram(std::span<const Rational> ratios,
                           std::size_t buckets) {
  if (buckets == 0) {
    throw Error(ErrorCode::kInvalidArgument, "histogram needs a bucket");
  }
  std::vector<std::size_t> counts(buckets, 0);
  std::size_t above = 0;
  const Rational one(1);
  for (const Rational& r : ratios) {
    if (r < Rational(0)) {
      throw Error(ErrorCode::kInvalidArgument, "negative ratio");
    }
    if (r > one) {
      ++above;
      continue;
    }
    // Bucket b covers [b/n, (b+1)/n); 1 itself lands in the last one.
    std::size_t b = 0;
    while (b + 1 < buckets &&
           !(r < Rational(static_cast<std::int64_t>(b + 1),
                          static_cast<std::int64_t>(buckets)))) {
      ++b;
    }
    ++counts[b];
  }
  std::string out;
  char line[64];
  for (std::size_t b = 0; b < buckets; ++b) {
    double lo = static_cast<double>(b) / static_cast<double>(buckets);
    double hi = static_cast<double>(b + 1) / static_cast<double>(buckets);
    std::snprintf(line, sizeof line, "[%.2f, %.2f%c %zu\n", lo, hi,
                  b + 1 == buckets ? ']' : ')', counts[b]);
    out += line;
  }
  if (above > 0) {
    std::snprintf(line, sizeof line, "> 1 %zu\n", above);
    out += line;
  }
  return out;
}

}  // namespace patchloc
