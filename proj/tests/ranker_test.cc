#include "patchloc/ranker.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "patchloc/error.h"
#include "test_support.h"

namespace patchloc {
namespace {

using testing::Locs;
using testing::MakeCase;

TestSuite SuiteOf(std::vector<BranchId> exploit_trace,
                  std::vector<TestCase> cases) {
  return TestSuite{std::move(cases),
                   ExploitReference(Bytes{0}, ExecutionTrace{exploit_trace})};
}

TEST(DedupeTest, KeepsOnePerTraceAndVerdict) {
  TestSuite s = SuiteOf(Locs({1, 2}), {
                                          MakeCase(Locs({1, 2}), true, {1}),
                                          MakeCase(Locs({1, 2}), true, {2}),
                                          MakeCase(Locs({1, 2}), false, {3}),
                                          MakeCase(Locs({1}), false, {4}),
                                          MakeCase(Locs({1}), false, {5}),
                                      });
  TestSuite d = Dedupe(s);
  ASSERT_EQ(d.cases.size(), 3u);
  EXPECT_EQ(d.cases[0].input, (Bytes{1}));  // the seed's representative
  EXPECT_EQ(d.cases[1].input, (Bytes{3}));
  EXPECT_EQ(d.cases[2].input, (Bytes{4}));
  EXPECT_EQ(Dedupe(d).cases, d.cases);
}

TEST(DedupeTest, MatchesQuadraticReferenceAndIsIdempotent) {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 100; ++i) {
    TestSuite s = testing::RandomSuite(rng, 100, 10);
    // Duplicate some cases to make deduplication matter.
    std::size_t n = s.cases.size();
    for (std::size_t k = 0; k < n / 2; ++k) s.cases.push_back(s.cases[rng() % n]);
    TestSuite d = Dedupe(s);
    EXPECT_EQ(d.cases, testing::BruteDedupe(s.cases));
    EXPECT_EQ(Dedupe(d).cases, d.cases);
  }
}

TEST(ScoreTest, WorkedExampleCounts) {
  // 23 exploits all observing location 11, 14 benign cases observing it and
  // 10 benign cases elsewhere.
  std::vector<TestCase> cases;
  for (int i = 0; i < 23; ++i) {
    cases.push_back(MakeCase(Locs({24, 28, 8, 11, 2, 1000u + i}), true));
  }
  for (int i = 0; i < 14; ++i) {
    cases.push_back(MakeCase(Locs({24, 28, 8, 11, 2, 2000u + i}), false));
  }
  for (int i = 0; i < 10; ++i) {
    cases.push_back(MakeCase(Locs({24, 28, 8, 3000u + i}), false));
  }
  std::vector<LocationStats> stats =
      Score(SuiteOf(Locs({24, 28, 8, 11, 2}), cases));
  const LocationStats& l11 = stats[3];
  ASSERT_EQ(l11.location, BranchId{11});
  EXPECT_EQ(l11.sufficiency, Rational(23, 37));
  EXPECT_EQ(l11.necessity, Rational(1));
  EXPECT_EQ(l11.n_obs, 37u);
  EXPECT_EQ(l11.n_exploit, 23u);
}

TEST(ScoreTest, SeedOnly) {
  std::vector<LocationStats> stats =
      Score(SuiteOf(Locs({5, 6, 5, 7}), {MakeCase(Locs({5, 6, 5, 7}), true)}));
  ASSERT_EQ(stats.size(), 3u);
  for (const LocationStats& s : stats) {
    EXPECT_EQ(s.necessity, Rational(1));
    EXPECT_EQ(s.sufficiency, Rational(1));
  }
}

TEST(ScoreTest, NoExploit) {
  try {
    Score(SuiteOf(Locs({1}), {MakeCase(Locs({1}), false)}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNoExploitInSuite);
  }
}

TEST(ScoreTest, UnobservedLocationHasZeroSufficiency) {
  // Scoring a suite whose seed case was dropped can leave a location
  // unobserved.
  std::vector<LocationStats> stats =
      Score(SuiteOf(Locs({1, 2}), {MakeCase(Locs({1}), true)}));
  EXPECT_EQ(stats[1].n_obs, 0u);
  EXPECT_EQ(stats[1].sufficiency, Rational(0));
  EXPECT_EQ(stats[1].necessity, Rational(0));
}

TEST(ScoreTest, MatchesBruteForceOnRandomSuites) {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 100; ++i) {
    TestSuite s = Dedupe(testing::RandomSuite(rng, 50, 20));
    std::vector<LocationStats> stats = Score(s);
    ASSERT_EQ(stats.size(), s.exploit.on_exploit_locations().size());
    for (const LocationStats& row : stats) {
      testing::BruteCounts c = testing::BruteCount(s.cases, row.location);
      ASSERT_EQ(row.necessity, Rational(c.obs_exploit, c.exploit));
      ASSERT_EQ(row.sufficiency, Rational(c.obs_exploit, c.obs));
    }
  }
}

TEST(CrashDistanceTest, LastOccurrence) {
  std::vector<std::uint64_t> ids(50, 0);
  for (std::size_t i = 0; i < 50; ++i) ids[i] = 100 + i;
  ids[3] = 7;
  ids[40] = 7;
  std::vector<BranchId> trace;
  for (auto v : ids) trace.push_back(BranchId{v});
  ExploitReference ref(Bytes{0}, ExecutionTrace{trace});
  EXPECT_EQ(CrashDistance(BranchId{7}, ref), 9u);
  EXPECT_EQ(CrashDistance(BranchId{149}, ref), 0u);
  EXPECT_EQ(CrashDistance(BranchId{100}, ref), 49u);
  EXPECT_THROW(CrashDistance(BranchId{5}, ref), Error);
}

TEST(NormalizeAndRankTest, MaximalLocationRanksFirst) {
  ExploitReference ref(Bytes{0}, ExecutionTrace{Locs({1, 2, 3})});
  std::vector<LocationStats> stats(3);
  stats[0] = {BranchId{1}, 0, 4, 0, Rational(1), Rational(1, 4)};
  stats[1] = {BranchId{2}, 0, 4, 0, Rational(1), Rational(1, 2)};
  stats[2] = {BranchId{3}, 0, 4, 0, Rational(1, 2), Rational(1, 3)};
  RankedReport r = NormalizeAndRank(stats, ref, 2);
  ASSERT_EQ(r.entries.size(), 3u);
  EXPECT_EQ(r.entries[0].location, BranchId{2});
  EXPECT_EQ(r.entries[0].l2_squared, Rational(2));
  EXPECT_DOUBLE_EQ(r.entries[0].l2, std::sqrt(2.0));
  EXPECT_EQ(r.entries[1].location, BranchId{1});
  EXPECT_EQ(r.entries[1].nm_sufficiency, Rational(0));
  EXPECT_EQ(r.entries[2].location, BranchId{3});
  EXPECT_EQ(r.entries[2].nm_necessity, Rational(0));
  EXPECT_EQ(r.entries[2].nm_sufficiency, Rational(1, 3));
  EXPECT_EQ(r.Top().size(), 2u);
  EXPECT_EQ(r.entries[2].rank, 3u);
}

TEST(NormalizeAndRankTest, DegenerateScoresFallBackToCrashDistance) {
  ExploitReference ref(Bytes{0}, ExecutionTrace{Locs({9, 4, 7, 4})});
  std::vector<LocationStats> stats = Score(
      SuiteOf(Locs({9, 4, 7, 4}), {MakeCase(Locs({9, 4, 7, 4}), true)}));
  RankedReport r = NormalizeAndRank(stats, ref, 5);
  ASSERT_EQ(r.entries.size(), 3u);
  for (const RankedEntry& e : r.entries) EXPECT_EQ(e.l2_squared, Rational(0));
  EXPECT_EQ(r.entries[0].location, BranchId{4});  // distance 0
  EXPECT_EQ(r.entries[1].location, BranchId{7});  // distance 1
  EXPECT_EQ(r.entries[2].location, BranchId{9});  // distance 3
}

TEST(NormalizeAndRankTest, IdBreaksRemainingTies) {
  // Equal l2 through different coordinates and equal distance is
  // impossible on one trace, so build two stats rows by hand.
  ExploitReference ref(Bytes{0}, ExecutionTrace{Locs({5, 3, 8})});
  std::vector<LocationStats> stats(3);
  stats[0] = {BranchId{5}, 0, 1, 0, Rational(1), Rational(0)};
  stats[1] = {BranchId{3}, 0, 1, 0, Rational(0), Rational(1)};
  stats[2] = {BranchId{8}, 0, 1, 0, Rational(0), Rational(0)};
  RankedReport r = NormalizeAndRank(stats, ref, 3);
  // (1,0) and (0,1) tie exactly on l2; location 3 is nearer the crash.
  EXPECT_EQ(r.entries[0].location, BranchId{3});
  EXPECT_EQ(r.entries[1].location, BranchId{5});
}

TEST(NormalizeAndRankTest, Errors) {
  ExploitReference ref(Bytes{0}, ExecutionTrace{Locs({1})});
  EXPECT_THROW(NormalizeAndRank({}, ref, 5), Error);
  std::vector<LocationStats> one{{BranchId{1}, 1, 1, 1, Rational(1), Rational(1)}};
  EXPECT_THROW(NormalizeAndRank(one, ref, 0), Error);
}

TEST(NormalizeAndRankTest, AffineRescalingOfOneDimensionKeepsOrder) {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 100; ++i) {
    TestSuite s = Dedupe(testing::RandomSuite(rng, 60, 25));
    std::vector<LocationStats> stats = Score(s);
    RankedReport base = NormalizeAndRank(stats, s.exploit, 5);
    Rational scale(1 + static_cast<std::int64_t>(rng() % 9),
                   1 + static_cast<std::int64_t>(rng() % 5));
    Rational shift(static_cast<std::int64_t>(rng() % 11) - 5, 3);
    for (LocationStats& row : stats) {
      if (i % 2 == 0) {
        row.necessity = row.necessity * scale + shift;
      } else {
        row.sufficiency = row.sufficiency * scale + shift;
      }
    }
    RankedReport moved = NormalizeAndRank(stats, s.exploit, 5);
    ASSERT_EQ(moved.entries.size(), base.entries.size());
    for (std::size_t k = 0; k < base.entries.size(); ++k) {
      ASSERT_EQ(moved.entries[k].location, base.entries[k].location);
      ASSERT_EQ(moved.entries[k].l2_squared, base.entries[k].l2_squared);
    }
  }
}

TEST(NormalizeAndRankTest, TotalOrderIndependentOfInputOrder) {
  std::mt19937_64 rng(6);
  for (int i = 0; i < 100; ++i) {
    TestSuite s = Dedupe(testing::RandomSuite(rng, 80, 40));
    std::vector<LocationStats> stats = Score(s);
    RankedReport a = NormalizeAndRank(stats, s.exploit, 5);
    std::shuffle(stats.begin(), stats.end(), rng);
    RankedReport b = NormalizeAndRank(stats, s.exploit, 5);
    ASSERT_EQ(a.entries, b.entries);
    for (std::size_t k = 1; k < a.entries.size(); ++k) {
      const RankedEntry& x = a.entries[k - 1];
      const RankedEntry& y = a.entries[k];
      bool ordered =
          x.l2_squared > y.l2_squared ||
          (x.l2_squared == y.l2_squared &&
           (x.crash_distance < y.crash_distance ||
            (x.crash_distance == y.crash_distance &&
             ToValue(x.location) < ToValue(y.location))));
      ASSERT_TRUE(ordered);
    }
  }
}

TEST(SuiteDigestTest, SensitiveToContent) {
  TestSuite s = SuiteOf(Locs({1, 2}), {MakeCase(Locs({1, 2}), true, {1})});
  std::uint64_t d = SuiteDigest(s);
  EXPECT_EQ(d, SuiteDigest(s));
  TestSuite t = s;
  t.cases[0].verdict = Verdict::kBenign;
  EXPECT_NE(SuiteDigest(t), d);
  t = s;
  t.cases[0].input = {2};
  EXPECT_NE(SuiteDigest(t), d);
  t = s;
  t.cases.push_back(MakeCase(Locs({1}), false));
  EXPECT_NE(SuiteDigest(t), d);
}

TEST(FactorizationTest, EveryExploitObservesThePreviousInstance) {
  ExploitReference ref(Bytes{0}, ExecutionTrace{Locs({1, 2, 3})});
  std::vector<TestCase> cases{MakeCase(Locs({1, 2, 3}), true),
                              MakeCase(Locs({1, 2, 9}), true),
                              MakeCase(Locs({1, 5}), false)};
  Factorization f = EstimateFactorization(cases, ref, 2);
  ASSERT_TRUE(f.p1 && f.p2 && f.p4 && f.lhs);
  EXPECT_FALSE(f.p3);  // nothing conditions on Y_{j-1} = 0
  EXPECT_EQ(*f.p4, Rational(0));
  EXPECT_EQ(*f.lhs, *f.p1 * *f.p2);
  EXPECT_EQ(*f.lhs, Rational(1, 2));
}

TEST(FactorizationTest, NoExploitsMeansUndefined) {
  ExploitReference ref(Bytes{0}, ExecutionTrace{Locs({1, 2})});
  Factorization f =
      EstimateFactorization(std::vector<TestCase>{MakeCase(Locs({1}), false)},
                            ref, 1);
  EXPECT_FALSE(f.p1 || f.p2 || f.p3 || f.p4 || f.lhs);
  EXPECT_THROW(EstimateFactorization({}, ref, 0), Error);
  EXPECT_THROW(EstimateFactorization({}, ref, 2), Error);
}

TEST(FactorizationTest, IdentityAgainstBruteForceCounts) {
  // Three paths: full exploit path, early divergence, late divergence.
  std::mt19937_64 rng(13);
  ExploitReference ref(Bytes{0}, ExecutionTrace{Locs({1, 2, 3, 4})});
  for (int i = 0; i < 100; ++i) {
    std::vector<TestCase> cases;
    std::size_t n = 1 + rng() % 30;
    for (std::size_t c = 0; c < n; ++c) {
      switch (rng() % 3) {
        case 0:
          cases.push_back(MakeCase(Locs({1, 2, 3, 4}), rng() % 2 == 0));
          break;
        case 1:
          cases.push_back(MakeCase(Locs({1, 7}), rng() % 2 == 0));
          break;
        default:
          cases.push_back(MakeCase(Locs({1, 2, 8}), rng() % 2 == 0));
      }
    }
    for (std::size_t j = 1; j < 4; ++j) {
      Factorization f = EstimateFactorization(cases, ref, j);
      std::int64_t e = 0, yj = 0;
      for (const TestCase& c : cases) {
        if (!c.is_exploit()) continue;
        ++e;
        if (testing::BrutePrefix(c.trace.events, ref.trace().events) > j) ++yj;
      }
      if (e == 0) {
        EXPECT_FALSE(f.lhs);
        continue;
      }
      EXPECT_EQ(*f.lhs, Rational(yj, e));
      if (f.defined()) {
        EXPECT_EQ(*f.lhs, *f.p1 * *f.p2 + *f.p3 * *f.p4);
      }
    }
  }
}

}  // namespace
}  // namespace patchloc
