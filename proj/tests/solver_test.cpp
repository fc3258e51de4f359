#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <variant>
#include <vector>

#include <gtest/gtest.h>

#include "lbc/oracle.hpp"
#include "lbc/solver.hpp"
#include "test_support.hpp"

namespace lbc
{
namespace
{
using testing::Collinear4;

Instance RandomSmallInstance(SplitMix64& rng, std::size_t max_n = 10)
{
  const std::size_t n = testing::UniformIn(rng, 4, max_n);
  const std::size_t lambda = testing::UniformIn(rng, 1, std::min<std::size_t>(4, n));
  return Instance{testing::RandomPoints(rng, n, 2), lambda};
}

bool HasProbe(const SearchTrace& trace, double radius, bool valid)
{
  return std::any_of(trace.probes.begin(), trace.probes.end(),
                     [&](const SearchTrace::Probe& p)
                     { return p.radius == radius && p.valid == valid; });
}

TEST(CheckValidTest, Examples)
{
  EXPECT_TRUE(CheckValid(Instance{Collinear4(), 2}, 1.0).valid);
  EXPECT_FALSE(CheckValid(Instance{Collinear4(), 3}, 1.0).valid);
  SplitMix64 rng(1);
  const Instance any{testing::RandomPoints(rng, 40, 3), 1};
  for (const double r : {1e-6, 0.1, 0.5, 3.0})
  {
    EXPECT_TRUE(CheckValid(any, r).valid);
  }
}

TEST(CheckValidTest, RecordsProbe)
{
  SearchTrace trace;
  CheckValid(Instance{Collinear4(), 3}, 1.0, &trace);
  ASSERT_EQ(trace.validity_checks(), 1u);
  EXPECT_EQ(trace.probes[0].radius, 1.0);
  EXPECT_FALSE(trace.probes[0].valid);
}

TEST(DecideTest, Examples)
{
  const Instance inst{Collinear4(), 2};
  const Verdict at_four = Decide(inst, 4.0);
  ASSERT_TRUE(std::holds_alternative<PriceAtMost>(at_four));
  EXPECT_EQ(std::get<PriceAtMost>(at_four).witness.centers.size(), 1u);

  const Verdict at_half = Decide(inst, 0.5);
  ASSERT_TRUE(std::holds_alternative<PriceGreater>(at_half));
  EXPECT_EQ(std::get<PriceGreater>(at_half).bound, 0.125);

  const Instance lone{PointSet::FromPoints({{2, 3}}), 1};
  for (const double x : {0.01, 1.0, 50.0})
  {
    EXPECT_TRUE(std::holds_alternative<PriceAtMost>(Decide(lone, x)));
  }
}

TEST(DecideTest, RejectsNonPositiveRadius)
{
  const Instance inst{Collinear4(), 2};
  EXPECT_THROW(Decide(inst, 0.0), std::invalid_argument);
  EXPECT_THROW(Decide(inst, -1.0), std::invalid_argument);
  EXPECT_THROW(Decide(inst, INFINITY), std::invalid_argument);
}

TEST(DecideTest, SoundAgainstOracle)
{
  SplitMix64 rng(77);
  for (int trial = 0; trial < 40; ++trial)
  {
    const Instance inst = RandomSmallInstance(rng, 9);
    const double opt = BruteForceOpt(inst).price;
    if (opt == 0.0)
    {
      continue;
    }
    for (const double f : {0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0})
    {
      const double x = f * opt;
      const Verdict v = Decide(inst, x);
      if (const auto* at_most = std::get_if<PriceAtMost>(&v))
      {
        ASSERT_LE(opt, x);
        const Solution witness = SolutionFromNet(inst, at_most->witness);
        ASSERT_TRUE(IsFeasibleSolution(inst, witness));
        ASSERT_LE(witness.price, x);
      }
      else
      {
        ASSERT_GT(opt, std::get<PriceGreater>(v).bound);
      }
    }
  }
}

TEST(ZeroPriceCheckTest, Examples)
{
  SplitMix64 rng(4);
  const Instance any{testing::RandomPoints(rng, 12, 2), 1};
  const auto self = ZeroPriceCheck(any);
  ASSERT_TRUE(self.has_value());
  EXPECT_EQ(self->price, 0.0);
  EXPECT_EQ(self->centers.size(), 12u);
  for (std::size_t i = 0; i < 12; ++i)
  {
    EXPECT_EQ(self->assignment[i], i);
  }

  const Instance dup{PointSet::FromPoints({{0, 0}, {0, 0}, {5, 5}, {5, 5}}), 2};
  const auto groups = ZeroPriceCheck(dup);
  ASSERT_TRUE(groups.has_value());
  EXPECT_EQ(groups->price, 0.0);
  EXPECT_EQ(groups->centers, (std::vector<std::size_t>{0, 2}));
  EXPECT_EQ(groups->assignment, (std::vector<std::size_t>{0, 0, 2, 2}));

  EXPECT_FALSE(ZeroPriceCheck(Instance{Collinear4(), 2}).has_value());
}

TEST(ZeroPriceCheckTest, InterleavedGroupsAndSignedZero)
{
  const Instance inst{PointSet::FromPoints({{1, 0}, {0.0, 0}, {1, 0}, {-0.0, 0}}), 2};
  const auto zero = ZeroPriceCheck(inst);
  ASSERT_TRUE(zero.has_value());
  EXPECT_EQ(zero->centers, (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(zero->assignment, (std::vector<std::size_t>{0, 1, 0, 1}));
  EXPECT_TRUE(IsFeasibleSolution(inst, *zero));

  const Instance short_group{PointSet::FromPoints({{1, 0}, {1, 0}, {1, 0}, {2, 0}}), 2};
  EXPECT_FALSE(ZeroPriceCheck(short_group).has_value());
}

TEST(SelectKthTest, MatchesSort)
{
  SplitMix64 rng(12);
  for (int trial = 0; trial < 200; ++trial)
  {
    const std::size_t n = 1 + rng.NextBelow(60);
    std::vector<double> pool(n);
    for (double& v : pool)
    {
      v = static_cast<double>(rng.NextBelow(10));
    }
    std::vector<double> sorted = pool;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t k = rng.NextBelow(n);
    EXPECT_EQ(detail::SelectKth(pool, k, rng), sorted[k]);
  }
}

TEST(AnchoredSearchTest, AnchorsCarryEvidence)
{
  SplitMix64 rng(13);
  for (int trial = 0; trial < 300; ++trial)
  {
    const std::size_t count = 1 + rng.NextBelow(40);
    // Arbitrary non-monotone predicate with the top forced true.
    std::vector<bool> truth(count);
    for (std::size_t i = 0; i < count; ++i)
    {
      truth[i] = rng.NextBelow(2) == 1;
    }
    truth.back() = true;
    std::vector<int> asked(count, 0);
    const auto [lo, hi] = detail::AnchoredSearch(
        count, [&](std::size_t i) { ++asked[i]; return truth[i]; });
    ASSERT_EQ(hi - lo, 1);
    ASSERT_TRUE(truth[static_cast<std::size_t>(hi)]);
    if (lo >= 0)
    {
      ASSERT_FALSE(truth[static_cast<std::size_t>(lo)]);
      ASSERT_EQ(asked[static_cast<std::size_t>(lo)], 1);
    }
    std::size_t total = 0;
    for (const int a : asked)
    {
      total += static_cast<std::size_t>(a);
    }
    ASSERT_LE(total, static_cast<std::size_t>(std::ceil(std::log2(count + 1))));
  }
}

TEST(SolveExactDistancesTest, Examples)
{
  SearchTrace trace;
  const Solution two = SolveExactDistances(Instance{Collinear4(), 2}, 0, &trace);
  EXPECT_EQ(two.price, 3.0);
  EXPECT_EQ(two.centers, (std::vector<std::size_t>{0}));
  ASSERT_TRUE(trace.bracket.has_value());
  EXPECT_EQ(trace.bracket->lo, 0.0);
  EXPECT_EQ(trace.bracket->hi, 1.0);

  const Solution four = SolveExactDistances(Instance{Collinear4(), 4});
  EXPECT_LE(four.price, 8.0);
  EXPECT_GE(four.price, 2.0);

  SplitMix64 rng(3);
  const Instance any{testing::RandomPoints(rng, 10, 2), 1};
  EXPECT_EQ(SolveExactDistances(any).price, 0.0);
}

TEST(SolveExactDistancesTest, InfeasibleLambda)
{
  EXPECT_THROW(SolveExactDistances(Instance{Collinear4(), 5}), InfeasibleError);
}

TEST(SolveExactDistancesTest, RatioAndEvidenceAgainstOracle)
{
  SplitMix64 rng(21);
  for (int trial = 0; trial < 60; ++trial)
  {
    const Instance inst = RandomSmallInstance(rng);
    const double opt = BruteForceOpt(inst).price;
    SearchTrace trace;
    const Solution sol = SolveExactDistances(inst, trial, &trace);
    ASSERT_TRUE(IsFeasibleSolution(inst, sol));
    ASSERT_GE(sol.price, opt);
    ASSERT_LE(sol.price, 4.0 * opt * (1 + 1e-9));
    if (trace.bracket)
    {
      ASSERT_TRUE(HasProbe(trace, 4.0 * trace.bracket->hi, true));
      if (trace.bracket->lo > 0.0)
      {
        ASSERT_TRUE(HasProbe(trace, 4.0 * trace.bracket->lo, false));
        ASSERT_GT(opt, trace.bracket->lo);
      }
      ASSERT_LE(trace.bracket->hi, opt);
    }
  }
}

TEST(SolveExactDistancesTest, SameSeedSameTrace)
{
  SplitMix64 rng(8);
  const Instance inst{testing::RandomPoints(rng, 30, 2), 3};
  SearchTrace first;
  SearchTrace second;
  const Solution a = SolveExactDistances(inst, 99, &first);
  const Solution b = SolveExactDistances(inst, 99, &second);
  EXPECT_EQ(a.centers, b.centers);
  EXPECT_EQ(a.assignment, b.assignment);
  ASSERT_EQ(first.validity_checks(), second.validity_checks());
  for (std::size_t k = 0; k < first.probes.size(); ++k)
  {
    EXPECT_EQ(first.probes[k].radius, second.probes[k].radius);
  }
}

TEST(GridTopTest, Examples)
{
  EXPECT_EQ(GridTop(1.0, 1.0, 8.0), 4u);
  EXPECT_EQ(GridTop(0.5, 2.0, 8.0), 6u);
  // 1.0125^M <= 16: M = floor(ln 16 / ln 1.0125).
  EXPECT_EQ(GridTop(1.0, 1.0, 0.1),
            static_cast<std::size_t>(std::floor(std::log(16.0) / std::log(1.0125))));
}

TEST(GridTopTest, IsLargestIndexNotExceedingLimit)
{
  SplitMix64 rng(17);
  for (int trial = 0; trial < 500; ++trial)
  {
    const double x = 0.01 + rng.NextUnit();
    const double y = x * (1.0 + 47.0 * rng.NextUnit());
    const double eps = 0.01 + 8.0 * rng.NextUnit();
    const std::size_t m = GridTop(x, y, eps);
    const double growth = 1.0 + eps / 8.0;
    ASSERT_LE(x * std::pow(growth, static_cast<double>(m)), 16.0 * y);
    ASSERT_GT(x * std::pow(growth, static_cast<double>(m + 1)), 16.0 * y);
  }
}

TEST(ClampEpsilonTest, Range)
{
  EXPECT_EQ(ClampEpsilon(0.5), 0.5);
  EXPECT_EQ(ClampEpsilon(8.0), 8.0);
  EXPECT_EQ(ClampEpsilon(20.0), 8.0);
  EXPECT_THROW(ClampEpsilon(0.0), std::invalid_argument);
  EXPECT_THROW(ClampEpsilon(-1.0), std::invalid_argument);
  EXPECT_THROW(ClampEpsilon(std::nan("")), std::invalid_argument);
}

TEST(RefineIntervalTest, Examples)
{
  const Instance inst{Collinear4(), 2};
  SearchTrace trace;
  const Solution sol = RefineInterval(inst, {0.5, 2.0}, 8.0, &trace);
  EXPECT_EQ(sol.price, 1.0);
  EXPECT_EQ(sol.centers, (std::vector<std::size_t>{0, 2}));
  EXPECT_TRUE(HasProbe(trace, 0.5, false));
  EXPECT_TRUE(HasProbe(trace, 1.0, true));

  SearchTrace first;
  const Solution direct = RefineInterval(inst, {1.0, 3.0}, 0.5, &first);
  EXPECT_EQ(first.validity_checks(), 1u);
  EXPECT_LE(direct.price, 1.0);
}

TEST(RefineIntervalTest, RejectsBadArguments)
{
  const Instance inst{Collinear4(), 2};
  EXPECT_THROW(RefineInterval(inst, {0.5, 2.0}, 0.0), std::invalid_argument);
  EXPECT_THROW(RefineInterval(inst, {0.0, 2.0}, 1.0), std::invalid_argument);
  EXPECT_THROW(RefineInterval(inst, {2.0, 1.0}, 1.0), std::invalid_argument);
  // The optimum (1) lies far above this interval.
  EXPECT_THROW(RefineInterval(inst, {0.001, 0.002}, 1.0), std::invalid_argument);
}

TEST(RefineIntervalTest, ContractOnOracleBrackets)
{
  SplitMix64 rng(31);
  for (int trial = 0; trial < 40; ++trial)
  {
    const Instance inst = RandomSmallInstance(rng, 9);
    const double opt = BruteForceOpt(inst).price;
    if (opt == 0.0)
    {
      continue;
    }
    const double x = opt / (1.0 + 20.0 * rng.NextUnit());
    const double y = opt * (1.0 + 2.0 * rng.NextUnit());
    for (const double eps : {0.1, 1.0, 8.0})
    {
      SearchTrace trace;
      const Solution sol = RefineInterval(inst, {x, y}, eps, &trace);
      ASSERT_TRUE(IsFeasibleSolution(inst, sol));
      ASSERT_LE(sol.price, (4.0 + eps) * opt * (1 + 1e-9));
      const double bound =
          std::ceil(std::log2(static_cast<double>(trace.grid_top) + 1.0)) + 2.0;
      ASSERT_LE(static_cast<double>(trace.validity_checks()), bound);
      ASSERT_EQ(trace.grid_top, GridTop(x, y, eps));
    }
  }
}

TEST(BracketSearchTest, Examples)
{
  const Instance two{PointSet::FromPoints({{0, 0}, {3, 4}}), 2};
  const QuadTree tree = BuildTree(two.points);
  const CandidateSet candidates = CandidateDistances(ComputePairs(two.points, tree, 4.0));
  const SearchInterval interval = BracketSearch(two, candidates);
  EXPECT_EQ(interval.lo, 0.625);
  EXPECT_EQ(interval.hi, 10.0);

  for (const std::size_t lambda : {2u, 4u})
  {
    const Instance inst{Collinear4(), lambda};
    const QuadTree t = BuildTree(inst.points);
    const SearchInterval b =
        BracketSearch(inst, CandidateDistances(ComputePairs(inst.points, t, 4.0)));
    const double opt = BruteForceOpt(inst).price;
    EXPECT_LT(b.lo, opt);
    EXPECT_LE(opt, b.hi);
    EXPECT_LE(b.hi / b.lo, 48.0);
  }
}

TEST(BracketSearchTest, EmptyCandidatesIsInternalError)
{
  EXPECT_THROW(BracketSearch(Instance{Collinear4(), 2}, CandidateSet{}), std::logic_error);
}

TEST(BracketSearchTest, ContainsOptimumWithBoundedSpread)
{
  SplitMix64 rng(41);
  for (int trial = 0; trial < 60; ++trial)
  {
    const Instance inst = RandomSmallInstance(rng);
    const double opt = BruteForceOpt(inst).price;
    if (opt == 0.0)
    {
      continue;
    }
    const QuadTree tree = BuildTree(inst.points);
    const CandidateSet candidates =
        CandidateDistances(ComputePairs(inst.points, tree, 4.0));
    SearchTrace trace;
    const SearchInterval b = BracketSearch(inst, candidates, &trace);
    ASSERT_LT(b.lo, opt);
    ASSERT_LE(opt, b.hi);
    ASSERT_LT(b.hi / b.lo, 48.0);
    ASSERT_TRUE(HasProbe(trace, b.hi, true));
    if (b.lo != candidates.values.front() / 4.0)
    {
      ASSERT_TRUE(HasProbe(trace, 4.0 * b.lo, false));
    }
  }
}

TEST(SolveWspdTest, Examples)
{
  const Solution sol = SolveWspd(Instance{Collinear4(), 2}, 0.5);
  EXPECT_GE(sol.price, 1.0);
  EXPECT_LE(sol.price, 4.5);

  SplitMix64 rng(6);
  const Instance any{testing::RandomPoints(rng, 25, 2), 1};
  for (const double eps : {0.1, 1.0, 100.0})
  {
    EXPECT_EQ(SolveWspd(any, eps).price, 0.0);
  }
  EXPECT_THROW(SolveWspd(Instance{Collinear4(), 5}, 0.5), InfeasibleError);
  EXPECT_THROW(SolveWspd(Instance{Collinear4(), 2}, 0.0), std::invalid_argument);
}

TEST(SolveWspdTest, OneMandatoryCluster)
{
  SplitMix64 rng(9);
  for (int trial = 0; trial < 20; ++trial)
  {
    const std::size_t n = testing::UniformIn(rng, 2, 9);
    const Instance inst{testing::RandomPoints(rng, n, 2), n};
    const double opt = BruteForceOpt(inst).price;
    const Solution sol = SolveWspd(inst, 0.5);
    ASSERT_EQ(sol.centers.size(), 1u);
    ASSERT_LE(sol.price, 4.5 * opt * (1 + 1e-9));
  }
}

TEST(SolveWspdTest, RatioAgainstOracle)
{
  SplitMix64 rng(2718);
  for (int trial = 0; trial < 80; ++trial)
  {
    const Instance inst = RandomSmallInstance(rng, 11);
    const double opt = BruteForceOpt(inst).price;
    for (const double eps : {0.1, 0.5, 8.0})
    {
      const Solution sol = SolveWspd(inst, eps);
      ASSERT_TRUE(IsFeasibleSolution(inst, sol));
      ASSERT_GE(sol.price, opt);
      ASSERT_LE(sol.price, (4.0 + eps) * opt * (1 + 1e-9));
    }
  }
}

TEST(SolveWspdTest, DuplicateHeavyInstances)
{
  SplitMix64 rng(55);
  for (int trial = 0; trial < 40; ++trial)
  {
    const std::size_t n = testing::UniformIn(rng, 4, 11);
    const Instance inst{testing::LatticePoints(rng, n, 2, 3),
                        testing::UniformIn(rng, 1, std::min<std::size_t>(4, n))};
    const double opt = BruteForceOpt(inst).price;
    const Solution sol = SolveWspd(inst, 1.0);
    ASSERT_TRUE(IsFeasibleSolution(inst, sol));
    ASSERT_LE(sol.price, 5.0 * opt * (1 + 1e-9));
    const Solution exact = SolveExactDistances(inst);
    ASSERT_TRUE(IsFeasibleSolution(inst, exact));
    ASSERT_LE(exact.price, 4.0 * opt * (1 + 1e-9));
  }
}

}  // namespace
}  // namespace lbc
