#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "lbc/geometry.hpp"
#include "lbc/grid_net.hpp"
#include "lbc/random.hpp"
#include "lbc/wspd.hpp"

namespace lbc
{
/// Separation used by the WSPD pipeline; yields the [l/2, 3l/2] envelope.
inline constexpr double kPipelineSigma = 4.0;
/// Largest accepted approximation slack; larger requests are clamped.
inline constexpr double kMaxEpsilon = 8.0;

/// A bracket (lo, hi] known to contain the optimal price.
struct SearchInterval
{
  double lo = 0.0;
  double hi = 0.0;
};

/// Bookkeeping for a search: every radius whose net was checked, in order,
/// with its verdict.
struct SearchTrace
{
  struct Probe
  {
    double radius;
    bool valid;
  };
  std::vector<Probe> probes;
  std::optional<SearchInterval> bracket;
  std::size_t grid_top = 0;  // M of the last refinement

  std::size_t validity_checks() const { return probes.size(); }
};

struct ValidityCheck
{
  bool valid = false;
  Net net;
};

/// Builds the r-net with its nearest-center assignment and reports whether
/// every center serves at least lambda points.
inline ValidityCheck CheckValid(const Instance& instance, double radius,
                                SearchTrace* trace = nullptr)
{
  ValidityCheck result;
  result.net = NetWithAssignment(instance.points, radius);
  result.valid = std::all_of(result.net.counts.begin(), result.net.counts.end(),
                             [&](std::size_t c) { return c >= instance.lambda; });
  if (trace != nullptr)
  {
    trace->probes.push_back({radius, result.valid});
  }
  return result;
}

/// The valid net at x is a witness of price <= x.
struct PriceAtMost
{
  double x = 0.0;
  Net witness;
};

/// The optimum is strictly above `bound` (= x / 4).
struct PriceGreater
{
  double bound = 0.0;
};

using Verdict = std::variant<PriceAtMost, PriceGreater>;

/// Linear-time test separating r_opt <= x from r_opt > x/4. Inside
/// [x/4, x] either answer may come back.
inline Verdict Decide(const Instance& instance, double x,
                      SearchTrace* trace = nullptr)
{
  if (!(x > 0.0) || !std::isfinite(x))
  {
    throw std::invalid_argument("decision radius must be positive and finite");
  }
  ValidityCheck check = CheckValid(instance, x, trace);
  if (check.valid)
  {
    return PriceAtMost{x, std::move(check.net)};
  }
  return PriceGreater{x / 4.0};
}

inline Solution SolutionFromNet(const Instance& instance, const Net& net)
{
  Solution solution;
  solution.centers = net.centers;
  std::sort(solution.centers.begin(), solution.centers.end());
  solution.assignment = net.assignment;
  solution.price = PriceOf(instance, solution.centers, solution.assignment);
  return solution;
}

namespace detail
{
struct CoordinateHash
{
  std::size_t operator()(PointView p) const
  {
    std::uint64_t h = 0x84222325cbf29ce4ULL;
    for (double c : p)
    {
      c += 0.0;  // -0.0 and 0.0 must hash alike
      std::uint64_t bits = 0;
      std::memcpy(&bits, &c, sizeof bits);
      h = (h ^ bits) * 0x100000001b3ULL;
      h ^= h >> 29;
    }
    return static_cast<std::size_t>(h);
  }
};

struct CoordinateEqual
{
  bool operator()(PointView p, PointView q) const
  {
    return std::equal(p.begin(), p.end(), q.begin(), q.end());
  }
};
}  // namespace detail

/// Price-0 solution when every group of identical points has at least lambda
/// members; the first index of each group is its center.
inline std::optional<Solution> ZeroPriceCheck(const Instance& instance)
{
  const std::size_t n = instance.size();
  Solution solution;
  solution.assignment.resize(n);
  if (instance.lambda <= 1)
  {
    for (std::size_t i = 0; i < n; ++i)
    {
      solution.centers.push_back(i);
      solution.assignment[i] = i;
    }
    return solution;
  }
  std::unordered_map<PointView, std::size_t, detail::CoordinateHash,
                     detail::CoordinateEqual>
      first_of;
  first_of.reserve(n);
  std::vector<std::size_t> group_size(n, 0);
  for (std::size_t i = 0; i < n; ++i)
  {
    const auto [it, inserted] = first_of.try_emplace(instance.points[i], i);
    solution.assignment[i] = it->second;
    ++group_size[it->second];
    if (inserted)
    {
      solution.centers.push_back(i);
    }
  }
  for (const std::size_t c : solution.centers)
  {
    if (group_size[c] < instance.lambda)
    {
      return std::nullopt;
    }
  }
  return solution;
}

namespace detail
{
/// Randomized quickselect: the k-th smallest of `pool` (reorders `pool`).
inline double SelectKth(std::vector<double>& pool, std::size_t k, SplitMix64& rng)
{
  std::size_t lo = 0;
  std::size_t hi = pool.size();
  while (true)
  {
    const double pivot = pool[lo + rng.NextBelow(hi - lo)];
    // Three-way partition of [lo, hi): < pivot | == pivot | > pivot.
    std::size_t lt = lo;
    std::size_t gt = hi;
    std::size_t i = lo;
    while (i < gt)
    {
      if (pool[i] < pivot)
      {
        std::swap(pool[lt++], pool[i++]);
      }
      else if (pool[i] > pivot)
      {
        std::swap(pool[i], pool[--gt]);
      }
      else
      {
        ++i;
      }
    }
    if (k < lt)
    {
      hi = lt;
    }
    else if (k >= gt)
    {
      lo = gt;
    }
    else
    {
      return pivot;
    }
  }
}

/// Binary search over indices 0..count-1 of a sorted probe sequence for a
/// predicate that need not be monotone. The low anchor starts virtual (-1)
/// and only ever moves onto an index whose check failed; the high anchor
/// starts on count-1, which callers guarantee valid, and only moves onto an
/// index whose check passed. `check(i)` returns the verdict at index i.
/// Returns the final adjacent anchors (lo may be -1).
template <typename Check>
std::pair<std::ptrdiff_t, std::ptrdiff_t> AnchoredSearch(std::size_t count,
                                                          Check&& check)
{
  std::ptrdiff_t lo = -1;
  auto hi = static_cast<std::ptrdiff_t>(count) - 1;
  while (hi - lo > 1)
  {
    const std::ptrdiff_t mid = lo + (hi - lo) / 2;
    if (check(static_cast<std::size_t>(mid)))
    {
      hi = mid;
    }
    else
    {
      lo = mid;
    }
  }
  return {lo, hi};
}
}  // namespace detail

/// 4-approximation by searching all pairwise distances with randomized
/// median selection. Expected O(n^2) time and O(n^2) memory.
inline Solution SolveExactDistances(const Instance& instance,
                                    std::uint64_t seed = 0,
                                    SearchTrace* trace = nullptr)
{
  ValidateInstance(instance);
  if (auto zero = ZeroPriceCheck(instance))
  {
    return *zero;
  }
  const PointSet& points = instance.points;
  const std::size_t n = points.size();
  std::vector<double> pool;
  pool.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i)
  {
    for (std::size_t j = i + 1; j < n; ++j)
    {
      const double d = Distance(points[i], points[j]);
      if (d > 0.0)
      {
        pool.push_back(d);
      }
    }
  }
  // Anchors: lo has a failed check (or is the virtual 0), hi a passing one
  // (or is max D, which always passes).
  double lo = 0.0;
  double hi = *std::max_element(pool.begin(), pool.end());
  std::optional<Net> witness;
  std::erase_if(pool, [&](double v) { return v >= hi; });

  SplitMix64 rng(seed);
  while (!pool.empty())
  {
    const double pivot = detail::SelectKth(pool, pool.size() / 2, rng);
    ValidityCheck check = CheckValid(instance, 4.0 * pivot, trace);
    if (check.valid)
    {
      hi = pivot;
      witness = std::move(check.net);
      std::erase_if(pool, [&](double v) { return v >= pivot; });
    }
    else
    {
      lo = pivot;
      std::erase_if(pool, [&](double v) { return v <= pivot; });
    }
  }
  if (!witness)
  {
    ValidityCheck check = CheckValid(instance, 4.0 * hi, trace);
    if (!check.valid)
    {
      throw std::logic_error("net at four times the largest distance is invalid");
    }
    witness = std::move(check.net);
  }
  if (trace != nullptr)
  {
    trace->bracket = SearchInterval{lo, hi};
  }
  return SolutionFromNet(instance, *witness);
}

/// Number of steps M of the geometric grid x (1 + eps/8)^i: the largest M
/// with x (1 + eps/8)^M <= 16 y.
inline std::size_t GridTop(double x, double y, double eps)
{
  const double growth = 1.0 + eps / 8.0;
  const double limit = 16.0 * y;
  auto m = static_cast<std::ptrdiff_t>(
      std::floor(std::log(limit / x) / std::log(growth)));
  m = std::max<std::ptrdiff_t>(m, 0);
  while (x * std::pow(growth, static_cast<double>(m + 1)) <= limit)
  {
    ++m;
  }
  while (m > 0 && x * std::pow(growth, static_cast<double>(m)) > limit)
  {
    --m;
  }
  return static_cast<std::size_t>(m);
}

inline double ClampEpsilon(double eps)
{
  if (!(eps > 0.0))
  {
    throw std::invalid_argument("epsilon must be positive");
  }
  return std::min(eps, kMaxEpsilon);
}

/// (4 + eps)-approximation given a bracket (x, y] around the optimum, using
/// O(log M) validity checks on the grid r_i = x (1 + eps/8)^i, i <= M.
inline Solution RefineInterval(const Instance& instance, SearchInterval interval,
                               double eps, SearchTrace* trace = nullptr)
{
  eps = ClampEpsilon(eps);
  const double x = interval.lo;
  const double y = interval.hi;
  if (!(x > 0.0) || !(y >= x) || !std::isfinite(y))
  {
    throw std::invalid_argument("refinement interval must satisfy 0 < lo <= hi");
  }
  const double growth = 1.0 + eps / 8.0;
  const std::size_t top = GridTop(x, y, eps);
  if (trace != nullptr)
  {
    trace->grid_top = top;
  }
  auto radius = [&](std::size_t i) { return x * std::pow(growth, static_cast<double>(i)); };

  ValidityCheck first = CheckValid(instance, radius(0), trace);
  if (first.valid)
  {
    return SolutionFromNet(instance, first.net);
  }
  // Index 0 failed, so only 1..top remain; index top is valid whenever the
  // optimum is at most y.
  std::optional<Net> witness;
  std::size_t witness_index = 0;
  const std::ptrdiff_t hi = detail::AnchoredSearch(
      top, [&](std::size_t k)
      {
        ValidityCheck check = CheckValid(instance, radius(k + 1), trace);
        if (check.valid)
        {
          witness = std::move(check.net);
          witness_index = k + 1;
        }
        return check.valid;
      }).second;
  const auto chosen = static_cast<std::size_t>(hi) + 1;
  if (!witness || witness_index != chosen)
  {
    ValidityCheck check = CheckValid(instance, radius(chosen), trace);
    if (!check.valid)
    {
      throw std::invalid_argument(
          "refinement interval does not contain the optimal price");
    }
    witness = std::move(check.net);
  }
  return SolutionFromNet(instance, *witness);
}

/// Finds (lo, 4 hi] around the optimum by searching the sorted candidates
/// with the check "net at 4v is valid". Requires the price-0 case excluded.
inline SearchInterval BracketSearch(const Instance& instance,
                                    const CandidateSet& candidates,
                                    SearchTrace* trace = nullptr)
{
  if (candidates.empty())
  {
    throw std::logic_error("empty candidate set for a multi-point instance");
  }
  const auto& values = candidates.values;
  // The largest candidate passes: 4 * 3l_max/2 >= 4 * diameter >= 4 r_opt.
  const auto [lo, hi] = detail::AnchoredSearch(
      values.size(), [&](std::size_t k)
      { return CheckValid(instance, 4.0 * values[k], trace).valid; });
  SearchInterval interval;
  if (lo < 0)
  {
    // No failing evidence: fall back on r_opt >= min distance >= s/2.
    interval = {values.front() / 4.0, 4.0 * values.front()};
  }
  else
  {
    interval = {values[static_cast<std::size_t>(lo)],
                4.0 * values[static_cast<std::size_t>(hi)]};
  }
  if (trace != nullptr)
  {
    trace->bracket = interval;
  }
  return interval;
}

/// (4 + eps)-approximation in O(n log n + n log(1/eps)) expected time:
/// WSPD candidate radii, a bracketing search, then geometric refinement.
inline Solution SolveWspd(const Instance& instance, double eps,
                          SearchTrace* trace = nullptr)
{
  eps = ClampEpsilon(eps);
  ValidateInstance(instance);
  if (auto zero = ZeroPriceCheck(instance))
  {
    return *zero;
  }
  const QuadTree tree = BuildTree(instance.points);
  const PairDecomposition pairs =
      ComputePairs(instance.points, tree, kPipelineSigma);
  const CandidateSet candidates = CandidateDistances(pairs);
  const SearchInterval bracket = BracketSearch(instance, candidates, trace);
  return RefineInterval(instance, bracket, eps, trace);
}

}  // namespace lbc
