#pragma once

// Brute-force ground truth for small instances. Nothing here is used by the
// solvers; tests compare the solvers against these routines.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "lbc/geometry.hpp"
#include "lbc/grid_net.hpp"

namespace lbc
{
/// Default largest instance the exhaustive optimum accepts.
inline constexpr std::size_t kDefaultOracleCap = 14;

class OracleCapError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Textbook O(n^2) greedy net: scan in input order, an unmarked point becomes
/// a center and marks everything within r. Nearest-center assignment by full
/// scan, ties toward the smaller center index.
inline Net NaiveNet(const PointSet& points, double radius)
{
  if (!(radius > 0.0) || !std::isfinite(radius))
  {
    throw std::invalid_argument("net radius must be positive and finite");
  }
  const std::size_t n = points.size();
  const double r2 = radius * radius;
  Net net;
  net.radius = radius;
  std::vector<bool> marked(n, false);
  for (std::size_t i = 0; i < n; ++i)
  {
    if (marked[i])
    {
      continue;
    }
    net.centers.push_back(i);
    for (std::size_t j = 0; j < n; ++j)
    {
      if (!marked[j] && SquaredDistance(points[i], points[j]) <= r2)
      {
        marked[j] = true;
      }
    }
  }
  net.assignment.resize(n);
  net.counts.assign(net.centers.size(), 0);
  for (std::size_t j = 0; j < n; ++j)
  {
    std::size_t best = 0;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < net.centers.size(); ++k)
    {
      const double d2 = SquaredDistance(points[j], points[net.centers[k]]);
      if (d2 < best_d2)  // centers ascend, so strict < keeps the smaller index
      {
        best = k;
        best_d2 = d2;
      }
    }
    net.assignment[j] = net.centers[best];
    ++net.counts[best];
  }
  return net;
}

/// Flow network with lower and upper arc bounds. Feasibility is reduced to a
/// plain max-flow: each arc keeps capacity (upper - lower), the lower bound
/// becomes demand at its head and supply at its tail, and a super source and
/// sink must saturate every demand.
class FlowNetwork
{
public:
  explicit FlowNetwork(std::size_t nodes) : nodes_(nodes) {}

  std::size_t AddArc(std::size_t from, std::size_t to, std::int64_t lower,
                     std::int64_t upper)
  {
    if (from >= nodes_ || to >= nodes_)
    {
      throw std::out_of_range("flow arc endpoint out of range");
    }
    if (lower < 0 || upper < lower)
    {
      throw std::invalid_argument("flow arc bounds must satisfy 0 <= lower <= upper");
    }
    arcs_.push_back({from, to, lower, upper});
    return arcs_.size() - 1;
  }

  std::size_t node_count() const { return nodes_; }

  /// Searches for an s-t flow meeting every bound. On success, Flow(arc)
  /// reports the flow found.
  bool SolveFeasible(std::size_t source, std::size_t sink)
  {
    const std::size_t super_source = nodes_;
    const std::size_t super_sink = nodes_ + 1;
    Dinic dinic(nodes_ + 2);
    std::vector<std::int64_t> balance(nodes_, 0);
    edge_of_.assign(arcs_.size(), 0);
    for (std::size_t a = 0; a < arcs_.size(); ++a)
    {
      const Arc& arc = arcs_[a];
      edge_of_[a] = dinic.AddEdge(arc.from, arc.to, arc.upper - arc.lower);
      balance[arc.to] += arc.lower;
      balance[arc.from] -= arc.lower;
    }
    // Close the circulation so the s-t flow value is free.
    dinic.AddEdge(sink, source, std::numeric_limits<std::int64_t>::max() / 4);
    std::int64_t demand = 0;
    for (std::size_t v = 0; v < nodes_; ++v)
    {
      if (balance[v] > 0)
      {
        dinic.AddEdge(super_source, v, balance[v]);
        demand += balance[v];
      }
      else if (balance[v] < 0)
      {
        dinic.AddEdge(v, super_sink, -balance[v]);
      }
    }
    const std::int64_t pushed = dinic.MaxFlow(super_source, super_sink);
    flow_.assign(arcs_.size(), 0);
    for (std::size_t a = 0; a < arcs_.size(); ++a)
    {
      flow_[a] = arcs_[a].lower + dinic.FlowOn(edge_of_[a]);
    }
    return pushed == demand;
  }

  std::int64_t Flow(std::size_t arc) const { return flow_.at(arc); }

private:
  struct Arc
  {
    std::size_t from;
    std::size_t to;
    std::int64_t lower;
    std::int64_t upper;
  };

  class Dinic
  {
  public:
    explicit Dinic(std::size_t n) : adjacency_(n), level_(n), next_(n) {}

    std::size_t AddEdge(std::size_t u, std::size_t v, std::int64_t cap)
    {
      const std::size_t id = edges_.size();
      edges_.push_back({v, cap, cap});
      adjacency_[u].push_back(id);
      edges_.push_back({u, 0, 0});
      adjacency_[v].push_back(id + 1);
      return id;
    }

    std::int64_t FlowOn(std::size_t id) const
    {
      return edges_[id].initial - edges_[id].residual;
    }

    std::int64_t MaxFlow(std::size_t s, std::size_t t)
    {
      std::int64_t total = 0;
      while (Layer(s, t))
      {
        std::fill(next_.begin(), next_.end(), 0);
        while (const std::int64_t f =
                   Push(s, t, std::numeric_limits<std::int64_t>::max()))
        {
          total += f;
        }
      }
      return total;
    }

  private:
    struct Edge
    {
      std::size_t to;
      std::int64_t residual;
      std::int64_t initial;
    };

    bool Layer(std::size_t s, std::size_t t)
    {
      std::fill(level_.begin(), level_.end(), -1);
      std::queue<std::size_t> frontier;
      level_[s] = 0;
      frontier.push(s);
      while (!frontier.empty())
      {
        const std::size_t u = frontier.front();
        frontier.pop();
        for (const std::size_t id : adjacency_[u])
        {
          const Edge& e = edges_[id];
          if (e.residual > 0 && level_[e.to] < 0)
          {
            level_[e.to] = level_[u] + 1;
            frontier.push(e.to);
          }
        }
      }
      return level_[t] >= 0;
    }

    std::int64_t Push(std::size_t u, std::size_t t, std::int64_t limit)
    {
      if (u == t)
      {
        return limit;
      }
      for (; next_[u] < adjacency_[u].size(); ++next_[u])
      {
        const std::size_t id = adjacency_[u][next_[u]];
        Edge& e = edges_[id];
        if (e.residual <= 0 || level_[e.to] != level_[u] + 1)
        {
          continue;
        }
        const std::int64_t f = Push(e.to, t, std::min(limit, e.residual));
        if (f > 0)
        {
          e.residual -= f;
          edges_[id ^ 1].residual += f;
          return f;
        }
      }
      return 0;
    }

    std::vector<Edge> edges_;
    std::vector<std::vector<std::size_t>> adjacency_;
    std::vector<int> level_;
    std::vector<std::size_t> next_;
  };

  std::size_t nodes_;
  std::vector<Arc> arcs_;
  std::vector<std::size_t> edge_of_;
  std::vector<std::int64_t> flow_;
};

namespace detail
{
/// Feasible assignment of all points to `centers` with squared reach
/// `radius_sq` and loads >= lambda, or nullopt.
inline std::optional<std::vector<std::size_t>> AssignBySquaredRadius(
    const Instance& instance, std::span<const std::size_t> centers,
    double radius_sq)
{
  const std::size_t n = instance.size();
  const std::size_t k = centers.size();
  if (k == 0)
  {
    return std::nullopt;
  }
  // source, points 1..n, centers n+1..n+k, sink
  const std::size_t source = 0;
  const std::size_t sink = n + k + 1;
  FlowNetwork network(n + k + 2);
  const auto lambda = static_cast<std::int64_t>(instance.lambda);
  const auto total = static_cast<std::int64_t>(n);
  struct Link
  {
    std::size_t point;
    std::size_t center;
    std::size_t arc;
  };
  std::vector<Link> links;
  for (std::size_t i = 0; i < n; ++i)
  {
    network.AddArc(source, 1 + i, 1, 1);
    for (std::size_t c = 0; c < k; ++c)
    {
      if (SquaredDistance(instance.points[i], instance.points[centers[c]])
          <= radius_sq)
      {
        links.push_back({i, centers[c], network.AddArc(1 + i, 1 + n + c, 0, 1)});
      }
    }
  }
  for (std::size_t c = 0; c < k; ++c)
  {
    network.AddArc(1 + n + c, sink, lambda, total);
  }
  if (!network.SolveFeasible(source, sink))
  {
    return std::nullopt;
  }
  std::vector<std::size_t> assignment(n, n);
  for (const Link& link : links)
  {
    if (network.Flow(link.arc) == 1)
    {
      assignment[link.point] = link.center;
    }
  }
  return assignment;
}
}  // namespace detail

/// True iff every point can be assigned to a center of `centers` within
/// distance r so that every center receives at least lambda points.
inline bool AssignmentFeasible(const Instance& instance,
                               std::span<const std::size_t> centers, double radius)
{
  if (!(radius >= 0.0))
  {
    throw std::invalid_argument("radius must be nonnegative");
  }
  return detail::AssignBySquaredRadius(instance, centers, radius * radius)
      .has_value();
}

/// Exact optimum by exhaustive search: the smallest candidate radius (0 or a
/// pairwise distance) admitting some center subset with a feasible
/// assignment. Subsets are tried by size, then lexicographically.
inline Solution BruteForceOpt(const Instance& instance,
                              std::size_t cap = kDefaultOracleCap)
{
  ValidateInstance(instance);
  const std::size_t n = instance.size();
  if (n > cap)
  {
    throw OracleCapError("oracle size cap exceeded: n = " + std::to_string(n)
                         + " > " + std::to_string(cap));
  }
  if (n > 62)
  {
    throw OracleCapError("oracle supports at most 62 points");
  }
  const PointSet& points = instance.points;
  std::vector<double> radii_sq{0.0};
  for (std::size_t i = 0; i < n; ++i)
  {
    for (std::size_t j = i + 1; j < n; ++j)
    {
      radii_sq.push_back(SquaredDistance(points[i], points[j]));
    }
  }
  std::sort(radii_sq.begin(), radii_sq.end());
  radii_sq.erase(std::unique(radii_sq.begin(), radii_sq.end()), radii_sq.end());

  const std::size_t max_centers = n / instance.lambda;
  const std::uint64_t everyone = (1ULL << n) - 1;

  // First subset (size-then-lex order) with a feasible assignment at
  // radius_sq, if any.
  auto search = [&](double radius_sq) -> std::optional<Solution>
  {
    std::vector<std::uint64_t> ball(n, 0);
    std::vector<std::size_t> ball_size(n, 0);
    for (std::size_t c = 0; c < n; ++c)
    {
      for (std::size_t i = 0; i < n; ++i)
      {
        if (SquaredDistance(points[c], points[i]) <= radius_sq)
        {
          ball[c] |= 1ULL << i;
          ++ball_size[c];
        }
      }
    }
    std::vector<std::size_t> subset;
    for (std::size_t k = 1; k <= max_centers; ++k)
    {
      subset.resize(k);
      for (std::size_t a = 0; a < k; ++a)
      {
        subset[a] = a;
      }
      while (true)
      {
        std::uint64_t covered = 0;
        bool loads_possible = true;
        for (const std::size_t c : subset)
        {
          covered |= ball[c];
          loads_possible = loads_possible && ball_size[c] >= instance.lambda;
        }
        if (covered == everyone && loads_possible)
        {
          if (auto assignment =
                  detail::AssignBySquaredRadius(instance, subset, radius_sq))
          {
            Solution solution;
            solution.centers = subset;
            solution.assignment = std::move(*assignment);
            solution.price = PriceOf(instance, solution.centers, solution.assignment);
            return solution;
          }
        }
        // Next k-combination of {0..n-1} in lexicographic order.
        std::size_t a = k;
        while (a > 0 && subset[a - 1] == n - k + (a - 1))
        {
          --a;
        }
        if (a == 0)
        {
          break;
        }
        ++subset[a - 1];
        for (std::size_t b = a; b < k; ++b)
        {
          subset[b] = subset[b - 1] + 1;
        }
      }
    }
    return std::nullopt;
  };

  // Feasibility is monotone in the radius, so bisect over the sorted
  // candidates. The largest one always admits a single center.
  std::size_t lo = 0;
  std::size_t hi = radii_sq.size() - 1;
  std::optional<Solution> best = search(radii_sq[hi]);
  if (!best)
  {
    throw std::logic_error("no feasible clustering at the largest distance");
  }
  if (auto at_zero = search(radii_sq[0]))
  {
    return *at_zero;
  }
  while (hi - lo > 1)
  {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (auto found = search(radii_sq[mid]))
    {
      hi = mid;
      best = std::move(found);
    }
    else
    {
      lo = mid;
    }
  }
  return *best;
}

}  // namespace lbc
