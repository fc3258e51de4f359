#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "lbc/geometry.hpp"

namespace lbc
{
/// Compressed quadtree node. The quadtree cell is an axis-aligned cube given
/// by its center and half side; leaves collapse to the (possibly repeated)
/// point they hold and have half side 0.
struct TreeNode
{
  std::vector<double> center;
  double half = 0.0;
  std::size_t begin = 0;  // range into QuadTree::order
  std::size_t end = 0;
  std::vector<std::size_t> children;
  // Tight axis-aligned bounds of the contained points.
  std::vector<double> lower;
  std::vector<double> upper;
  // Contained point nearest the middle of the tight bounds (smallest index
  // on ties), and the largest distance from it to any contained point.
  std::size_t representative = 0;
  double radius = 0.0;

  bool is_leaf() const { return children.empty(); }
  std::size_t size() const { return end - begin; }
};

class QuadTree
{
public:
  std::size_t dim = 0;
  std::vector<TreeNode> nodes;  // nodes[0] is the root when non-empty
  std::vector<std::size_t> order;

  const TreeNode& root() const { return nodes.front(); }

  std::span<const std::size_t> points_of(const TreeNode& node) const
  {
    return {order.data() + node.begin, node.size()};
  }

  /// Diagonal of the tight bounds; an upper bound on the point diameter.
  double diameter(const TreeNode& node) const
  {
    double sum = 0.0;
    for (std::size_t a = 0; a < dim; ++a)
    {
      const double extent = node.upper[a] - node.lower[a];
      sum += extent * extent;
    }
    return std::sqrt(sum);
  }
};

namespace detail
{
inline bool AllCoincide(const PointSet& points, std::span<const std::size_t> ids)
{
  const PointView first = points[ids.front()];
  for (const std::size_t i : ids.subspan(1))
  {
    const PointView p = points[i];
    if (!std::equal(first.begin(), first.end(), p.begin()))
    {
      return false;
    }
  }
  return true;
}
}  // namespace detail

/// Builds a compressed quadtree over the bounding cube of `points`. Runs of
/// single-child cells are skipped, so every internal node splits its points
/// into at least two children. Identical points share one leaf.
/// O(n * depth) time.
inline QuadTree BuildTree(const PointSet& points)
{
  const std::size_t n = points.size();
  const std::size_t d = points.dim();
  if (n == 0)
  {
    throw std::invalid_argument("cannot build a tree over no points");
  }
  if (d > 62)
  {
    throw std::invalid_argument("quadtree supports d <= 62");
  }
  QuadTree tree;
  tree.dim = d;
  tree.order.resize(n);
  std::iota(tree.order.begin(), tree.order.end(), std::size_t{0});

  std::vector<double> lo(points[0].begin(), points[0].end());
  std::vector<double> hi = lo;
  for (std::size_t i = 1; i < n; ++i)
  {
    for (std::size_t a = 0; a < d; ++a)
    {
      lo[a] = std::min(lo[a], points[i][a]);
      hi[a] = std::max(hi[a], points[i][a]);
    }
  }
  TreeNode root;
  root.center.resize(d);
  for (std::size_t a = 0; a < d; ++a)
  {
    root.center[a] = lo[a] + (hi[a] - lo[a]) / 2.0;
    root.half = std::max(root.half, (hi[a] - lo[a]) / 2.0);
  }
  root.begin = 0;
  root.end = n;
  tree.nodes.push_back(std::move(root));

  std::vector<std::uint64_t> codes(n);
  std::vector<std::size_t> pending{0};
  while (!pending.empty())
  {
    const std::size_t id = pending.back();
    pending.pop_back();
    const std::size_t begin = tree.nodes[id].begin;
    const std::size_t end = tree.nodes[id].end;
    const std::span<std::size_t> ids(tree.order.data() + begin, end - begin);

    if (ids.size() == 1 || detail::AllCoincide(points, ids))
    {
      const PointView p = points[ids.front()];
      tree.nodes[id].center.assign(p.begin(), p.end());
      tree.nodes[id].half = 0.0;
      continue;
    }

    std::vector<double> center = tree.nodes[id].center;
    double half = tree.nodes[id].half;
    // Shrink through single-child cells until the points split.
    while (true)
    {
      for (std::size_t k = 0; k < ids.size(); ++k)
      {
        const PointView p = points[ids[k]];
        std::uint64_t code = 0;
        for (std::size_t a = 0; a < d; ++a)
        {
          code = (code << 1) | (p[a] >= center[a] ? 1U : 0U);
        }
        codes[begin + k] = code;
      }
      const bool split = std::any_of(
          codes.begin() + static_cast<std::ptrdiff_t>(begin),
          codes.begin() + static_cast<std::ptrdiff_t>(end),
          [&](std::uint64_t c) { return c != codes[begin]; });
      if (split)
      {
        break;
      }
      const double next_half = half / 2.0;
      bool moved = false;
      for (std::size_t a = 0; a < d; ++a)
      {
        const bool upper = (codes[begin] >> (d - 1 - a)) & 1U;
        const double next = upper ? center[a] + next_half : center[a] - next_half;
        moved = moved || next != center[a];
        center[a] = next;
      }
      if (!(next_half > 0.0) || !moved)
      {
        throw std::logic_error("quadtree cannot separate distinct points");
      }
      half = next_half;
    }
    tree.nodes[id].center = center;
    tree.nodes[id].half = half;

    // Group the range by child code, keeping input order inside each group.
    std::vector<std::pair<std::uint64_t, std::size_t>> keyed(ids.size());
    for (std::size_t k = 0; k < ids.size(); ++k)
    {
      keyed[k] = {codes[begin + k], ids[k]};
    }
    std::stable_sort(keyed.begin(), keyed.end(),
                     [](const auto& x, const auto& y) { return x.first < y.first; });
    for (std::size_t k = 0; k < ids.size(); ++k)
    {
      ids[k] = keyed[k].second;
    }
    std::size_t run = 0;
    while (run < keyed.size())
    {
      std::size_t stop = run;
      while (stop < keyed.size() && keyed[stop].first == keyed[run].first)
      {
        ++stop;
      }
      TreeNode child;
      child.center.resize(d);
      child.half = half / 2.0;
      for (std::size_t a = 0; a < d; ++a)
      {
        const bool upper = (keyed[run].first >> (d - 1 - a)) & 1U;
        child.center[a] = upper ? center[a] + child.half : center[a] - child.half;
      }
      child.begin = begin + run;
      child.end = begin + stop;
      const std::size_t child_id = tree.nodes.size();
      tree.nodes.push_back(std::move(child));
      tree.nodes[id].children.push_back(child_id);
      pending.push_back(child_id);
      run = stop;
    }
  }
  // Children always follow their parent, so a reverse sweep sees them first.
  for (std::size_t id = tree.nodes.size(); id-- > 0;)
  {
    TreeNode& node = tree.nodes[id];
    if (node.is_leaf())
    {
      node.lower = node.center;
      node.upper = node.center;
      continue;
    }
    node.lower = tree.nodes[node.children.front()].lower;
    node.upper = tree.nodes[node.children.front()].upper;
    for (const std::size_t c : node.children)
    {
      for (std::size_t a = 0; a < d; ++a)
      {
        node.lower[a] = std::min(node.lower[a], tree.nodes[c].lower[a]);
        node.upper[a] = std::max(node.upper[a], tree.nodes[c].upper[a]);
      }
    }
  }
  std::vector<double> middle(d);
  for (TreeNode& node : tree.nodes)
  {
    for (std::size_t a = 0; a < d; ++a)
    {
      middle[a] = node.lower[a] + (node.upper[a] - node.lower[a]) / 2.0;
    }
    const auto ids = tree.points_of(node);
    node.representative = ids.front();
    double best = SquaredDistance(points[ids.front()], middle);
    for (const std::size_t i : ids)
    {
      const double d2 = SquaredDistance(points[i], middle);
      if (d2 < best || (d2 == best && i < node.representative))
      {
        best = d2;
        node.representative = i;
      }
    }
    double far = 0.0;
    for (const std::size_t i : ids)
    {
      far = std::max(far, SquaredDistance(points[i], points[node.representative]));
    }
    node.radius = std::sqrt(far);
  }
  return tree;
}

/// One well-separated pair of tree nodes.
struct NodePair
{
  std::size_t first = 0;
  std::size_t second = 0;
  double rep_distance = 0.0;  // distance between the node representatives
};

struct PairDecomposition
{
  double sigma = 4.0;
  std::vector<NodePair> pairs;
};

/// Well-separated pair decomposition over `tree`. A node pair is accepted
/// once both node radii are at most l / sigma, with l the distance between
/// the representatives; otherwise the node with the larger radius is split.
/// Every pair of points with distinct coordinates ends up in exactly one
/// accepted pair, and its distance lies within l (1 +- 2/sigma).
inline PairDecomposition ComputePairs(const PointSet& points,
                                      const QuadTree& tree, double sigma)
{
  if (!(sigma > 2.0) || !std::isfinite(sigma))
  {
    throw std::invalid_argument("separation sigma must be > 2");
  }
  PairDecomposition result;
  result.sigma = sigma;
  std::vector<std::pair<std::size_t, std::size_t>> work;
  for (const TreeNode& node : tree.nodes)
  {
    for (std::size_t i = 0; i < node.children.size(); ++i)
    {
      for (std::size_t j = i + 1; j < node.children.size(); ++j)
      {
        work.emplace_back(node.children[i], node.children[j]);
      }
    }
  }
  while (!work.empty())
  {
    const auto [u, v] = work.back();
    work.pop_back();
    const TreeNode& a = tree.nodes[u];
    const TreeNode& b = tree.nodes[v];
    const double ell =
        Distance(points[a.representative], points[b.representative]);
    if (std::max(a.radius, b.radius) <= ell / sigma)
    {
      result.pairs.push_back({u, v, ell});
      continue;
    }
    if (a.radius >= b.radius)
    {
      for (const std::size_t c : a.children)
      {
        work.emplace_back(c, v);
      }
    }
    else
    {
      for (const std::size_t c : b.children)
      {
        work.emplace_back(u, c);
      }
    }
  }
  return result;
}

/// Sorted, deduplicated candidate radii. `pair[k]` and `scale[k]` record the
/// pair and factor that produced `values[k]` (first producer on ties).
struct CandidateSet
{
  std::vector<double> values;
  std::vector<std::uint32_t> pair;
  std::vector<double> scale;

  std::size_t size() const { return values.size(); }
  bool empty() const { return values.empty(); }
};

/// For each pair with representative distance l > 0 emits
/// l(1 - 2/sigma), l, l(1 + 2/sigma): every point distance the pair covers
/// lies in [l(1 - 2/sigma), l(1 + 2/sigma)]. With sigma = 4 these are
/// l/2, l and 3l/2.
inline CandidateSet CandidateDistances(const PairDecomposition& decomposition)
{
  if (decomposition.pairs.size() >= (std::size_t{1} << 32))
  {
    throw std::length_error("too many pairs for candidate provenance");
  }
  const double spread = 2.0 / decomposition.sigma;
  const double factors[3] = {1.0 - spread, 1.0, 1.0 + spread};

  // Each scaled copy of the l-sorted pairs is itself sorted, so a three-way
  // merge ordered by (value, pair, factor) replaces one large sort.
  std::vector<std::pair<double, std::uint32_t>> by_length;
  by_length.reserve(decomposition.pairs.size());
  for (std::size_t k = 0; k < decomposition.pairs.size(); ++k)
  {
    const double ell = decomposition.pairs[k].rep_distance;
    if (ell > 0.0)
    {
      by_length.emplace_back(ell, static_cast<std::uint32_t>(k));
    }
  }
  std::sort(by_length.begin(), by_length.end());

  CandidateSet set;
  set.values.reserve(3 * by_length.size());
  set.pair.reserve(3 * by_length.size());
  set.scale.reserve(3 * by_length.size());
  std::size_t cursor[3] = {0, 0, 0};
  while (true)
  {
    int pick = -1;
    double value = 0.0;
    for (int f = 0; f < 3; ++f)
    {
      if (cursor[f] == by_length.size())
      {
        continue;
      }
      const auto& [ell, pair] = by_length[cursor[f]];
      const double v = ell * factors[f];
      if (pick < 0 || v < value
          || (v == value && pair < by_length[cursor[pick]].second))
      {
        pick = f;
        value = v;
      }
    }
    if (pick < 0)
    {
      break;
    }
    const std::uint32_t pair = by_length[cursor[pick]].second;
    ++cursor[pick];
    if (!set.values.empty() && set.values.back() == value)
    {
      continue;
    }
    set.values.push_back(value);
    set.pair.push_back(pair);
    set.scale.push_back(factors[pick]);
  }
  return set;
}

}  // namespace lbc
