#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "lbc/geometry.hpp"

namespace lbc
{
/// Integer cell coordinates, coordinate i = floor(p_i / delta).
using GridKey = std::vector<std::int64_t>;

inline GridKey CellOf(PointView p, double delta)
{
  if (!(delta > 0.0))
  {
    throw std::invalid_argument("grid cell side must be positive");
  }
  GridKey key(p.size());
  for (std::size_t i = 0; i < p.size(); ++i)
  {
    const double scaled = std::floor(p[i] / delta);
    // int64 conversion is only defined inside this range.
    if (!(std::abs(scaled) < 4.0e18))
    {
      throw std::overflow_error("grid cell index out of int64 range");
    }
    key[i] = static_cast<std::int64_t>(scaled);
  }
  return key;
}

/// Per-axis key offset that a point within distance r can have when the cell
/// side is r / (2 sqrt(d)): the smallest k with k >= 2 sqrt(d).
inline std::int64_t NeighborhoodReach(std::size_t dim)
{
  std::int64_t k = 0;
  while (k * k < 4 * static_cast<std::int64_t>(dim))
  {
    ++k;
  }
  return k;
}

/// Side length used for net computation at radius r.
inline double NetCellSide(double radius, std::size_t dim)
{
  return radius / (2.0 * std::sqrt(static_cast<double>(dim)));
}

/// Hashed bucketing of a point set into the non-empty cells of a uniform
/// grid. Cells are numbered in order of first appearance, and each cell's
/// point list preserves input order.
class Grid
{
public:
  static constexpr std::size_t kNoCell = std::numeric_limits<std::size_t>::max();

  Grid(const PointSet& points, double delta) : delta_(delta), dim_(points.dim())
  {
    if (!(delta > 0.0))
    {
      throw std::invalid_argument("grid cell side must be positive");
    }
    const std::size_t n = points.size();
    if (n >= std::numeric_limits<std::uint32_t>::max())
    {
      throw std::length_error("too many points for a grid");
    }
    point_cell_.resize(n);
    keys_.reserve(n * dim_);
    ResizeTable(n);
    std::vector<std::int64_t> key(dim_);
    for (std::size_t i = 0; i < n; ++i)
    {
      const PointView p = points[i];
      for (std::size_t a = 0; a < dim_; ++a)
      {
        const double scaled = std::floor(p[a] / delta_);
        if (!(std::abs(scaled) < 4.0e18))
        {
          throw std::overflow_error("grid cell index out of int64 range");
        }
        key[a] = static_cast<std::int64_t>(scaled);
      }
      point_cell_[i] = static_cast<std::uint32_t>(FindOrInsert(key));
    }
    // Counting sort into CSR form.
    offsets_.assign(cell_count() + 1, 0);
    for (const std::uint32_t c : point_cell_)
    {
      ++offsets_[c + 1];
    }
    for (std::size_t c = 0; c < cell_count(); ++c)
    {
      offsets_[c + 1] += offsets_[c];
    }
    members_.resize(n);
    std::vector<std::uint32_t> cursor(offsets_.begin(), offsets_.end() - 1);
    for (std::size_t i = 0; i < n; ++i)
    {
      members_[cursor[point_cell_[i]]++] = static_cast<std::uint32_t>(i);
    }
    // Coordinates in member order, so scanning a cell reads contiguous memory.
    sorted_coords_.resize(n * dim_);
    for (std::size_t t = 0; t < n; ++t)
    {
      const PointView p = points[members_[t]];
      std::copy(p.begin(), p.end(), sorted_coords_.begin() + t * dim_);
    }
  }

  double delta() const { return delta_; }
  std::size_t dim() const { return dim_; }
  std::size_t cell_count() const { return dim_ == 0 ? 0 : keys_.size() / dim_; }

  std::span<const std::int64_t> key(std::size_t cell) const
  {
    return {keys_.data() + cell * dim_, dim_};
  }

  std::span<const std::uint32_t> points_in(std::size_t cell) const
  {
    return {members_.data() + offsets_[cell], offsets_[cell + 1] - offsets_[cell]};
  }

  /// Coordinates of points_in(cell), concatenated in the same order.
  std::span<const double> coords_in(std::size_t cell) const
  {
    return {sorted_coords_.data() + offsets_[cell] * dim_,
            (offsets_[cell + 1] - offsets_[cell]) * dim_};
  }

  std::size_t cell_of_point(std::size_t i) const { return point_cell_[i]; }

  /// Cell id holding `key`, or kNoCell when that cell is empty.
  std::size_t Find(std::span<const std::int64_t> key) const
  {
    if (key.size() != dim_ || table_.empty())
    {
      return kNoCell;
    }
    const std::size_t mask = table_.size() - 1;
    for (std::size_t slot = Hash(key) & mask;; slot = (slot + 1) & mask)
    {
      const std::uint32_t entry = table_[slot];
      if (entry == 0)
      {
        return kNoCell;
      }
      if (KeyEquals(entry - 1, key))
      {
        return entry - 1;
      }
    }
  }

  /// Appends to `out` the ids of all non-empty cells whose key differs from
  /// `key` by at most `reach` in every coordinate.
  void Neighborhood(std::span<const std::int64_t> key, std::int64_t reach,
                    std::vector<std::size_t>& out) const
  {
    const double side = 2.0 * static_cast<double>(reach) + 1.0;
    const double box = std::pow(side, static_cast<double>(dim_));
    if (box > static_cast<double>(cell_count()))
    {
      // The offset box outnumbers the occupied cells (high d): filter all.
      for (std::size_t c = 0; c < cell_count(); ++c)
      {
        const auto other = this->key(c);
        bool inside = true;
        for (std::size_t a = 0; a < dim_ && inside; ++a)
        {
          const std::int64_t diff = other[a] - key[a];
          inside = diff >= -reach && diff <= reach;
        }
        if (inside)
        {
          out.push_back(c);
        }
      }
      return;
    }
    thread_local std::vector<std::int64_t> probe;
    probe.assign(key.begin(), key.end());
    for (std::size_t a = 0; a < dim_; ++a)
    {
      probe[a] -= reach;
    }
    while (true)
    {
      const std::size_t c = Find(probe);
      if (c != kNoCell)
      {
        out.push_back(c);
      }
      std::size_t a = 0;
      for (; a < dim_; ++a)
      {
        if (probe[a] < key[a] + reach)
        {
          ++probe[a];
          break;
        }
        probe[a] = key[a] - reach;
      }
      if (a == dim_)
      {
        break;
      }
    }
  }

private:
  static std::uint64_t Mix(std::uint64_t z)
  {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  static std::size_t Hash(std::span<const std::int64_t> key)
  {
    std::uint64_t h = 0x9e3779b97f4a7c15ULL;
    for (const std::int64_t v : key)
    {
      h = Mix(h ^ static_cast<std::uint64_t>(v));
    }
    return static_cast<std::size_t>(h);
  }

  bool KeyEquals(std::size_t cell, std::span<const std::int64_t> key) const
  {
    const std::int64_t* stored = keys_.data() + cell * dim_;
    for (std::size_t a = 0; a < dim_; ++a)
    {
      if (stored[a] != key[a])
      {
        return false;
      }
    }
    return true;
  }

  void ResizeTable(std::size_t expected_cells)
  {
    std::size_t capacity = 16;
    while (capacity < 2 * expected_cells)
    {
      capacity *= 2;
    }
    table_.assign(capacity, 0);
  }

  std::size_t FindOrInsert(std::span<const std::int64_t> key)
  {
    const std::size_t mask = table_.size() - 1;
    std::size_t slot = Hash(key) & mask;
    for (;; slot = (slot + 1) & mask)
    {
      const std::uint32_t entry = table_[slot];
      if (entry == 0)
      {
        break;
      }
      if (KeyEquals(entry - 1, key))
      {
        return entry - 1;
      }
    }
    const std::size_t cell = cell_count();
    if (cell + 1 >= std::numeric_limits<std::uint32_t>::max())
    {
      throw std::length_error("too many grid cells");
    }
    keys_.insert(keys_.end(), key.begin(), key.end());
    table_[slot] = static_cast<std::uint32_t>(cell + 1);
    return cell;
  }

  double delta_ = 0.0;
  std::size_t dim_ = 0;
  std::vector<std::int64_t> keys_;
  std::vector<std::uint32_t> table_;  // open addressing, cell id + 1
  std::vector<std::uint32_t> point_cell_;
  std::vector<std::uint32_t> offsets_;
  std::vector<std::uint32_t> members_;
  std::vector<double> sorted_coords_;
};

inline Grid BuildGrid(const PointSet& points, double delta)
{
  return Grid(points, delta);
}

/// Keys of the non-empty cells within reach ceil(2 sqrt(d)) of `key`.
inline std::vector<GridKey> NeighborhoodCells(const GridKey& key,
                                              const Grid& grid)
{
  std::vector<std::size_t> ids;
  grid.Neighborhood(key, NeighborhoodReach(grid.dim()), ids);
  std::vector<GridKey> keys;
  keys.reserve(ids.size());
  for (const std::size_t c : ids)
  {
    const auto k = grid.key(c);
    keys.emplace_back(k.begin(), k.end());
  }
  return keys;
}

/// An r-net: centers at mutual distance > r covering every point within r.
/// `assignment` and `counts` are empty unless the nearest-center assignment
/// was requested; `counts[k]` is the load of `centers[k]`.
struct Net
{
  double radius = 0.0;
  std::vector<std::size_t> centers;
  std::vector<std::size_t> assignment;
  std::vector<std::size_t> counts;
};

namespace detail
{
inline Net BuildNet(const PointSet& points, double radius, bool assign)
{
  if (!(radius > 0.0) || !std::isfinite(radius))
  {
    throw std::invalid_argument("net radius must be positive and finite");
  }
  if (points.empty())
  {
    throw std::invalid_argument("cannot build a net over no points");
  }
  const std::size_t n = points.size();
  const Grid grid(points, NetCellSide(radius, points.dim()));
  const std::int64_t reach = NeighborhoodReach(points.dim());
  const double r2 = radius * radius;

  Net net;
  net.radius = radius;
  std::vector<bool> marked(n, false);
  std::vector<bool> cell_has_center(grid.cell_count(), false);
  std::vector<std::size_t> nearby;
  // Nearest center seen so far per point. Every center within r of a point
  // scans that point's cell, so the nearest one is always offered.
  std::vector<std::size_t> best;
  std::vector<double> best_d2;
  if (assign)
  {
    best.assign(n, Grid::kNoCell);
    best_d2.assign(n, std::numeric_limits<double>::infinity());
  }

  for (std::size_t i = 0; i < n; ++i)
  {
    if (marked[i])
    {
      continue;
    }
    net.centers.push_back(i);
    const std::size_t home = grid.cell_of_point(i);
    if (cell_has_center[home])
    {
      throw std::logic_error("two net centers share a grid cell");
    }
    cell_has_center[home] = true;
    nearby.clear();
    grid.Neighborhood(grid.key(home), reach, nearby);
    const PointView p = points[i];
    const std::size_t dim = points.dim();
    for (const std::size_t c : nearby)
    {
      const auto members = grid.points_in(c);
      const double* q = grid.coords_in(c).data();
      for (std::size_t t = 0; t < members.size(); ++t, q += dim)
      {
        const std::size_t j = members[t];
        const double d2 = SquaredDistance(p, PointView(q, dim));
        if (d2 > r2)
        {
          continue;
        }
        marked[j] = true;
        // Centers arrive in increasing index order, so strict < keeps the
        // smaller index on ties.
        if (assign && d2 < best_d2[j])
        {
          best_d2[j] = d2;
          best[j] = i;
        }
      }
    }
  }

  if (!assign)
  {
    return net;
  }
  std::vector<std::size_t> slot_of(n, Grid::kNoCell);
  for (std::size_t k = 0; k < net.centers.size(); ++k)
  {
    slot_of[net.centers[k]] = k;
  }
  net.assignment = std::move(best);
  net.counts.assign(net.centers.size(), 0);
  for (std::size_t j = 0; j < n; ++j)
  {
    if (net.assignment[j] == Grid::kNoCell)
    {
      throw std::logic_error("point " + std::to_string(j)
                             + " has no center within the net radius");
    }
    ++net.counts[slot_of[net.assignment[j]]];
  }
  return net;
}
}  // namespace detail

/// Greedy r-net in input order, expected O(n) via grid hashing. Only
/// `radius` and `centers` are filled.
inline Net ComputeNet(const PointSet& points, double radius)
{
  return detail::BuildNet(points, radius, false);
}

/// ComputeNet plus the nearest-center assignment (ties toward the smaller
/// center index) and per-center loads.
inline Net NetWithAssignment(const PointSet& points, double radius)
{
  return detail::BuildNet(points, radius, true);
}

}  // namespace lbc
