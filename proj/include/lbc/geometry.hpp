#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lbc
{
/// Thrown when no assignment can satisfy the lower bound (lambda > n).
class InfeasibleError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Thrown for malformed input data. `line()` is 0 when not tied to a line.
class ParseError : public std::runtime_error
{
public:
  ParseError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(line == 0 ? what
                                     : "line " + std::to_string(line) + ": "
                                           + what),
        line_(line)
  {
  }

  std::size_t line() const { return line_; }

private:
  std::size_t line_ = 0;
};

using Point = std::vector<double>;
using PointView = std::span<const double>;

/// Dense storage for n points of a common dimension d. Coordinates are kept
/// row-major in one buffer; `operator[]` hands out views.
class PointSet
{
public:
  PointSet() = default;

  explicit PointSet(std::size_t dim) : dim_(dim)
  {
    if (dim_ == 0)
    {
      throw std::invalid_argument("point dimension must be >= 1");
    }
  }

  PointSet(std::size_t dim, std::vector<double> coords)
      : dim_(dim), coords_(std::move(coords))
  {
    if (dim_ == 0)
    {
      throw std::invalid_argument("point dimension must be >= 1");
    }
    if (coords_.size() % dim_ != 0)
    {
      throw std::invalid_argument("coordinate count not a multiple of dim");
    }
  }

  static PointSet FromPoints(const std::vector<Point>& points)
  {
    if (points.empty())
    {
      return PointSet();
    }
    PointSet set(points.front().size());
    for (const auto& p : points)
    {
      set.push_back(p);
    }
    return set;
  }

  void push_back(PointView p)
  {
    if (dim_ == 0)
    {
      if (p.empty())
      {
        throw std::invalid_argument("point dimension must be >= 1");
      }
      dim_ = p.size();
    }
    if (p.size() != dim_)
    {
      throw std::invalid_argument("dimension mismatch: expected "
                                  + std::to_string(dim_) + ", got "
                                  + std::to_string(p.size()));
    }
    coords_.insert(coords_.end(), p.begin(), p.end());
  }

  void push_back(std::initializer_list<double> p)
  {
    push_back(PointView(p.begin(), p.size()));
  }

  std::size_t size() const { return dim_ == 0 ? 0 : coords_.size() / dim_; }
  bool empty() const { return coords_.empty(); }
  std::size_t dim() const { return dim_; }

  PointView operator[](std::size_t i) const
  {
    return PointView(coords_.data() + i * dim_, dim_);
  }

  const std::vector<double>& coords() const { return coords_; }

  bool operator==(const PointSet&) const = default;

private:
  std::size_t dim_ = 0;
  std::vector<double> coords_;
};

struct Instance
{
  PointSet points;
  std::size_t lambda = 1;

  std::size_t size() const { return points.size(); }
  std::size_t dim() const { return points.dim(); }
};

/// A clustering: sorted center indices, the center serving each point, and
/// the realized price (maximum assigned distance).
struct Solution
{
  std::vector<std::size_t> centers;
  std::vector<std::size_t> assignment;
  double price = 0.0;
};

inline void CheckSameDimension(PointView p, PointView q)
{
  if (p.size() != q.size())
  {
    throw std::invalid_argument("dimension mismatch: "
                                + std::to_string(p.size()) + " vs "
                                + std::to_string(q.size()));
  }
}

inline double SquaredDistance(PointView p, PointView q)
{
  CheckSameDimension(p, q);
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
  {
    const double diff = p[i] - q[i];
    sum += diff * diff;
  }
  return sum;
}

inline double Distance(PointView p, PointView q)
{
  return std::sqrt(SquaredDistance(p, q));
}

/// Throws ParseError for non-finite coordinates or ragged dimensions and
/// InfeasibleError when lambda exceeds the point count.
inline void ValidateInstance(const Instance& instance)
{
  const PointSet& points = instance.points;
  if (points.empty())
  {
    throw ParseError("instance has no points");
  }
  if (points.dim() == 0)
  {
    throw ParseError("point dimension must be >= 1");
  }
  for (std::size_t i = 0; i < points.size(); ++i)
  {
    for (const double c : points[i])
    {
      if (!std::isfinite(c))
      {
        throw ParseError("point " + std::to_string(i)
                         + " has a non-finite coordinate");
      }
    }
  }
  if (instance.lambda == 0)
  {
    throw std::invalid_argument("lower bound must be >= 1");
  }
  if (instance.lambda > points.size())
  {
    throw InfeasibleError("infeasible: lower bound exceeds point count ("
                          + std::to_string(instance.lambda) + " > "
                          + std::to_string(points.size()) + ")");
  }
}

/// Maximum distance from a point to its assigned center. Every assigned index
/// must be listed in `centers`.
inline double PriceOf(const Instance& instance,
                      std::span<const std::size_t> centers,
                      std::span<const std::size_t> assignment)
{
  const PointSet& points = instance.points;
  if (assignment.size() != points.size())
  {
    throw std::invalid_argument("assignment size does not match point count");
  }
  std::vector<bool> is_center(points.size(), false);
  for (const std::size_t c : centers)
  {
    if (c >= points.size())
    {
      throw std::invalid_argument("center index out of range");
    }
    is_center[c] = true;
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i)
  {
    const std::size_t c = assignment[i];
    if (c >= points.size() || !is_center[c])
    {
      throw std::invalid_argument("point " + std::to_string(i)
                                  + " assigned to non-center "
                                  + std::to_string(c));
    }
    worst = std::max(worst, SquaredDistance(points[i], points[c]));
  }
  return std::sqrt(worst);
}

/// Checks every Solution invariant: assignments hit centers, loads reach
/// lambda, and the stored price matches the recomputed one exactly.
inline bool IsFeasibleSolution(const Instance& instance,
                               const Solution& solution,
                               std::string* why = nullptr)
{
  auto fail = [&](std::string reason)
  {
    if (why != nullptr)
    {
      *why = std::move(reason);
    }
    return false;
  };
  const std::size_t n = instance.size();
  if (solution.assignment.size() != n)
  {
    return fail("assignment size mismatch");
  }
  if (!std::is_sorted(solution.centers.begin(), solution.centers.end())
      || std::adjacent_find(solution.centers.begin(), solution.centers.end())
             != solution.centers.end())
  {
    return fail("centers not strictly ascending");
  }
  std::vector<std::size_t> load(n, 0);
  for (std::size_t i = 0; i < n; ++i)
  {
    const std::size_t c = solution.assignment[i];
    if (c >= n
        || !std::binary_search(solution.centers.begin(),
                               solution.centers.end(), c))
    {
      return fail("point " + std::to_string(i) + " assigned to non-center");
    }
    ++load[c];
  }
  for (const std::size_t c : solution.centers)
  {
    if (load[c] < instance.lambda)
    {
      return fail("center " + std::to_string(c) + " serves "
                  + std::to_string(load[c]) + " < lambda");
    }
  }
  const double price =
      PriceOf(instance, solution.centers, solution.assignment);
  if (price != solution.price)
  {
    return fail("stored price differs from recomputed price");
  }
  return true;
}

}  // namespace lbc
