#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "lbc/geometry.hpp"
#include "lbc/random.hpp"

namespace lbc
{
/// One point per line, fields separated by commas and/or whitespace. Blank
/// lines and lines starting with '#' are skipped.
inline PointSet ParseInstance(std::string_view text)
{
  PointSet points;
  std::size_t line_no = 0;
  std::size_t dim = 0;
  Point row;
  while (!text.empty())
  {
    const std::size_t newline = text.find('\n');
    std::string_view line = text.substr(0, newline);
    text = newline == std::string_view::npos ? std::string_view{}
                                             : text.substr(newline + 1);
    ++line_no;

    auto is_sep = [](char c)
    { return c == ',' || c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; };
    const std::size_t first = line.find_first_not_of(" \t\r\v\f");
    if (first == std::string_view::npos || line[first] == '#')
    {
      continue;
    }
    row.clear();
    std::size_t pos = 0;
    while (pos < line.size())
    {
      while (pos < line.size() && is_sep(line[pos]))
      {
        ++pos;
      }
      if (pos == line.size())
      {
        break;
      }
      std::size_t stop = pos;
      while (stop < line.size() && !is_sep(line[stop]))
      {
        ++stop;
      }
      const std::string_view field = line.substr(pos, stop - pos);
      double value = 0.0;
      const char* begin = field.data();
      const char* end = field.data() + field.size();
      if (*begin == '+')
      {
        ++begin;
      }
      const auto [ptr, ec] = std::from_chars(begin, end, value);
      if (ec != std::errc() || ptr != end)
      {
        throw ParseError("non-numeric field '" + std::string(field) + "'", line_no);
      }
      if (!std::isfinite(value))
      {
        throw ParseError("non-finite coordinate '" + std::string(field) + "'",
                         line_no);
      }
      row.push_back(value);
      pos = stop;
    }
    if (dim == 0)
    {
      dim = row.size();
      points = PointSet(dim);
    }
    else if (row.size() != dim)
    {
      throw ParseError("expected " + std::to_string(dim) + " fields, found "
                           + std::to_string(row.size()),
                       line_no);
    }
    points.push_back(row);
  }
  if (points.empty())
  {
    throw ParseError("no data lines");
  }
  return points;
}

inline PointSet ReadInstanceFile(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
  {
    throw ParseError("cannot open '" + path + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return ParseInstance(buffer.str());
}

/// Shortest decimal that reads back to the same double.
inline std::string FormatReal(double value)
{
  char buf[32];
  const auto result = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, result.ptr);
}

/// Writes points in the input grammar, space separated.
inline std::string FormatInstance(const PointSet& points)
{
  std::string text;
  for (std::size_t i = 0; i < points.size(); ++i)
  {
    const PointView p = points[i];
    for (std::size_t a = 0; a < p.size(); ++a)
    {
      if (a > 0)
      {
        text += ' ';
      }
      text += FormatReal(p[a]);
    }
    text += '\n';
  }
  return text;
}

enum class InstanceKind
{
  kUniform,
  kClusters
};

inline std::optional<InstanceKind> ParseInstanceKind(std::string_view name)
{
  if (name == "uniform")
  {
    return InstanceKind::kUniform;
  }
  if (name == "clusters")
  {
    return InstanceKind::kClusters;
  }
  return std::nullopt;
}

/// Smallest k with k * k >= n.
inline std::size_t CeilSqrt(std::size_t n)
{
  auto k = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
  while (k * k < n)
  {
    ++k;
  }
  while (k > 0 && (k - 1) * (k - 1) >= n)
  {
    --k;
  }
  return k;
}

/// Standard deviation of each blob of the clustered generator.
inline constexpr double kBlobSigma = 0.02;

/// Deterministic instance from a splitmix64 stream. Uniform draws each
/// coordinate in [0, 1). Clusters first draws ceil(sqrt(n)) uniform blob
/// centers, then places point i around blob i mod ceil(sqrt(n)) with
/// Box-Muller normals of deviation kBlobSigma.
inline PointSet GenerateInstance(std::size_t n, std::size_t d,
                                 InstanceKind kind, std::uint64_t seed)
{
  if (n == 0 || d == 0)
  {
    throw std::invalid_argument("generator needs n >= 1 and d >= 1");
  }
  SplitMix64 rng(seed);
  std::vector<double> coords;
  coords.reserve(n * d);
  if (kind == InstanceKind::kUniform)
  {
    for (std::size_t k = 0; k < n * d; ++k)
    {
      coords.push_back(rng.NextUnit());
    }
    return PointSet(d, std::move(coords));
  }
  const std::size_t blobs = CeilSqrt(n);
  std::vector<double> centers(blobs * d);
  for (double& c : centers)
  {
    c = rng.NextUnit();
  }
  std::optional<double> spare;
  auto normal = [&]()
  {
    if (spare)
    {
      const double z = *spare;
      spare.reset();
      return z;
    }
    const double u1 = 1.0 - rng.NextUnit();  // (0, 1], keeps log finite
    const double u2 = rng.NextUnit();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare = radius * std::sin(angle);
    return radius * std::cos(angle);
  };
  for (std::size_t i = 0; i < n; ++i)
  {
    const double* center = centers.data() + (i % blobs) * d;
    for (std::size_t a = 0; a < d; ++a)
    {
      coords.push_back(center[a] + kBlobSigma * normal());
    }
  }
  return PointSet(d, std::move(coords));
}

/// Result document: {"n", "d", "lambda", "algorithm", "epsilon", "price",
/// "centers", "assignment"} in that key order.
inline nlohmann::ordered_json ResultDocument(const Instance& instance,
                                             const Solution& solution,
                                             const std::string& algorithm,
                                             std::optional<double> epsilon)
{
  nlohmann::ordered_json doc;
  doc["n"] = instance.size();
  doc["d"] = instance.dim();
  doc["lambda"] = instance.lambda;
  doc["algorithm"] = algorithm;
  doc["epsilon"] = epsilon ? nlohmann::ordered_json(*epsilon) : nlohmann::ordered_json();
  doc["price"] = solution.price;
  doc["centers"] = solution.centers;
  doc["assignment"] = solution.assignment;
  return doc;
}

/// Reads centers, assignment and price back out of a result document.
inline Solution SolutionFromDocument(const nlohmann::ordered_json& doc)
{
  Solution solution;
  try
  {
    solution.centers = doc.at("centers").get<std::vector<std::size_t>>();
    solution.assignment = doc.at("assignment").get<std::vector<std::size_t>>();
    solution.price = doc.at("price").get<double>();
  }
  catch (const nlohmann::json::exception& e)
  {
    throw ParseError(std::string("malformed result document: ") + e.what());
  }
  return solution;
}

/// Standalone SVG of a planar solution: one disk per point colored by its
/// center, larger disks on centers, and a ring of radius `price` around
/// each center.
inline std::string RenderSvg(const Instance& instance, const Solution& solution)
{
  if (instance.dim() != 2)
  {
    throw std::invalid_argument("SVG output needs d = 2, got d = "
                                + std::to_string(instance.dim()));
  }
  static constexpr const char* kPalette[] = {
      "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
      "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  constexpr std::size_t kColors = sizeof kPalette / sizeof kPalette[0];
  const PointSet& points = instance.points;
  double min_x = points[0][0], max_x = points[0][0];
  double min_y = points[0][1], max_y = points[0][1];
  for (std::size_t i = 1; i < points.size(); ++i)
  {
    min_x = std::min(min_x, points[i][0]);
    max_x = std::max(max_x, points[i][0]);
    min_y = std::min(min_y, points[i][1]);
    max_y = std::max(max_y, points[i][1]);
  }
  double extent = std::max(max_x - min_x, max_y - min_y);
  if (!(extent > 0.0))
  {
    extent = 1.0;
  }
  const double margin = 0.05 * extent;
  const double dot = 0.006 * extent;
  const double min_ring = 2.0 * dot;

  std::vector<std::size_t> color(points.size(), 0);
  for (std::size_t k = 0; k < solution.centers.size(); ++k)
  {
    color[solution.centers[k]] = k % kColors;
  }
  // SVG y grows downward; mirror so the picture matches the input.
  auto sx = [&](double x) { return FormatReal(x); };
  auto sy = [&](double y) { return FormatReal(max_y + min_y - y); };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"";
  svg += FormatReal(min_x - margin) + " " + FormatReal(min_y - margin) + " "
         + FormatReal(max_x - min_x + 2 * margin) + " "
         + FormatReal(max_y - min_y + 2 * margin) + "\">\n";
  for (const std::size_t c : solution.centers)
  {
    const double r = std::max(solution.price, min_ring);
    svg += "  <circle class=\"ring\" cx=\"" + sx(points[c][0]) + "\" cy=\""
           + sy(points[c][1]) + "\" r=\"" + FormatReal(r)
           + "\" fill=\"none\" stroke=\"" + kPalette[color[c]]
           + "\" stroke-width=\"" + FormatReal(dot / 2) + "\"/>\n";
  }
  for (std::size_t i = 0; i < points.size(); ++i)
  {
    const std::size_t c = solution.assignment[i];
    const bool is_center =
        std::binary_search(solution.centers.begin(), solution.centers.end(), i);
    svg += std::string("  <circle class=\"") + (is_center ? "point center" : "point")
           + "\" cx=\"" + sx(points[i][0]) + "\" cy=\"" + sy(points[i][1])
           + "\" r=\"" + FormatReal(is_center ? 2 * dot : dot) + "\" fill=\""
           + kPalette[color[c]] + "\"/>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace lbc
