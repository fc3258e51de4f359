#pragma once

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "lbc/geometry.hpp"
#include "lbc/grid_net.hpp"
#include "lbc/io.hpp"
#include "lbc/oracle.hpp"
#include "lbc/solver.hpp"

namespace lbc::cli
{
enum ExitCode : int
{
  kOk = 0,
  kInfeasible = 1,
  kParseError = 2,
  kUsageError = 3,
  kOracleCap = 4,
};

enum class Command
{
  kSolve,
  kOracle,
  kGen,
  kBench,
};

struct RunConfig
{
  Command command = Command::kSolve;
  std::string input;
  std::optional<std::size_t> lambda;
  double epsilon = 0.5;
  std::string algorithm = "wspd";  // exact-distances | wspd | oracle
  std::string output;               // empty: standard output
  std::string svg;
  std::uint64_t seed = 0;
  std::size_t n = 0;
  std::size_t d = 2;
  std::string kind = "uniform";
  std::vector<std::size_t> sizes;
  std::size_t reps = 3;
  std::size_t oracle_cap = kDefaultOracleCap;
};

class UsageError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

namespace detail
{
inline void WriteText(const std::string& path, const std::string& text,
                      std::ostream& out)
{
  if (path.empty())
  {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file)
  {
    throw UsageError("cannot write '" + path + "'");
  }
  file << text;
  if (!file)
  {
    throw UsageError("failed writing '" + path + "'");
  }
}

/// Per-call time of `body`, averaged over as many calls as fit in at least
/// `min_sample` seconds so millisecond-scale bodies are not dominated by
/// timer and cache noise.
template <typename F>
double SampleSeconds(F&& body, double min_sample = 0.05)
{
  using Clock = std::chrono::steady_clock;
  std::size_t calls = 0;
  const auto start = Clock::now();
  double elapsed = 0.0;
  do
  {
    body();
    ++calls;
    elapsed = std::chrono::duration<double>(Clock::now() - start).count();
  } while (elapsed < min_sample);
  return elapsed / static_cast<double>(calls);
}

inline double Median(std::vector<double> values)
{
  std::nth_element(values.begin(), values.begin() + values.size() / 2, values.end());
  return values[values.size() / 2];
}
}  // namespace detail

struct BenchRow
{
  std::size_t n = 0;
  double net_seconds = 0.0;
  double solve_seconds = 0.0;
  std::optional<double> net_ratio;    // t(n) / t(n_previous)
  std::optional<double> solve_ratio;
};

/// Radius at which the benchmark times the net: about lambda points per
/// ball on unit-cube data.
inline double BenchNetRadius(std::size_t n, std::size_t lambda)
{
  return std::sqrt(static_cast<double>(lambda) / static_cast<double>(n));
}

/// Median wall time of ComputeNet and SolveWspd over seeded uniform
/// instances of each size. Runs sequentially. Each repetition round times
/// every size back to back, one operation at a time, and a doubling ratio is the median over rounds
/// of the within-round ratio, so slow stretches on a shared host hit both
/// sides of a ratio instead of one.
inline std::vector<BenchRow> Bench(const std::vector<std::size_t>& sizes,
                                   std::size_t reps, std::uint64_t seed,
                                   std::size_t dim = 2, std::size_t lambda = 16,
                                   double epsilon = 0.5)
{
  constexpr double kMinSample = 0.2;
  const std::size_t rounds = std::max<std::size_t>(reps, 1);
  std::vector<Instance> instances;
  for (const std::size_t n : sizes)
  {
    instances.push_back(
        Instance{GenerateInstance(n, dim, InstanceKind::kUniform, seed), std::min(lambda, n)});
  }
  std::size_t sink = 0;
  auto net = [&](std::size_t k)
  {
    const double radius = BenchNetRadius(sizes[k], lambda);
    return [&, k, radius] { sink += ComputeNet(instances[k].points, radius).centers.size(); };
  };
  auto solve = [&](std::size_t k)
  { return [&, k] { sink += SolveWspd(instances[k], epsilon).centers.size(); }; };

  for (std::size_t k = 0; k < sizes.size(); ++k)
  {
    net(k)();
    solve(k)();
  }
  std::vector<std::vector<double>> net_times(sizes.size()), solve_times(sizes.size());
  for (std::size_t r = 0; r < rounds; ++r)
  {
    for (std::size_t k = 0; k < sizes.size(); ++k)
    {
      net_times[k].push_back(detail::SampleSeconds(net(k), kMinSample));
    }
    for (std::size_t k = 0; k < sizes.size(); ++k)
    {
      solve_times[k].push_back(detail::SampleSeconds(solve(k), kMinSample));
    }
  }
  if (sink == 0)
  {
    throw std::logic_error("benchmark produced empty results");
  }

  std::vector<BenchRow> rows;
  for (std::size_t k = 0; k < sizes.size(); ++k)
  {
    BenchRow row;
    row.n = sizes[k];
    row.net_seconds = detail::Median(net_times[k]);
    row.solve_seconds = detail::Median(solve_times[k]);
    if (k > 0)
    {
      std::vector<double> net_ratios, solve_ratios;
      for (std::size_t r = 0; r < rounds; ++r)
      {
        net_ratios.push_back(net_times[k][r] / net_times[k - 1][r]);
        solve_ratios.push_back(solve_times[k][r] / solve_times[k - 1][r]);
      }
      row.net_ratio = detail::Median(net_ratios);
      row.solve_ratio = detail::Median(solve_ratios);
    }
    rows.push_back(row);
  }
  return rows;
}

inline std::string BenchTable(const std::vector<BenchRow>& rows)
{
  std::ostringstream s;
  s << std::left << std::setw(10) << "n" << std::setw(14) << "t_net[s]"
    << std::setw(14) << "t_solve[s]" << std::setw(12) << "net_ratio"
    << "solve_ratio\n";
  s << std::fixed;
  for (const BenchRow& row : rows)
  {
    s << std::setw(10) << row.n << std::setw(14) << std::setprecision(6)
      << row.net_seconds << std::setw(14) << row.solve_seconds;
    if (row.net_ratio)
    {
      s << std::setw(12) << std::setprecision(3) << *row.net_ratio
        << std::setprecision(3) << *row.solve_ratio;
    }
    else
    {
      s << std::setw(12) << "-" << "-";
    }
    s << '\n';
  }
  return s.str();
}

inline std::string BenchCsv(const std::vector<BenchRow>& rows)
{
  std::string csv = "n,t_net,t_solve,net_ratio,solve_ratio\n";
  for (const BenchRow& row : rows)
  {
    csv += std::to_string(row.n) + "," + FormatReal(row.net_seconds) + ","
           + FormatReal(row.solve_seconds) + ","
           + (row.net_ratio ? FormatReal(*row.net_ratio) : "") + ","
           + (row.solve_ratio ? FormatReal(*row.solve_ratio) : "") + "\n";
  }
  return csv;
}

namespace detail
{
inline int Solve(const RunConfig& config, std::ostream& out)
{
  std::string algorithm =
      config.command == Command::kOracle ? "oracle" : config.algorithm;
  if (algorithm != "wspd" && algorithm != "exact-distances" && algorithm != "oracle")
  {
    throw UsageError("unknown algorithm '" + algorithm + "'");
  }
  if (config.input.empty())
  {
    throw UsageError("--input is required");
  }
  if (!config.lambda || *config.lambda == 0)
  {
    throw UsageError("--lambda must be a positive integer");
  }
  if (algorithm == "wspd" && !(config.epsilon > 0.0))
  {
    throw UsageError("--epsilon must be positive");
  }
  Instance instance{ReadInstanceFile(config.input), *config.lambda};
  if (!config.svg.empty() && instance.dim() != 2)
  {
    throw UsageError("--svg needs 2-dimensional input");
  }
  ValidateInstance(instance);

  Solution solution;
  std::optional<double> epsilon;
  if (algorithm == "wspd")
  {
    epsilon = config.epsilon;
    solution = SolveWspd(instance, config.epsilon);
  }
  else if (algorithm == "exact-distances")
  {
    solution = SolveExactDistances(instance, config.seed);
  }
  else
  {
    solution = BruteForceOpt(instance, config.oracle_cap);
  }
  const auto doc = ResultDocument(instance, solution, algorithm, epsilon);
  WriteText(config.output, doc.dump() + "\n", out);
  if (!config.svg.empty())
  {
    WriteText(config.svg, RenderSvg(instance, solution), out);
  }
  return kOk;
}

inline int Generate(const RunConfig& config, std::ostream& out)
{
  const auto kind = ParseInstanceKind(config.kind);
  if (!kind)
  {
    throw UsageError("unknown --kind '" + config.kind + "'");
  }
  if (config.n == 0 || config.d == 0)
  {
    throw UsageError("gen needs --n >= 1 and --d >= 1");
  }
  WriteText(config.output,
            FormatInstance(GenerateInstance(config.n, config.d, *kind, config.seed)),
            out);
  return kOk;
}

inline int RunBench(const RunConfig& config, std::ostream& out)
{
  if (config.sizes.empty())
  {
    throw UsageError("bench needs --sizes");
  }
  if (!std::is_sorted(config.sizes.begin(), config.sizes.end())
      || config.sizes.front() == 0)
  {
    throw UsageError("--sizes must be positive and ascending");
  }
  if (!(config.epsilon > 0.0))
  {
    throw UsageError("--epsilon must be positive");
  }
  const auto rows = Bench(config.sizes, config.reps, config.seed, config.d,
                          config.lambda.value_or(16), config.epsilon);
  out << BenchTable(rows);
  if (config.output.empty())
  {
    out << '\n' << BenchCsv(rows);
  }
  else
  {
    WriteText(config.output, BenchCsv(rows), out);
  }
  return kOk;
}
}  // namespace detail

/// Executes one CLI command and maps failures onto exit codes. Diagnostics
/// go to `err`; no result document is written on failure.
inline int Run(const RunConfig& config, std::ostream& out, std::ostream& err)
{
  try
  {
    switch (config.command)
    {
      case Command::kSolve:
      case Command::kOracle:
        return detail::Solve(config, out);
      case Command::kGen:
        return detail::Generate(config, out);
      case Command::kBench:
        return detail::RunBench(config, out);
    }
    throw UsageError("unknown command");
  }
  catch (const InfeasibleError& e)
  {
    err << "error: " << e.what() << '\n';
    return kInfeasible;
  }
  catch (const ParseError& e)
  {
    err << "error: " << e.what() << '\n';
    return kParseError;
  }
  catch (const OracleCapError& e)
  {
    err << "error: " << e.what() << '\n';
    return kOracleCap;
  }
  catch (const UsageError& e)
  {
    err << "usage error: " << e.what() << '\n';
    return kUsageError;
  }
  catch (const std::invalid_argument& e)
  {
    err << "usage error: " << e.what() << '\n';
    return kUsageError;
  }
}

}  // namespace lbc::cli
