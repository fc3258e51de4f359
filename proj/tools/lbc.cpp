#include <cstdlib>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "lbc/cli.hpp"

namespace
{
constexpr int kInternalError = 70;

void AddSolveFlags(CLI::App& cmd, lbc::cli::RunConfig& config, bool with_algo)
{
  cmd.add_option("--input", config.input, "Instance file (one point per line)")
      ->required();
  cmd.add_option("--lambda", config.lambda, "Lower bound on points per center")
      ->required();
  cmd.add_option("--epsilon", config.epsilon, "Approximation slack for wspd");
  if (with_algo)
  {
    cmd.add_option("--algo", config.algorithm, "Algorithm")
        ->check(CLI::IsMember({"exact-distances", "wspd", "oracle"}));
  }
  cmd.add_option("--output", config.output, "Result document path (default stdout)");
  cmd.add_option("--svg", config.svg, "Also draw the solution (d = 2 only)");
  cmd.add_option("--seed", config.seed, "Seed for randomized selection");
  cmd.add_option("--cap", config.oracle_cap, "Largest n the oracle accepts");
}
}  // namespace

int main(int argc, char** argv)
{
  lbc::cli::RunConfig config;
  CLI::App app{"Lower-bounded center clustering"};
  app.require_subcommand(1);

  auto* solve = app.add_subcommand("solve", "Approximate a clustering");
  AddSolveFlags(*solve, config, true);

  auto* oracle = app.add_subcommand("oracle", "Exact optimum by exhaustive search");
  AddSolveFlags(*oracle, config, false);

  auto* gen = app.add_subcommand("gen", "Generate a seeded instance");
  gen->add_option("--n", config.n, "Number of points")->required();
  gen->add_option("--d", config.d, "Dimension");
  gen->add_option("--kind", config.kind, "uniform or clusters")
      ->check(CLI::IsMember({"uniform", "clusters"}));
  gen->add_option("--seed", config.seed, "Generator seed");
  gen->add_option("--output", config.output, "Output path (default stdout)");

  auto* bench = app.add_subcommand("bench", "Time net and solver scaling");
  bench->add_option("--sizes", config.sizes, "Ascending instance sizes")
      ->delimiter(',')
      ->required();
  bench->add_option("--reps", config.reps, "Timing rounds; each round times every size");
  bench->add_option("--seed", config.seed, "Generator seed");
  bench->add_option("--d", config.d, "Dimension");
  bench->add_option("--lambda", config.lambda, "Lower bound (default 16)");
  bench->add_option("--epsilon", config.epsilon, "Approximation slack");
  bench->add_option("--output", config.output, "CSV path (default stdout)");

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::CallForHelp& e)
  {
    return app.exit(e);
  }
  catch (const CLI::ParseError& e)
  {
    app.exit(e);
    return lbc::cli::kUsageError;
  }

  if (*solve)
  {
    config.command = lbc::cli::Command::kSolve;
  }
  else if (*oracle)
  {
    config.command = lbc::cli::Command::kOracle;
  }
  else if (*gen)
  {
    config.command = lbc::cli::Command::kGen;
  }
  else
  {
    config.command = lbc::cli::Command::kBench;
  }

  try
  {
    return lbc::cli::Run(config, std::cout, std::cerr);
  }
  catch (const std::exception& e)
  {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInternalError;
  }
}
