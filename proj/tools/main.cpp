#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "losstail/error.hpp"

namespace {

using losstail::cli::AnalysisConfig;
using losstail::cli::CommandOutput;

std::string one_line(std::string s) {
  for (char& ch : s) {
    if (ch == '\n' || ch == '\r') ch = ' ';
  }
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"losstail: heavy-tailed claim-size models, MAD fitting and Pareto tail tests"};
  app.set_config("--config", "", "Flat key = value file; keys are the long flag names", false);
  app.require_subcommand(1);

  AnalysisConfig c;
  std::string weighting = "normalized", rank_range, out = ".";
  std::vector<std::string> margins;
  std::optional<double> threshold, x_lower, x_upper, hill_threshold;

  app.add_option("--input", c.input, "CSV file with one header row");
  app.add_option("--column", c.column, "Loss column (default: first column)");
  app.add_option("--out", out, "Output directory");
  app.add_option("--threshold", threshold, "GPD excess threshold / Pareto scale (simulate: inflation threshold)");
  app.add_option("--x-lower", x_lower, "Lower adjustment threshold");
  app.add_option("--x-upper", x_upper, "Upper adjustment threshold");
  app.add_option("--base", c.base, "Base family")->check(CLI::IsMember({"gpd", "pareto"}));
  app.add_option("--upper", c.upper, "Upper adjuster")->check(CLI::IsMember({"weibull", "pareto", "none"}));
  app.add_option("--lower", c.lower, "Lower adjuster")->check(CLI::IsMember({"gpd", "none"}));
  app.add_option("--method", c.method, "Base estimator")->check(CLI::IsMember({"mad", "ml"}));
  app.add_option("--weighting", weighting, "MAD weighting")
      ->check(CLI::IsMember({"unweighted", "normalized", "sqrt"}));
  app.add_option("--rank-range", rank_range, "Inclusive rank range LO:HI for the base fit");
  app.add_option("--hill-threshold", hill_threshold, "Also report the Hill estimate above this value");
  app.add_option("--boot-reps", c.boot_reps, "Bootstrap replicates")->check(CLI::PositiveNumber);
  app.add_flag("--dump-replicates", c.dump_replicates, "Write per-replicate bootstrap estimates");
  app.add_option("--test-k", c.test_k, "Tail size k of the run test");
  app.add_option("--test-reps", c.test_reps, "Monte-Carlo repetitions of the run test")->check(CLI::PositiveNumber);
  app.add_option("--seed", c.seed, "Random seed");
  app.add_option("--margins", margins, "Q-Q margins (original,normal,frechet)")
      ->delimiter(',')
      ->check(CLI::IsMember({"original", "normal", "frechet"}));
  app.add_option("--model", c.model, "Model JSON (or fit report) for simulate/qq");
  app.add_option("--kind", c.kind, "Simulation kind")->check(CLI::IsMember({"mechanism", "thinning", "inflation"}));
  app.add_option("--n", c.n, "Sample size for simulate")->check(CLI::PositiveNumber);
  app.add_option("--sigma", c.sigma, "Exponential scale of log losses (thinning)");
  app.add_option("--sigma-t", c.sigma_t, "Thinning scale");
  app.add_flag("--no-thinning", c.no_thinning, "Keep every loss");
  app.add_option("--alpha", c.alpha, "Pareto exponent (inflation)");
  app.add_option("--inflation-factor", c.inflation_factor, "Annual inflation factor");
  app.add_option("--years", c.years, "Number of years");
  app.add_option("--base-rate", c.base_rate, "Expected claims above threshold in year 1");
  app.add_option("--grid-points", c.grid_points, "Points of the model cdf/survival tables")->check(CLI::PositiveNumber);

  auto* fit = app.add_subcommand("fit", "Fit the tail-adjusted model; write report and tables")->fallthrough();
  auto* test = app.add_subcommand("tail-test", "Longest-run Monte-Carlo test for a Pareto tail")->fallthrough();
  auto* boot = app.add_subcommand("bootstrap", "Bootstrap the fit pipeline")->fallthrough();
  auto* sim = app.add_subcommand("simulate", "Simulate claims (mechanism, thinning, inflation)")->fallthrough();
  auto* qq = app.add_subcommand("qq", "Q-Q plot coordinates")->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    c.out = out;
    c.threshold = threshold;
    c.x_lower = x_lower;
    c.x_upper = x_upper;
    c.hill_threshold = hill_threshold;
    c.weighting = losstail::parse_weighting(weighting);
    if (!rank_range.empty()) c.rank_range = losstail::cli::parse_rank_range(rank_range);
    if (!margins.empty()) {
      c.margins.clear();
      for (const auto& m : margins) c.margins.push_back(losstail::parse_margins(m));
    }

    CommandOutput result;
    if (fit->parsed()) result = losstail::cli::cmd_fit(c);
    if (test->parsed()) result = losstail::cli::cmd_tail_test(c);
    if (boot->parsed()) result = losstail::cli::cmd_bootstrap(c);
    if (sim->parsed()) result = losstail::cli::cmd_simulate(c);
    if (qq->parsed()) result = losstail::cli::cmd_qq(c);
    for (const auto& f : result.files) std::cout << f.string() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: " << one_line(e.what()) << '\n';
    return 1;
  }
  return 0;
}
