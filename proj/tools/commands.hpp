#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "losstail/distribution.hpp"
#include "losstail/estimation.hpp"
#include "losstail/gof.hpp"
#include "losstail/json_io.hpp"

namespace losstail::cli {

/// Settings shared by all subcommands. Every field mirrors a command-line
/// flag and a config-file key of the same name (e.g. x_lower <-> --x-lower).
struct AnalysisConfig {
  std::string input;
  /// CSV column holding the losses; the first column when empty.
  std::string column;
  std::filesystem::path out = ".";

  /// GPD location (excess threshold) of the base law, or the fixed scale of
  /// a Pareto base.
  std::optional<double> threshold;
  std::optional<double> x_lower;
  std::optional<double> x_upper;

  std::string base = "gpd";        // gpd | pareto
  std::string upper = "weibull";   // weibull | pareto | none
  std::string lower = "gpd";       // gpd | none
  std::string method = "mad";      // mad | ml (base-only GPD fit)
  Weighting weighting = Weighting::Normalized;
  std::optional<RankRange> rank_range;
  std::optional<double> hill_threshold;

  std::size_t boot_reps = 1000;
  bool dump_replicates = false;
  std::size_t test_k = 0;
  std::size_t test_reps = kDefaultTestReps;
  std::uint64_t seed = 1;
  std::vector<Margins> margins{Margins::Original, Margins::StandardNormal, Margins::StandardFrechet};

  /// JSON file with an AdjustedModel, or a fit report holding one under "model".
  std::string model;
  std::string kind = "mechanism";  // mechanism | thinning | inflation
  std::size_t n = 1000;
  double sigma = 1.0;
  double sigma_t = 1.0;
  bool no_thinning = false;
  double alpha = 1.0;
  double inflation_factor = 1.05;
  int years = 10;
  double base_rate = 100.0;
  std::size_t grid_points = 200;
};

struct CommandOutput {
  /// Written files, in write order.
  std::vector<std::filesystem::path> files;
  /// Main JSON document (also written to disk).
  Json report;
};

/// Losses from a CSV file with one header row. Throws InputError naming the
/// line of any empty, non-numeric or non-positive entry.
OrderedSample read_loss_csv(const std::filesystem::path& path, const std::string& column = {});

/// Parses "LO:HI" into an inclusive rank range.
RankRange parse_rank_range(const std::string& text);

/// Pipeline plan described by the config.
PipelinePlan make_plan(const AnalysisConfig& config);

Json to_json(const FitResult& fit);
Json to_json(const TailTestResult& result);

CommandOutput cmd_fit(const AnalysisConfig& config);
CommandOutput cmd_tail_test(const AnalysisConfig& config);
CommandOutput cmd_bootstrap(const AnalysisConfig& config);
CommandOutput cmd_simulate(const AnalysisConfig& config);
CommandOutput cmd_qq(const AnalysisConfig& config);

}  // namespace losstail::cli
