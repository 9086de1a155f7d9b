#include "commands.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <boost/tokenizer.hpp>

#include "losstail/claim_process.hpp"
#include "losstail/error.hpp"
#include "losstail/resampling.hpp"

namespace losstail::cli {

namespace {

namespace fs = std::filesystem;
using Tokenizer = boost::tokenizer<boost::escaped_list_separator<char>>;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> out;
  for (const auto& field : Tokenizer(line)) out.push_back(trim(field));
  return out;
}

std::string csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

fs::path write_text(const AnalysisConfig& c, const std::string& name, const std::string& text,
                    CommandOutput& out) {
  fs::create_directories(c.out);
  const fs::path path = c.out / name;
  write_file_atomic(path, text);
  out.files.push_back(path);
  return path;
}

void write_table(const AnalysisConfig& c, const std::string& name, const std::string& h1,
                 const std::string& h2, const std::vector<std::pair<double, double>>& rows,
                 CommandOutput& out) {
  std::string text = h1 + "," + h2 + "\n";
  for (const auto& [a, b] : rows) text += csv_number(a) + "," + csv_number(b) + "\n";
  write_text(c, name, text, out);
}

void write_losses(const AnalysisConfig& c, const std::string& name, std::span<const double> values,
                  CommandOutput& out) {
  std::string text = "loss\n";
  for (double v : values) text += csv_number(v) + "\n";
  write_text(c, name, text, out);
}

OrderedSample load(const AnalysisConfig& c) {
  if (c.input.empty()) throw InputError("--input is required");
  return read_loss_csv(c.input, c.column);
}

Json input_json(const AnalysisConfig& c, const OrderedSample& s) {
  return {{"path", c.input}, {"column", c.column}, {"n", s.size()}};
}

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

Json plan_json(const AnalysisConfig& c) {
  Json j{{"base", c.base},
         {"upper", c.upper},
         {"lower", c.lower},
         {"method", c.method},
         {"weighting", std::string(weighting_name(c.weighting))},
         {"threshold", optional_number(c.threshold)},
         {"x_lower", optional_number(c.x_lower)},
         {"x_upper", optional_number(c.x_upper)}};
  j["rank_range"] = c.rank_range ? Json{c.rank_range->lo, c.rank_range->hi} : Json(nullptr);
  return j;
}

AdjustedModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open model file '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::exception& e) {
    throw InputError("model file '" + path + "' is not valid JSON: " + e.what());
  }
  return model_from_json(j.contains("model") ? j.at("model") : j);
}

struct PipelineOutcome {
  AdjustedModel model;
  Json fits;
  Json warnings = Json::array();
};

PipelineOutcome run_fit(const AnalysisConfig& c, const OrderedSample& s) {
  if (c.method == "ml") {
    if (c.base != "gpd") throw InputError("--method ml requires --base gpd");
    const FitResult f = fit_gpd_ml(s, c.threshold.value_or(0.0));
    return {AdjustedModel(f.spec()), Json{{"base", to_json(f)}}};
  }
  if (c.method != "mad") throw InputError("unknown --method '" + c.method + "' (mad|ml)");
  const PipelineResult r = fit_pipeline(s, make_plan(c));
  PipelineOutcome o{r.model, Json{{"base", to_json(r.base_fit)}}};
  if (r.upper_fit) o.fits["upper"] = to_json(*r.upper_fit);
  if (r.lower_fit) o.fits["lower"] = to_json(*r.lower_fit);
  for (const auto& w : r.warnings) o.warnings.push_back(w);
  return o;
}

// Flattened parameter vector of a pipeline fit, used by the bootstrap.
struct FlatLayout {
  std::vector<std::string> names;
  std::optional<std::size_t> p_upper_index;
  std::vector<std::optional<Bounds>> clamp;
};

std::vector<double> flatten(const PipelineResult& r, bool want_upper, bool want_lower) {
  std::vector<double> v;
  for (std::size_t i = 0; i < r.base_fit.theta_hat.size(); ++i) {
    if (r.base_fit.is_free[i]) v.push_back(r.base_fit.theta_hat[i]);
  }
  if (want_upper) {
    if (!r.upper_fit) throw FitFailedError("upper step skipped");
    for (std::size_t i = 0; i < r.upper_fit->theta_hat.size(); ++i) {
      if (r.upper_fit->is_free[i]) v.push_back(r.upper_fit->theta_hat[i]);
    }
  }
  if (want_lower) {
    if (!r.lower_fit) throw FitFailedError("lower step skipped");
    v.push_back(r.lower_fit->value("gamma"));
  }
  return v;
}

FlatLayout layout_of(const PipelineResult& r, bool want_upper, bool want_lower, Bounds beta) {
  FlatLayout l;
  for (std::size_t i = 0; i < r.base_fit.names.size(); ++i) {
    if (r.base_fit.is_free[i]) {
      l.names.push_back("base." + r.base_fit.names[i]);
      l.clamp.emplace_back();
    }
  }
  if (want_upper) {
    for (std::size_t i = 0; i < r.upper_fit->names.size(); ++i) {
      if (!r.upper_fit->is_free[i]) continue;
      const std::string& n = r.upper_fit->names[i];
      if (n == "p_upper") {
        l.p_upper_index = l.names.size();
        l.names.push_back("p_upper");
        l.clamp.emplace_back();
        continue;
      }
      l.names.push_back("upper." + n);
      l.clamp.push_back(n == "beta" ? std::optional<Bounds>(beta) : std::nullopt);
    }
  }
  if (want_lower) {
    l.names.push_back("lower.gamma");
    l.clamp.emplace_back();
  }
  return l;
}

Json summary_json(const BootstrapSummary& s) {
  Json params = Json::object();
  for (const auto& p : s.parameters) {
    params[p.name] = {{"se", p.se},
                      {"lower", p.lower},
                      {"upper", p.upper},
                      {"se_filtered", p.se_filtered},
                      {"lower_filtered", p.lower_filtered},
                      {"upper_filtered", p.upper_filtered},
                      {"count_filtered", p.count_filtered}};
  }
  return {{"replicates", s.replicates},
          {"succeeded", s.succeeded},
          {"failed", s.failed},
          {"level", s.level},
          {"degeneracy_tol", s.degeneracy_tol},
          {"fraction_p_at_zero", s.fraction_p_at_zero},
          {"fraction_p_at_one", s.fraction_p_at_one},
          {"seed", s.seed},
          {"parameters", params}};
}

std::vector<std::pair<double, double>> model_table(const AnalysisConfig& c, const AdjustedModel& m,
                                                   const OrderedSample& s, bool survival_side) {
  std::vector<std::pair<double, double>> rows;
  for (double x : log_grid(s.min(), s.max(), c.grid_points)) {
    rows.emplace_back(x, survival_side ? adjusted_survival(m, x) : adjusted_cdf(m, x));
  }
  return rows;
}

}  // namespace

OrderedSample read_loss_csv(const fs::path& path, const std::string& column) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open input file '" + path.string() + "'");
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) {
      header = split_row(line);
      break;
    }
  }
  if (header.empty()) throw InputError("input file '" + path.string() + "' is empty");
  std::size_t col = 0;
  if (!column.empty()) {
    const auto it = std::find(header.begin(), header.end(), column);
    if (it == header.end()) throw InputError("column '" + column + "' not found in header");
    col = static_cast<std::size_t>(it - header.begin());
  }
  std::vector<double> values;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<std::string> row;
    try {
      row = split_row(line);
    } catch (const boost::escaped_list_error&) {
      throw InputError("line " + std::to_string(line_no) + ": malformed CSV row");
    }
    if (col >= row.size() || row[col].empty()) {
      throw InputError("line " + std::to_string(line_no) + ": missing value");
    }
    const std::string& field = row[col];
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(v)) {
      throw InputError("line " + std::to_string(line_no) + ": '" + field + "' is not a number");
    }
    if (!(v > 0.0)) {
      throw InputError("line " + std::to_string(line_no) + ": loss " + field + " is not positive");
    }
    values.push_back(v);
  }
  if (values.empty()) throw InputError("input file '" + path.string() + "' has no data rows");
  return OrderedSample(std::move(values), path.filename().string());
}

RankRange parse_rank_range(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw InputError("rank range must look like LO:HI");
  RankRange r;
  const auto lo = trim(text.substr(0, colon)), hi = trim(text.substr(colon + 1));
  const auto a = std::from_chars(lo.data(), lo.data() + lo.size(), r.lo);
  const auto b = std::from_chars(hi.data(), hi.data() + hi.size(), r.hi);
  if (a.ec != std::errc() || a.ptr != lo.data() + lo.size() || b.ec != std::errc() ||
      b.ptr != hi.data() + hi.size() || r.lo < 1 || r.lo > r.hi) {
    throw InputError("invalid rank range '" + text + "'");
  }
  return r;
}

PipelinePlan make_plan(const AnalysisConfig& c) {
  PipelinePlan plan;
  if (c.base == "gpd") {
    plan.base = FamilyTemplate::gpd_excess(c.threshold.value_or(0.0));
  } else if (c.base == "pareto") {
    plan.base = c.threshold ? FamilyTemplate::pareto_fixed_scale(*c.threshold) : FamilyTemplate(Family::Pareto);
  } else {
    throw InputError("unknown --base '" + c.base + "' (gpd|pareto)");
  }
  if (c.upper == "none") {
    plan.upper_family.reset();
  } else if (c.upper == "weibull" || c.upper == "shifted_weibull") {
    plan.upper_family = Family::ShiftedWeibull;
  } else if (c.upper == "pareto") {
    plan.upper_family = Family::Pareto;
  } else {
    throw InputError("unknown --upper '" + c.upper + "' (weibull|pareto|none)");
  }
  if (c.lower == "none") {
    plan.lower_family.reset();
  } else if (c.lower != "gpd") {
    throw InputError("unknown --lower '" + c.lower + "' (gpd|none)");
  }
  plan.x_lower = c.x_lower;
  plan.x_upper = c.x_upper;
  plan.base_config.weighting = c.weighting;
  plan.base_config.rank_range = c.rank_range;
  plan.upper_config.weighting = c.weighting;
  plan.lower_config.weighting = c.weighting;
  return plan;
}

Json to_json(const FitResult& f) {
  Json params = Json::object();
  Json free = Json::array();
  for (std::size_t i = 0; i < f.names.size(); ++i) {
    params[f.names[i]] = f.theta_hat[i];
    if (f.is_free[i]) free.push_back(f.names[i]);
  }
  Json config{{"weighting", std::string(weighting_name(f.config.weighting))},
              {"restarts", f.config.optimizer.restarts},
              {"rel_tol", f.config.optimizer.rel_tol},
              {"max_evaluations", f.config.optimizer.max_evaluations}};
  config["rank_range"] =
      f.config.rank_range ? Json{f.config.rank_range->lo, f.config.rank_range->hi} : Json(nullptr);
  return {{"component", f.component},
          {"family", f.family ? Json(std::string(family_name(*f.family))) : Json(nullptr)},
          {"parameters", params},
          {"free", free},
          {"objective_value", f.objective_value},
          {"converged", f.converged},
          {"evaluations", f.evaluations},
          {"included", f.included},
          {"config", config}};
}

Json to_json(const TailTestResult& r) {
  return {{"k", r.k},         {"m", r.m},         {"alpha_hat", r.alpha_hat},
          {"sigma", r.sigma}, {"p_value", r.p_value}, {"reps", r.reps},
          {"seed", r.seed},   {"reject_5pct", r.reject_5pct}, {"warnings", r.warnings}};
}

CommandOutput cmd_fit(const AnalysisConfig& c) {
  const OrderedSample s = load(c);
  PipelineOutcome fit = run_fit(c, s);
  CommandOutput out;
  out.report = {{"input", input_json(c, s)},
                {"plan", plan_json(c)},
                {"model", to_json(fit.model)},
                {"fits", fit.fits},
                {"warnings", fit.warnings}};
  if (c.hill_threshold) {
    const auto h = hill_above(s, *c.hill_threshold);
    out.report["hill"] = {{"threshold", h.threshold}, {"k", h.count}, {"gamma_hat", h.gamma_hat}, {"se", h.se}};
  }
  write_text(c, "fit_report.json", dump_canonical(out.report), out);

  std::vector<std::pair<double, double>> edf;
  for (const auto& p : edf_table(s)) edf.emplace_back(p.x, p.prob);
  write_table(c, "edf.csv", "x", "prob", edf, out);
  write_table(c, "model_cdf.csv", "x", "prob", model_table(c, fit.model, s, false), out);
  write_table(c, "model_survival.csv", "x", "prob", model_table(c, fit.model, s, true), out);
  return out;
}

CommandOutput cmd_tail_test(const AnalysisConfig& c) {
  const OrderedSample s = load(c);
  if (c.test_k == 0) throw InputError("--test-k is required");
  const TailTestResult r = pareto_tail_test(s, c.test_k, c.test_reps, c.seed);
  CommandOutput out;
  out.report = to_json(r);
  out.report["input"] = input_json(c, s);
  write_text(c, "tail_test.json", dump_canonical(out.report), out);
  return out;
}

CommandOutput cmd_bootstrap(const AnalysisConfig& c) {
  const OrderedSample s = load(c);
  if (c.method != "mad") throw InputError("bootstrap supports --method mad only");
  const PipelinePlan plan = make_plan(c);
  const PipelineResult point = fit_pipeline(s, plan);
  const bool want_upper = point.upper_fit.has_value();
  const bool want_lower = point.lower_fit.has_value();
  const FlatLayout layout = layout_of(point, want_upper, want_lower, plan.beta_bounds);

  BootstrapOptions o;
  o.replicates = c.boot_reps;
  o.seed = c.seed;
  o.names = layout.names;
  o.p_upper_index = layout.p_upper_index;
  o.clamp = layout.clamp;
  const BootstrapSummary summary = bootstrap_fit(
      s, [&](const OrderedSample& x) { return flatten(fit_pipeline(x, plan), want_upper, want_lower); }, o);

  CommandOutput out;
  out.report = summary_json(summary);
  Json estimate = Json::object();
  const auto flat = flatten(point, want_upper, want_lower);
  for (std::size_t i = 0; i < flat.size(); ++i) estimate[layout.names[i]] = flat[i];
  out.report["estimate"] = estimate;
  out.report["input"] = input_json(c, s);
  out.report["plan"] = plan_json(c);
  write_text(c, "bootstrap.json", dump_canonical(out.report), out);

  if (c.dump_replicates) {
    std::string text = "replicate";
    for (const auto& n : layout.names) text += "," + n;
    text += "\n";
    for (std::size_t b = 0; b < summary.estimates.size(); ++b) {
      if (summary.estimates[b].empty()) continue;
      text += std::to_string(b);
      for (double v : summary.estimates[b]) text += "," + csv_number(v);
      text += "\n";
    }
    write_text(c, "bootstrap_replicates.csv", text, out);
  }
  return out;
}

CommandOutput cmd_simulate(const AnalysisConfig& c) {
  CommandOutput out;
  out.report = {{"kind", c.kind}, {"seed", c.seed}};
  if (c.kind == "mechanism") {
    if (c.model.empty()) throw InputError("--model is required for --kind mechanism");
    const AdjustedModel m = load_model(c.model);
    const OrderedSample s = sample_mechanism(m, c.n, c.seed);
    out.report["model"] = to_json(m);
    out.report["n"] = c.n;
    write_losses(c, "sample.csv", s.values(), out);
  } else if (c.kind == "thinning") {
    const ThinningSpec spec{DistributionSpec::exponential(c.sigma), c.sigma_t, c.no_thinning};
    const OrderedSample s = sample_thinned(spec, c.n, c.seed);
    out.report["n"] = c.n;
    out.report["sigma"] = c.sigma;
    out.report["sigma_t"] = c.sigma_t;
    out.report["no_thinning"] = c.no_thinning;
    write_losses(c, "sample.csv", s.values(), out);
  } else if (c.kind == "inflation") {
    const InflationScenario sc{c.alpha, c.inflation_factor, c.years, c.threshold.value_or(0.01), c.base_rate};
    const ScenarioResult r = simulate_inflation_scenario(sc, c.seed);
    out.report["scenario"] = {{"alpha", sc.alpha},
                              {"inflation_factor", sc.inflation_factor},
                              {"years", sc.years},
                              {"threshold", sc.threshold},
                              {"base_rate", sc.base_rate}};
    Json counts = Json::array();
    for (const auto& y : r.years) {
      counts.push_back(y.raw.size());
      write_losses(c, "year_" + std::to_string(y.year) + "_raw.csv", y.raw, out);
      write_losses(c, "year_" + std::to_string(y.year) + "_inflated.csv", y.inflated, out);
    }
    out.report["counts"] = counts;
  } else {
    throw InputError("unknown --kind '" + c.kind + "' (mechanism|thinning|inflation)");
  }
  write_text(c, "simulate.json", dump_canonical(out.report), out);
  return out;
}

CommandOutput cmd_qq(const AnalysisConfig& c) {
  const OrderedSample s = load(c);
  const AdjustedModel m = c.model.empty() ? run_fit(c, s).model : load_model(c.model);
  CommandOutput out;
  out.report = {{"input", input_json(c, s)}, {"model", to_json(m)}};
  Json dropped = Json::object();
  for (Margins mg : c.margins) {
    const QqResult q = qq_coordinates(s, m, mg);
    std::vector<std::pair<double, double>> rows;
    for (const auto& p : q.points) rows.emplace_back(p.theoretical, p.empirical);
    write_table(c, "qq_" + std::string(margins_name(mg)) + ".csv", "theoretical", "empirical", rows, out);
    dropped[std::string(margins_name(mg))] = q.dropped;
  }
  out.report["dropped"] = dropped;
  write_text(c, "qq.json", dump_canonical(out.report), out);
  return out;
}

}  // namespace losstail::cli
