// Acceptance suite: one PASS/FAIL/SKIP line per criterion.
//
// Dataset-dependent criteria read their CSVs from environment variables:
//   LOSSTAIL_NORWEGIAN_CSV, LOSSTAIL_AON_CSV, LOSSTAIL_DANISH_CSV, LOSSTAIL_ASIA_CSV
// with optional LOSSTAIL_<NAME>_COLUMN naming the loss column.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "losstail/claim_process.hpp"
#include "losstail/estimation.hpp"
#include "losstail/gof.hpp"
#include "losstail/random.hpp"
#include "losstail/tail_model.hpp"
#include "oracles.hpp"

using namespace losstail;

namespace {

enum class Status { Pass, Fail, Skip };

struct Outcome {
  Status status;
  std::string detail;
};

Outcome pass_if(bool ok, const std::string& detail) { return {ok ? Status::Pass : Status::Fail, detail}; }

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

int failures = 0;

void run(const std::string& id, const std::string& title, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {Status::Fail, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (o.status == Status::Pass && secs > limit_s) {
    o.status = Status::Fail;
    o.detail += fmt("; runtime over %.0f s", limit_s);
  }
  const char* tag = o.status == Status::Pass ? "PASS" : o.status == Status::Fail ? "FAIL" : "SKIP";
  if (o.status == Status::Fail) ++failures;
  std::printf("%s %-3s %-40s %8.2f s  %s\n", tag, id.c_str(), title.c_str(), secs, o.detail.c_str());
  std::fflush(stdout);
}

std::optional<OrderedSample> dataset(const char* name) {
  const std::string key = std::string("LOSSTAIL_") + name;
  const char* path = std::getenv((key + "_CSV").c_str());
  if (!path || !*path) return std::nullopt;
  const char* column = std::getenv((key + "_COLUMN").c_str());
  return cli::read_loss_csv(path, column ? column : "");
}

Outcome skip(const char* name) { return {Status::Skip, std::string("set LOSSTAIL_") + name + "_CSV"}; }

bool within_rel(double x, double ref, double rel) { return std::fabs(x - ref) <= rel * std::fabs(ref); }

AdjustedModel weibull_model(double p) {
  return AdjustedModel(DistributionSpec::pareto(1.0, 1.0),
                       UpperAdjustment{DistributionSpec::shifted_weibull(3.0, 25.0, 2.0), p, 3.0});
}

AdjustedModel aon_shaped_model() {
  return AdjustedModel(DistributionSpec::gpd(1.8, 1e4),
                       UpperAdjustment{DistributionSpec::shifted_weibull(8e5, 9e6, 1.9), 0.66, 8e5},
                       LowerAdjustment{pinned_lower_gpd(-0.75, 3500.0), 3500.0});
}

Outcome criterion1() {
  double worst = 0.0;
  double worst_quad = 0.0;
  const ThinningSpec spec{DistributionSpec::exponential(1.0), 1.0};
  for (int i = 0; i < 1000; ++i) {
    const double x = 10.0 * i / 999.0;
    const double closed = thinned_cdf_closed(1.0, 1.0, x);
    worst = std::max(worst, std::fabs(closed - std::pow(1.0 - std::exp(-x), 2)));
    worst_quad = std::max(worst_quad, std::fabs(thinned_cdf(spec, x) - closed));
  }
  return pass_if(worst < 1e-12 && worst_quad < 1e-8,
                 fmt("max identity err %.2e", worst) + fmt(", max quadrature err %.2e", worst_quad));
}

Outcome criterion2() {
  const std::size_t n = 100'000;
  const double crit = oracle::ks_critical_01(n);
  std::vector<std::pair<std::string, AdjustedModel>> models{
      {"p=0", weibull_model(0.0)}, {"p=0.5", weibull_model(0.5)}, {"p=1", weibull_model(1.0)},
      {"two-sided", aon_shaped_model()}};
  bool ok = true;
  std::string detail = fmt("crit %.5f:", crit);
  std::uint64_t seed = 11;
  for (const auto& [name, m] : models) {
    const auto s = sample_mechanism(m, n, seed++);
    const double d = oracle::ks_statistic(s.values(), [&](double x) { return adjusted_cdf(m, x); });
    ok = ok && d < crit;
    detail += " " + name + fmt(" %.5f", d);
  }
  return pass_if(ok, detail);
}

Outcome criterion3() {
  const auto product = [](double p) {
    return AdjustedModel(DistributionSpec::pareto(1.0, 1.0),
                         UpperAdjustment{DistributionSpec::pareto(1.0, 1.0), p, 1.0});
  };
  const std::size_t n = 1'000'000;
  const double g1 = hill_estimate(sample_mechanism(product(1.0), n, 31), n / 100).gamma_hat;
  const double g5 = hill_estimate(sample_mechanism(product(0.5), n, 32), n / 100).gamma_hat;
  return pass_if(g1 >= 0.45 && g1 <= 0.55 && g5 >= 0.9 && g5 <= 1.1,
                 fmt("p=1 gamma %.4f", g1) + fmt(", p=0.5 gamma %.4f", g5));
}

Outcome criterion4() {
  const double lim = transition_probability_limit(weibull_model(0.5), 1e4);
  return pass_if(std::fabs(lim - 0.5) < 1e-6, fmt("limit %.12f", lim));
}

Outcome criterion5() {
  const auto truth = DistributionSpec::gpd(0.65, 600.0);
  const auto family = FamilyTemplate::gpd_excess(0.0);
  MadConfig config;
  config.weighting = Weighting::Normalized;
  std::vector<double> gammas;
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const double g = fit_mad(sample(truth, 9181, seed), family, config).value("gamma");
    gammas.push_back(g);
    worst = std::max(worst, std::fabs(g - 0.65));
  }
  const double bias = oracle::mean(gammas) - 0.65;

  const auto s = sample(truth, 9181, 1);
  const auto a = fit_mad(s, family, config);
  const auto b = fit_mad(s.scaled(1000.0), family, config);
  const double ratio = b.value("sigma") / a.value("sigma");
  const double dgamma = std::fabs(b.value("gamma") - a.value("gamma"));
  const bool ok = worst <= 0.05 && std::fabs(bias) < 0.01 && std::fabs(ratio / 1000.0 - 1.0) < 1e-6 && dgamma < 1e-6;
  return pass_if(ok, fmt("max |err| %.4f", worst) + fmt(", bias %+.4f", bias) + fmt(", sigma ratio %.9f", ratio) +
                         fmt(", |d gamma| %.2e", dgamma));
}

Outcome criterion6() {
  double worst = 0.0;
  for (std::size_t n : {10u, 100u, 1000u}) {
    for (std::size_t i = 1; i <= n; ++i) {
      const double f = static_cast<double>(i) / static_cast<double>(n + 1);
      const LogProb lp{std::log(f), std::log1p(-f)};
      worst = std::max(worst, std::fabs(mad_summand(i, n, lp, Weighting::Normalized) - 1.0));
    }
  }
  return pass_if(worst < 1e-12, fmt("max |summand - 1| %.2e", worst));
}

Outcome criterion7() {
  Rng rng(substream(7, 0));
  std::size_t mismatches = 0;
  for (int t = 0; t < 100'000; ++t) {
    const std::size_t len = 1 + rng.below(60);
    std::vector<double> edf(len), model(len);
    std::vector<bool> ind(len);
    for (std::size_t i = 0; i < len; ++i) {
      edf[i] = rng.uniform();
      model[i] = rng.uniform() < 0.3 ? edf[i] : rng.uniform();
      ind[i] = edf[i] > model[i];
    }
    if (run_lengths(edf, model).m != oracle::longest_run(ind)) ++mismatches;
  }

  const std::size_t trials = 500;
  std::size_t rejections = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    const auto s = sample(DistributionSpec::pareto(1.0, 1.0), 1000, substream(70, t));
    if (pareto_tail_test(s, 50, 2000, substream(71, t)).reject_5pct) ++rejections;
  }
  const double rate = static_cast<double>(rejections) / trials;
  return pass_if(mismatches == 0 && rate >= 0.03 && rate <= 0.07,
                 fmt("scan mismatches %.0f", static_cast<double>(mismatches)) + fmt(", rejection rate %.3f", rate));
}

Outcome criterion8() {
  const auto s = dataset("NORWEGIAN");
  if (!s) return skip("NORWEGIAN");
  const auto family = FamilyTemplate::gpd_excess(499.0);
  const auto ml = fit_gpd_ml(*s, 499.0);
  MadConfig full;
  full.weighting = Weighting::Normalized;
  const auto mad1 = fit_mad(*s, family, full);
  MadConfig upper = full;
  upper.rank_range = RankRange{4182, 9181};
  const auto mad3 = fit_mad(*s, family, upper);
  const auto hill = hill_above(*s, 7000.0);
  const bool ok = std::fabs(ml.value("gamma") - 0.649) <= 0.005 && std::fabs(ml.value("sigma") - 599.96) <= 2.0 &&
                  std::fabs(mad1.value("gamma") - 0.667) <= 0.005 && std::fabs(mad3.value("gamma") - 0.680) <= 0.005 &&
                  std::fabs(hill.gamma_hat - 0.684) <= 0.005 && std::fabs(hill.se - 0.034) <= 0.005;
  return pass_if(ok, fmt("ML %.4f", ml.value("gamma")) + fmt("/%.2f", ml.value("sigma")) +
                         fmt(", MAD I %.4f", mad1.value("gamma")) + fmt(", MAD III %.4f", mad3.value("gamma")) +
                         fmt(", Hill %.4f", hill.gamma_hat) + fmt(" se %.4f", hill.se));
}

struct CaseTest {
  std::size_t k;
  std::size_t m;
  double p;
  double tol;
};

const CaseTest kAon{16, 12, 0.0489, 0.01};
const CaseTest kDanish{27, 23, 0.009, 0.005};
const CaseTest kAsia{14, 11, 0.0371, 0.01};

Outcome criterion9a() {
  bool ok = true;
  std::string detail;
  for (const auto& c : {kAon, kDanish, kAsia}) {
    const double p = run_statistic_tail_probability(c.k, c.m, 10'000, 1);
    ok = ok && std::fabs(p - c.p) <= c.tol;
    detail += fmt("P(m>=%.0f", static_cast<double>(c.m)) + fmt("|k=%.0f)", static_cast<double>(c.k)) +
              fmt(" = %.4f  ", p);
  }
  return pass_if(ok, detail);
}

Outcome criterion9b() {
  const struct {
    const char* name;
    CaseTest c;
  } cases[] = {{"AON", kAon}, {"DANISH", kDanish}, {"ASIA", kAsia}};
  bool ok = true;
  bool any = false;
  std::string detail;
  for (const auto& [name, c] : cases) {
    const auto s = dataset(name);
    if (!s) {
      detail += std::string(name) + " skipped  ";
      continue;
    }
    any = true;
    const auto r = pareto_tail_test(*s, c.k, 10'000, 1);
    ok = ok && r.m == c.m && std::fabs(r.p_value - c.p) <= c.tol;
    detail += std::string(name) + fmt(" m=%.0f", static_cast<double>(r.m)) + fmt(" p=%.4f  ", r.p_value);
  }
  if (!any) return {Status::Skip, "set LOSSTAIL_AON_CSV, LOSSTAIL_DANISH_CSV or LOSSTAIL_ASIA_CSV"};
  return pass_if(ok, detail);
}

struct PipelineReference {
  const char* name;
  cli::AnalysisConfig config;
  // Parameter name, reference value, relative tolerance.
  std::vector<std::tuple<std::string, double, double>> estimates;
  double at_zero;
  double at_one;
};

Outcome check_pipeline(const PipelineReference& ref, std::string& detail) {
  cli::AnalysisConfig c = ref.config;
  const char* path = std::getenv((std::string("LOSSTAIL_") + ref.name + "_CSV").c_str());
  const char* column = std::getenv((std::string("LOSSTAIL_") + ref.name + "_COLUMN").c_str());
  c.input = path;
  if (column) c.column = column;
  c.boot_reps = 1000;
  c.out = std::filesystem::temp_directory_path() / (std::string("losstail_acceptance_") + ref.name);
  const Json report = cli::cmd_bootstrap(c).report;
  std::filesystem::remove_all(c.out);

  bool ok = true;
  detail += std::string(ref.name) + ":";
  for (const auto& [key, value, rel] : ref.estimates) {
    double est = report["estimate"][key].get<double>();
    if (key == "base.alpha") est = 1.0 / est;
    ok = ok && within_rel(est, value, rel);
    detail += " " + key + fmt(" %.4g", est);
  }
  const double z = report["fraction_p_at_zero"].get<double>();
  const double o = report["fraction_p_at_one"].get<double>();
  ok = ok && std::fabs(z - ref.at_zero) <= 0.01 && std::fabs(o - ref.at_one) <= 0.01;
  detail += fmt(" p0 %.3f", z) + fmt(" p1 %.3f  ", o);
  return {ok ? Status::Pass : Status::Fail, ""};
}

Outcome criterion10() {
  cli::AnalysisConfig aon;
  aon.base = "gpd";
  aon.x_lower = 3500.0;
  aon.x_upper = 8e5;
  cli::AnalysisConfig danish;
  danish.base = "pareto";
  danish.threshold = 999'999.0;
  danish.x_lower = 2.5e6;
  danish.x_upper = 1.5e7;
  // base.alpha is reported as gamma = 1/alpha.
  const PipelineReference refs[] = {
      {"AON",
       aon,
       {{"base.gamma", 1.792, 0.05},
        {"base.sigma", 1.122e7, 0.05},
        {"p_upper", 0.661, 0.05},
        {"upper.beta", 1.898, 0.05},
        {"upper.sigma", 9.144e6, 0.10},
        {"lower.gamma", -0.750, 0.05}},
       0.005,
       0.028},
      {"DANISH",
       danish,
       {{"base.alpha", 0.760, 0.05},
        {"p_upper", 0.404, 0.05},
        {"upper.beta", 4.842, 0.05},
        {"upper.sigma", 2.490e7, 0.10},
        {"lower.gamma", -0.435, 0.05}},
       0.010,
       0.016},
  };
  bool ok = true;
  bool any = false;
  std::string detail;
  for (const auto& ref : refs) {
    const char* path = std::getenv((std::string("LOSSTAIL_") + ref.name + "_CSV").c_str());
    if (!path || !*path) {
      detail += std::string(ref.name) + " skipped  ";
      continue;
    }
    any = true;
    ok = check_pipeline(ref, detail).status == Status::Pass && ok;
  }
  if (!any) return {Status::Skip, "set LOSSTAIL_AON_CSV or LOSSTAIL_DANISH_CSV"};
  return pass_if(ok, detail);
}

}  // namespace

int main() {
  run("1", "thinning / max-principle identity", 1.0, criterion1);
  run("2", "mechanism equivalence (KS)", 30.0, criterion2);
  run("3", "tail-index composition", 60.0, criterion3);
  run("4", "asymptotic mixing weight", 1.0, criterion4);
  run("5", "MAD recovery and scale invariance", 60.0, criterion5);
  run("6", "normalized summand calibration", 1.0, criterion6);
  run("7", "run test correctness and calibration", 300.0, criterion7);
  run("8", "Norwegian GPD fits", 600.0, criterion8);
  run("9a", "run-test null tail probabilities", 60.0, criterion9a);
  run("9b", "case-study run tests", 300.0, criterion9b);
  run("10", "case-study pipelines and bootstrap", 3600.0, criterion10);
  std::printf("%s\n", failures == 0 ? "ALL CRITERIA PASSED OR SKIPPED" : "SOME CRITERIA FAILED");
  return failures == 0 ? 0 : 1;
}
