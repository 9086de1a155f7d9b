#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "losstail/error.hpp"
#include "losstail/json_io.hpp"

using namespace losstail;

TEST_CASE("distribution round trip") {
  for (const auto& spec : {DistributionSpec::pareto(1.25, 3.0), DistributionSpec::gpd(-0.75, 2625.0, 0.0),
                           DistributionSpec::stepped_pareto(1.0, 1.42, 1.0, 11.0, 52.0)}) {
    CHECK(distribution_from_json(to_json(spec)) == spec);
  }
  const auto j = to_json(DistributionSpec::shifted_weibull(3.0, 25.0, 2.0));
  CHECK(j["family"] == "shifted_weibull");
  CHECK(j["params"].size() == 3);
  CHECK_THROWS(distribution_from_json(Json{{"family", "pareto"}, {"params", {1.0}}}));
  CHECK_THROWS(distribution_from_json(Json{{"family", "cauchy"}, {"params", {1.0}}}));
}

TEST_CASE("model round trip") {
  const AdjustedModel m(DistributionSpec::gpd(1.792, 1000.0),
                        UpperAdjustment{DistributionSpec::shifted_weibull(8e5, 9.144e6, 1.898), 0.661, 8e5},
                        LowerAdjustment{pinned_lower_gpd(-0.75, 3500.0), 3500.0});
  const auto j = to_json(m);
  CHECK(j["upper"]["p_upper"] == 0.661);
  CHECK(j["lower"]["x_lower"] == 3500.0);
  CHECK(model_from_json(j) == m);
  // Text round trip keeps every bit.
  CHECK(model_from_json(Json::parse(dump_canonical(j))) == m);

  const AdjustedModel plain(DistributionSpec::exponential(2.0));
  CHECK_FALSE(to_json(plain).contains("upper"));
  CHECK(model_from_json(to_json(plain)) == plain);

  Json bad = j;
  bad["upper"]["p_upper"] = 1.5;
  CHECK_THROWS_AS(model_from_json(bad), InputError);
  CHECK_THROWS_AS(model_from_json(Json{{"upper", j["upper"]}}), InputError);
}

TEST_CASE("canonical dump") {
  const Json j{{"zeta", 0.1}, {"alpha", 1}, {"mid", {{"b", 1.0 / 3.0}, {"a", true}}}, {"bad", std::nan("")}};
  const std::string text = dump_canonical(j);
  CHECK(text.find("\"alpha\"") < text.find("\"bad\""));
  CHECK(text.find("\"bad\"") < text.find("\"mid\""));
  CHECK(text.find("\"a\"") < text.find("\"b\""));
  CHECK(text.find("0.10000000000000001") != std::string::npos);
  CHECK(text.find("0.33333333333333331") != std::string::npos);
  CHECK(text.find("\"bad\": null") != std::string::npos);
  CHECK(text.find("\"alpha\": 1") != std::string::npos);
  CHECK(dump_canonical(Json::parse(text)) == text);
}

TEST_CASE("atomic writes") {
  const auto dir = std::filesystem::temp_directory_path() / "losstail_json_io_test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  const auto path = dir / "out.json";
  write_file_atomic(path, "first\n");
  write_file_atomic(path, "second\n");
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == "second\n");
  std::size_t files = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir)) files += e.is_regular_file();
  CHECK(files == 1);
  std::filesystem::remove_all(dir);
}
