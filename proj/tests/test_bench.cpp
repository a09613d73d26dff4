#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "zoo/bench.hpp"

using namespace zoo;
using namespace zoo::bench;

namespace {

BenchConfig small_config(std::vector<std::string> workloads) {
  BenchConfig cfg;
  cfg.workloads = std::move(workloads);
  cfg.map_sizes = {100, 1000};
  cfg.fold_sizes = {100, 1000};
  cfg.conv_sides = {4, 8};
  cfg.trials = 3;
  cfg.warmup = 1;
  return cfg;
}

std::vector<BenchResult> synthetic_series(double scale, double exponent) {
  std::vector<BenchResult> rows;
  for (std::size_t n : {1000, 10000, 100000, 1000000}) {
    BenchResult r;
    r.workload = "synthetic";
    r.param = std::to_string(n);
    r.trials = 10;
    r.mean_ns = scale * std::pow(double(n), exponent);
    r.std_ns = 0.0;
    rows.push_back(r);
  }
  return rows;
}

}  // namespace

TEST_CASE("run_suite emits rows in config order with the trial count") {
  auto results = run_suite(small_config({"map", "fold"}));
  REQUIRE(results.size() == 4);
  CHECK(results[0].workload == "map");
  CHECK(results[0].param == "100");
  CHECK(results[1].param == "1000");
  CHECK(results[2].workload == "fold");
  for (const auto& r : results) {
    CHECK(r.trials == 3);
    CHECK(r.mean_ns > 0.0);
    CHECK(r.std_ns >= 0.0);
  }
}

TEST_CASE("gradient descent workloads record their starting point") {
  auto results = run_suite(small_config({"gd_cubic", "gd_sin"}));
  REQUIRE(results.size() == 2);
  CHECK(results[0].param == "4");
  CHECK(results[1].param == "5");
}

TEST_CASE("the toy convolution workload verifies against the naive loop") {
  auto results = run_suite(small_config({"conv_toy"}));
  CHECK(results.size() == 2);
}

TEST_CASE("unknown workloads are rejected") {
  CHECK_THROWS_AS(run_suite(small_config({"map", "sort"})),
                  UnknownWorkloadError);
}

TEST_CASE("the CSV has the pinned header and one line per row") {
  auto results = run_suite(small_config({"map"}));
  std::string csv = results_csv(results);
  CHECK(csv.starts_with("workload,param,trials,mean_ns,std_ns\n"));
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);

  CHECK(results_csv({}) == "workload,param,trials,mean_ns,std_ns\n");
}

TEST_CASE("scaling_fit recovers a linear exponent exactly") {
  auto fit = scaling_fit(synthetic_series(2.5, 1.0));
  CHECK(fit.slope == Catch::Approx(1.0).margin(1e-9));
  CHECK(fit.r2 == Catch::Approx(1.0).margin(1e-9));

  auto quad = scaling_fit(synthetic_series(0.01, 2.0));
  CHECK(quad.slope == Catch::Approx(2.0).margin(1e-9));
}

TEST_CASE("a constant-time series fits a flat slope") {
  auto rows = synthetic_series(1.0, 0.0);  // every mean equal
  auto fit = scaling_fit(rows);
  CHECK(fit.slope >= -0.1);
  CHECK(fit.slope <= 0.1);
}

TEST_CASE("scaling_fit rejects thin or non-numeric data") {
  auto rows = synthetic_series(1.0, 1.0);
  rows.resize(2);
  CHECK_THROWS_AS(scaling_fit(rows), InsufficientDataError);

  std::vector<BenchResult> same_size(3, rows[0]);
  CHECK_THROWS_AS(scaling_fit(same_size), InsufficientDataError);

  // three sizes inside one decade
  std::vector<BenchResult> narrow;
  for (std::size_t n : {100, 200, 400}) {
    BenchResult r;
    r.workload = "w";
    r.param = std::to_string(n);
    r.trials = 3;
    r.mean_ns = double(n);
    narrow.push_back(r);
  }
  CHECK_THROWS_AS(scaling_fit(narrow), InsufficientDataError);

  std::vector<BenchResult> text = synthetic_series(1.0, 1.0);
  text[0].param = "init=4";
  CHECK_THROWS_AS(scaling_fit(text), InsufficientDataError);
}

TEST_CASE("map timings are monotone nondecreasing over the size sweep") {
  BenchConfig cfg;
  cfg.workloads = {"map"};
  cfg.map_sizes = {1000, 10000, 100000, 1000000};  // one row per decade
  cfg.trials = 5;
  cfg.warmup = 2;
  auto results = run_suite(cfg);
  REQUIRE(results.size() == 4);
  for (std::size_t i = 1; i < results.size(); ++i)
    CHECK(results[i].mean_ns >= results[i - 1].mean_ns);
}

TEST_CASE("the SVG plot contains a series per workload") {
  auto svg = plot_svg(synthetic_series(2.5, 1.0));
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("polyline") != std::string::npos);
  CHECK(svg.find("synthetic") != std::string::npos);

  CHECK(plot_svg({}).find("<svg") != std::string::npos);
}
