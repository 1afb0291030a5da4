#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <sstream>

#include "doctest.h"
#include "sharpcs/config.hpp"
#include "sharpcs/csv.hpp"
#include "sharpcs/error.hpp"
#include "sharpcs/experiments.hpp"
#include "sharpcs/report.hpp"
#include "sharpcs/textio.hpp"
#include "xml_check.hpp"

using namespace sharpcs;
namespace fs = std::filesystem;

namespace {

ErrorCode code_of(auto&& fn, std::string* message = nullptr) {
  try {
    fn();
  } catch (const Error& e) {
    if (message) *message = e.what();
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::kInternal;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("sharpcs_io_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::vector<TrialRecord> sample_records() {
  std::vector<TrialRecord> out;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t n : {10, 20}) {
    for (std::size_t t = 0; t < 3; ++t) {
      TrialRecord r;
      r.seed = 1000 + n * 10 + t;
      r.p = 50;
      r.n = n;
      r.k = 3;
      r.trial = t;
      r.delta = 0.01;
      r.err_l2 = n == 10 ? 0.3 + 0.1 * static_cast<double>(t) : 1e-9 * static_cast<double>(t + 1);
      r.exact = r.err_l2 < 1e-5;
      r.iters = 100 * (t + 1) + n;
      r.kappa = 2.5 + static_cast<double>(t) / 3.0;
      if (t < 2) {
        r.has_condition = true;
        r.infeasible = n == 10 && t == 0;
        r.mu_hat = r.infeasible ? 1e-12 : 0.1 / static_cast<double>(t + 1);
        r.c_lower = r.infeasible ? std::numeric_limits<double>::infinity() : 1.0 / r.mu_hat;
      } else {
        r.mu_hat = r.c_lower = nan;
      }
      out.push_back(r);
    }
  }
  return out;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ' ')) {
    if (item.empty()) continue;
    out.push_back(item == "nan" ? std::numeric_limits<double>::quiet_NaN() : std::strtod(item.c_str(), nullptr));
  }
  return out;
}

}  // namespace

TEST_CASE("matrix text format round trip") {
  const DenseMatrix a(2, 3, {1.0, -2.5, 1e-300, 0.1, 3.0, -0.0});
  const auto text = format_matrix(a);
  CHECK(text.rfind("2 3\n", 0) == 0);
  CHECK(parse_matrix(text) == a);
  const auto dir = scratch("matrix");
  write_matrix_file(dir / "a.txt", a);
  CHECK(read_matrix_file(dir / "a.txt") == a);
  write_vector_file(dir / "v.txt", Vector{1.0, 2.0});
  CHECK(read_vector_file(dir / "v.txt") == Vector{1.0, 2.0});
}

TEST_CASE("matrix parse errors carry line and column") {
  std::string message;
  CHECK(code_of([] { parse_matrix("2 2\n1 2\n3 x\n", "m.txt"); }, &message) == ErrorCode::kParse);
  CHECK(message.find("m.txt:3:3") != std::string::npos);
  CHECK(code_of([] { parse_matrix("2 2\n1 2 3\n"); }) == ErrorCode::kParse);
  CHECK(code_of([] { parse_matrix("2 2\n1 2 3 4 5\n"); }) == ErrorCode::kParse);
  CHECK(code_of([] { parse_matrix("0 2\n"); }) == ErrorCode::kParse);
  CHECK(code_of([] { parse_matrix(""); }) == ErrorCode::kParse);
  CHECK(code_of([] { parse_matrix("1 1\nnan\n"); }) == ErrorCode::kParse);
  CHECK(code_of([] { read_matrix_file("/nonexistent/dir/a.txt"); }) == ErrorCode::kIo);
}

TEST_CASE("doubles round trip with 17 digits") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-17, 6.02214076e23, 5e-324}) {
    const auto s = format_double(v);
    CHECK(std::strtod(s.c_str(), nullptr) == v);
  }
}

TEST_CASE("trial csv round trip") {
  const auto records = sample_records();
  const auto text = format_trials_csv(records, "2026-01-01T00:00:00Z");
  CHECK(text.rfind("# generated: 2026-01-01T00:00:00Z\nseed,p,n,k,delta,err_l2,exact,iters,mu_hat,c_lower,kappa,infeasible_flag,wall_ms\n", 0) == 0);
  const auto body = text.substr(text.find("wall_ms\n"));
  CHECK(body.find("nan") == std::string::npos);
  CHECK(body.find("inf") == std::string::npos);
  const auto back = parse_trials_csv(text);
  REQUIRE(back.size() == records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(back[i].seed == records[i].seed);
    CHECK(back[i].n == records[i].n);
    CHECK(back[i].trial == records[i].trial);
    CHECK(back[i].err_l2 == records[i].err_l2);
    CHECK(back[i].exact == records[i].exact);
    CHECK(back[i].iters == records[i].iters);
    CHECK(back[i].has_condition == records[i].has_condition);
    CHECK(back[i].infeasible == records[i].infeasible);
    CHECK(back[i].kappa == records[i].kappa);
    if (records[i].has_condition && !records[i].infeasible) CHECK(back[i].c_lower == records[i].c_lower);
  }
  CHECK(format_trials_csv(back, "2026-01-01T00:00:00Z") == text);
}

TEST_CASE("trial csv schema errors name the column") {
  const auto text = format_trials_csv(sample_records(), "t");
  std::string bad = text;
  bad.replace(bad.find("kappa"), 5, "kapa");
  std::string message;
  CHECK(code_of([&] { parse_trials_csv(bad); }, &message) == ErrorCode::kSchema);
  CHECK(message.find("kappa") != std::string::npos);
  CHECK(message.find("kapa") != std::string::npos);
  CHECK(code_of([] { parse_trials_csv("# only a comment\n"); }) == ErrorCode::kSchema);
  std::string short_row = text;
  short_row += "1,2,3\n";
  CHECK(code_of([&] { parse_trials_csv(short_row); }) == ErrorCode::kParse);
}

TEST_CASE("summary statistics") {
  CHECK(geometric_mean(std::vector<double>{1.0, 100.0}) == doctest::Approx(10.0));
  std::vector<double> twenty;
  for (int i = 20; i >= 1; --i) twenty.push_back(i);
  CHECK(nearest_rank_percentile(twenty, 10) == 2.0);
  CHECK(nearest_rank_percentile(twenty, 90) == 18.0);
  CHECK(nearest_rank_percentile(std::vector<double>{5.0}, 10) == 5.0);
  CHECK_THROWS_AS(nearest_rank_percentile({}, 50), Error);
  CHECK_THROWS_AS(geometric_mean(std::vector<double>{1.0, 0.0}), Error);
}

TEST_CASE("summarize aggregates per n") {
  const auto records = sample_records();
  const std::vector<std::size_t> n_values{10, 20, 30};
  const auto rows = summarize(records, n_values);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].n == 10);
  CHECK(rows[0].count == 3);
  CHECK(rows[0].mean_err == doctest::Approx(0.4));
  CHECK(rows[0].prob_exact == 0.0);
  CHECK(rows[0].excluded == 2);  // one infeasible, one without an estimate
  CHECK(rows[0].gmean_clower == doctest::Approx(20.0));
  CHECK(rows[1].prob_exact == 1.0);
  CHECK(rows[1].gmean_clower == doctest::Approx(std::sqrt(10.0 * 20.0)));
  CHECK(rows[1].p10_clower <= rows[1].p90_clower);
  CHECK(rows[1].gmean_iters == doctest::Approx(std::cbrt(120.0 * 220.0 * 320.0)));
  CHECK(rows[2].count == 0);
  CHECK(std::isnan(rows[2].mean_err));

  const std::vector<TrialRecord> one(records.begin() + 4, records.begin() + 5);
  const auto single = summarize(one);
  REQUIRE(single.size() == 1);
  CHECK(single[0].mean_err == one[0].err_l2);
  CHECK(single[0].p10_err == one[0].err_l2);
  CHECK(single[0].p90_err == one[0].err_l2);
  CHECK(single[0].gmean_clower == doctest::Approx(one[0].c_lower));
  CHECK(single[0].gmean_iters == doctest::Approx(static_cast<double>(one[0].iters)));
}

TEST_CASE("summary csv round trip") {
  const std::vector<std::size_t> n_values{10, 20, 30};
  const auto rows = summarize(sample_records(), n_values);
  const auto text = format_summary_csv(rows, "t");
  CHECK(text.find("\nn,mean_err,prob_exact,gmean_iters,gmean_clower,p10_clower,p90_clower,excluded\n") != std::string::npos);
  const auto back = parse_summary_csv(text);
  REQUIRE(back.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(back[i].n == rows[i].n);
    CHECK(back[i].excluded == rows[i].excluded);
    if (std::isfinite(rows[i].gmean_clower)) CHECK(back[i].gmean_clower == rows[i].gmean_clower);
    else CHECK(std::isnan(back[i].gmean_clower));
  }
  CHECK(format_summary_csv(back, "t") == text);
}

TEST_CASE("error bound csv flags violations") {
  auto records = sample_records();
  for (auto& r : records) {
    r.condition_converged = true;
    r.err_noisy = 0.01;
    r.error_bound = r.infeasible ? std::numeric_limits<double>::infinity() : 1.0;
  }
  records[1].err_noisy = 2.0;
  const auto text = format_error_bound_csv(records, "t");
  std::stringstream ss(text);
  std::string line;
  std::getline(ss, line);
  std::getline(ss, line);
  CHECK(line == "seed,n,trial,err_noisy,bound,checked,violation");
  int violations = 0, checked = 0;
  while (std::getline(ss, line)) {
    violations += line.back() == '1';
    checked += line[line.size() - 3] == '1';
  }
  CHECK(violations == 1);
  CHECK(checked == 3);
}

TEST_CASE("trace csv marks restart starts") {
  SolverTrace trace;
  trace.l1 = {3, 2, 1, 0.5};
  trace.smoothed = {2.9, 1.9, 0.9, 0.4};
  trace.residual = {0, 0, 0, 0};
  trace.restart_starts = {0, 2};
  const auto text = format_trace_csv(trace, "t");
  CHECK(text == "# generated: t\niteration,l1,smoothed,residual,restart\n1,3,2.8999999999999999,0,1\n2,2,1.8999999999999999,0,0\n3,1,0.90000000000000002,0,1\n4,0.5,0.40000000000000002,0,0\n");
}

TEST_CASE("config defaults round trip") {
  const ExperimentConfig defaults;
  const auto json = config_to_json(defaults);
  const auto back = parse_config(json);
  CHECK(config_to_json(back) == json);
  CHECK(back.p == defaults.p);
  CHECK(back.n_values == defaults.n_values);
  CHECK(back.cells == defaults.cells);
  CHECK(back.power.power_iters == defaults.power.power_iters);
  CHECK(to_string(back.solver.plan) == to_string(defaults.solver.plan));
  const auto empty = parse_config("{}");
  CHECK(config_to_json(empty) == json);
}

TEST_CASE("config rejects unknown keys and wrong types") {
  std::string message;
  CHECK(code_of([] { parse_config(R"({"sed": 3})"); }, &message) == ErrorCode::kSchema);
  CHECK(message.find("sed") != std::string::npos);
  CHECK(code_of([] { parse_config(R"({"instance": {"p": "ten"}})"); }) == ErrorCode::kSchema);
  CHECK(code_of([] { parse_config(R"({"instance": {"pp": 1}})"); }) == ErrorCode::kSchema);
  CHECK(code_of([] { parse_config(R"({"instance": {"p": -1}})"); }) == ErrorCode::kSchema);
  CHECK(code_of([] { parse_config(R"({"solver": {"mu_schedule": "cubic"}})"); }) == ErrorCode::kSchema);
  CHECK(code_of([] { parse_config(R"({"solver": {"restart": "fixed:t=1"}})"); }) == ErrorCode::kSchema);
  CHECK(code_of([] { parse_config(R"({"comparison": {"cells": [[1, 2, 3]]}})"); }) == ErrorCode::kSchema);
  CHECK(code_of([] { parse_config("{not json"); }) == ErrorCode::kParse);
  CHECK(code_of([] { parse_config("[1, 2]"); }) == ErrorCode::kSchema);
}

TEST_CASE("config values are read") {
  const auto c = parse_config(R"({
    "experiment": "restart-comparison", "seed": 9, "threads": 2, "out_dir": "x",
    "instance": {"p": 40, "k": 2, "n_values": [10, 20], "delta": 0.5, "trials": 3},
    "solver": {"restart": "grid:t0=10,tau=5", "mu_schedule": "fixed", "target_gap": 1e-4},
    "condition": {"restarts": 2, "power_iters": 100, "trials": 1},
    "comparison": {"budget": 100, "cells": [[100, 1], [10, 10]], "seeds": 2, "nested": true}
  })");
  CHECK(c.experiment == "restart-comparison");
  CHECK(c.seed == 9);
  CHECK(c.threads == 2);
  CHECK(c.p == 40);
  CHECK(c.n_values == std::vector<std::size_t>{10, 20});
  CHECK(c.solver.plan.mode == RestartMode::kDoublingGrid);
  CHECK(c.solver.schedule == MuSchedule::kFixed);
  CHECK(c.power.restarts == 2);
  CHECK(c.condition_trials == 1);
  CHECK(c.cells.size() == 2);
  CHECK(c.nested_designs);
  CHECK_NOTHROW(validate(c));
  ExperimentConfig bad = c;
  bad.cells.push_back({7, 7});
  CHECK(code_of([&] { validate(bad); }) == ErrorCode::kInvalidArgument);
  bad = c;
  bad.n_values.clear();
  CHECK(code_of([&] { validate(bad); }) == ErrorCode::kInvalidArgument);
  bad = c;
  bad.n_values = {41};
  CHECK(code_of([&] { validate(bad); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("svg output is well formed and carries the summary values") {
  const auto records = sample_records();
  const auto plots = sweep_plots(records, ReportOptions{});
  REQUIRE(plots.size() == 4);
  const auto summary = summarize(records);
  for (const auto& plot : plots) {
    const auto svg = render_svg(plot);
    std::vector<xmlcheck::Element> elements;
    CHECK(xmlcheck::parse(svg, &elements).empty());
    REQUIRE_FALSE(elements.empty());
    CHECK(elements.front().name == "svg");
    std::map<std::string, std::vector<double>> series;
    for (const auto& el : elements) {
      const auto it = el.attributes.find("data-series");
      if (it != el.attributes.end()) series[it->second] = parse_list(el.attributes.at("data-y"));
    }
    REQUIRE(series.count("mean"));
    const auto& mean = series["mean"];
    REQUIRE(mean.size() == summary.size());
    for (std::size_t i = 0; i < summary.size(); ++i) {
      double expected = 0;
      if (plot.title.find("rror") != std::string::npos) expected = summary[i].mean_err;
      else if (plot.title.find("robab") != std::string::npos) expected = summary[i].prob_exact;
      else if (plot.title.find("terat") != std::string::npos) expected = summary[i].gmean_iters;
      else expected = summary[i].gmean_clower;
      if (std::isnan(expected)) CHECK(std::isnan(mean[i]));
      else CHECK(mean[i] == expected);
    }
  }
}

TEST_CASE("render report writes four files") {
  const auto dir = scratch("report");
  const auto paths = render_report(sample_records(), dir);
  REQUIRE(paths.size() == 4);
  for (const char* name : {"error.svg", "probability.svg", "iterations.svg", "condition.svg"}) {
    CHECK(fs::exists(dir / name));
    CHECK(xmlcheck::parse(read_text_file(dir / name)).empty());
  }
}

TEST_CASE("svg escapes text and handles all-NaN series") {
  LinePlot plot;
  plot.title = "a < b & c";
  plot.x_label = "n";
  plot.y_label = "\"y\"";
  plot.log_y = true;
  plot.x = {1, 2, 3};
  plot.series.push_back({"mean", {std::nan(""), std::nan(""), std::nan("")}});
  plot.series.push_back({"p10", {1e-3, -1.0, 10}});
  const auto svg = render_svg(plot);
  CHECK(xmlcheck::parse(svg).empty());
}
