#include "sharpcs/config.hpp"

#include <initializer_list>
#include <set>

#include "json.hpp"

#include "sharpcs/error.hpp"
#include "sharpcs/textio.hpp"

namespace sharpcs {

namespace {

using nlohmann::json;

void check_keys(const json& object, std::string_view where, std::initializer_list<std::string_view> allowed) {
  if (!object.is_object()) fail(ErrorCode::kSchema, "config: '" + std::string(where) + "' must be an object");
  const std::set<std::string_view> keys(allowed);
  for (const auto& [key, value] : object.items()) {
    if (!keys.contains(key)) {
      fail(ErrorCode::kSchema, "config: unknown key '" + std::string(where) + (where.empty() ? "" : ".") + key + "'");
    }
  }
}

template <class T>
void read(const json& object, const char* key, T& target, std::string_view where) {
  const auto it = object.find(key);
  if (it == object.end()) return;
  try {
    if constexpr (std::is_same_v<T, bool>) {
      if (!it->is_boolean()) throw json::type_error::create(302, "expected a boolean", nullptr);
    } else if constexpr (std::is_integral_v<T>) {
      if (!it->is_number_unsigned()) throw json::type_error::create(302, "expected a nonnegative integer", nullptr);
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!it->is_number()) throw json::type_error::create(302, "expected a number", nullptr);
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!it->is_string()) throw json::type_error::create(302, "expected a string", nullptr);
    }
    target = it->get<T>();
  } catch (const json::exception&) {
    fail(ErrorCode::kSchema, "config: '" + std::string(where) + (where.empty() ? "" : ".") + key +
                                 "' has the wrong type");
  }
}

std::string_view schedule_name(MuSchedule s) { return s == MuSchedule::kFixed ? "fixed" : "geometric"; }

}  // namespace

ExperimentConfig parse_config(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::kParse, std::string("config: ") + e.what());
  }
  ExperimentConfig c;
  check_keys(doc, "", {"experiment", "seed", "threads", "out_dir", "record_wall_time", "instance",
                       "solver", "condition", "comparison"});
  read(doc, "experiment", c.experiment, "");
  read(doc, "seed", c.seed, "");
  read(doc, "threads", c.threads, "");
  read(doc, "out_dir", c.out_dir, "");
  read(doc, "record_wall_time", c.record_wall_time, "");

  if (doc.contains("instance")) {
    const json& o = doc["instance"];
    check_keys(o, "instance", {"p", "k", "n_values", "delta", "trials", "exact_tolerance"});
    read(o, "p", c.p, "instance");
    read(o, "k", c.k, "instance");
    if (o.contains("n_values")) {
      const json& nv = o["n_values"];
      if (!nv.is_array()) fail(ErrorCode::kSchema, "config: 'instance.n_values' must be an array");
      c.n_values.clear();
      for (const auto& v : nv) {
        if (!v.is_number_unsigned()) {
          fail(ErrorCode::kSchema, "config: 'instance.n_values' entries must be nonnegative integers");
        }
        c.n_values.push_back(v.get<std::size_t>());
      }
    }
    read(o, "delta", c.delta, "instance");
    read(o, "trials", c.trials, "instance");
    read(o, "exact_tolerance", c.exact_tolerance, "instance");
  }

  if (doc.contains("solver")) {
    const json& o = doc["solver"];
    check_keys(o, "solver", {"restart", "mu_schedule", "mu0", "target_gap", "stall_tolerance", "monotone"});
    std::string restart = to_string(c.solver.plan);
    read(o, "restart", restart, "solver");
    try {
      c.solver.plan = parse_restart_plan(restart);
    } catch (const Error& e) {
      fail(ErrorCode::kSchema, std::string("config: 'solver.restart': ") + e.what());
    }
    std::string schedule(schedule_name(c.solver.schedule));
    read(o, "mu_schedule", schedule, "solver");
    if (schedule == "geometric") {
      c.solver.schedule = MuSchedule::kGeometric;
    } else if (schedule == "fixed") {
      c.solver.schedule = MuSchedule::kFixed;
    } else {
      fail(ErrorCode::kSchema, "config: 'solver.mu_schedule' must be 'geometric' or 'fixed'");
    }
    read(o, "mu0", c.solver.mu0, "solver");
    read(o, "target_gap", c.solver.target_gap, "solver");
    read(o, "stall_tolerance", c.solver.stall_tolerance, "solver");
    read(o, "monotone", c.solver.monotone, "solver");
  }

  if (doc.contains("condition")) {
    const json& o = doc["condition"];
    check_keys(o, "condition",
               {"eps1", "eps2", "gamma", "max_iters", "tol", "restarts", "power_iters", "trials"});
    read(o, "eps1", c.power.eps1, "condition");
    read(o, "eps2", c.power.eps2, "condition");
    read(o, "gamma", c.power.gamma, "condition");
    read(o, "max_iters", c.power.max_iters, "condition");
    read(o, "tol", c.power.tol, "condition");
    read(o, "restarts", c.power.restarts, "condition");
    read(o, "power_iters", c.power.power_iters, "condition");
    read(o, "trials", c.condition_trials, "condition");
  }

  if (doc.contains("comparison")) {
    const json& o = doc["comparison"];
    check_keys(o, "comparison", {"budget", "cells", "seeds", "nested"});
    read(o, "budget", c.budget, "comparison");
    read(o, "nested", c.nested_designs, "comparison");
    read(o, "seeds", c.comparison_seeds, "comparison");
    if (o.contains("cells")) {
      const json& cells = o["cells"];
      if (!cells.is_array()) fail(ErrorCode::kSchema, "config: 'comparison.cells' must be an array");
      c.cells.clear();
      for (const auto& cell : cells) {
        if (!cell.is_array() || cell.size() != 2 || !cell[0].is_number_unsigned() ||
            !cell[1].is_number_unsigned()) {
          fail(ErrorCode::kSchema, "config: 'comparison.cells' entries must be [t, tau] pairs");
        }
        c.cells.emplace_back(cell[0].get<std::size_t>(), cell[1].get<std::size_t>());
      }
    }
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) { return parse_config(read_text_file(path)); }

std::string config_to_json(const ExperimentConfig& c) {
  json cells = json::array();
  for (const auto& [t, tau] : c.cells) cells.push_back({t, tau});
  const json doc = {
      {"experiment", c.experiment},
      {"seed", c.seed},
      {"threads", c.threads},
      {"out_dir", c.out_dir},
      {"record_wall_time", c.record_wall_time},
      {"instance",
       {{"p", c.p},
        {"k", c.k},
        {"n_values", c.n_values},
        {"delta", c.delta},
        {"trials", c.trials},
        {"exact_tolerance", c.exact_tolerance}}},
      {"solver",
       {{"restart", to_string(c.solver.plan)},
        {"mu_schedule", schedule_name(c.solver.schedule)},
        {"mu0", c.solver.mu0},
        {"target_gap", c.solver.target_gap},
        {"stall_tolerance", c.solver.stall_tolerance},
        {"monotone", c.solver.monotone}}},
      {"condition",
       {{"eps1", c.power.eps1},
        {"eps2", c.power.eps2},
        {"gamma", c.power.gamma},
        {"max_iters", c.power.max_iters},
        {"tol", c.power.tol},
        {"restarts", c.power.restarts},
        {"power_iters", c.power.power_iters},
        {"trials", c.condition_trials}}},
      {"comparison", {{"budget", c.budget}, {"cells", cells}, {"seeds", c.comparison_seeds}, {"nested", c.nested_designs}}},
  };
  return doc.dump(2) + "\n";
}

}  // namespace sharpcs
