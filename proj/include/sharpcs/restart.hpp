#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>

#include "sharpcs/smoothing.hpp"

namespace sharpcs {

enum class RestartMode { kFixed, kDoublingGrid };

/// Inner iterations per restart and number of restarts. In doubling-grid mode
/// `t` is the smallest grid value and t * tau is the budget of every sweep.
struct RestartPlan {
  std::size_t t = 100;
  std::size_t tau = 10;
  RestartMode mode = RestartMode::kFixed;

  std::size_t budget() const { return t * tau; }
};

/// Parses "fixed:t=100,tau=10" or "grid:t0=50,tau=20" (tau counts t0-sized
/// chunks, so the sweep budget is t0 * tau).
RestartPlan parse_restart_plan(std::string_view spec);
std::string to_string(const RestartPlan& plan);

/// NSP constant implied by the half-diameter bound: 1 / (1 - sqrt(k_T / k_D)).
double nsp_constant_from_diameter(double k_true, double k_diameter);

/// Sharpness coefficient (2 - C) / C of the l1 optimum.
double sharpness_constant(double nsp_constant);

/// Restart length ceil(3 e sqrt(p) C / (2 - C)) minimizing the linear-rate bound.
std::size_t optimal_inner_iterations(double nsp_constant, std::size_t p);

enum class MuSchedule { kFixed, kGeometric };

struct RestartOptions {
  MuSchedule schedule = MuSchedule::kGeometric;
  /// Lower bound on the smoothing level under the geometric schedule.
  double mu_floor = 1e-15;
  bool monotone = false;
  /// Stop early once ||y_i||_1 changes by less than this (relative) across a restart.
  double stall_tolerance = 1e-12;
  /// Overrides the schedule when set: smoothing for restart i started at y.
  std::function<double(std::span<const double> y, std::size_t restart)> mu_rule;
};

struct RestartResult {
  Vector y;
  SolverTrace trace;
  std::size_t restarts_run = 0;
  bool stalled = false;
  /// Restart length that produced `y` (the winning grid value in grid mode).
  std::size_t t_used = 0;
  /// Inner iterations spent, including discarded grid sweeps.
  std::size_t total_iterations = 0;
};

/// Restart scheme y_i = A(y_{i-1}, t) around nesterov_solve. y0 must be feasible.
RestartResult restart_solve(const FeasibleSet& set, std::span<const double> y0,
                            const RestartPlan& plan, double mu0,
                            const RestartOptions& options = {});

}  // namespace sharpcs
