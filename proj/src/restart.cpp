#include "sharpcs/restart.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>

#include "sharpcs/error.hpp"

namespace sharpcs {

namespace {

std::size_t parse_field(std::string_view item, std::string_view key) {
  const auto eq = item.find('=');
  if (eq == std::string_view::npos || item.substr(0, eq) != key) {
    fail(ErrorCode::kParse, "restart spec: expected '" + std::string(key) + "=<count>', got '" +
                                std::string(item) + "'");
  }
  const auto digits = item.substr(eq + 1);
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
  if (ec != std::errc() || ptr != digits.data() + digits.size() || value == 0) {
    fail(ErrorCode::kParse, "restart spec: '" + std::string(key) + "' must be a positive integer");
  }
  return value;
}

RestartResult run_fixed(const FeasibleSet& set, std::span<const double> y0, std::size_t t,
                        std::size_t tau, double mu0, const RestartOptions& options) {
  RestartResult result;
  result.y.assign(y0.begin(), y0.end());
  result.t_used = t;
  const NesterovOptions inner{options.monotone};
  double mu = mu0;
  double previous = norm1(result.y);
  for (std::size_t i = 0; i < tau; ++i) {
    if (options.mu_rule) {
      mu = options.mu_rule(result.y, i);
    } else if (i > 0 && options.schedule == MuSchedule::kGeometric) {
      mu = std::max(mu / 2.0, options.mu_floor);
    }
    NesterovResult step = nesterov_solve(result.y, t, mu, set, inner);
    step.trace.restart_starts.push_back(0);
    result.trace.append(step.trace);
    result.y = std::move(step.x);
    result.restarts_run = i + 1;
    result.total_iterations += t;

    const double current = norm1(result.y);
    if (std::abs(current - previous) <= options.stall_tolerance * std::max(std::abs(previous), 1e-300)) {
      result.stalled = true;
      break;
    }
    previous = current;
  }
  return result;
}

}  // namespace

RestartPlan parse_restart_plan(std::string_view spec) {
  const auto colon = spec.find(':');
  if (colon == std::string_view::npos) {
    fail(ErrorCode::kParse, "restart spec: expected '<mode>:<fields>', got '" + std::string(spec) + "'");
  }
  const auto mode = spec.substr(0, colon);
  const auto fields = spec.substr(colon + 1);
  const auto comma = fields.find(',');
  if (comma == std::string_view::npos) {
    fail(ErrorCode::kParse, "restart spec: expected two comma-separated fields");
  }
  RestartPlan plan;
  if (mode == "fixed") {
    plan.mode = RestartMode::kFixed;
    plan.t = parse_field(fields.substr(0, comma), "t");
  } else if (mode == "grid") {
    plan.mode = RestartMode::kDoublingGrid;
    plan.t = parse_field(fields.substr(0, comma), "t0");
  } else {
    fail(ErrorCode::kParse, "restart spec: unknown mode '" + std::string(mode) + "'");
  }
  plan.tau = parse_field(fields.substr(comma + 1), "tau");
  return plan;
}

std::string to_string(const RestartPlan& plan) {
  return plan.mode == RestartMode::kFixed
             ? "fixed:t=" + std::to_string(plan.t) + ",tau=" + std::to_string(plan.tau)
             : "grid:t0=" + std::to_string(plan.t) + ",tau=" + std::to_string(plan.tau);
}

double nsp_constant_from_diameter(double k_true, double k_diameter) {
  require(k_diameter > 0.0, ErrorCode::kInvalidArgument,
          "nsp_constant_from_diameter: k_D must be positive");
  require(k_true >= 0.0, ErrorCode::kInvalidArgument,
          "nsp_constant_from_diameter: k_T must be nonnegative");
  if (k_true >= k_diameter) {
    fail(ErrorCode::kNoNsp, "nsp_constant_from_diameter: k_T >= k_D, constant undefined");
  }
  return 1.0 / (1.0 - std::sqrt(k_true / k_diameter));
}

double sharpness_constant(double nsp_constant) {
  require(nsp_constant > 1.0, ErrorCode::kInvalidArgument, "sharpness_constant: requires C > 1");
  return (2.0 - nsp_constant) / nsp_constant;
}

std::size_t optimal_inner_iterations(double nsp_constant, std::size_t p) {
  require(p >= 1, ErrorCode::kInvalidArgument, "optimal_inner_iterations: p must be positive");
  require(nsp_constant > 1.0, ErrorCode::kInvalidArgument,
          "optimal_inner_iterations: requires C > 1");
  if (nsp_constant >= 2.0) {
    fail(ErrorCode::kNoGuarantee, "optimal_inner_iterations: C >= 2 gives no linear rate");
  }
  const double t = 3.0 * std::numbers::e * std::sqrt(static_cast<double>(p)) * nsp_constant /
                   (2.0 - nsp_constant);
  require(std::isfinite(t) && t < 1e15, ErrorCode::kNoGuarantee,
          "optimal_inner_iterations: restart length diverges");
  return static_cast<std::size_t>(std::ceil(t));
}

RestartResult restart_solve(const FeasibleSet& set, std::span<const double> y0,
                            const RestartPlan& plan, double mu0, const RestartOptions& options) {
  require(plan.t >= 1 && plan.tau >= 1, ErrorCode::kInvalidArgument,
          "restart_solve: plan needs t >= 1 and tau >= 1");
  require(mu0 > 0.0 || options.mu_rule, ErrorCode::kInvalidArgument,
          "restart_solve: mu0 must be positive");
  if (plan.mode == RestartMode::kFixed) {
    return run_fixed(set, y0, plan.t, plan.tau, mu0, options);
  }

  const std::size_t budget = plan.budget();
  RestartResult best;
  bool have_best = false;
  std::size_t spent = 0;
  for (std::size_t t = plan.t; t <= budget; t *= 2) {
    RestartResult sweep = run_fixed(set, y0, t, budget / t, mu0, options);
    spent += sweep.total_iterations;
    if (!have_best || norm1(sweep.y) < norm1(best.y)) {
      best = std::move(sweep);
      have_best = true;
    }
  }
  best.total_iterations = spent;
  return best;
}

}  // namespace sharpcs
