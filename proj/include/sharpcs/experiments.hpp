#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sharpcs/conditioning.hpp"
#include "sharpcs/linalg.hpp"
#include "sharpcs/restart.hpp"
#include "sharpcs/rng.hpp"
#include "sharpcs/smoothing.hpp"

namespace sharpcs {

/// Random sparse-recovery instance. `a` is the row-orthonormalized Gaussian
/// design; observations and noise live in its coordinates.
struct SensingInstance {
  std::size_t p = 0;
  std::size_t n = 0;
  std::size_t k = 0;
  double delta = 0.0;
  RngSeed seed;
  DenseMatrix a_raw;
  DenseMatrix a;
  Vector x0;       // unit l2 norm, exactly k nonzeros
  Vector noise;    // ||noise||_2 = delta * ||a||_2
  Vector b_clean;  // a x0
  Vector b;        // a x0 + noise
};

/// Sub-seeds: stream 0 draws the matrix, 1 the support, 2 the signal values, 3 the noise.
SensingInstance gen_instance(std::size_t p, std::size_t n, std::size_t k, double delta, RngSeed seed);

/// Settings of the restarted solver used by the drivers below.
struct SolverSettings {
  RestartPlan plan{100, 60, RestartMode::kFixed};
  MuSchedule schedule = MuSchedule::kGeometric;
  /// Initial smoothing. Zero selects a default: under the geometric schedule the
  /// balanced level for distance ||y0||_2 and the first restart length, under
  /// the fixed schedule target_gap / p.
  double mu0 = 0.0;
  /// Gap threshold for iterations-to-tolerance.
  double target_gap = 1e-6;
  /// Relative change of ||y||_1 across a restart that counts as converged.
  double stall_tolerance = 1e-12;
  bool monotone = false;
};

double initial_smoothing(const SolverSettings& settings, std::span<const double> y0, std::size_t p);
RestartOptions restart_options(const SolverSettings& settings);

struct RecoveryResult {
  Vector x;  // in the coordinates of the input problem
  RestartResult run;
  bool orthonormalized = false;  // rows of the input matrix were orthonormalized first
  double residual = 0.0;         // feasibility residual in input coordinates
  bool converged = false;        // stalled before the budget ran out
};

/// Solves min ||x||_1 s.t. A x = b (or ||A x - b|| <= delta ||A||_2 after
/// orthonormalization) from the least-norm start. Rows are orthonormalized and
/// b transformed when A A^T != I.
RecoveryResult solve_recovery(const DenseMatrix& a, std::span<const double> b, ConstraintKind kind,
                              double delta, const SolverSettings& settings);

/// First 1-based iteration whose l1 value is within `tolerance` of `reference`;
/// `fallback` when never reached.
std::size_t iterations_to_tolerance(std::span<const double> l1_trace, double reference,
                                    double tolerance, std::size_t fallback);

struct ExperimentConfig {
  std::string experiment = "condition-sweep";  // or "restart-comparison"
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  std::string out_dir = "results";
  bool record_wall_time = false;

  std::size_t p = 100;
  std::size_t k = 5;
  std::vector<std::size_t> n_values = {5, 10, 15, 20, 25, 30, 35, 40, 45, 50, 55, 60};
  double delta = 1e-2;
  std::size_t trials = 20;
  /// Trials per n (the first ones) that also get a condition estimate.
  std::size_t condition_trials = 20;
  double exact_tolerance = 1e-5;

  SolverSettings solver;
  PowerMethodParams power;

  /// Restart comparison: total inner iterations per run, (t, tau) cells with
  /// t * tau = budget, and the number of seeds per measurement count.
  std::size_t budget = 1000;
  std::vector<std::pair<std::size_t, std::size_t>> cells = {
      {1000, 1}, {500, 2}, {250, 4}, {200, 5}, {100, 10}, {50, 20}, {20, 50}, {10, 100}};
  std::size_t comparison_seeds = 10;
  /// Instance seeds ignore n, so the design for a larger n extends the one for
  /// a smaller n by extra rows and the signal is shared.
  bool nested_designs = false;
};

void validate(const ExperimentConfig& config);

struct TrialRecord {
  std::uint64_t seed = 0;
  std::size_t p = 0;
  std::size_t n = 0;
  std::size_t k = 0;
  std::size_t trial = 0;
  double delta = 0.0;
  double err_l2 = 0.0;  // noiseless recovery error
  bool exact = false;   // err_l2 < exact tolerance
  std::size_t iters = 0;
  bool has_condition = false;
  double mu_hat = 0.0;
  double c_lower = 0.0;  // +inf when infeasible
  bool infeasible = false;
  bool condition_converged = false;
  double kappa = 0.0;
  double wall_ms = 0.0;
  // Noisy problem and the error bound audit.
  double err_noisy = 0.0;
  double error_bound = 0.0;  // 2 delta ||A||_2 / mu_hat, +inf when infeasible
  bool certified = false;
};

/// One condition-sweep trial: generate, solve noiseless and noisy problems,
/// optionally estimate the condition number.
TrialRecord run_trial(const ExperimentConfig& config, std::size_t n, std::size_t trial,
                      bool with_condition);
RngSeed trial_seed(RngSeed master, std::size_t n, std::size_t trial);

struct SummaryRow {
  std::size_t n = 0;
  std::size_t count = 0;
  double mean_err = 0.0;
  double p10_err = 0.0;
  double p90_err = 0.0;
  double prob_exact = 0.0;
  double gmean_iters = 0.0;
  double p10_iters = 0.0;
  double p90_iters = 0.0;
  /// NaN when no finite condition estimate is available.
  double gmean_clower = 0.0;
  double p10_clower = 0.0;
  double p90_clower = 0.0;
  std::size_t excluded = 0;  // rows without a finite condition estimate
};

/// Nearest-rank percentile of unsorted values (q in (0, 100]).
double nearest_rank_percentile(std::vector<double> values, double q);
double geometric_mean(std::span<const double> values);

/// Aggregates per n in increasing order. Groups listed in `n_values` without
/// records produce a row with count 0 and NaN aggregates.
std::vector<SummaryRow> summarize(std::span<const TrialRecord> records,
                                  std::span<const std::size_t> n_values = {});

struct SweepResult {
  std::vector<TrialRecord> records;  // sorted by (n, trial)
  std::vector<SummaryRow> summary;
};

SweepResult run_condition_sweep(const ExperimentConfig& config);

struct ComparisonRecord {
  std::uint64_t seed = 0;
  std::size_t p = 0;
  std::size_t n = 0;
  std::size_t k = 0;
  std::size_t t = 0;
  std::size_t tau = 0;
  double reference = 0.0;  // ||x0||_1 when certified, else the best value of the cells and a longer run
  bool certified = false;  // reference is ||x0||_1 by a dual certificate
  double final_gap = 0.0;
  Vector gaps;             // per inner iteration, floored at gap_floor
  double gap_floor = 0.0;
};

/// For every n in config.n_values and every seed, runs all (t, tau) cells at
/// the same budget from the least-norm start. Records are ordered by
/// (n, seed index, cell).
std::vector<ComparisonRecord> run_restart_comparison(const ExperimentConfig& config);

/// Runs config.experiment and writes its CSV files into config.out_dir.
/// Returns the paths written.
std::vector<std::string> run_experiment(const ExperimentConfig& config);

}  // namespace sharpcs
