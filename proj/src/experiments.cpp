#include "sharpcs/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <limits>
#include <map>
#include <mutex>
#include <thread>

#include "sharpcs/config.hpp"
#include "sharpcs/csv.hpp"
#include "sharpcs/error.hpp"
#include "sharpcs/textio.hpp"

namespace sharpcs {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool has_orthonormal_rows(const DenseMatrix& a) {
  if (a.rows() > a.cols()) return false;
  return max_abs_difference(multiply_transposed(a, a), DenseMatrix::identity(a.rows())) <= 1e-10;
}

double distance(std::span<const double> x, std::span<const double> y) { return norm2(subtract(x, y)); }

// Runs fn(i) for i in [0, count) on up to `threads` workers; the first
// exception is rethrown after all workers stop.
template <class Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn fn) {
  if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count || stop.load()) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          stop.store(true);
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

SensingInstance gen_instance(std::size_t p, std::size_t n, std::size_t k, double delta, RngSeed seed) {
  require(p >= 1 && n >= 1, ErrorCode::kInvalidArgument, "gen_instance: dimensions must be positive");
  require(n <= p, ErrorCode::kInvalidArgument, "gen_instance: requires n <= p");
  require(k >= 1 && k <= p, ErrorCode::kInvalidArgument, "gen_instance: requires 1 <= k <= p");
  require(delta >= 0.0 && std::isfinite(delta), ErrorCode::kInvalidArgument,
          "gen_instance: delta must be finite and nonnegative");

  SensingInstance inst;
  inst.p = p;
  inst.n = n;
  inst.k = k;
  inst.delta = delta;
  inst.seed = seed;
  inst.a_raw = gaussian_matrix(derive_seed(seed, 0), n, p);
  inst.a = row_orthonormalize(inst.a_raw).q;

  Rng support_rng(derive_seed(seed, 1));
  const auto support = support_rng.subset(p, k);
  Rng value_rng(derive_seed(seed, 2));
  Vector values;
  do {
    values = value_rng.normal_vector(k);
  } while (norm2(values) == 0.0);
  const double scale = norm2(values);
  inst.x0.assign(p, 0.0);
  for (std::size_t c = 0; c < k; ++c) inst.x0[support[c]] = values[c] / scale;

  inst.b_clean = multiply(inst.a, inst.x0);
  inst.noise.assign(n, 0.0);
  if (delta > 0.0) {
    Rng noise_rng(derive_seed(seed, 3));
    Vector w;
    do {
      w = noise_rng.normal_vector(n);
    } while (norm2(w) == 0.0);
    const double target = delta * spectral_norm(inst.a) / norm2(w);
    for (std::size_t i = 0; i < n; ++i) inst.noise[i] = w[i] * target;
  }
  inst.b = inst.b_clean;
  for (std::size_t i = 0; i < n; ++i) inst.b[i] += inst.noise[i];
  return inst;
}

double initial_smoothing(const SolverSettings& settings, std::span<const double> y0, std::size_t p) {
  if (settings.mu0 > 0.0) return settings.mu0;
  if (settings.schedule == MuSchedule::kFixed) return settings.target_gap / static_cast<double>(p);
  const double scale = norm2(y0);
  return balanced_smoothing(scale > 0.0 ? scale : 1.0, settings.plan.t, p);
}

RestartOptions restart_options(const SolverSettings& settings) {
  RestartOptions options;
  options.schedule = settings.schedule;
  options.monotone = settings.monotone;
  options.stall_tolerance = settings.stall_tolerance;
  return options;
}

RecoveryResult solve_recovery(const DenseMatrix& a, std::span<const double> b, ConstraintKind kind,
                              double delta, const SolverSettings& settings) {
  require(b.size() == a.rows(), ErrorCode::kInvalidArgument,
          "solve: observation length does not match the matrix rows");
  RecoveryResult out;
  DenseMatrix q = a;
  Vector bq(b.begin(), b.end());
  if (!has_orthonormal_rows(a)) {
    Orthonormalized orth = row_orthonormalize(a);
    q = std::move(orth.q);
    bq = multiply(orth.transform, b);
    out.orthonormalized = true;
  }
  FeasibleSet set;
  if (kind == ConstraintKind::kEquality) {
    set = FeasibleSet::equality(q, bq);
  } else {
    require(delta > 0.0, ErrorCode::kInvalidArgument, "solve: ball mode needs delta > 0");
    set = FeasibleSet::ball(q, bq, delta * spectral_norm(q));
  }
  const Vector y0 = multiply_transposed(set.a, set.b);
  out.run = restart_solve(set, y0, settings.plan, initial_smoothing(settings, y0, a.cols()),
                          restart_options(settings));
  out.x = out.run.y;
  out.residual = feasibility_residual(out.x, set);
  out.converged = out.run.stalled;
  return out;
}

std::size_t iterations_to_tolerance(std::span<const double> l1_trace, double reference,
                                    double tolerance, std::size_t fallback) {
  for (std::size_t i = 0; i < l1_trace.size(); ++i) {
    if (l1_trace[i] - reference < tolerance) return i + 1;
  }
  return fallback;
}

void validate(const ExperimentConfig& config) {
  require(config.experiment == "condition-sweep" || config.experiment == "restart-comparison",
          ErrorCode::kSchema, "config: experiment must be 'condition-sweep' or 'restart-comparison'");
  require(config.p >= 1 && config.k >= 1 && config.k <= config.p, ErrorCode::kInvalidArgument,
          "config: requires p >= 1 and 1 <= k <= p");
  require(!config.n_values.empty(), ErrorCode::kInvalidArgument, "config: n range is empty");
  for (auto n : config.n_values) {
    require(n >= 1 && n <= config.p, ErrorCode::kInvalidArgument, "config: every n must lie in [1, p]");
  }
  require(config.delta >= 0.0 && std::isfinite(config.delta), ErrorCode::kInvalidArgument,
          "config: delta must be finite and nonnegative");
  require(config.trials >= 1, ErrorCode::kInvalidArgument, "config: trials must be positive");
  require(config.exact_tolerance > 0.0, ErrorCode::kInvalidArgument,
          "config: exact tolerance must be positive");
  require(config.solver.plan.t >= 1 && config.solver.plan.tau >= 1, ErrorCode::kInvalidArgument,
          "config: restart plan needs t >= 1 and tau >= 1");
  require(config.solver.mu0 >= 0.0 && config.solver.target_gap > 0.0 &&
              config.solver.stall_tolerance >= 0.0,
          ErrorCode::kInvalidArgument, "config: solver tolerances must be nonnegative");
  validate(config.power);
  require(config.budget >= 1 && config.comparison_seeds >= 1, ErrorCode::kInvalidArgument,
          "config: comparison budget and seeds must be positive");
  require(!config.cells.empty(), ErrorCode::kInvalidArgument, "config: no restart cells");
  for (const auto& [t, tau] : config.cells) {
    require(t >= 1 && tau >= 1 && t * tau == config.budget, ErrorCode::kInvalidArgument,
            "config: every restart cell needs t * tau equal to the budget");
  }
}

RngSeed trial_seed(RngSeed master, std::size_t n, std::size_t trial) {
  return derive_seed(derive_seed(master, n), trial);
}

TrialRecord run_trial(const ExperimentConfig& config, std::size_t n, std::size_t trial,
                      bool with_condition) {
  const auto started = std::chrono::steady_clock::now();
  const RngSeed seed = trial_seed(RngSeed{config.seed}, n, trial);
  const SensingInstance inst = gen_instance(config.p, n, config.k, config.delta, seed);

  TrialRecord rec;
  rec.seed = seed.value;
  rec.p = config.p;
  rec.n = n;
  rec.k = config.k;
  rec.trial = trial;
  rec.delta = config.delta;

  const RestartOptions options = restart_options(config.solver);
  const FeasibleSet clean = FeasibleSet::equality(inst.a, inst.b_clean);
  const Vector y_clean = multiply_transposed(inst.a, inst.b_clean);
  const RestartResult noiseless =
      restart_solve(clean, y_clean, config.solver.plan,
                    initial_smoothing(config.solver, y_clean, config.p), options);
  rec.err_l2 = distance(noiseless.y, inst.x0);
  rec.exact = rec.err_l2 < config.exact_tolerance;

  try {
    rec.certified = dual_certificate_check(inst.a, inst.x0).certified;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kNotCertifiable) throw;
  }
  const double reference =
      rec.certified ? norm1(inst.x0)
                    : *std::min_element(noiseless.trace.l1.begin(), noiseless.trace.l1.end());
  rec.iters = iterations_to_tolerance(noiseless.trace.l1, reference, config.solver.target_gap,
                                      noiseless.total_iterations);

  if (config.delta > 0.0) {
    const FeasibleSet noisy = FeasibleSet::ball(inst.a, inst.b, config.delta * spectral_norm(inst.a));
    const Vector y_noisy = multiply_transposed(inst.a, inst.b);
    const RestartResult solved =
        restart_solve(noisy, y_noisy, config.solver.plan,
                      initial_smoothing(config.solver, y_noisy, config.p), options);
    rec.err_noisy = distance(solved.y, inst.x0);
  } else {
    rec.err_noisy = rec.err_l2;
  }

  rec.kappa = condition_number(inst.a_raw);
  if (with_condition) {
    const ConditionEstimate est =
        condition_estimate(inst.a, inst.x0, config.power, derive_seed(seed, 7));
    rec.has_condition = true;
    rec.mu_hat = est.mu_hat;
    rec.c_lower = est.c_lower;
    rec.infeasible = est.infeasible;
    rec.condition_converged = est.converged;
    rec.error_bound = est.infeasible ? std::numeric_limits<double>::infinity()
                                     : 2.0 * config.delta * est.spectral / est.mu_hat;
  } else {
    rec.mu_hat = kNaN;
    rec.c_lower = kNaN;
    rec.error_bound = kNaN;
  }
  if (config.record_wall_time) {
    rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started)
                      .count();
  }
  return rec;
}

double nearest_rank_percentile(std::vector<double> values, double q) {
  require(!values.empty(), ErrorCode::kInvalidArgument, "percentile of an empty set");
  require(q > 0.0 && q <= 100.0, ErrorCode::kInvalidArgument, "percentile must lie in (0, 100]");
  std::sort(values.begin(), values.end());
  auto rank = static_cast<std::size_t>(std::ceil(q / 100.0 * static_cast<double>(values.size()) - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, values.size());
  return values[rank - 1];
}

double geometric_mean(std::span<const double> values) {
  require(!values.empty(), ErrorCode::kInvalidArgument, "geometric mean of an empty set");
  double log_sum = 0.0;
  for (double v : values) {
    require(v > 0.0, ErrorCode::kInvalidArgument, "geometric mean needs positive values");
    log_sum += std::log(v);
  }
  return std::exp(log_sum / static_cast<double>(values.size()));
}

std::vector<SummaryRow> summarize(std::span<const TrialRecord> records,
                                  std::span<const std::size_t> n_values) {
  std::map<std::size_t, std::vector<const TrialRecord*>> groups;
  for (auto n : n_values) groups[n];
  for (const auto& r : records) groups[r.n].push_back(&r);

  std::vector<SummaryRow> rows;
  for (const auto& [n, group] : groups) {
    SummaryRow row;
    row.n = n;
    row.count = group.size();
    if (group.empty()) {
      row.mean_err = row.p10_err = row.p90_err = row.prob_exact = kNaN;
      row.gmean_iters = row.p10_iters = row.p90_iters = kNaN;
      row.gmean_clower = row.p10_clower = row.p90_clower = kNaN;
      rows.push_back(row);
      continue;
    }
    Vector errs, iters, clower;
    std::size_t exact = 0;
    for (const TrialRecord* r : group) {
      errs.push_back(r->err_l2);
      iters.push_back(static_cast<double>(std::max<std::size_t>(r->iters, 1)));
      if (r->exact) ++exact;
      if (r->has_condition && !r->infeasible && std::isfinite(r->c_lower)) clower.push_back(r->c_lower);
    }
    double err_sum = 0.0;
    for (double e : errs) err_sum += e;
    row.mean_err = err_sum / static_cast<double>(errs.size());
    row.p10_err = nearest_rank_percentile(errs, 10);
    row.p90_err = nearest_rank_percentile(errs, 90);
    row.prob_exact = static_cast<double>(exact) / static_cast<double>(group.size());
    row.gmean_iters = geometric_mean(iters);
    row.p10_iters = nearest_rank_percentile(iters, 10);
    row.p90_iters = nearest_rank_percentile(iters, 90);
    row.excluded = group.size() - clower.size();
    if (clower.empty()) {
      row.gmean_clower = row.p10_clower = row.p90_clower = kNaN;
    } else {
      row.gmean_clower = geometric_mean(clower);
      row.p10_clower = nearest_rank_percentile(clower, 10);
      row.p90_clower = nearest_rank_percentile(clower, 90);
    }
    rows.push_back(row);
  }
  return rows;
}

SweepResult run_condition_sweep(const ExperimentConfig& config) {
  validate(config);
  std::vector<std::pair<std::size_t, std::size_t>> tasks;
  for (auto n : config.n_values)
    for (std::size_t t = 0; t < config.trials; ++t) tasks.emplace_back(n, t);

  SweepResult out;
  out.records.resize(tasks.size());
  parallel_for(tasks.size(), config.threads, [&](std::size_t i) {
    const auto [n, t] = tasks[i];
    out.records[i] = run_trial(config, n, t, t < config.condition_trials);
  });
  std::sort(out.records.begin(), out.records.end(), [](const TrialRecord& l, const TrialRecord& r) {
    return std::pair(l.n, l.trial) < std::pair(r.n, r.trial);
  });
  out.summary = summarize(out.records, config.n_values);
  return out;
}

std::vector<ComparisonRecord> run_restart_comparison(const ExperimentConfig& config) {
  validate(config);
  const std::size_t cells = config.cells.size();
  const std::size_t runs = config.n_values.size() * config.comparison_seeds;
  std::vector<ComparisonRecord> records(runs * cells);

  parallel_for(runs, config.threads, [&](std::size_t run) {
    const std::size_t n = config.n_values[run / config.comparison_seeds];
    const std::size_t s = run % config.comparison_seeds;
    const RngSeed seed = trial_seed(RngSeed{config.seed}, config.nested_designs ? 0 : n, s);
    const SensingInstance inst = gen_instance(config.p, n, config.k, 0.0, seed);
    const FeasibleSet set = FeasibleSet::equality(inst.a, inst.b_clean);
    const Vector y0 = multiply_transposed(inst.a, inst.b_clean);

    bool certified = false;
    try {
      certified = dual_certificate_check(inst.a, inst.x0).certified;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNotCertifiable) throw;
    }

    std::vector<Vector> traces;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [t, tau] : config.cells) {
      SolverSettings settings = config.solver;
      settings.plan = RestartPlan{t, tau, RestartMode::kFixed};
      RestartOptions options = restart_options(settings);
      options.stall_tolerance = 0.0;  // every cell spends the whole budget
      const RestartResult result =
          restart_solve(set, y0, settings.plan, initial_smoothing(settings, y0, config.p), options);
      Vector l1 = result.trace.l1;
      l1.resize(config.budget, l1.empty() ? norm1(y0) : l1.back());
      best = std::min(best, *std::min_element(l1.begin(), l1.end()));
      traces.push_back(std::move(l1));
    }
    if (!certified) {
      // Longer stall-stopped run so a cell is never measured against itself.
      SolverSettings settings = config.solver;
      const std::size_t t = settings.plan.t;
      settings.plan = RestartPlan{t, std::max<std::size_t>(settings.plan.tau, 10 * config.budget / t + 1),
                                  RestartMode::kFixed};
      const RestartResult long_run = restart_solve(set, y0, settings.plan,
                                                   initial_smoothing(settings, y0, config.p),
                                                   restart_options(settings));
      for (double v : long_run.trace.l1) best = std::min(best, v);
    }
    const double reference = certified ? norm1(inst.x0) : best;
    const double floor = 1e-12 * std::max(reference, 1e-300);
    for (std::size_t c = 0; c < cells; ++c) {
      ComparisonRecord& rec = records[run * cells + c];
      rec.seed = seed.value;
      rec.p = config.p;
      rec.n = n;
      rec.k = config.k;
      rec.t = config.cells[c].first;
      rec.tau = config.cells[c].second;
      rec.reference = reference;
      rec.certified = certified;
      rec.gap_floor = floor;
      rec.gaps.resize(traces[c].size());
      for (std::size_t i = 0; i < traces[c].size(); ++i)
        rec.gaps[i] = std::max(traces[c][i] - reference, floor);
      rec.final_gap = rec.gaps.back();
    }
  });
  return records;
}

std::vector<std::string> run_experiment(const ExperimentConfig& config) {
  validate(config);
  const std::filesystem::path dir(config.out_dir);
  const std::string stamp = utc_timestamp();
  std::vector<std::pair<std::filesystem::path, std::string>> files;
  if (config.experiment == "condition-sweep") {
    const SweepResult sweep = run_condition_sweep(config);
    files.emplace_back(dir / "trials.csv", format_trials_csv(sweep.records, stamp));
    files.emplace_back(dir / "summary.csv", format_summary_csv(sweep.summary, stamp));
    files.emplace_back(dir / "error_bound.csv", format_error_bound_csv(sweep.records, stamp));
  } else {
    const auto records = run_restart_comparison(config);
    files.emplace_back(dir / "comparison.csv", format_comparison_csv(records, stamp));
    files.emplace_back(dir / "comparison_traces.csv", format_comparison_traces_csv(records, stamp));
  }
  files.emplace_back(dir / "config.json", config_to_json(config));

  std::vector<std::string> written;
  for (const auto& [path, text] : files) {
    write_text_file(path, text);
    written.push_back(path.string());
  }
  return written;
}

}  // namespace sharpcs
