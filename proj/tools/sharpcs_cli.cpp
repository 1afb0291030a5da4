// sharpcs command-line driver. Talks to the library only through sharpcs.h.
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sharpcs/sharpcs.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitBudget = 2;

struct Failure {
  sharpcs_status status;
};

void check(sharpcs_status status) {
  if (status != SHARPCS_OK) throw Failure{status};
}

template <class T, void (*Free)(T*)>
struct Owned {
  T* ptr = nullptr;
  Owned() = default;
  Owned(const Owned&) = delete;
  Owned& operator=(const Owned&) = delete;
  ~Owned() { Free(ptr); }
};

using MatrixHandle = Owned<sharpcs_matrix, sharpcs_matrix_free>;
using SolutionHandle = Owned<sharpcs_solution, sharpcs_solution_free>;
using ConfigHandle = Owned<sharpcs_config, sharpcs_config_free>;
using InstanceHandle = Owned<sharpcs_instance, sharpcs_instance_free>;

struct Buffer {
  double* data = nullptr;
  size_t length = 0;
  ~Buffer() { sharpcs_buffer_free(data); }
};

struct Text {
  char* data = nullptr;
  ~Text() { sharpcs_string_free(data); }
};

std::optional<size_t> threads_from_env() {
  const char* env = std::getenv("SHARPCS_THREADS");
  if (env == nullptr || *env == '\0') return std::nullopt;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (*end != '\0') return std::nullopt;
  return static_cast<size_t>(v);
}

struct GenArgs {
  size_t p = 100, n = 40, k = 5;
  double delta = 0.0;
  uint64_t seed = 1;
  std::string out_dir = "instance";
};

struct SolveArgs {
  std::string mode = "equality";
  std::string matrix, obs;
  std::string restart = "fixed:t=100,tau=60";
  double delta = 0.0;
  double mu0 = 0.0;
  double tolerance = 1e-12;
  bool fixed_mu = false;
  uint64_t seed = 1;
  std::string out_dir = ".";
};

struct CondArgs {
  std::string matrix, signal;
  uint64_t seed = 1;
  size_t restarts = 5;
  size_t power_iters = 20000;
};

struct ExperimentArgs {
  std::string config;
  std::optional<uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<size_t> threads;
  std::optional<double> delta;
  std::optional<std::string> restart;
};

struct ReportArgs {
  std::string input;
  std::string out_dir = ".";
  std::vector<std::string> linear;
  std::vector<std::string> log;
};

int run_gen(const GenArgs& a) {
  InstanceHandle inst;
  check(sharpcs_instance_generate(a.p, a.n, a.k, a.delta, a.seed, &inst.ptr));
  check(sharpcs_instance_save(inst.ptr, a.out_dir.c_str()));
  std::printf("wrote instance (p=%zu n=%zu k=%zu delta=%g seed=%llu) to %s\n", a.p, a.n, a.k, a.delta,
              static_cast<unsigned long long>(a.seed), a.out_dir.c_str());
  return kExitOk;
}

int run_solve(const SolveArgs& a) {
  MatrixHandle m;
  check(sharpcs_matrix_load(a.matrix.c_str(), &m.ptr));
  Buffer b;
  check(sharpcs_vector_load(a.obs.c_str(), &b.data, &b.length));

  sharpcs_solve_options opts;
  sharpcs_solve_options_default(&opts);
  opts.mode = a.mode == "ball" ? SHARPCS_MODE_BALL : SHARPCS_MODE_EQUALITY;
  opts.delta = a.delta;
  opts.restart = a.restart.c_str();
  opts.mu0 = a.mu0;
  opts.stall_tolerance = a.tolerance;
  opts.geometric_schedule = a.fixed_mu ? 0 : 1;
  SolutionHandle sol;
  check(sharpcs_solve(m.ptr, b.data, b.length, &opts, &sol.ptr));

  const std::filesystem::path dir(a.out_dir);
  size_t len = 0;
  const double* x = sharpcs_solution_x(sol.ptr, &len);
  check(sharpcs_vector_save((dir / "x.txt").c_str(), x, len));
  check(sharpcs_solution_write_trace_csv(sol.ptr, (dir / "trace.csv").c_str()));

  const bool converged = sharpcs_solution_converged(sol.ptr) != 0;
  std::printf("l1=%.17g residual=%.3e iterations=%zu restarts=%zu status=%s\n", sharpcs_solution_l1(sol.ptr),
              sharpcs_solution_residual(sol.ptr), sharpcs_solution_iterations(sol.ptr),
              sharpcs_solution_restarts(sol.ptr), converged ? "converged" : "budget-exhausted");
  return converged ? kExitOk : kExitBudget;
}

int run_cond(const CondArgs& a) {
  MatrixHandle m;
  check(sharpcs_matrix_load(a.matrix.c_str(), &m.ptr));
  Buffer x;
  check(sharpcs_vector_load(a.signal.c_str(), &x.data, &x.length));
  sharpcs_power_params params;
  sharpcs_power_params_default(&params);
  params.restarts = a.restarts;
  params.power_iters = a.power_iters;
  Text json;
  check(sharpcs_condition_report_json(m.ptr, x.data, x.length, &params, a.seed, &json.data));
  std::printf("%s\n", json.data);
  return kExitOk;
}

void load_config(const std::string& path, ConfigHandle& cfg) {
  if (path.empty()) {
    check(sharpcs_config_default(&cfg.ptr));
  } else {
    check(sharpcs_config_load(path.c_str(), &cfg.ptr));
  }
}

int run_experiment(const ExperimentArgs& a) {
  ConfigHandle cfg;
  load_config(a.config, cfg);
  if (a.seed) check(sharpcs_config_set_seed(cfg.ptr, *a.seed));
  if (a.out_dir) check(sharpcs_config_set_out_dir(cfg.ptr, a.out_dir->c_str()));
  if (a.delta) check(sharpcs_config_set_delta(cfg.ptr, *a.delta));
  if (a.restart) check(sharpcs_config_set_restart(cfg.ptr, a.restart->c_str()));
  if (a.threads) {
    check(sharpcs_config_set_threads(cfg.ptr, *a.threads));
  } else if (auto env = threads_from_env()) {
    check(sharpcs_config_set_threads(cfg.ptr, *env));
  }
  check(sharpcs_config_validate(cfg.ptr));
  check(sharpcs_run_experiment(cfg.ptr));
  return kExitOk;
}

int run_report(const ReportArgs& a) {
  unsigned mask = SHARPCS_LOG_DEFAULT;
  auto bit = [](const std::string& name) -> unsigned {
    if (name == "error") return SHARPCS_LOG_ERROR;
    if (name == "probability") return SHARPCS_LOG_PROBABILITY;
    if (name == "iterations") return SHARPCS_LOG_ITERATIONS;
    return SHARPCS_LOG_CONDITION;
  };
  for (const auto& name : a.linear) mask &= ~bit(name);
  for (const auto& name : a.log) mask |= bit(name);
  check(sharpcs_render_report(a.input.c_str(), a.out_dir.c_str(), mask));
  return kExitOk;
}

int run_defaults() {
  ConfigHandle cfg;
  check(sharpcs_config_default(&cfg.ptr));
  Text json;
  check(sharpcs_config_to_json(cfg.ptr, &json.data));
  std::fputs(json.data, stdout);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sharpcs: restarted l1 recovery and cone-restricted condition numbers"};
  app.require_subcommand(1);
  const std::vector<std::string> plot_names = {"error", "probability", "iterations", "condition"};

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a random sensing instance");
  gen_cmd->add_option("--p", gen.p, "Ambient dimension")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--n", gen.n, "Number of measurements")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--k", gen.k, "Sparsity")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--delta", gen.delta, "Noise level")->check(CLI::NonNegativeNumber);
  gen_cmd->add_option("--seed", gen.seed, "Random seed");
  gen_cmd->add_option("--out-dir", gen.out_dir, "Output directory");

  SolveArgs solve;
  auto* solve_cmd = app.add_subcommand("solve", "Solve min ||x||_1 subject to the measurements");
  solve_cmd->add_option("--mode", solve.mode, "Constraint type")->check(CLI::IsMember({"equality", "ball"}));
  solve_cmd->add_option("--matrix", solve.matrix, "Sensing matrix file")->required();
  solve_cmd->add_option("--obs", solve.obs, "Observation vector file")->required();
  solve_cmd->add_option("--restart", solve.restart, "Restart plan, e.g. fixed:t=100,tau=10 or grid:t0=50,tau=20");
  solve_cmd->add_option("--delta", solve.delta, "Noise level for --mode ball")->check(CLI::NonNegativeNumber);
  solve_cmd->add_option("--mu0", solve.mu0, "Initial smoothing (0 = default)")->check(CLI::NonNegativeNumber);
  solve_cmd->add_option("--tolerance", solve.tolerance, "Relative l1 change that counts as converged")
      ->check(CLI::NonNegativeNumber);
  solve_cmd->add_flag("--fixed-mu", solve.fixed_mu, "Keep the smoothing fixed across restarts");
  solve_cmd->add_option("--seed", solve.seed, "Seed (the solver itself is deterministic)");
  solve_cmd->add_option("--out-dir", solve.out_dir, "Directory for x.txt and trace.csv");

  CondArgs cond;
  auto* cond_cmd = app.add_subcommand("cond", "Estimate the cone-restricted condition number at a signal");
  cond_cmd->add_option("--matrix", cond.matrix, "Sensing matrix file")->required();
  cond_cmd->add_option("--signal", cond.signal, "Signal vector file")->required();
  cond_cmd->add_option("--seed", cond.seed, "Random seed");
  cond_cmd->add_option("--restarts", cond.restarts, "Random initializations")->check(CLI::PositiveNumber);
  cond_cmd->add_option("--power-iters", cond.power_iters, "Projected power iterations per run")
      ->check(CLI::PositiveNumber);

  ExperimentArgs exp;
  auto* exp_cmd = app.add_subcommand("experiment", "Run a configured experiment and write CSV files");
  exp_cmd->add_option("--config", exp.config, "JSON run configuration")->check(CLI::ExistingFile);
  exp_cmd->add_option("--seed", exp.seed, "Master seed");
  exp_cmd->add_option("--out-dir", exp.out_dir, "Output directory");
  exp_cmd->add_option("--threads", exp.threads, "Worker threads (overrides SHARPCS_THREADS)");
  exp_cmd->add_option("--delta", exp.delta, "Noise level")->check(CLI::NonNegativeNumber);
  exp_cmd->add_option("--restart", exp.restart, "Restart plan");

  ReportArgs rep;
  auto* rep_cmd = app.add_subcommand("report", "Render SVG plots from a condition-sweep trials CSV");
  rep_cmd->add_option("--input", rep.input, "trials.csv")->required()->check(CLI::ExistingFile);
  rep_cmd->add_option("--out-dir", rep.out_dir, "Output directory");
  rep_cmd->add_option("--linear", rep.linear, "Plots drawn with a linear y-axis")->check(CLI::IsMember(plot_names));
  rep_cmd->add_option("--log", rep.log, "Plots drawn with a log y-axis")->check(CLI::IsMember(plot_names));

  auto* defaults_cmd = app.add_subcommand("defaults", "Print the default run configuration as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (*gen_cmd) return run_gen(gen);
    if (*solve_cmd) return run_solve(solve);
    if (*cond_cmd) return run_cond(cond);
    if (*exp_cmd) return run_experiment(exp);
    if (*rep_cmd) return run_report(rep);
    if (*defaults_cmd) return run_defaults();
  } catch (const Failure& f) {
    std::fprintf(stderr, "error: %s: %s\n", sharpcs_status_string(f.status), sharpcs_last_error());
    return kExitInput;
  }
  return kExitInput;
}
