#include "sharpcs/sharpcs.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <limits>
#include <new>
#include <string>

#include "json.hpp"
#include "sharpcs/config.hpp"
#include "sharpcs/conditioning.hpp"
#include "sharpcs/csv.hpp"
#include "sharpcs/error.hpp"
#include "sharpcs/experiments.hpp"
#include "sharpcs/linalg.hpp"
#include "sharpcs/report.hpp"
#include "sharpcs/textio.hpp"

struct sharpcs_matrix {
  sharpcs::DenseMatrix value;
};

struct sharpcs_instance {
  sharpcs::SensingInstance value;
  sharpcs_matrix a;
};

struct sharpcs_solution {
  sharpcs::RecoveryResult value;
};

struct sharpcs_config {
  sharpcs::ExperimentConfig value;
};

namespace {

thread_local std::string last_error;

sharpcs_status to_status(sharpcs::ErrorCode code) {
  using sharpcs::ErrorCode;
  switch (code) {
    case ErrorCode::kInvalidArgument: return SHARPCS_INVALID_ARGUMENT;
    case ErrorCode::kRankDeficient: return SHARPCS_RANK_DEFICIENT;
    case ErrorCode::kInfeasible: return SHARPCS_INFEASIBLE;
    case ErrorCode::kNoNsp: return SHARPCS_NO_NSP;
    case ErrorCode::kNoGuarantee: return SHARPCS_NO_GUARANTEE;
    case ErrorCode::kConvergence: return SHARPCS_CONVERGENCE;
    case ErrorCode::kNotCertifiable: return SHARPCS_NOT_CERTIFIABLE;
    case ErrorCode::kUnsupported: return SHARPCS_UNSUPPORTED;
    case ErrorCode::kParse: return SHARPCS_PARSE;
    case ErrorCode::kIo: return SHARPCS_IO;
    case ErrorCode::kSchema: return SHARPCS_SCHEMA;
    case ErrorCode::kInternal: return SHARPCS_INTERNAL;
  }
  return SHARPCS_INTERNAL;
}

template <class Fn>
sharpcs_status guarded(Fn fn) {
  try {
    fn();
    last_error.clear();
    return SHARPCS_OK;
  } catch (const sharpcs::Error& e) {
    last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return SHARPCS_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return SHARPCS_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (p == nullptr) sharpcs::fail(sharpcs::ErrorCode::kInvalidArgument, std::string(what) + " is null");
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

sharpcs::PowerMethodParams to_params(const sharpcs_power_params* p) {
  sharpcs::PowerMethodParams out;
  if (p != nullptr) {
    out.eps1 = p->eps1;
    out.eps2 = p->eps2;
    out.gamma = p->gamma;
    out.max_iters = p->max_iters;
    out.tol = p->tol;
    out.restarts = p->restarts;
    out.power_iters = p->power_iters;
  }
  return out;
}

sharpcs::Vector to_vector(const double* values, std::size_t length, const char* what) {
  need(values, what);
  return sharpcs::Vector(values, values + length);
}

}  // namespace

extern "C" {

const char* sharpcs_version(void) { return "0.1.0"; }

const char* sharpcs_status_string(sharpcs_status status) {
  switch (status) {
    case SHARPCS_OK: return "ok";
    case SHARPCS_INVALID_ARGUMENT: return "invalid-argument";
    case SHARPCS_RANK_DEFICIENT: return "rank-deficient";
    case SHARPCS_INFEASIBLE: return "infeasible";
    case SHARPCS_NO_NSP: return "no-nsp";
    case SHARPCS_NO_GUARANTEE: return "no-guarantee";
    case SHARPCS_CONVERGENCE: return "convergence";
    case SHARPCS_NOT_CERTIFIABLE: return "not-certifiable";
    case SHARPCS_UNSUPPORTED: return "unsupported";
    case SHARPCS_PARSE: return "parse";
    case SHARPCS_IO: return "io";
    case SHARPCS_SCHEMA: return "schema";
    case SHARPCS_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* sharpcs_last_error(void) { return last_error.c_str(); }

void sharpcs_string_free(char* text) { std::free(text); }

void sharpcs_buffer_free(double* values) { std::free(values); }

sharpcs_status sharpcs_matrix_create(size_t rows, size_t cols, const double* values, sharpcs_matrix** out) {
  return guarded([&] {
    need(out, "out");
    need(values, "values");
    sharpcs::DenseMatrix m(rows, cols, std::vector<double>(values, values + rows * cols));
    *out = new sharpcs_matrix{std::move(m)};
  });
}

sharpcs_status sharpcs_matrix_load(const char* path, sharpcs_matrix** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new sharpcs_matrix{sharpcs::read_matrix_file(path)};
  });
}

sharpcs_status sharpcs_matrix_save(const sharpcs_matrix* m, const char* path) {
  return guarded([&] {
    need(m, "matrix");
    need(path, "path");
    sharpcs::write_matrix_file(path, m->value);
  });
}

size_t sharpcs_matrix_rows(const sharpcs_matrix* m) { return m ? m->value.rows() : 0; }
size_t sharpcs_matrix_cols(const sharpcs_matrix* m) { return m ? m->value.cols() : 0; }
const double* sharpcs_matrix_data(const sharpcs_matrix* m) { return m ? m->value.values().data() : nullptr; }
void sharpcs_matrix_free(sharpcs_matrix* m) { delete m; }

sharpcs_status sharpcs_gaussian_matrix(uint64_t seed, size_t rows, size_t cols, sharpcs_matrix** out) {
  return guarded([&] {
    need(out, "out");
    *out = new sharpcs_matrix{sharpcs::gaussian_matrix(sharpcs::RngSeed{seed}, rows, cols)};
  });
}

sharpcs_status sharpcs_row_orthonormalize(const sharpcs_matrix* a, sharpcs_matrix** q,
                                          sharpcs_matrix** transform) {
  return guarded([&] {
    need(a, "matrix");
    need(q, "q");
    auto result = sharpcs::row_orthonormalize(a->value);
    *q = new sharpcs_matrix{std::move(result.q)};
    if (transform != nullptr) *transform = new sharpcs_matrix{std::move(result.transform)};
  });
}

sharpcs_status sharpcs_spectral_norm(const sharpcs_matrix* a, double* out) {
  return guarded([&] {
    need(a, "matrix");
    need(out, "out");
    *out = sharpcs::spectral_norm(a->value);
  });
}

sharpcs_status sharpcs_condition_number(const sharpcs_matrix* a, double* out) {
  return guarded([&] {
    need(a, "matrix");
    need(out, "out");
    *out = sharpcs::condition_number(a->value);
  });
}

sharpcs_status sharpcs_vector_load(const char* path, double** values, size_t* length) {
  return guarded([&] {
    need(path, "path");
    need(values, "values");
    need(length, "length");
    const sharpcs::Vector v = sharpcs::read_vector_file(path);
    auto* buffer = static_cast<double*>(std::malloc(sizeof(double) * std::max<std::size_t>(v.size(), 1)));
    if (buffer == nullptr) throw std::bad_alloc();
    std::copy(v.begin(), v.end(), buffer);
    *values = buffer;
    *length = v.size();
  });
}

sharpcs_status sharpcs_vector_save(const char* path, const double* values, size_t length) {
  return guarded([&] {
    need(path, "path");
    sharpcs::write_vector_file(path, to_vector(values, length, "values"));
  });
}

sharpcs_status sharpcs_instance_generate(size_t p, size_t n, size_t k, double delta, uint64_t seed,
                                         sharpcs_instance** out) {
  return guarded([&] {
    need(out, "out");
    auto inst = sharpcs::gen_instance(p, n, k, delta, sharpcs::RngSeed{seed});
    sharpcs_matrix a{inst.a};
    *out = new sharpcs_instance{std::move(inst), std::move(a)};
  });
}

const sharpcs_matrix* sharpcs_instance_matrix(const sharpcs_instance* inst) { return inst ? &inst->a : nullptr; }

const double* sharpcs_instance_signal(const sharpcs_instance* inst, size_t* length) {
  if (inst == nullptr) return nullptr;
  if (length) *length = inst->value.x0.size();
  return inst->value.x0.data();
}

const double* sharpcs_instance_observations(const sharpcs_instance* inst, size_t* length) {
  if (inst == nullptr) return nullptr;
  if (length) *length = inst->value.b.size();
  return inst->value.b.data();
}

sharpcs_status sharpcs_instance_save(const sharpcs_instance* inst, const char* dir) {
  return guarded([&] {
    need(inst, "instance");
    need(dir, "dir");
    const std::filesystem::path d(dir);
    sharpcs::write_matrix_file(d / "A.txt", inst->value.a);
    sharpcs::write_matrix_file(d / "A_raw.txt", inst->value.a_raw);
    sharpcs::write_vector_file(d / "x0.txt", inst->value.x0);
    sharpcs::write_vector_file(d / "b.txt", inst->value.b);
    sharpcs::write_vector_file(d / "b_clean.txt", inst->value.b_clean);
  });
}

void sharpcs_instance_free(sharpcs_instance* inst) { delete inst; }

void sharpcs_solve_options_default(sharpcs_solve_options* options) {
  if (options == nullptr) return;
  const sharpcs::SolverSettings defaults;
  options->mode = SHARPCS_MODE_EQUALITY;
  options->delta = 0.0;
  options->restart = nullptr;
  options->geometric_schedule = 1;
  options->mu0 = defaults.mu0;
  options->stall_tolerance = defaults.stall_tolerance;
  options->monotone = 0;
}

sharpcs_status sharpcs_solve(const sharpcs_matrix* a, const double* b, size_t b_length,
                             const sharpcs_solve_options* options, sharpcs_solution** out) {
  return guarded([&] {
    need(a, "matrix");
    need(out, "out");
    sharpcs_solve_options opts;
    sharpcs_solve_options_default(&opts);
    if (options != nullptr) opts = *options;
    sharpcs::SolverSettings settings;
    if (opts.restart != nullptr) settings.plan = sharpcs::parse_restart_plan(opts.restart);
    settings.schedule = opts.geometric_schedule ? sharpcs::MuSchedule::kGeometric : sharpcs::MuSchedule::kFixed;
    settings.mu0 = opts.mu0;
    settings.stall_tolerance = opts.stall_tolerance;
    settings.monotone = opts.monotone != 0;
    sharpcs::require(settings.mu0 >= 0.0 && settings.stall_tolerance >= 0.0,
                     sharpcs::ErrorCode::kInvalidArgument, "solve: mu0 and tolerance must be nonnegative");
    const auto kind = opts.mode == SHARPCS_MODE_BALL ? sharpcs::ConstraintKind::kBall
                                                     : sharpcs::ConstraintKind::kEquality;
    auto result = sharpcs::solve_recovery(a->value, to_vector(b, b_length, "b"), kind, opts.delta, settings);
    *out = new sharpcs_solution{std::move(result)};
  });
}

const double* sharpcs_solution_x(const sharpcs_solution* sol, size_t* length) {
  if (sol == nullptr) return nullptr;
  if (length) *length = sol->value.x.size();
  return sol->value.x.data();
}

int sharpcs_solution_converged(const sharpcs_solution* sol) { return sol && sol->value.converged ? 1 : 0; }
double sharpcs_solution_residual(const sharpcs_solution* sol) {
  return sol ? sol->value.residual : std::numeric_limits<double>::quiet_NaN();
}
double sharpcs_solution_l1(const sharpcs_solution* sol) {
  return sol ? sharpcs::norm1(sol->value.x) : std::numeric_limits<double>::quiet_NaN();
}
size_t sharpcs_solution_iterations(const sharpcs_solution* sol) { return sol ? sol->value.run.total_iterations : 0; }
size_t sharpcs_solution_restarts(const sharpcs_solution* sol) { return sol ? sol->value.run.restarts_run : 0; }

sharpcs_status sharpcs_solution_write_trace_csv(const sharpcs_solution* sol, const char* path) {
  return guarded([&] {
    need(sol, "solution");
    need(path, "path");
    sharpcs::write_text_file(path, sharpcs::format_trace_csv(sol->value.run.trace, sharpcs::utc_timestamp()));
  });
}

void sharpcs_solution_free(sharpcs_solution* sol) { delete sol; }

void sharpcs_power_params_default(sharpcs_power_params* params) {
  if (params == nullptr) return;
  const sharpcs::PowerMethodParams d;
  *params = sharpcs_power_params{d.eps1, d.eps2, d.gamma, d.max_iters, d.tol, d.restarts, d.power_iters};
}

sharpcs_status sharpcs_condition_estimate(const sharpcs_matrix* a, const double* x0, size_t length,
                                          const sharpcs_power_params* params, uint64_t seed,
                                          sharpcs_condition_result* out) {
  return guarded([&] {
    need(a, "matrix");
    need(out, "out");
    const auto est = sharpcs::condition_estimate(a->value, to_vector(x0, length, "x0"), to_params(params),
                                                 sharpcs::RngSeed{seed});
    *out = sharpcs_condition_result{est.mu_hat,      est.c_lower,   est.spectral,           est.power_iters,
                                    est.init_runs,   est.converged ? 1 : 0, est.infeasible ? 1 : 0};
  });
}

sharpcs_status sharpcs_condition_report_json(const sharpcs_matrix* a, const double* x0, size_t length,
                                             const sharpcs_power_params* params, uint64_t seed, char** json_out) {
  return guarded([&] {
    need(a, "matrix");
    need(json_out, "json_out");
    const auto p = to_params(params);
    const auto x = to_vector(x0, length, "x0");
    const auto est = sharpcs::condition_estimate(a->value, x, p, sharpcs::RngSeed{seed});
    const double kappa = sharpcs::condition_number(a->value);
    using nlohmann::json;
    json doc = {
        {"mu_hat", est.mu_hat},
        {"c_lower", est.infeasible ? json(nullptr) : json(est.c_lower)},
        {"infeasible", est.infeasible},
        {"spectral_norm", est.spectral},
        {"kappa", std::isfinite(kappa) ? json(kappa) : json(nullptr)},
        {"converged", est.converged},
        {"power_iters", est.power_iters},
        {"init_runs", est.init_runs},
        {"run_mu_hat", est.run_values},
        {"seed", seed},
        {"params",
         {{"eps1", p.eps1},
          {"eps2", p.eps2},
          {"gamma", p.gamma},
          {"max_iters", p.max_iters},
          {"tol", p.tol},
          {"restarts", p.restarts},
          {"power_iters", p.power_iters}}},
    };
    *json_out = copy_string(doc.dump(2));
  });
}

sharpcs_status sharpcs_dual_certificate(const sharpcs_matrix* a, const double* x0, size_t length, int* certified,
                                        double* slack) {
  return guarded([&] {
    need(a, "matrix");
    const auto cert = sharpcs::dual_certificate_check(a->value, to_vector(x0, length, "x0"));
    if (certified) *certified = cert.certified ? 1 : 0;
    if (slack) *slack = cert.slack;
  });
}

sharpcs_status sharpcs_config_default(sharpcs_config** out) {
  return guarded([&] {
    need(out, "out");
    *out = new sharpcs_config{};
  });
}

sharpcs_status sharpcs_config_parse(const char* json, sharpcs_config** out) {
  return guarded([&] {
    need(json, "json");
    need(out, "out");
    *out = new sharpcs_config{sharpcs::parse_config(json)};
  });
}

sharpcs_status sharpcs_config_load(const char* path, sharpcs_config** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new sharpcs_config{sharpcs::load_config(path)};
  });
}

sharpcs_status sharpcs_config_to_json(const sharpcs_config* cfg, char** json) {
  return guarded([&] {
    need(cfg, "config");
    need(json, "json");
    *json = copy_string(sharpcs::config_to_json(cfg->value));
  });
}

sharpcs_status sharpcs_config_set_seed(sharpcs_config* cfg, uint64_t seed) {
  return guarded([&] {
    need(cfg, "config");
    cfg->value.seed = seed;
  });
}

sharpcs_status sharpcs_config_set_threads(sharpcs_config* cfg, size_t threads) {
  return guarded([&] {
    need(cfg, "config");
    cfg->value.threads = threads;
  });
}

sharpcs_status sharpcs_config_set_out_dir(sharpcs_config* cfg, const char* dir) {
  return guarded([&] {
    need(cfg, "config");
    need(dir, "dir");
    cfg->value.out_dir = dir;
  });
}

sharpcs_status sharpcs_config_set_delta(sharpcs_config* cfg, double delta) {
  return guarded([&] {
    need(cfg, "config");
    sharpcs::require(delta >= 0.0 && std::isfinite(delta), sharpcs::ErrorCode::kInvalidArgument,
                     "delta must be finite and nonnegative");
    cfg->value.delta = delta;
  });
}

sharpcs_status sharpcs_config_set_restart(sharpcs_config* cfg, const char* spec) {
  return guarded([&] {
    need(cfg, "config");
    need(spec, "spec");
    cfg->value.solver.plan = sharpcs::parse_restart_plan(spec);
  });
}

sharpcs_status sharpcs_config_validate(const sharpcs_config* cfg) {
  return guarded([&] {
    need(cfg, "config");
    sharpcs::validate(cfg->value);
  });
}

void sharpcs_config_free(sharpcs_config* cfg) { delete cfg; }

sharpcs_status sharpcs_run_experiment(const sharpcs_config* cfg) {
  return guarded([&] {
    need(cfg, "config");
    sharpcs::run_experiment(cfg->value);
  });
}

sharpcs_status sharpcs_render_report(const char* trials_csv, const char* out_dir, unsigned log_mask) {
  return guarded([&] {
    need(trials_csv, "trials_csv");
    need(out_dir, "out_dir");
    const auto records = sharpcs::parse_trials_csv(sharpcs::read_text_file(trials_csv), trials_csv);
    sharpcs::ReportOptions options;
    options.log_error = (log_mask & SHARPCS_LOG_ERROR) != 0;
    options.log_probability = (log_mask & SHARPCS_LOG_PROBABILITY) != 0;
    options.log_iterations = (log_mask & SHARPCS_LOG_ITERATIONS) != 0;
    options.log_condition = (log_mask & SHARPCS_LOG_CONDITION) != 0;
    sharpcs::render_report(records, out_dir, options);
  });
}

}  // extern "C"
