#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sharpcs/experiments.hpp"

namespace sharpcs {

inline constexpr std::array<std::string_view, 13> kTrialColumns = {
    "seed", "p", "n", "k", "delta", "err_l2", "exact", "iters",
    "mu_hat", "c_lower", "kappa", "infeasible_flag", "wall_ms"};

inline constexpr std::array<std::string_view, 8> kSummaryColumns = {
    "n", "mean_err", "prob_exact", "gmean_iters", "gmean_clower", "p10_clower", "p90_clower",
    "excluded"};

// Every CSV starts with one "# generated: <timestamp>" line, then the header.
// Missing values (no condition estimate, infeasible c_lower, empty groups) are
// empty cells; numbers use 17 significant digits.

std::string utc_timestamp();

std::string format_trials_csv(std::span<const TrialRecord> records, std::string_view timestamp);
/// Throws kSchema naming the offending column if the header differs, kParse on bad cells.
std::vector<TrialRecord> parse_trials_csv(std::string_view text, std::string_view source_name = "<trials>");

std::string format_summary_csv(std::span<const SummaryRow> rows, std::string_view timestamp);
std::vector<SummaryRow> parse_summary_csv(std::string_view text, std::string_view source_name = "<summary>");

/// seed,n,trial,err_noisy,bound,checked,violation for the noisy error bound.
std::string format_error_bound_csv(std::span<const TrialRecord> records, std::string_view timestamp);

/// seed,p,n,k,t,tau,reference,certified,final_gap
std::string format_comparison_csv(std::span<const ComparisonRecord> records, std::string_view timestamp);
/// seed,n,t,tau,iteration,gap with one line per inner iteration.
std::string format_comparison_traces_csv(std::span<const ComparisonRecord> records,
                                         std::string_view timestamp);

/// iteration,l1,smoothed,residual,restart with restart = 1 on the first
/// iteration of each restart.
std::string format_trace_csv(const SolverTrace& trace, std::string_view timestamp);

}  // namespace sharpcs
