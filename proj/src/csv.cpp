#include "sharpcs/csv.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <limits>
#include <map>
#include <sstream>

#include "sharpcs/error.hpp"
#include "sharpcs/textio.hpp"

namespace sharpcs {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string number(double v) { return std::isfinite(v) ? format_double(v) : std::string(); }

std::string header_line(std::string_view timestamp) {
  return "# generated: " + std::string(timestamp) + "\n";
}

template <std::size_t N>
std::string join_header(const std::array<std::string_view, N>& columns) {
  std::string out;
  for (std::size_t i = 0; i < N; ++i) {
    if (i) out += ',';
    out += columns[i];
  }
  return out + "\n";
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    cells.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

// Data lines of a CSV after the comment lines, with the header checked.
struct CsvTable {
  std::vector<std::vector<std::string_view>> rows;
  std::vector<std::size_t> line_numbers;
};

template <std::size_t N>
CsvTable read_table(std::string_view text, std::string_view name,
                    const std::array<std::string_view, N>& columns) {
  CsvTable table;
  bool have_header = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    auto cells = split(line);
    if (!have_header) {
      for (std::size_t i = 0; i < std::max(N, cells.size()); ++i) {
        const std::string_view found = i < cells.size() ? cells[i] : std::string_view("<missing>");
        const std::string_view expected = i < N ? columns[i] : std::string_view("<none>");
        if (found != expected) {
          fail(ErrorCode::kSchema, std::string(name) + ": column " + std::to_string(i + 1) +
                                       ": expected '" + std::string(expected) + "', found '" +
                                       std::string(found) + "'");
        }
      }
      have_header = true;
      continue;
    }
    if (cells.size() != N) {
      fail(ErrorCode::kParse, std::string(name) + ":" + std::to_string(line_no) + ": expected " +
                                  std::to_string(N) + " cells, found " + std::to_string(cells.size()));
    }
    table.rows.push_back(std::move(cells));
    table.line_numbers.push_back(line_no);
  }
  if (!have_header) fail(ErrorCode::kSchema, std::string(name) + ": missing header row");
  return table;
}

class CellReader {
 public:
  CellReader(std::string_view name, std::size_t line) : name_(name), line_(line) {}

  double real(std::string_view cell, std::string_view column, bool allow_empty) const {
    if (cell.empty()) {
      if (allow_empty) return kNaN;
      error(column, "empty value");
    }
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc() || ptr != cell.data() + cell.size()) error(column, "not a number");
    return v;
  }

  std::uint64_t count(std::string_view cell, std::string_view column) const {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size()) {
      error(column, "not a nonnegative integer");
    }
    return v;
  }

  bool flag(std::string_view cell, std::string_view column) const {
    if (cell == "0") return false;
    if (cell == "1") return true;
    error(column, "expected 0 or 1");
  }

 private:
  [[noreturn]] void error(std::string_view column, std::string_view what) const {
    fail(ErrorCode::kParse, std::string(name_) + ":" + std::to_string(line_) + ": column '" +
                                std::string(column) + "': " + std::string(what));
  }

  std::string_view name_;
  std::size_t line_;
};

}  // namespace

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string format_trials_csv(std::span<const TrialRecord> records, std::string_view timestamp) {
  std::string out = header_line(timestamp) + join_header(kTrialColumns);
  for (const auto& r : records) {
    out += std::to_string(r.seed) + ',' + std::to_string(r.p) + ',' + std::to_string(r.n) + ',' +
           std::to_string(r.k) + ',' + format_double(r.delta) + ',' + format_double(r.err_l2) + ',' +
           (r.exact ? "1" : "0") + ',' + std::to_string(r.iters) + ',' +
           (r.has_condition ? number(r.mu_hat) : "") + ',' +
           (r.has_condition && !r.infeasible ? number(r.c_lower) : "") + ',' + number(r.kappa) + ',' +
           (r.has_condition ? (r.infeasible ? "1" : "0") : "") + ',' + format_double(r.wall_ms) + '\n';
  }
  return out;
}

std::vector<TrialRecord> parse_trials_csv(std::string_view text, std::string_view source_name) {
  const CsvTable table = read_table(text, source_name, kTrialColumns);
  std::vector<TrialRecord> records;
  std::map<std::size_t, std::size_t> per_n;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& c = table.rows[i];
    const CellReader rd(source_name, table.line_numbers[i]);
    TrialRecord r;
    r.seed = rd.count(c[0], "seed");
    r.p = rd.count(c[1], "p");
    r.n = rd.count(c[2], "n");
    r.k = rd.count(c[3], "k");
    r.delta = rd.real(c[4], "delta", false);
    r.err_l2 = rd.real(c[5], "err_l2", false);
    r.exact = rd.flag(c[6], "exact");
    r.iters = rd.count(c[7], "iters");
    r.has_condition = !c[11].empty();
    r.infeasible = r.has_condition && rd.flag(c[11], "infeasible_flag");
    r.mu_hat = rd.real(c[8], "mu_hat", !r.has_condition);
    r.c_lower = r.infeasible ? std::numeric_limits<double>::infinity()
                             : rd.real(c[9], "c_lower", !r.has_condition);
    r.kappa = rd.real(c[10], "kappa", true);
    r.wall_ms = rd.real(c[12], "wall_ms", false);
    r.trial = per_n[r.n]++;
    records.push_back(r);
  }
  return records;
}

std::string format_summary_csv(std::span<const SummaryRow> rows, std::string_view timestamp) {
  std::string out = header_line(timestamp) + join_header(kSummaryColumns);
  for (const auto& r : rows) {
    out += std::to_string(r.n) + ',' + number(r.mean_err) + ',' + number(r.prob_exact) + ',' +
           number(r.gmean_iters) + ',' + number(r.gmean_clower) + ',' + number(r.p10_clower) + ',' +
           number(r.p90_clower) + ',' + std::to_string(r.excluded) + '\n';
  }
  return out;
}

std::vector<SummaryRow> parse_summary_csv(std::string_view text, std::string_view source_name) {
  const CsvTable table = read_table(text, source_name, kSummaryColumns);
  std::vector<SummaryRow> rows;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& c = table.rows[i];
    const CellReader rd(source_name, table.line_numbers[i]);
    SummaryRow r;
    r.n = rd.count(c[0], "n");
    r.mean_err = rd.real(c[1], "mean_err", true);
    r.prob_exact = rd.real(c[2], "prob_exact", true);
    r.gmean_iters = rd.real(c[3], "gmean_iters", true);
    r.gmean_clower = rd.real(c[4], "gmean_clower", true);
    r.p10_clower = rd.real(c[5], "p10_clower", true);
    r.p90_clower = rd.real(c[6], "p90_clower", true);
    r.excluded = rd.count(c[7], "excluded");
    rows.push_back(r);
  }
  return rows;
}

std::string format_error_bound_csv(std::span<const TrialRecord> records, std::string_view timestamp) {
  std::string out = header_line(timestamp) + "seed,n,trial,err_noisy,bound,checked,violation\n";
  for (const auto& r : records) {
    const bool checked = r.has_condition && r.condition_converged && !r.infeasible;
    const bool violation = checked && r.err_noisy > 1.05 * r.error_bound;
    out += std::to_string(r.seed) + ',' + std::to_string(r.n) + ',' + std::to_string(r.trial) + ',' +
           format_double(r.err_noisy) + ',' + number(r.error_bound) + ',' + (checked ? "1" : "0") +
           ',' + (violation ? "1" : "0") + '\n';
  }
  return out;
}

std::string format_comparison_csv(std::span<const ComparisonRecord> records, std::string_view timestamp) {
  std::string out = header_line(timestamp) + "seed,p,n,k,t,tau,reference,certified,final_gap\n";
  for (const auto& r : records) {
    out += std::to_string(r.seed) + ',' + std::to_string(r.p) + ',' + std::to_string(r.n) + ',' +
           std::to_string(r.k) + ',' + std::to_string(r.t) + ',' + std::to_string(r.tau) + ',' +
           format_double(r.reference) + ',' + (r.certified ? "1" : "0") + ',' +
           format_double(r.final_gap) + '\n';
  }
  return out;
}

std::string format_comparison_traces_csv(std::span<const ComparisonRecord> records,
                                         std::string_view timestamp) {
  std::string out = header_line(timestamp) + "seed,n,t,tau,iteration,gap\n";
  for (const auto& r : records) {
    const std::string prefix = std::to_string(r.seed) + ',' + std::to_string(r.n) + ',' +
                               std::to_string(r.t) + ',' + std::to_string(r.tau) + ',';
    for (std::size_t i = 0; i < r.gaps.size(); ++i) {
      out += prefix + std::to_string(i + 1) + ',' + format_double(r.gaps[i]) + '\n';
    }
  }
  return out;
}

std::string format_trace_csv(const SolverTrace& trace, std::string_view timestamp) {
  std::string out = header_line(timestamp) + "iteration,l1,smoothed,residual,restart\n";
  std::size_t next_start = 0;
  for (std::size_t i = 0; i < trace.iterations(); ++i) {
    bool starts = false;
    while (next_start < trace.restart_starts.size() && trace.restart_starts[next_start] <= i) {
      starts = starts || trace.restart_starts[next_start] == i;
      ++next_start;
    }
    out += std::to_string(i + 1) + ',' + format_double(trace.l1[i]) + ',' +
           format_double(trace.smoothed[i]) + ',' + format_double(trace.residual[i]) + ',' +
           (starts ? "1" : "0") + '\n';
  }
  return out;
}

}  // namespace sharpcs
