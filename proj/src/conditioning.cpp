#include "sharpcs/conditioning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "sharpcs/error.hpp"

namespace sharpcs {

namespace {

constexpr double kMembershipTol = 1e-12;

double soft_threshold(double x, double lambda) {
  const double ax = std::abs(x) - lambda;
  return ax > 0.0 ? std::copysign(ax, x) : 0.0;
}

// Root of phi(l) = c0 - l * n_support + sum_i max(m_i - l, 0) on l > 0, where
// phi(0) > 0. phi is continuous, decreasing and piecewise linear with
// breakpoints at the off-support magnitudes m_i. Bisection narrows the bracket
// until both ends see the same active set, then the linear piece is solved.
double level_multiplier(double c0, std::size_t n_support, std::span<const double> magnitudes) {
  auto phi = [&](double l) {
    double v = c0 - l * static_cast<double>(n_support);
    for (double m : magnitudes) v += std::max(m - l, 0.0);
    return v;
  };
  auto active = [&](double l, double& sum) {
    std::size_t count = 0;
    sum = 0.0;
    for (double m : magnitudes) {
      if (m > l) {
        ++count;
        sum += m;
      }
    }
    return count;
  };

  double lo = 0.0;
  double hi = phi(0.0) / static_cast<double>(n_support);
  for (int iter = 0; iter < 200; ++iter) {
    double sum_lo = 0.0, sum_hi = 0.0;
    const std::size_t count_lo = active(lo, sum_lo);
    const std::size_t count_hi = active(hi, sum_hi);
    if (count_lo == count_hi) {
      const double root = (c0 + sum_hi) / static_cast<double>(n_support + count_hi);
      return std::clamp(root, lo, hi);
    }
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) return hi;
    if (phi(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  fail(ErrorCode::kConvergence, "cone projection: multiplier search did not converge");
}

double sphere_objective_scaled(const DenseMatrix& a, double scale, const TangentConeL1& cone,
                               const PowerMethodParams& params, std::span<const double> z,
                               std::span<const double> az) {
  double u = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (cone.on_support(i)) {
      u += cone.signs()[i] * z[i];
    } else {
      u += std::sqrt(z[i] * z[i] + params.eps1 * params.eps1) - params.eps1;
    }
  }
  const double t = u / params.eps2;
  const double softplus = std::max(t, 0.0) + std::log1p(std::exp(-std::abs(t)));
  (void)a;
  return dot(az, az) / scale + params.gamma * params.eps2 * softplus;
}

Vector sphere_init_scaled(const DenseMatrix& a, double spectral, const TangentConeL1& cone,
                          const PowerMethodParams& params, RngSeed seed) {
  const std::size_t p = a.cols();
  const double scale = spectral > 0.0 ? spectral * spectral : 1.0;
  Rng rng(seed);
  Vector z = rng.unit_sphere(p);
  Vector az = multiply(a, z);
  double f = sphere_objective_scaled(a, scale, cone, params, z, az);

  Vector grad(p), trial(p);
  for (std::size_t iter = 0; iter < params.max_iters; ++iter) {
    double u = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
      u += cone.on_support(i)
               ? cone.signs()[i] * z[i]
               : std::sqrt(z[i] * z[i] + params.eps1 * params.eps1) - params.eps1;
    }
    const double t = u / params.eps2;
    const double sigmoid = t >= 0.0 ? 1.0 / (1.0 + std::exp(-t)) : std::exp(t) / (1.0 + std::exp(t));
    grad = multiply_transposed(a, az);
    for (std::size_t i = 0; i < p; ++i) {
      const double penalty_slope =
          cone.on_support(i) ? cone.signs()[i]
                             : z[i] / std::sqrt(z[i] * z[i] + params.eps1 * params.eps1);
      grad[i] = 2.0 * grad[i] / scale + params.gamma * sigmoid * penalty_slope;
    }
    // Riemannian gradient: drop the radial component.
    const double radial = dot(z, grad);
    for (std::size_t i = 0; i < p; ++i) grad[i] -= radial * z[i];
    const double grad_sq = dot(grad, grad);
    if (grad_sq < 1e-30) break;

    bool accepted = false;
    double step = 1.0;
    double f_trial = f;
    Vector az_trial;
    for (int backtrack = 0; backtrack < 60; ++backtrack, step *= 0.5) {
      for (std::size_t i = 0; i < p; ++i) trial[i] = z[i] - step * grad[i];
      const double tn = norm2(trial);
      for (auto& v : trial) v /= tn;
      az_trial = multiply(a, trial);
      f_trial = sphere_objective_scaled(a, scale, cone, params, trial, az_trial);
      if (f_trial <= f - 1e-4 * step * grad_sq) {
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    const double change = std::abs(f - f_trial) / std::max(std::abs(f), 1e-300);
    z.swap(trial);
    az.swap(az_trial);
    f = f_trial;
    if (change < params.tol) break;
  }
  return z;
}

}  // namespace

// ---------------------------------------------------------------------------
// Tangent cone

TangentConeL1 TangentConeL1::from_signal(std::span<const double> x0) {
  std::vector<std::size_t> support;
  std::vector<double> signs;
  for (std::size_t i = 0; i < x0.size(); ++i) {
    if (x0[i] != 0.0) {
      support.push_back(i);
      signs.push_back(x0[i] > 0.0 ? 1.0 : -1.0);
    }
  }
  require(!support.empty(), ErrorCode::kInvalidArgument, "tangent cone: signal must be nonzero");
  return TangentConeL1(x0.size(), std::move(support), std::move(signs));
}

TangentConeL1::TangentConeL1(std::size_t p, std::vector<std::size_t> support,
                             std::vector<double> signs)
    : p_(p), support_(std::move(support)), signs_(p, 0.0) {
  require(!support_.empty(), ErrorCode::kInvalidArgument, "tangent cone: support must be nonempty");
  require(signs.size() == support_.size(), ErrorCode::kInvalidArgument,
          "tangent cone: one sign per support index");
  for (std::size_t c = 0; c < support_.size(); ++c) {
    require(support_[c] < p, ErrorCode::kInvalidArgument, "tangent cone: support index out of range");
    require(signs[c] == 1.0 || signs[c] == -1.0, ErrorCode::kInvalidArgument,
            "tangent cone: signs must be +1 or -1");
    require(signs_[support_[c]] == 0.0, ErrorCode::kInvalidArgument,
            "tangent cone: duplicate support index");
    signs_[support_[c]] = signs[c];
  }
}

double TangentConeL1::constraint(std::span<const double> z) const {
  require(z.size() == p_, ErrorCode::kInvalidArgument, "tangent cone: dimension mismatch");
  double g = 0.0;
  for (std::size_t i = 0; i < p_; ++i) g += signs_[i] != 0.0 ? signs_[i] * z[i] : std::abs(z[i]);
  return g;
}

bool cone_membership(std::span<const double> z, const TangentConeL1& cone) {
  return cone.constraint(z) <= kMembershipTol;
}

Vector cone_project(std::span<const double> z, const TangentConeL1& cone) {
  const double g = cone.constraint(z);
  Vector out(z.begin(), z.end());
  if (g <= 0.0) return out;

  double c0 = 0.0;
  Vector magnitudes;
  magnitudes.reserve(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (cone.on_support(i)) {
      c0 += cone.signs()[i] * z[i];
    } else {
      magnitudes.push_back(std::abs(z[i]));
    }
  }
  const double lambda = level_multiplier(c0, cone.support().size(), magnitudes);
  for (std::size_t i = 0; i < z.size(); ++i) {
    out[i] = cone.on_support(i) ? z[i] - lambda * cone.signs()[i] : soft_threshold(z[i], lambda);
  }
  if (cone.constraint(out) > kMembershipTol) {
    fail(ErrorCode::kConvergence, "cone_project: projected point violates the cone constraint");
  }
  return out;
}

namespace {

std::vector<char> support_mask(std::size_t p, std::span<const std::size_t> support) {
  std::vector<char> mask(p, 0);
  for (auto i : support) {
    require(i < p, ErrorCode::kInvalidArgument, "restricted set: support index out of range");
    mask[i] = 1;
  }
  return mask;
}

double restricted_gap(std::span<const double> z, const std::vector<char>& mask) {
  double g = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) g += mask[i] ? -std::abs(z[i]) : std::abs(z[i]);
  return g;
}

}  // namespace

bool restricted_set_membership(std::span<const double> z, std::span<const std::size_t> support) {
  return restricted_gap(z, support_mask(z.size(), support)) <= kMembershipTol;
}

Vector restricted_set_project(std::span<const double> z, std::span<const std::size_t> support) {
  require(!support.empty(), ErrorCode::kInvalidArgument, "restricted set: empty support");
  const auto mask = support_mask(z.size(), support);
  Vector out(z.begin(), z.end());
  if (restricted_gap(z, mask) <= 0.0) return out;

  double c0 = 0.0;
  Vector magnitudes;
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (mask[i]) {
      c0 -= std::abs(z[i]);
    } else {
      magnitudes.push_back(std::abs(z[i]));
    }
  }
  const double lambda = level_multiplier(c0, support.size(), magnitudes);
  for (std::size_t i = 0; i < z.size(); ++i) {
    out[i] = mask[i] ? z[i] + std::copysign(lambda, z[i]) : soft_threshold(z[i], lambda);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sphere initialization and projected power method

void validate(const PowerMethodParams& params) {
  require(params.eps1 > 0.0 && params.eps2 > 0.0 && params.gamma > 0.0,
          ErrorCode::kInvalidArgument, "PowerMethodParams: eps1, eps2 and gamma must be positive");
  require(params.tol > 0.0, ErrorCode::kInvalidArgument, "PowerMethodParams: tol must be positive");
  require(params.restarts >= 1, ErrorCode::kInvalidArgument,
          "PowerMethodParams: at least one initialization is required");
}

double sphere_objective(const DenseMatrix& a, const TangentConeL1& cone,
                        const PowerMethodParams& params, std::span<const double> z) {
  const double spectral = spectral_norm(a);
  const double scale = spectral > 0.0 ? spectral * spectral : 1.0;
  return sphere_objective_scaled(a, scale, cone, params, z, multiply(a, z));
}

Vector sphere_init(const DenseMatrix& a, const TangentConeL1& cone, const PowerMethodParams& params,
                   RngSeed seed) {
  validate(params);
  require(cone.dimension() == a.cols(), ErrorCode::kInvalidArgument,
          "sphere_init: cone dimension does not match A");
  return sphere_init_scaled(a, spectral_norm(a), cone, params, seed);
}

PowerMethodResult projected_power_method(const DenseMatrix& a, const TangentConeL1& cone,
                                         std::span<const double> z0, std::size_t max_iters) {
  return projected_power_method(a, spectral_norm(a), cone, z0, max_iters);
}

PowerMethodResult projected_power_method(const DenseMatrix& a, double spectral,
                                         const TangentConeL1& cone, std::span<const double> z0,
                                         std::size_t max_iters) {
  const std::size_t p = a.cols();
  require(z0.size() == p && cone.dimension() == p, ErrorCode::kInvalidArgument,
          "projected_power_method: dimension mismatch");
  PowerMethodResult result;
  result.z.assign(z0.begin(), z0.end());
  const double z0_norm = norm2(result.z);
  require(z0_norm > 0.0, ErrorCode::kInvalidArgument, "projected_power_method: zero start");
  for (auto& v : result.z) v /= z0_norm;

  Vector az = multiply(a, result.z);
  result.mu_hat = norm2(az);
  if (spectral == 0.0) {
    result.mu_hat = 0.0;
    return result;
  }
  const double lambda = spectral * spectral;
  const double monotone_tol = 1e-12 * std::max(1.0, spectral);

  Vector c(p);
  double previous = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < max_iters; ++k) {
    const Vector ata_z = multiply_transposed(a, az);
    for (std::size_t i = 0; i < p; ++i) c[i] = lambda * result.z[i] - ata_z[i];
    Vector next = cone_project(c, cone);
    const double next_norm = norm2(next);
    if (!(next_norm > 1e-14 * norm2(c))) {
      result.degenerate = true;
      break;
    }
    for (auto& v : next) v /= next_norm;
    result.z.swap(next);
    az = multiply(a, result.z);
    const double value = norm2(az);
    result.history.push_back(value);
    result.iters = k + 1;
    result.mu_hat = value;
    if (value > previous + monotone_tol) {
      fail(ErrorCode::kInternal, "projected_power_method: ||A z_k|| increased; projection is inexact");
    }
    if (std::isfinite(previous) && std::abs(previous - value) <= 1e-10 * previous) break;
    if (value <= 1e-15 * spectral) break;
    previous = value;
  }
  return result;
}

ConditionEstimate condition_estimate(const DenseMatrix& a, std::span<const double> x0,
                                     const PowerMethodParams& params, RngSeed seed) {
  validate(params);
  require(x0.size() == a.cols(), ErrorCode::kInvalidArgument,
          "condition_estimate: signal dimension does not match A");
  const TangentConeL1 cone = TangentConeL1::from_signal(x0);

  ConditionEstimate est;
  est.spectral = spectral_norm(a);
  if (est.spectral == 0.0) {
    est.mu_hat = 0.0;
    est.c_lower = std::numeric_limits<double>::infinity();
    est.infeasible = true;
    est.converged = true;
    return est;
  }

  for (std::size_t r = 0; r < params.restarts; ++r) {
    PowerMethodResult run;
    for (std::uint64_t attempt = 0; attempt < 4; ++attempt) {
      const RngSeed run_seed = derive_seed(seed, r + attempt * 1000003ULL);
      const Vector z0 = sphere_init_scaled(a, est.spectral, cone, params, run_seed);
      run = projected_power_method(a, est.spectral, cone, z0, params.power_iters);
      est.power_iters += run.iters;
      if (!run.degenerate) break;
    }
    est.run_values.push_back(run.mu_hat);
  }
  est.init_runs = est.run_values.size();
  est.mu_hat = *std::min_element(est.run_values.begin(), est.run_values.end());

  const double floor = 1e-8 * est.spectral;
  est.infeasible = est.mu_hat < floor;
  if (est.infeasible) {
    est.c_lower = std::numeric_limits<double>::infinity();
    est.converged = std::all_of(est.run_values.begin(), est.run_values.end(),
                                [&](double v) { return v < floor; });
  } else {
    est.c_lower = est.spectral / est.mu_hat;
    est.converged = std::all_of(est.run_values.begin(), est.run_values.end(), [&](double v) {
      return std::abs(v - est.mu_hat) <= 1e-5 * est.mu_hat;
    });
  }
  return est;
}

// ---------------------------------------------------------------------------
// Certificates and NSP constants

DualCertificate dual_certificate_check(const DenseMatrix& a, std::span<const double> x0) {
  require(x0.size() == a.cols(), ErrorCode::kInvalidArgument,
          "dual_certificate_check: signal dimension does not match A");
  std::vector<std::size_t> support;
  Vector signs;
  for (std::size_t i = 0; i < x0.size(); ++i) {
    if (x0[i] != 0.0) {
      support.push_back(i);
      signs.push_back(x0[i] > 0.0 ? 1.0 : -1.0);
    }
  }
  require(!support.empty(), ErrorCode::kInvalidArgument, "dual_certificate_check: x0 must be nonzero");
  if (support.size() > a.rows()) {
    fail(ErrorCode::kNotCertifiable, "dual_certificate_check: support larger than the number of rows");
  }
  const HouseholderQR qr(a.select_columns(support));
  if (!(qr.min_abs_pivot() > 1e-10 * std::max(1.0, max_abs_entry(a)))) {
    fail(ErrorCode::kNotCertifiable, "dual_certificate_check: A_S is rank-deficient");
  }

  // A_S = Q R, so the minimum-norm solution of A_S^T u = s is u = Q R^{-T} s.
  const DenseMatrix r = qr.r();
  const std::size_t k = support.size();
  Vector w(a.rows(), 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    double s = signs[i];
    for (std::size_t l = 0; l < i; ++l) s -= r(l, i) * w[l];
    w[i] = s / r(i, i);
  }
  qr.apply_q(w);

  DualCertificate cert;
  cert.u = std::move(w);
  const Vector correlations = multiply_transposed(a, cert.u);
  std::vector<char> on_support(a.cols(), 0);
  for (auto i : support) on_support[i] = 1;
  double off = 0.0;
  for (std::size_t i = 0; i < a.cols(); ++i)
    if (!on_support[i]) off = std::max(off, std::abs(correlations[i]));
  cert.slack = 1.0 - off;
  cert.certified = off < 1.0;
  return cert;
}

namespace {

double l2_over_l1(std::span<const double> x) {
  const double l1 = norm1(x);
  return l1 > 0.0 ? norm2(x) / l1 : 0.0;
}

bool independent_rows(const DenseMatrix& basis, std::span<const std::size_t> rows) {
  const std::size_t d = basis.cols();
  DenseMatrix rows_t(d, rows.size());
  for (std::size_t c = 0; c < rows.size(); ++c)
    for (std::size_t j = 0; j < d; ++j) rows_t(j, c) = basis(rows[c], j);
  return HouseholderQR(rows_t).min_abs_pivot() > 1e-12;
}

// Direction w with (Z w)_J = 0 for |J| = d - 1, i.e. a vertex of {w : ||Z w||_1 <= 1}.
bool vertex_direction(const DenseMatrix& basis, std::span<const std::size_t> zero_rows, Vector& w) {
  const std::size_t d = basis.cols();
  DenseMatrix rows_t(d, zero_rows.size());
  for (std::size_t c = 0; c < zero_rows.size(); ++c)
    for (std::size_t j = 0; j < d; ++j) rows_t(j, c) = basis(zero_rows[c], j);
  const HouseholderQR qr(rows_t);
  if (!(qr.min_abs_pivot() > 1e-12)) return false;
  w = qr.complement_q().column(0);
  return true;
}

double refine_vertex(const DenseMatrix& basis, std::span<const double> w0) {
  const std::size_t p = basis.rows();
  const std::size_t d = basis.cols();
  const Vector x0 = multiply(basis, w0);
  std::vector<std::size_t> order(p);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t l, std::size_t r) { return std::abs(x0[l]) < std::abs(x0[r]); });
  // Smallest coordinates first, skipping rows that do not add rank.
  std::vector<std::size_t> zeros;
  for (std::size_t idx = 0; idx < p && zeros.size() + 1 < d; ++idx) {
    zeros.push_back(order[idx]);
    if (!independent_rows(basis, zeros)) zeros.pop_back();
  }

  Vector w;
  double best = l2_over_l1(x0);
  if (zeros.size() + 1 == d && vertex_direction(basis, zeros, w)) best = std::max(best, l2_over_l1(multiply(basis, w)));
  else return best;

  // Local search over adjacent vertices (swap one zero coordinate), small cases only.
  if ((d - 1) * (p - d + 1) > 4000) return best;
  for (int move = 0; move < 200; ++move) {
    bool improved = false;
    std::vector<char> in_set(p, 0);
    for (auto j : zeros) in_set[j] = 1;
    for (std::size_t slot = 0; slot < zeros.size() && !improved; ++slot) {
      for (std::size_t i = 0; i < p && !improved; ++i) {
        if (in_set[i]) continue;
        auto trial = zeros;
        trial[slot] = i;
        if (!vertex_direction(basis, trial, w)) continue;
        const double value = l2_over_l1(multiply(basis, w));
        if (value > best * (1.0 + 1e-12)) {
          best = value;
          zeros = std::move(trial);
          improved = true;
        }
      }
    }
    if (!improved) break;
  }
  return best;
}

}  // namespace

double diameter_estimate(const DenseMatrix& a, std::size_t restarts, RngSeed seed) {
  const DenseMatrix basis = nullspace_basis(a);
  const std::size_t d = basis.cols();
  if (d == 1) return l2_over_l1(basis.column(0));

  Rng rng(seed);
  struct Scored {
    double value;
    Vector w;
  };
  std::vector<Scored> pool;

  constexpr std::size_t kSamples = 10000;
  constexpr std::size_t kKeep = 8;
  for (std::size_t s = 0; s < kSamples; ++s) {
    Vector w = rng.unit_sphere(d);
    pool.push_back({l2_over_l1(multiply(basis, w)), std::move(w)});
    if (pool.size() > 4 * kKeep) {
      std::partial_sort(pool.begin(), pool.begin() + kKeep, pool.end(),
                        [](const Scored& l, const Scored& r) { return l.value > r.value; });
      pool.resize(kKeep);
    }
  }

  // Minimizing ||Z w||_1 on the unit sphere maximizes the ratio.
  for (std::size_t r = 0; r < restarts; ++r) {
    Vector w = rng.unit_sphere(d);
    Vector best_w = w;
    double best = l2_over_l1(multiply(basis, w));
    for (int iter = 0; iter < 300; ++iter) {
      const Vector x = multiply(basis, w);
      Vector sign(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) sign[i] = (x[i] > 0) - (x[i] < 0);
      Vector g = multiply_transposed(basis, sign);
      const double radial = dot(g, w);
      for (std::size_t j = 0; j < d; ++j) g[j] -= radial * w[j];
      const double gn = norm2(g);
      if (gn < 1e-14) break;
      const double step = 0.3 / std::sqrt(1.0 + iter);
      for (std::size_t j = 0; j < d; ++j) w[j] -= step * g[j] / gn;
      const double wn = norm2(w);
      for (auto& v : w) v /= wn;
      const double value = l2_over_l1(multiply(basis, w));
      if (value > best) {
        best = value;
        best_w = w;
      }
    }
    pool.push_back({best, std::move(best_w)});
  }

  double best = 0.0;
  for (const auto& cand : pool) best = std::max(best, refine_vertex(basis, cand.w));
  return best;
}

double recoverable_sparsity(double half_diameter) {
  require(half_diameter > 0.0, ErrorCode::kInvalidArgument,
          "recoverable_sparsity: half-diameter must be positive");
  return 1.0 / (half_diameter * half_diameter);
}

double exact_nsp_codim1(std::span<const double> v, std::size_t k) {
  require(k < v.size(), ErrorCode::kInvalidArgument, "exact_nsp_codim1: requires k < p");
  const double total = norm1(v);
  require(total > 0.0, ErrorCode::kInvalidArgument, "exact_nsp_codim1: v must be nonzero");
  Vector mags(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) mags[i] = std::abs(v[i]);
  std::partial_sort(mags.begin(), mags.begin() + static_cast<std::ptrdiff_t>(k), mags.end(),
                    std::greater<>());
  const double ratio = std::accumulate(mags.begin(), mags.begin() + static_cast<std::ptrdiff_t>(k), 0.0) / total;
  if (ratio >= 1.0 - 1e-15) {
    fail(ErrorCode::kNoNsp, "exact_nsp_codim1: nullspace vector is k-sparse, no NSP of this order");
  }
  return 1.0 / (1.0 - ratio);
}

// ---------------------------------------------------------------------------
// Restricted eigenvalue oracle

double restricted_eigenvalue_oracle(const DenseMatrix& a, std::size_t k, std::size_t samples,
                                    RngSeed seed) {
  const std::size_t p = a.cols();
  require(p <= 14, ErrorCode::kUnsupported, "restricted_eigenvalue_oracle: limited to p <= 14");
  require(k >= 1 && k < p, ErrorCode::kInvalidArgument,
          "restricted_eigenvalue_oracle: requires 1 <= k < p");
  const double spectral = spectral_norm(a);
  if (spectral == 0.0) return 0.0;
  const double lambda = spectral * spectral;

  Rng rng(seed);
  double global = std::numeric_limits<double>::infinity();
  auto ratio = [&](std::span<const double> z) {
    const double zn = norm2(z);
    return zn > 0.0 ? norm2(multiply(a, z)) / zn : std::numeric_limits<double>::infinity();
  };

  std::vector<std::size_t> support(k);
  std::iota(support.begin(), support.end(), std::size_t{0});
  for (;;) {
    double best = std::numeric_limits<double>::infinity();
    Vector best_z;
    for (std::size_t s = 0; s < samples; ++s) {
      const Vector z = restricted_set_project(rng.normal_vector(p), support);
      const double value = ratio(z);
      if (value < best) {
        best = value;
        best_z = z;
      }
    }

    constexpr int kRuns = 4;
    for (int run = 0; run < kRuns; ++run) {
      Vector z = run == 0 && !best_z.empty() ? best_z : restricted_set_project(rng.normal_vector(p), support);
      double zn = norm2(z);
      if (zn == 0.0) continue;
      for (auto& v : z) v /= zn;
      double previous = std::numeric_limits<double>::infinity();
      for (int iter = 0; iter < 5000; ++iter) {
        const Vector az = multiply(a, z);
        const Vector ata_z = multiply_transposed(a, az);
        Vector c(p);
        for (std::size_t i = 0; i < p; ++i) c[i] = lambda * z[i] - ata_z[i];
        Vector next = restricted_set_project(c, support);
        zn = norm2(next);
        if (!(zn > 1e-14 * norm2(c))) break;
        for (auto& v : next) v /= zn;
        z.swap(next);
        const double value = norm2(multiply(a, z));
        best = std::min(best, value);
        if ((std::isfinite(previous) && std::abs(previous - value) <= 1e-10 * previous) || value <= 1e-15 * spectral) break;
        previous = value;
      }
    }
    global = std::min(global, best);

    // Next k-subset in lexicographic order.
    std::size_t i = k;
    while (i > 0 && support[i - 1] == p - k + i - 1) --i;
    if (i == 0) break;
    ++support[i - 1];
    for (std::size_t j = i; j < k; ++j) support[j] = support[j - 1] + 1;
  }
  return global;
}

}  // namespace sharpcs
