#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sharpcs/linalg.hpp"
#include "sharpcs/rng.hpp"

namespace sharpcs {

/// Tangent cone of the l1 norm at a signal with support S and signs s:
/// T = {z : s^T z + ||z_{S^c}||_1 <= 0}.
class TangentConeL1 {
 public:
  /// Support and signs read off x0; throws kInvalidArgument if x0 = 0.
  static TangentConeL1 from_signal(std::span<const double> x0);
  /// Explicit support with signs (+1/-1) listed in support order.
  TangentConeL1(std::size_t p, std::vector<std::size_t> support, std::vector<double> signs);

  std::size_t dimension() const { return p_; }
  const std::vector<std::size_t>& support() const { return support_; }
  /// Sign vector over all coordinates (zero off the support).
  const Vector& signs() const { return signs_; }
  bool on_support(std::size_t i) const { return signs_[i] != 0.0; }

  /// g(z) = s^T z + ||z_{S^c}||_1.
  double constraint(std::span<const double> z) const;

 private:
  std::size_t p_ = 0;
  std::vector<std::size_t> support_;
  Vector signs_;
};

bool cone_membership(std::span<const double> z, const TangentConeL1& cone);

/// Exact Euclidean projection onto the cone via a one-dimensional search on the
/// multiplier of the separable prox of g.
Vector cone_project(std::span<const double> z, const TangentConeL1& cone);

/// D_S = {z : ||z_{S^c}||_1 <= ||z_S||_1}, the (nonconvex) union of the tangent
/// cones over all sign patterns on S.
bool restricted_set_membership(std::span<const double> z, std::span<const std::size_t> support);
/// Projection onto D_S through the nearest sign pattern (|z_i| grows on S).
Vector restricted_set_project(std::span<const double> z, std::span<const std::size_t> support);

/// Parameters of the sphere initialization and projected power method.
struct PowerMethodParams {
  double eps1 = 1e-3;       // smoothing of |x| by sqrt(x^2 + eps1^2) - eps1
  double eps2 = 1e-3;       // smoothing of max(0, x) by softplus at scale eps2
  double gamma = 10.0;      // penalty weight, in units of ||A||_2^2
  std::size_t max_iters = 500;   // sphere descent iterations
  double tol = 1e-9;             // relative objective change stopping rule
  std::size_t restarts = 5;      // random initializations
  std::size_t power_iters = 20000;  // projected power iterations per initialization
};

void validate(const PowerMethodParams& params);

/// Riemannian gradient descent on the sphere for the smoothly penalized
/// problem min ||A z||^2 + gamma q(s^T z + sum_{S^c} h(z_i)), from a uniformly
/// random start. The objective is measured in units of ||A||_2^2.
Vector sphere_init(const DenseMatrix& a, const TangentConeL1& cone, const PowerMethodParams& params,
                   RngSeed seed);

/// Objective minimized by sphere_init (same normalization).
double sphere_objective(const DenseMatrix& a, const TangentConeL1& cone,
                        const PowerMethodParams& params, std::span<const double> z);

struct PowerMethodResult {
  double mu_hat = 0.0;  // ||A z||_2 at the final iterate
  std::size_t iters = 0;
  bool degenerate = false;  // projection collapsed to zero
  Vector z;
  Vector history;  // ||A z_k||_2 after each projected step
};

/// z <- Proj_T((lambda I - A^T A) z), normalized, with lambda = ||A||_2^2.
/// Stops when ||A z_k|| changes by less than 1e-10 (relative) or after
/// max_iters. Throws kInternal if ||A z_k|| increases by more than 1e-12.
PowerMethodResult projected_power_method(const DenseMatrix& a, const TangentConeL1& cone,
                                         std::span<const double> z0, std::size_t max_iters);
/// Same, reusing a known spectral norm of a.
PowerMethodResult projected_power_method(const DenseMatrix& a, double spectral,
                                         const TangentConeL1& cone, std::span<const double> z0,
                                         std::size_t max_iters);

struct ConditionEstimate {
  double mu_hat = 0.0;       // upper bound on the cone-restricted singular value
  double c_lower = 0.0;      // ||A||_2 / mu_hat; +inf when infeasible
  double spectral = 0.0;     // ||A||_2
  std::size_t power_iters = 0;  // total projected power iterations over all runs
  std::size_t init_runs = 0;
  bool converged = false;    // all runs agree to 5 significant digits
  bool infeasible = false;   // mu_hat < 1e-8 ||A||_2: a cone direction is (nearly) in N(A)
  Vector run_values;         // mu_hat of each initialization
};

/// Renegar condition estimate at x0: best of `params.restarts` sphere-initialized
/// projected power runs. Run r uses derive_seed(seed, r).
ConditionEstimate condition_estimate(const DenseMatrix& a, std::span<const double> x0,
                                     const PowerMethodParams& params, RngSeed seed);

struct DualCertificate {
  bool certified = false;
  double slack = 0.0;  // 1 - ||(A^T u)_{S^c}||_inf
  Vector u;
};

/// Minimum-norm u with (A^T u)_S = sign(x0)_S; certified when the off-support
/// correlations stay strictly below one. Throws kNotCertifiable if A_S is
/// rank-deficient.
DualCertificate dual_certificate_check(const DenseMatrix& a, std::span<const double> x0);

/// Lower bound on sup {||x||_2 : A x = 0, ||x||_1 <= 1} by multistart
/// projected subgradient descent on the sphere, random sampling and vertex
/// refinement over a nullspace basis.
double diameter_estimate(const DenseMatrix& a, std::size_t restarts, RngSeed seed);

/// k_D = half_diameter^{-2}.
double recoverable_sparsity(double half_diameter);

/// Exact NSP constant of order k for the nullspace span{v}:
/// 1 / (1 - max_{|T|=k} ||v_T||_1 / ||v||_1). Throws kNoNsp when the ratio is 1.
double exact_nsp_codim1(std::span<const double> v, std::size_t k);

/// sigma_k(A): min over supports |S| = k of min ||A z||/||z|| over D_S, by
/// projected power runs per support cross-checked with `samples` random
/// directions per support. Small instances only (p <= 14).
double restricted_eigenvalue_oracle(const DenseMatrix& a, std::size_t k, std::size_t samples,
                                    RngSeed seed);

}  // namespace sharpcs
