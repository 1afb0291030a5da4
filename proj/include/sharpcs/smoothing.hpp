#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sharpcs/linalg.hpp"

namespace sharpcs {

/// Smoothing level of the Huber approximation; the gradient is (1/mu)-Lipschitz.
struct SmoothingParams {
  double mu = 1.0;
};

struct HuberValueGrad {
  double value = 0.0;
  Vector grad;
};

/// f_mu(x) = sum_i h_mu(x_i) with h_mu(x) = x^2/(2 mu) for |x| <= mu, |x| - mu/2
/// otherwise. Satisfies f_mu(x) <= ||x||_1 <= f_mu(x) + mu p / 2.
HuberValueGrad huber_value_grad(std::span<const double> x, double mu);
double huber_value(std::span<const double> x, double mu);

enum class ConstraintKind { kEquality, kBall };

/// {x : A x = b} or {x : ||A x - b||_2 <= epsilon}, with A A^T = I.
struct FeasibleSet {
  ConstraintKind kind = ConstraintKind::kEquality;
  DenseMatrix a;
  Vector b;
  double epsilon = 0.0;

  /// Both factories check A A^T = I to 1e-10 and throw kInvalidArgument otherwise.
  static FeasibleSet equality(DenseMatrix a, Vector b);
  static FeasibleSet ball(DenseMatrix a, Vector b, double epsilon);

  std::size_t dimension() const { return a.cols(); }
};

/// Exact Euclidean projection onto the feasible set (closed form under A A^T = I).
Vector project_feasible(std::span<const double> x, const FeasibleSet& set);

/// Distance-like residual: ||A x - b||_2 for equality, max(0, ||A x - b||_2 - eps) for balls.
double feasibility_residual(std::span<const double> x, const FeasibleSet& set);

struct SolverTrace {
  Vector l1;        // true objective ||x_k||_1
  Vector smoothed;  // f_mu(x_k) at the mu in force for that iteration
  Vector residual;  // feasibility_residual(x_k)
  std::vector<std::size_t> restart_starts;  // index of the first iteration of each restart

  std::size_t iterations() const { return l1.size(); }
  void append(const SolverTrace& other);
};

struct NesterovOptions {
  /// Keep the proximal sequence monotone in f_mu (MFISTA-style); off by default.
  bool monotone = false;
};

struct NesterovResult {
  Vector x;
  SolverTrace trace;
};

/// t iterations of the two-sequence accelerated projected-gradient method on
/// f_mu with step mu. x0 must be feasible (to 1e-10 relative to max(1, ||b||)).
NesterovResult nesterov_solve(std::span<const double> x0, std::size_t t, double mu,
                              const FeasibleSet& set, const NesterovOptions& options = {});

/// Smoothing level that balances the bound of an accelerated run of t steps
/// started at distance `distance` from the optimum: sqrt(2) d / (t sqrt(p)).
double balanced_smoothing(double distance, std::size_t t, std::size_t p);

}  // namespace sharpcs
