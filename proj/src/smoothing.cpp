#include "sharpcs/smoothing.hpp"

#include <algorithm>
#include <cmath>

#include "sharpcs/error.hpp"

namespace sharpcs {

namespace {

double huber_scalar(double x, double mu) {
  const double ax = std::abs(x);
  return ax <= mu ? x * x / (2.0 * mu) : ax - mu / 2.0;
}

void check_orthonormal_rows(const DenseMatrix& a) {
  require(!a.empty(), ErrorCode::kInvalidArgument, "FeasibleSet: empty matrix");
  const DenseMatrix gram = multiply_transposed(a, a);
  const double err = max_abs_difference(gram, DenseMatrix::identity(a.rows()));
  require(err <= 1e-10, ErrorCode::kInvalidArgument,
          "FeasibleSet: rows of A must be orthonormal (A A^T = I)");
}

Vector residual_vector(std::span<const double> x, const FeasibleSet& set) {
  Vector r = multiply(set.a, x);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= set.b[i];
  return r;
}

// Projection that reuses a precomputed residual r = A x - b.
void project_in_place(std::span<double> x, std::span<double> r, const FeasibleSet& set) {
  if (set.kind == ConstraintKind::kEquality) {
    const Vector correction = multiply_transposed(set.a, r);
    for (std::size_t j = 0; j < x.size(); ++j) x[j] -= correction[j];
    return;
  }
  const double rn = norm2(r);
  if (rn <= set.epsilon) return;
  const double shrink = 1.0 - set.epsilon / rn;
  const Vector correction = multiply_transposed(set.a, r);
  for (std::size_t j = 0; j < x.size(); ++j) x[j] -= shrink * correction[j];
}

double residual_from(std::span<const double> r, const FeasibleSet& set) {
  const double rn = norm2(r);
  return set.kind == ConstraintKind::kEquality ? rn : std::max(0.0, rn - set.epsilon);
}

}  // namespace

HuberValueGrad huber_value_grad(std::span<const double> x, double mu) {
  require(mu > 0.0, ErrorCode::kInvalidArgument, "huber_value_grad: mu must be positive");
  HuberValueGrad out{0.0, Vector(x.size())};
  for (std::size_t i = 0; i < x.size(); ++i) {
    out.value += huber_scalar(x[i], mu);
    out.grad[i] = std::clamp(x[i] / mu, -1.0, 1.0);
  }
  return out;
}

double huber_value(std::span<const double> x, double mu) {
  require(mu > 0.0, ErrorCode::kInvalidArgument, "huber_value: mu must be positive");
  double value = 0.0;
  for (double v : x) value += huber_scalar(v, mu);
  return value;
}

FeasibleSet FeasibleSet::equality(DenseMatrix a, Vector b) {
  check_orthonormal_rows(a);
  require(b.size() == a.rows(), ErrorCode::kInvalidArgument, "FeasibleSet: b has wrong size");
  return FeasibleSet{ConstraintKind::kEquality, std::move(a), std::move(b), 0.0};
}

FeasibleSet FeasibleSet::ball(DenseMatrix a, Vector b, double epsilon) {
  check_orthonormal_rows(a);
  require(b.size() == a.rows(), ErrorCode::kInvalidArgument, "FeasibleSet: b has wrong size");
  require(epsilon > 0.0 && std::isfinite(epsilon), ErrorCode::kInvalidArgument,
          "FeasibleSet: ball radius must be positive");
  return FeasibleSet{ConstraintKind::kBall, std::move(a), std::move(b), epsilon};
}

Vector project_feasible(std::span<const double> x, const FeasibleSet& set) {
  require(x.size() == set.dimension(), ErrorCode::kInvalidArgument,
          "project_feasible: dimension mismatch");
  Vector out(x.begin(), x.end());
  Vector r = residual_vector(out, set);
  project_in_place(out, r, set);
  return out;
}

double feasibility_residual(std::span<const double> x, const FeasibleSet& set) {
  return residual_from(residual_vector(x, set), set);
}

void SolverTrace::append(const SolverTrace& other) {
  const std::size_t offset = iterations();
  l1.insert(l1.end(), other.l1.begin(), other.l1.end());
  smoothed.insert(smoothed.end(), other.smoothed.begin(), other.smoothed.end());
  residual.insert(residual.end(), other.residual.begin(), other.residual.end());
  for (auto s : other.restart_starts) restart_starts.push_back(s + offset);
}

NesterovResult nesterov_solve(std::span<const double> x0, std::size_t t, double mu,
                              const FeasibleSet& set, const NesterovOptions& options) {
  const std::size_t p = set.dimension();
  require(x0.size() == p, ErrorCode::kInvalidArgument, "nesterov_solve: dimension mismatch");
  require(mu > 0.0 && std::isfinite(mu), ErrorCode::kInvalidArgument,
          "nesterov_solve: mu must be positive");
  const double start_residual = feasibility_residual(x0, set);
  require(start_residual <= 1e-10 * std::max(1.0, norm2(set.b)), ErrorCode::kInvalidArgument,
          "nesterov_solve: starting point is not feasible");

  NesterovResult result{Vector(x0.begin(), x0.end()), {}};
  if (t == 0) return result;
  result.trace.l1.reserve(t);
  result.trace.smoothed.reserve(t);
  result.trace.residual.reserve(t);

  Vector x = result.x;       // proximal sequence
  Vector y = x;              // extrapolated point
  Vector candidate(p);
  double theta = 1.0;
  double fx = huber_value(x, mu);

  for (std::size_t k = 0; k < t; ++k) {
    // Gradient step on the extrapolated point with step mu = 1/L.
    for (std::size_t j = 0; j < p; ++j) candidate[j] = y[j] - std::clamp(y[j] / mu, -1.0, 1.0) * mu;
    Vector r = residual_vector(candidate, set);
    project_in_place(candidate, r, set);

    const double theta_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
    const double f_candidate = huber_value(candidate, mu);
    if (options.monotone) {
      const bool accept = f_candidate <= fx;
      const Vector previous = x;
      if (accept) {
        x = candidate;
        fx = f_candidate;
      }
      for (std::size_t j = 0; j < p; ++j) {
        y[j] = x[j] + (theta / theta_next) * (candidate[j] - x[j]) +
               ((theta - 1.0) / theta_next) * (x[j] - previous[j]);
      }
    } else {
      const double momentum = (theta - 1.0) / theta_next;
      for (std::size_t j = 0; j < p; ++j) {
        y[j] = candidate[j] + momentum * (candidate[j] - x[j]);
      }
      x.swap(candidate);
      fx = f_candidate;
    }
    theta = theta_next;

    result.trace.l1.push_back(norm1(x));
    result.trace.smoothed.push_back(fx);
    result.trace.residual.push_back(feasibility_residual(x, set));
  }
  result.x = std::move(x);
  return result;
}

double balanced_smoothing(double distance, std::size_t t, std::size_t p) {
  require(t > 0 && p > 0, ErrorCode::kInvalidArgument, "balanced_smoothing: t and p must be positive");
  return std::sqrt(2.0) * distance / (static_cast<double>(t) * std::sqrt(static_cast<double>(p)));
}

}  // namespace sharpcs
