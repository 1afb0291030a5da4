#include "sharpcs/linalg.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <utility>

#include "sharpcs/error.hpp"

namespace sharpcs {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols)
    : DenseMatrix(rows, cols, std::vector<double>(rows * cols, 0.0)) {}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  require(rows >= 1 && cols >= 1, ErrorCode::kInvalidArgument,
          "DenseMatrix: dimensions must be at least 1x1");
  require(values_.size() == rows * cols, ErrorCode::kInvalidArgument,
          "DenseMatrix: value count does not match dimensions");
  for (double v : values_) {
    require(std::isfinite(v), ErrorCode::kInvalidArgument, "DenseMatrix: non-finite entry");
  }
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) out(i, i) = 1.0;
  return out;
}

Vector DenseMatrix::column(std::size_t j) const {
  Vector out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
  return out;
}

DenseMatrix DenseMatrix::transposed() const {
  DenseMatrix out(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
  return out;
}

DenseMatrix DenseMatrix::select_columns(std::span<const std::size_t> indices) const {
  DenseMatrix out(rows_, indices.size());
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t c = 0; c < indices.size(); ++c) out(i, c) = (*this)(i, indices[c]);
  return out;
}

DenseMatrix DenseMatrix::scaled(double factor) const {
  DenseMatrix out = *this;
  for (auto& v : out.values_) v *= factor;
  return out;
}

Vector multiply(const DenseMatrix& a, std::span<const double> x) {
  require(x.size() == a.cols(), ErrorCode::kInvalidArgument, "multiply: dimension mismatch");
  Vector out(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) out[i] = dot(a.row(i), x);
  return out;
}

Vector multiply_transposed(const DenseMatrix& a, std::span<const double> y) {
  require(y.size() == a.rows(), ErrorCode::kInvalidArgument,
          "multiply_transposed: dimension mismatch");
  Vector out(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) axpy(y[i], a.row(i), out);
  return out;
}

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b) {
  require(a.cols() == b.rows(), ErrorCode::kInvalidArgument, "multiply: dimension mismatch");
  DenseMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t l = 0; l < a.cols(); ++l) axpy(a(i, l), b.row(l), out.row(i));
  return out;
}

DenseMatrix multiply_transposed(const DenseMatrix& a, const DenseMatrix& b) {
  require(a.cols() == b.cols(), ErrorCode::kInvalidArgument,
          "multiply_transposed: dimension mismatch");
  DenseMatrix out(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.rows(); ++j) out(i, j) = dot(a.row(i), b.row(j));
  return out;
}

double dot(std::span<const double> x, std::span<const double> y) {
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) sum += x[i] * y[i];
  return sum;
}

double norm2(std::span<const double> x) {
  // Scaled accumulation avoids overflow for large entries.
  const double scale = norm_inf(x);
  if (scale == 0.0) return 0.0;
  double sum = 0.0;
  for (double v : x) {
    const double r = v / scale;
    sum += r * r;
  }
  return scale * std::sqrt(sum);
}

double norm1(std::span<const double> x) {
  double sum = 0.0;
  for (double v : x) sum += std::abs(v);
  return sum;
}

double norm_inf(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

double max_abs_entry(const DenseMatrix& a) { return norm_inf(a.values()); }

double max_abs_difference(const DenseMatrix& a, const DenseMatrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), ErrorCode::kInvalidArgument,
          "max_abs_difference: shape mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.values().size(); ++i)
    m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
  return m;
}

Vector subtract(std::span<const double> x, std::span<const double> y) {
  Vector out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] - y[i];
  return out;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

// ---------------------------------------------------------------------------
// Householder QR

HouseholderQR::HouseholderQR(const DenseMatrix& a)
    : rows_(a.rows()), cols_(a.cols()), packed_(a), beta_(a.cols(), 0.0), diag_(a.cols(), 0.0) {
  require(rows_ >= cols_, ErrorCode::kInvalidArgument,
          "HouseholderQR: matrix must have at least as many rows as columns");
  for (std::size_t j = 0; j < cols_; ++j) {
    const double x0 = packed_(j, j);
    double sigma = 0.0;
    for (std::size_t i = j + 1; i < rows_; ++i) sigma += packed_(i, j) * packed_(i, j);

    double beta = 0.0;
    double v0 = 1.0;
    double rjj = x0;
    if (sigma == 0.0) {
      if (x0 < 0.0) {
        // Reflect e1 onto itself with a sign flip so R keeps a nonnegative diagonal.
        beta = 2.0;
        rjj = -x0;
      }
    } else {
      const double mu = std::sqrt(x0 * x0 + sigma);
      v0 = x0 <= 0.0 ? x0 - mu : -sigma / (x0 + mu);
      beta = 2.0 * v0 * v0 / (sigma + v0 * v0);
      rjj = mu;
      for (std::size_t i = j + 1; i < rows_; ++i) packed_(i, j) /= v0;
    }
    beta_[j] = beta;
    diag_[j] = rjj;

    if (beta != 0.0) {
      for (std::size_t c = j + 1; c < cols_; ++c) {
        double s = packed_(j, c);
        for (std::size_t i = j + 1; i < rows_; ++i) s += packed_(i, j) * packed_(i, c);
        s *= beta;
        packed_(j, c) -= s;
        for (std::size_t i = j + 1; i < rows_; ++i) packed_(i, c) -= s * packed_(i, j);
      }
    }
    packed_(j, j) = rjj;
  }
}

DenseMatrix HouseholderQR::r() const {
  DenseMatrix out(cols_, cols_);
  for (std::size_t i = 0; i < cols_; ++i)
    for (std::size_t j = i; j < cols_; ++j) out(i, j) = packed_(i, j);
  return out;
}

double HouseholderQR::min_abs_pivot() const {
  double m = std::numeric_limits<double>::infinity();
  for (double d : diag_) m = std::min(m, std::abs(d));
  return m;
}

void HouseholderQR::apply_qt(std::span<double> v) const {
  require(v.size() == rows_, ErrorCode::kInvalidArgument, "apply_qt: dimension mismatch");
  for (std::size_t j = 0; j < cols_; ++j) {
    if (beta_[j] == 0.0) continue;
    double s = v[j];
    for (std::size_t i = j + 1; i < rows_; ++i) s += packed_(i, j) * v[i];
    s *= beta_[j];
    v[j] -= s;
    for (std::size_t i = j + 1; i < rows_; ++i) v[i] -= s * packed_(i, j);
  }
}

void HouseholderQR::apply_q(std::span<double> v) const {
  require(v.size() == rows_, ErrorCode::kInvalidArgument, "apply_q: dimension mismatch");
  for (std::size_t jj = cols_; jj-- > 0;) {
    if (beta_[jj] == 0.0) continue;
    double s = v[jj];
    for (std::size_t i = jj + 1; i < rows_; ++i) s += packed_(i, jj) * v[i];
    s *= beta_[jj];
    v[jj] -= s;
    for (std::size_t i = jj + 1; i < rows_; ++i) v[i] -= s * packed_(i, jj);
  }
}

DenseMatrix HouseholderQR::thin_q() const {
  DenseMatrix out(rows_, cols_);
  Vector e(rows_);
  for (std::size_t c = 0; c < cols_; ++c) {
    std::fill(e.begin(), e.end(), 0.0);
    e[c] = 1.0;
    apply_q(e);
    for (std::size_t i = 0; i < rows_; ++i) out(i, c) = e[i];
  }
  return out;
}

DenseMatrix HouseholderQR::complement_q() const {
  require(rows_ > cols_, ErrorCode::kInvalidArgument, "complement_q: range is the whole space");
  DenseMatrix out(rows_, rows_ - cols_);
  Vector e(rows_);
  for (std::size_t c = cols_; c < rows_; ++c) {
    std::fill(e.begin(), e.end(), 0.0);
    e[c] = 1.0;
    apply_q(e);
    for (std::size_t i = 0; i < rows_; ++i) out(i, c - cols_) = e[i];
  }
  return out;
}

Vector HouseholderQR::solve(std::span<const double> b) const {
  Vector y(b.begin(), b.end());
  apply_qt(y);
  Vector x(cols_, 0.0);
  for (std::size_t ii = cols_; ii-- > 0;) {
    double s = y[ii];
    for (std::size_t j = ii + 1; j < cols_; ++j) s -= packed_(ii, j) * x[j];
    require(diag_[ii] != 0.0, ErrorCode::kRankDeficient, "HouseholderQR::solve: zero pivot");
    x[ii] = s / diag_[ii];
  }
  return x;
}

// ---------------------------------------------------------------------------

DenseMatrix gaussian_matrix(RngSeed seed, std::size_t n, std::size_t p) {
  require(n >= 1 && p >= 1, ErrorCode::kInvalidArgument,
          "gaussian_matrix: dimensions must be positive");
  Rng rng(seed);
  return DenseMatrix(n, p, rng.normal_vector(n * p));
}

Orthonormalized row_orthonormalize(const DenseMatrix& a) {
  require(!a.empty(), ErrorCode::kInvalidArgument, "row_orthonormalize: empty matrix");
  const std::size_t n = a.rows();
  require(n <= a.cols(), ErrorCode::kRankDeficient,
          "row_orthonormalize: more rows than columns cannot have full row rank");
  const HouseholderQR qr(a.transposed());
  const double scale = spectral_norm(a);
  if (!(qr.min_abs_pivot() > 1e-10 * scale)) {
    fail(ErrorCode::kRankDeficient, "row_orthonormalize: rows are numerically dependent");
  }

  // a^T = Q_h R, so a = R^T Q_h^T and Q_h^T = R^{-T} a.
  const DenseMatrix r = qr.r();
  DenseMatrix transform(n, n);
  // Columns of R^{-T} by forward substitution on R^T.
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t i = c; i < n; ++i) {
      double s = i == c ? 1.0 : 0.0;
      for (std::size_t l = c; l < i; ++l) s -= r(l, i) * transform(l, c);
      transform(i, c) = s / r(i, i);
    }
  }
  return {qr.thin_q().transposed(), std::move(transform)};
}

double spectral_norm(const DenseMatrix& a) {
  if (a.empty()) return 0.0;
  const double scale = max_abs_entry(a);
  if (scale == 0.0) return 0.0;
  const DenseMatrix unit = a.scaled(1.0 / scale);
  const bool wide = unit.rows() <= unit.cols();
  const DenseMatrix gram = wide ? multiply_transposed(unit, unit)
                                : multiply_transposed(unit.transposed(), unit.transposed());
  const std::size_t m = gram.rows();

  Rng rng(RngSeed{0x5eedf00dULL});
  Vector v = rng.unit_sphere(m);
  double lambda = 0.0;
  int stable = 0;
  for (int iter = 0; iter < 50000 && stable < 3; ++iter) {
    Vector w = multiply(gram, v);
    const double next = dot(v, w);
    const double wn = norm2(w);
    if (wn == 0.0) return 0.0;
    for (std::size_t i = 0; i < m; ++i) v[i] = w[i] / wn;
    stable = std::abs(next - lambda) <= 1e-15 * std::abs(next) ? stable + 1 : 0;
    lambda = next;
  }
  return scale * std::sqrt(std::max(lambda, 0.0));
}

Vector singular_values(const DenseMatrix& a) {
  DenseMatrix m = a.rows() >= a.cols() ? a : a.transposed();
  const std::size_t rows = m.rows();
  const std::size_t k = m.cols();
  // Hestenes one-sided Jacobi: rotate column pairs until mutually orthogonal.
  for (int sweep = 0; sweep < 80; ++sweep) {
    bool rotated = false;
    for (std::size_t i = 0; i + 1 < k; ++i) {
      for (std::size_t j = i + 1; j < k; ++j) {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (std::size_t r = 0; r < rows; ++r) {
          alpha += m(r, i) * m(r, i);
          beta += m(r, j) * m(r, j);
          gamma += m(r, i) * m(r, j);
        }
        if (gamma == 0.0 || std::abs(gamma) <= 1e-15 * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t r = 0; r < rows; ++r) {
          const double mi = m(r, i);
          const double mj = m(r, j);
          m(r, i) = c * mi - s * mj;
          m(r, j) = s * mi + c * mj;
        }
      }
    }
    if (!rotated) break;
  }
  Vector out(k);
  for (std::size_t j = 0; j < k; ++j) {
    double s = 0.0;
    for (std::size_t r = 0; r < rows; ++r) s += m(r, j) * m(r, j);
    out[j] = std::sqrt(s);
  }
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

double condition_number(const DenseMatrix& a) {
  const Vector s = singular_values(a);
  if (s.back() == 0.0) return std::numeric_limits<double>::infinity();
  return s.front() / s.back();
}

DenseMatrix nullspace_basis(const DenseMatrix& a) {
  require(!a.empty(), ErrorCode::kInvalidArgument, "nullspace_basis: empty matrix");
  require(a.rows() < a.cols(), ErrorCode::kInvalidArgument,
          "nullspace_basis: requires fewer rows than columns");
  const HouseholderQR qr(a.transposed());
  if (!(qr.min_abs_pivot() > 1e-10 * spectral_norm(a))) {
    fail(ErrorCode::kRankDeficient, "nullspace_basis: rows are numerically dependent");
  }
  return qr.complement_q();
}

L1OracleResult min_l1_oracle(const DenseMatrix& a, std::span<const double> b) {
  const std::size_t n = a.rows();
  const std::size_t p = a.cols();
  require(p <= 14, ErrorCode::kUnsupported, "min_l1_oracle: limited to p <= 14");
  require(n <= p, ErrorCode::kInvalidArgument, "min_l1_oracle: requires n <= p");
  require(b.size() == n, ErrorCode::kInvalidArgument, "min_l1_oracle: observation size mismatch");

  constexpr double kTieTolerance = 1e-9;
  const double b_norm = norm2(b);
  const double feasibility_tol = 1e-9 * b_norm + 1e-12;
  const double pivot_floor = 1e-10 * std::max(1.0, max_abs_entry(a));

  struct Candidate {
    Vector x;
    double l1;
  };
  std::vector<Candidate> candidates;
  if (b_norm <= feasibility_tol) candidates.push_back({Vector(p, 0.0), 0.0});

  std::vector<std::size_t> support;
  for (std::uint32_t mask = 1; mask < (1u << p); ++mask) {
    if (static_cast<std::size_t>(std::popcount(mask)) > n) continue;
    support.clear();
    for (std::size_t j = 0; j < p; ++j)
      if (mask & (1u << j)) support.push_back(j);
    const DenseMatrix sub = a.select_columns(support);
    const HouseholderQR qr(sub);
    if (!(qr.min_abs_pivot() > pivot_floor)) continue;
    const Vector xs = qr.solve(b);
    Vector residual = multiply(sub, xs);
    for (std::size_t i = 0; i < n; ++i) residual[i] -= b[i];
    if (norm2(residual) > feasibility_tol) continue;
    Vector x(p, 0.0);
    for (std::size_t c = 0; c < support.size(); ++c) x[support[c]] = xs[c];
    candidates.push_back({std::move(x), norm1(xs)});
  }
  if (candidates.empty()) fail(ErrorCode::kInfeasible, "min_l1_oracle: no feasible basic solution");

  const auto best = std::min_element(candidates.begin(), candidates.end(),
                                     [](const Candidate& l, const Candidate& r) { return l.l1 < r.l1; });
  L1OracleResult result{best->x, best->l1, false};
  for (const auto& c : candidates) {
    if (c.l1 - result.l1 > kTieTolerance) continue;
    double diff = 0.0;
    for (std::size_t j = 0; j < p; ++j) diff = std::max(diff, std::abs(c.x[j] - result.x[j]));
    if (diff > kTieTolerance) result.ambiguous = true;
  }
  return result;
}

}  // namespace sharpcs
