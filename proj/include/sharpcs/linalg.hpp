#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sharpcs/rng.hpp"

namespace sharpcs {

using Vector = std::vector<double>;

/// Dense real matrix in row-major order. A constructed matrix has at least one
/// row and one column and only finite entries.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols);
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  static DenseMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return values_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return values_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return values_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {values_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {values_.data() + i * cols_, cols_}; }
  std::span<const double> values() const noexcept { return values_; }

  Vector column(std::size_t j) const;
  DenseMatrix transposed() const;
  /// Columns listed in `indices`, in that order.
  DenseMatrix select_columns(std::span<const std::size_t> indices) const;
  DenseMatrix scaled(double factor) const;

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

Vector multiply(const DenseMatrix& a, std::span<const double> x);
Vector multiply_transposed(const DenseMatrix& a, std::span<const double> y);
DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b);
/// a * b^T
DenseMatrix multiply_transposed(const DenseMatrix& a, const DenseMatrix& b);

double dot(std::span<const double> x, std::span<const double> y);
double norm2(std::span<const double> x);
double norm1(std::span<const double> x);
double norm_inf(std::span<const double> x);
double max_abs_entry(const DenseMatrix& a);
/// max_ij |a_ij - b_ij|; shapes must agree.
double max_abs_difference(const DenseMatrix& a, const DenseMatrix& b);
Vector subtract(std::span<const double> x, std::span<const double> y);
/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);

/// Householder QR of an m x k matrix with m >= k. Reflectors are kept in
/// compact form; Q is applied implicitly.
class HouseholderQR {
 public:
  explicit HouseholderQR(const DenseMatrix& a);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  /// Upper-triangular k x k factor.
  DenseMatrix r() const;
  /// Smallest |R_ii|, the pivot used for rank decisions.
  double min_abs_pivot() const;

  void apply_qt(std::span<double> v) const;
  void apply_q(std::span<double> v) const;

  /// m x k matrix with orthonormal columns spanning range(a).
  DenseMatrix thin_q() const;
  /// m x (m - k) orthonormal complement of range(a).
  DenseMatrix complement_q() const;

  /// Least-squares solution of a x = b; requires nonzero pivots.
  Vector solve(std::span<const double> b) const;

 private:
  std::size_t rows_;
  std::size_t cols_;
  DenseMatrix packed_;  // R above the diagonal, reflector tails below
  Vector beta_;
  Vector diag_;  // R_ii
};

/// n x p matrix of i.i.d. standard normal draws, deterministic in `seed`.
DenseMatrix gaussian_matrix(RngSeed seed, std::size_t n, std::size_t p);

struct Orthonormalized {
  DenseMatrix q;          // q q^T = I
  DenseMatrix transform;  // q = transform * a, invertible n x n
};

/// Row-orthonormalizes a full-row-rank matrix via Householder QR of a^T.
Orthonormalized row_orthonormalize(const DenseMatrix& a);

/// Largest singular value by power iteration on the smaller Gram matrix.
double spectral_norm(const DenseMatrix& a);

/// Singular values in decreasing order by one-sided Jacobi rotations.
Vector singular_values(const DenseMatrix& a);

/// Ratio of largest to smallest singular value (infinite if rank-deficient).
double condition_number(const DenseMatrix& a);

/// p x (p - n) orthonormal basis of N(a) for a full-row-rank n x p matrix, n < p.
DenseMatrix nullspace_basis(const DenseMatrix& a);

struct L1OracleResult {
  Vector x;
  double l1 = 0.0;
  /// Set when two distinct basic solutions tie within the tie tolerance.
  bool ambiguous = false;
};

/// Exact minimizer of ||x||_1 subject to a x = b by enumerating column subsets
/// of size <= n. Small instances only (p <= 14).
L1OracleResult min_l1_oracle(const DenseMatrix& a, std::span<const double> b);

}  // namespace sharpcs
