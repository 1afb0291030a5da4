#pragma once

#include <algorithm>
#include <concepts>
#include <cstddef>
#include <span>
#include <vector>

#include "sharpcs/linalg.hpp"
#include "sharpcs/rng.hpp"

namespace sharpcs {

/// A norm with a family of weighted projector pairs (P, Pbar) and the dual
/// norm. Points are flat vectors; matrices are stored row-major.
template <class S>
concept SparsityStructure = requires(const S& s, std::span<const double> w,
                                     const typename S::Projector& proj, std::size_t k) {
  typename S::Projector;
  { s.dimension() } -> std::convertible_to<std::size_t>;
  { s.norm(w) } -> std::convertible_to<double>;
  { s.dual_norm(w) } -> std::convertible_to<double>;
  { s.apply_p(proj, w) } -> std::same_as<Vector>;
  { s.apply_pbar(proj, w) } -> std::same_as<Vector>;
  { s.weight(proj) } -> std::convertible_to<std::size_t>;
  { s.sparsity_level(w) } -> std::convertible_to<std::size_t>;
  { s.projectors() } -> std::same_as<std::vector<typename S::Projector>>;
};

/// l1 norm on R^p; projectors select coordinate subsets and Pbar = I - P.
class L1Structure {
 public:
  struct Projector {
    std::vector<char> mask;  // 1 on the selected coordinates
  };

  explicit L1Structure(std::size_t p);

  std::size_t dimension() const { return p_; }
  double norm(std::span<const double> w) const;
  double dual_norm(std::span<const double> f) const;
  Vector apply_p(const Projector& proj, std::span<const double> w) const;
  Vector apply_pbar(const Projector& proj, std::span<const double> w) const;
  std::size_t weight(const Projector& proj) const;
  /// Number of entries with |w_i| > 1e-12.
  std::size_t sparsity_level(std::span<const double> w) const;

  Projector projector(std::span<const std::size_t> support) const;
  /// All 2^p coordinate selectors; p <= 14.
  std::vector<Projector> projectors() const;

 private:
  std::size_t p_;
};

/// Nuclear norm on q1 x q2 matrices (q1, q2 <= 6). P: X -> L X R and
/// Pbar: X -> (I - L) X (I - R) for orthogonal projectors L and R.
class NuclearStructure {
 public:
  struct Projector {
    DenseMatrix left;
    DenseMatrix right;
  };

  NuclearStructure(std::size_t rows, std::size_t cols, RngSeed seed = RngSeed{0x6e75636cULL});

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t dimension() const { return rows_ * cols_; }
  /// Sum of singular values.
  double norm(std::span<const double> w) const;
  /// Largest singular value.
  double dual_norm(std::span<const double> f) const;
  Vector apply_p(const Projector& proj, std::span<const double> w) const;
  Vector apply_pbar(const Projector& proj, std::span<const double> w) const;
  /// max(rank L, rank R)
  std::size_t weight(const Projector& proj) const;
  /// Rank, counting singular values above 1e-10.
  std::size_t sparsity_level(std::span<const double> w) const;

  /// Validates that both factors are symmetric idempotent of the right size.
  Projector projector(DenseMatrix left, DenseMatrix right) const;
  /// Projector onto span(u) on the left and span(v) on the right.
  Projector rank_one_projector(std::span<const double> u, std::span<const double> v) const;
  /// Diagonal 0/1 projectors with equal left and right rank, then 100 random
  /// orthogonal projector pairs.
  std::vector<Projector> projectors() const;

  DenseMatrix as_matrix(std::span<const double> w) const;

 private:
  std::size_t rows_;
  std::size_t cols_;
  RngSeed seed_;
};

static_assert(SparsityStructure<L1Structure>);
static_assert(SparsityStructure<NuclearStructure>);

struct NormInequality {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

template <SparsityStructure S>
bool is_k_sparse(const S& s, std::span<const double> w, std::size_t k) {
  return s.sparsity_level(w) <= k;
}

/// z in D_P: ||Pbar z|| <= ||P z|| + 1e-12.
template <SparsityStructure S>
bool dp_membership(const S& s, const typename S::Projector& proj, std::span<const double> z) {
  return s.norm(s.apply_pbar(proj, z)) <= s.norm(s.apply_p(proj, z)) + 1e-12;
}

/// ||u|| against ||P u|| + ||Pbar u||; holds when the first is not smaller (1e-12 slack).
template <SparsityStructure S>
NormInequality decomposability_check(const S& s, const typename S::Projector& proj,
                                     std::span<const double> u) {
  NormInequality out;
  out.lhs = s.norm(u);
  out.rhs = s.norm(s.apply_p(proj, u)) + s.norm(s.apply_pbar(proj, u));
  out.holds = out.lhs >= out.rhs - 1e-12;
  return out;
}

/// ||P* f + Pbar* g||_* <= max(||f||_*, ||g||_*) with 1e-12 slack. Both
/// shipped structures use orthogonal projectors, so P* = P.
template <SparsityStructure S>
NormInequality dual_condition_check(const S& s, const typename S::Projector& proj,
                                    std::span<const double> f, std::span<const double> g) {
  Vector combined = s.apply_p(proj, f);
  const Vector rest = s.apply_pbar(proj, g);
  for (std::size_t i = 0; i < combined.size(); ++i) combined[i] += rest[i];
  NormInequality out;
  out.lhs = s.dual_norm(combined);
  out.rhs = std::max(s.dual_norm(f), s.dual_norm(g));
  out.holds = out.lhs <= out.rhs + 1e-12;
  return out;
}

}  // namespace sharpcs
