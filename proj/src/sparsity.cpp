#include "sharpcs/sparsity.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "sharpcs/error.hpp"

namespace sharpcs {

// ---------------------------------------------------------------------------
// l1

L1Structure::L1Structure(std::size_t p) : p_(p) {
  require(p >= 1, ErrorCode::kInvalidArgument, "L1Structure: dimension must be positive");
}

double L1Structure::norm(std::span<const double> w) const { return norm1(w); }

double L1Structure::dual_norm(std::span<const double> f) const { return norm_inf(f); }

Vector L1Structure::apply_p(const Projector& proj, std::span<const double> w) const {
  require(w.size() == p_ && proj.mask.size() == p_, ErrorCode::kInvalidArgument,
          "L1Structure: dimension mismatch");
  Vector out(p_);
  for (std::size_t i = 0; i < p_; ++i) out[i] = proj.mask[i] ? w[i] : 0.0;
  return out;
}

Vector L1Structure::apply_pbar(const Projector& proj, std::span<const double> w) const {
  require(w.size() == p_ && proj.mask.size() == p_, ErrorCode::kInvalidArgument,
          "L1Structure: dimension mismatch");
  Vector out(p_);
  for (std::size_t i = 0; i < p_; ++i) out[i] = proj.mask[i] ? 0.0 : w[i];
  return out;
}

std::size_t L1Structure::weight(const Projector& proj) const {
  return static_cast<std::size_t>(std::count(proj.mask.begin(), proj.mask.end(), 1));
}

std::size_t L1Structure::sparsity_level(std::span<const double> w) const {
  return static_cast<std::size_t>(
      std::count_if(w.begin(), w.end(), [](double v) { return std::abs(v) > 1e-12; }));
}

L1Structure::Projector L1Structure::projector(std::span<const std::size_t> support) const {
  Projector proj{std::vector<char>(p_, 0)};
  for (auto i : support) {
    require(i < p_, ErrorCode::kInvalidArgument, "L1Structure: support index out of range");
    proj.mask[i] = 1;
  }
  return proj;
}

std::vector<L1Structure::Projector> L1Structure::projectors() const {
  require(p_ <= 14, ErrorCode::kUnsupported, "L1Structure: projector enumeration needs p <= 14");
  std::vector<Projector> out;
  out.reserve(std::size_t{1} << p_);
  for (std::size_t bits = 0; bits < (std::size_t{1} << p_); ++bits) {
    Projector proj{std::vector<char>(p_, 0)};
    for (std::size_t i = 0; i < p_; ++i) proj.mask[i] = (bits >> i) & 1U;
    out.push_back(std::move(proj));
  }
  return out;
}

// ---------------------------------------------------------------------------
// nuclear

namespace {

DenseMatrix complement(const DenseMatrix& proj) {
  DenseMatrix out = proj.scaled(-1.0);
  for (std::size_t i = 0; i < out.rows(); ++i) out(i, i) += 1.0;
  return out;
}

std::size_t projector_rank(const DenseMatrix& proj) {
  double trace = 0.0;
  for (std::size_t i = 0; i < proj.rows(); ++i) trace += proj(i, i);
  return static_cast<std::size_t>(std::lround(trace));
}

DenseMatrix outer_projector(const DenseMatrix& basis) {
  // basis has orthonormal columns; returns basis * basis^T.
  const DenseMatrix bt = basis.transposed();
  return multiply(basis, bt);
}

DenseMatrix random_projector(Rng& rng, std::size_t q, std::size_t rank) {
  DenseMatrix g(q, rank);
  for (std::size_t i = 0; i < q; ++i)
    for (std::size_t j = 0; j < rank; ++j) g(i, j) = rng.normal();
  return outer_projector(HouseholderQR(g).thin_q());
}

}  // namespace

NuclearStructure::NuclearStructure(std::size_t rows, std::size_t cols, RngSeed seed)
    : rows_(rows), cols_(cols), seed_(seed) {
  require(rows >= 1 && cols >= 1, ErrorCode::kInvalidArgument,
          "NuclearStructure: dimensions must be positive");
  require(rows <= 6 && cols <= 6, ErrorCode::kUnsupported,
          "NuclearStructure: limited to matrices of size at most 6 x 6");
}

DenseMatrix NuclearStructure::as_matrix(std::span<const double> w) const {
  require(w.size() == rows_ * cols_, ErrorCode::kInvalidArgument,
          "NuclearStructure: dimension mismatch");
  return DenseMatrix(rows_, cols_, Vector(w.begin(), w.end()));
}

double NuclearStructure::norm(std::span<const double> w) const {
  const DenseMatrix x = as_matrix(w);
  if (rows_ == 2 && cols_ == 2 && x(0, 1) == x(1, 0)) {
    // Symmetric 2x2: singular values are the absolute eigenvalues.
    const double mean = 0.5 * (x(0, 0) + x(1, 1));
    const double half_gap = std::hypot(0.5 * (x(0, 0) - x(1, 1)), x(0, 1));
    return std::abs(mean + half_gap) + std::abs(mean - half_gap);
  }
  double total = 0.0;
  for (double s : singular_values(x)) total += s;
  return total;
}

double NuclearStructure::dual_norm(std::span<const double> f) const {
  return singular_values(as_matrix(f)).front();
}

Vector NuclearStructure::apply_p(const Projector& proj, std::span<const double> w) const {
  const DenseMatrix x = as_matrix(w);
  const DenseMatrix out = multiply(multiply(proj.left, x), proj.right);
  return Vector(out.values().begin(), out.values().end());
}

Vector NuclearStructure::apply_pbar(const Projector& proj, std::span<const double> w) const {
  const DenseMatrix x = as_matrix(w);
  const DenseMatrix out = multiply(multiply(complement(proj.left), x), complement(proj.right));
  return Vector(out.values().begin(), out.values().end());
}

std::size_t NuclearStructure::weight(const Projector& proj) const {
  return std::max(projector_rank(proj.left), projector_rank(proj.right));
}

std::size_t NuclearStructure::sparsity_level(std::span<const double> w) const {
  const Vector s = singular_values(as_matrix(w));
  return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [](double v) { return v > 1e-10; }));
}

NuclearStructure::Projector NuclearStructure::projector(DenseMatrix left, DenseMatrix right) const {
  auto check = [](const DenseMatrix& m, std::size_t q, const char* side) {
    require(m.rows() == q && m.cols() == q, ErrorCode::kInvalidArgument, side);
    require(max_abs_difference(m, m.transposed()) <= 1e-10 &&
                max_abs_difference(multiply(m, m), m) <= 1e-10,
            ErrorCode::kInvalidArgument, "NuclearStructure: factors must be orthogonal projectors");
  };
  check(left, rows_, "NuclearStructure: left factor has the wrong size");
  check(right, cols_, "NuclearStructure: right factor has the wrong size");
  return Projector{std::move(left), std::move(right)};
}

NuclearStructure::Projector NuclearStructure::rank_one_projector(std::span<const double> u,
                                                                 std::span<const double> v) const {
  require(u.size() == rows_ && v.size() == cols_, ErrorCode::kInvalidArgument,
          "NuclearStructure: rank-one projector vectors have the wrong size");
  auto unit_column = [](std::span<const double> x) {
    const double n = norm2(x);
    require(n > 0.0, ErrorCode::kInvalidArgument, "NuclearStructure: zero direction");
    Vector c(x.begin(), x.end());
    for (auto& e : c) e /= n;
    const std::size_t size = c.size();
    return DenseMatrix(size, 1, std::move(c));
  };
  return Projector{outer_projector(unit_column(u)), outer_projector(unit_column(v))};
}

std::vector<NuclearStructure::Projector> NuclearStructure::projectors() const {
  std::vector<Projector> out;
  const std::size_t max_rank = std::min(rows_, cols_);
  for (std::size_t lbits = 0; lbits < (std::size_t{1} << rows_); ++lbits) {
    for (std::size_t rbits = 0; rbits < (std::size_t{1} << cols_); ++rbits) {
      if (std::popcount(lbits) != std::popcount(rbits)) continue;
      DenseMatrix left(rows_, rows_), right(cols_, cols_);
      for (std::size_t i = 0; i < rows_; ++i) left(i, i) = (lbits >> i) & 1U;
      for (std::size_t j = 0; j < cols_; ++j) right(j, j) = (rbits >> j) & 1U;
      out.push_back(Projector{std::move(left), std::move(right)});
    }
  }
  Rng rng(seed_);
  for (int r = 0; r < 100; ++r) {
    const std::size_t rank = 1 + rng.below(max_rank);
    DenseMatrix left = random_projector(rng, rows_, rank);
    DenseMatrix right = random_projector(rng, cols_, rank);
    out.push_back(Projector{std::move(left), std::move(right)});
  }
  return out;
}

}  // namespace sharpcs
