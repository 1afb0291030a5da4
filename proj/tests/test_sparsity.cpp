#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "sharpcs/conditioning.hpp"
#include "sharpcs/error.hpp"
#include "sharpcs/linalg.hpp"
#include "sharpcs/rng.hpp"
#include "sharpcs/sparsity.hpp"

using namespace sharpcs;

namespace {

double nuclear_oracle(const DenseMatrix& x) {
  const auto m = oracle::from(x);
  const auto e = oracle::jacobi_eigen(m.rows < m.cols ? oracle::outer_gram(m) : oracle::gram(m));
  double s = 0;
  for (double v : e.values) s += std::sqrt(std::max(0.0, v));
  return s;
}

Vector flat(const DenseMatrix& m) { return Vector(m.values().begin(), m.values().end()); }

template <class S>
void check_projector_laws(const S& s, std::uint64_t seed) {
  Rng rng({seed});
  for (const auto& proj : s.projectors()) {
    const Vector w = rng.normal_vector(s.dimension());
    const Vector pw = s.apply_p(proj, w);
    const Vector pbw = s.apply_pbar(proj, w);
    CHECK(norm_inf(subtract(s.apply_p(proj, pw), pw)) <= 1e-14);
    CHECK(norm_inf(subtract(s.apply_pbar(proj, pbw), pbw)) <= 1e-14);
    CHECK(norm_inf(s.apply_p(proj, pbw)) <= 1e-14);
    CHECK(norm_inf(s.apply_pbar(proj, pw)) <= 1e-14);
  }
}

}  // namespace

TEST_CASE("l1 structure basics") {
  const L1Structure s(4);
  const Vector w{1.0, 0.0, -2.0, 0.0};
  CHECK(s.norm(w) == 3.0);
  CHECK(s.dual_norm(w) == 2.0);
  CHECK(is_k_sparse(s, w, 2));
  CHECK_FALSE(is_k_sparse(s, w, 1));
  const std::vector<std::size_t> support{0, 3};
  const auto proj = s.projector(support);
  CHECK(s.weight(proj) == 2);
  CHECK(s.apply_p(proj, w) == Vector{1.0, 0.0, 0.0, 0.0});
  CHECK(s.apply_pbar(proj, w) == Vector{0.0, 0.0, -2.0, 0.0});
  CHECK(s.projectors().size() == 16);
  CHECK_THROWS_AS(L1Structure(15).projectors(), Error);
  const std::vector<std::size_t> bad{7};
  CHECK_THROWS_AS(s.projector(bad), Error);
}

TEST_CASE("nuclear structure basics") {
  const NuclearStructure s(2, 2);
  const Vector diag{1.0, 0.0, 0.0, 0.0};
  CHECK(is_k_sparse(s, diag, 1));
  CHECK(s.norm(Vector{3.0, 0.0, 0.0, -4.0}) == doctest::Approx(7.0));
  CHECK(s.dual_norm(Vector{3.0, 0.0, 0.0, -4.0}) == doctest::Approx(4.0));
  CHECK_THROWS_AS(NuclearStructure(7, 2), Error);
  CHECK_THROWS_AS(s.projector(DenseMatrix(2, 2, {1, 1, 0, 0}), DenseMatrix::identity(2)), Error);
}

TEST_CASE("nuclear norm matches the eigenvalue oracle") {
  Rng rng({3});
  for (std::size_t rows = 1; rows <= 6; ++rows) {
    for (std::size_t cols = 1; cols <= 6; ++cols) {
      const NuclearStructure s(rows, cols);
      const DenseMatrix x = gaussian_matrix(derive_seed({3}, rows * 7 + cols), rows, cols);
      CHECK(s.norm(flat(x)) == doctest::Approx(nuclear_oracle(x)).epsilon(1e-10));
      CHECK(s.dual_norm(flat(x)) == doctest::Approx(oracle::spectral_norm(x)).epsilon(1e-10));
    }
  }
}

TEST_CASE("rank of random low-rank products") {
  const NuclearStructure s(4, 4);
  const auto left = gaussian_matrix({5}, 4, 2);
  const auto right = gaussian_matrix({6}, 2, 4);
  const auto w = flat(multiply(left, right));
  CHECK(is_k_sparse(s, w, 2));
  CHECK_FALSE(is_k_sparse(s, w, 1));
}

TEST_CASE("projector laws hold for every enumerated projector") {
  check_projector_laws(L1Structure(6), 1);
  check_projector_laws(NuclearStructure(3, 3), 2);
  check_projector_laws(NuclearStructure(2, 4), 3);
}

TEST_CASE("l1 restricted set membership") {
  const L1Structure s(5);
  const std::vector<std::size_t> support{1, 2};
  const auto proj = s.projector(support);
  CHECK(dp_membership(s, proj, Vector{0.0, 1.0, -3.0, 0.0, 0.0}));
  CHECK_FALSE(dp_membership(s, proj, Vector{1.0, 0.0, 0.0, 0.0, 0.0}));
  CHECK(dp_membership(s, proj, Vector(5, 0.0)));
}

TEST_CASE("l1 decomposability is an equality") {
  const L1Structure s(6);
  Rng rng({4});
  for (const auto& proj : s.projectors()) {
    const auto u = rng.normal_vector(6);
    const auto r = decomposability_check(s, proj, u);
    CHECK(r.holds);
    CHECK(r.lhs == doctest::Approx(r.rhs).epsilon(1e-14));
  }
}

TEST_CASE("l1 dual condition") {
  const L1Structure s(6);
  Rng rng({5});
  for (const auto& proj : s.projectors()) {
    const auto f = rng.normal_vector(6);
    const auto g = rng.normal_vector(6);
    const auto r = dual_condition_check(s, proj, f, g);
    CHECK(r.holds);
    double expected = 0;
    for (std::size_t i = 0; i < 6; ++i) expected = std::max(expected, std::abs(proj.mask[i] ? f[i] : g[i]));
    CHECK(r.lhs == expected);
    CHECK(dual_condition_check(s, proj, f, f).lhs <= s.dual_norm(f));
  }
}

TEST_CASE("nuclear decomposability and dual condition on random projectors") {
  const NuclearStructure s(3, 3);
  Rng rng({6});
  for (int trial = 0; trial < 1000; ++trial) {
    const auto proj = s.rank_one_projector(rng.normal_vector(3), rng.normal_vector(3));
    const auto u = rng.normal_vector(9);
    CHECK(decomposability_check(s, proj, u).holds);
    CHECK(dual_condition_check(s, proj, rng.normal_vector(9), rng.normal_vector(9)).holds);
  }
}

TEST_CASE("nuclear counterexample: restricted set is larger than the cone union") {
  const NuclearStructure s(2, 2);
  const auto proj = s.projector(DenseMatrix(2, 2, {1, 0, 0, 0}), DenseMatrix(2, 2, {1, 0, 0, 0}));
  const Vector u{0.0, 1.0, 1.0, 0.0};
  CHECK(norm_inf(s.apply_p(proj, u)) == 0.0);
  CHECK(norm_inf(s.apply_pbar(proj, u)) == 0.0);
  CHECK(dp_membership(s, proj, u));
  const auto d = decomposability_check(s, proj, u);
  CHECK(d.lhs == doctest::Approx(2.0));
  CHECK(d.rhs == 0.0);
  CHECK(d.holds);
  // u would be a descent direction at some X = diag(x, 0) iff ||X + u||_* <= ||X||_*.
  for (int i = -1000; i <= 1000; ++i) {
    const double x = i / 100.0;
    const double with_u = s.norm(Vector{x, 1.0, 1.0, 0.0});
    CHECK(with_u == doctest::Approx(std::sqrt(x * x + 4)).epsilon(1e-12));
    CHECK(with_u > std::abs(x));
  }
}

TEST_CASE("l1 restricted set equals the union of tangent cones") {
  const L1Structure s(8);
  Rng rng({7});
  int members = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t k = 1 + rng.below(4);
    const auto support = rng.subset(8, k);
    const auto proj = s.projector(support);
    Vector z = rng.normal_vector(8);
    for (auto i : support) z[i] *= 4;
    if (!dp_membership(s, proj, z)) continue;
    ++members;
    // Witness x = -P z; z must lie in the tangent cone at x.
    Vector x = s.apply_p(proj, z);
    for (auto& v : x) v = -v;
    CHECK(cone_membership(z, TangentConeL1::from_signal(x)));
  }
  CHECK(members > 200);
}
