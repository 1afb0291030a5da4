#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "sharpcs/conditioning.hpp"
#include "sharpcs/error.hpp"
#include "sharpcs/linalg.hpp"
#include "sharpcs/rng.hpp"

using namespace sharpcs;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::kInternal;
}

DenseMatrix gram_rows(const DenseMatrix& a) { return multiply_transposed(a, a); }

}  // namespace

TEST_CASE("gaussian matrix is deterministic in the seed") {
  const auto a = gaussian_matrix({7}, 3, 5);
  const auto b = gaussian_matrix({7}, 3, 5);
  CHECK(a == b);
  CHECK(a.rows() == 3);
  CHECK(a.cols() == 5);
  CHECK_FALSE(gaussian_matrix({8}, 3, 5) == a);
}

TEST_CASE("gaussian matrix rejects zero dimensions") {
  CHECK(code_of([] { gaussian_matrix({7}, 0, 5); }) == ErrorCode::kInvalidArgument);
  CHECK(code_of([] { gaussian_matrix({7}, 3, 0); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("gaussian matrix moments") {
  const auto a = gaussian_matrix({1}, 200, 200);
  double mean = 0, sq = 0;
  for (double v : a.values()) mean += v;
  mean /= 40000.0;
  for (double v : a.values()) sq += (v - mean) * (v - mean);
  const double var = sq / 39999.0;
  CHECK(std::abs(mean) < 0.02);
  CHECK(std::abs(var - 1.0) < 0.05);
}

TEST_CASE("dense matrix rejects bad shapes and values") {
  CHECK(code_of([] { DenseMatrix(0, 3); }) == ErrorCode::kInvalidArgument);
  CHECK(code_of([] { DenseMatrix(2, 2, {1, 2, 3}); }) == ErrorCode::kInvalidArgument);
  CHECK(code_of([] { DenseMatrix(1, 2, {1, NAN}); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("row orthonormalize of the identity") {
  const auto r = row_orthonormalize(DenseMatrix::identity(3));
  CHECK(max_abs_difference(r.q, DenseMatrix::identity(3)) <= 1e-15);
  CHECK(max_abs_difference(r.transform, DenseMatrix::identity(3)) <= 1e-15);
}

TEST_CASE("row orthonormalize detects duplicated rows") {
  DenseMatrix a(2, 4, {1, 2, 3, 4, 1, 2, 3, 4});
  CHECK(code_of([&] { row_orthonormalize(a); }) == ErrorCode::kRankDeficient);
}

TEST_CASE("row orthonormalize of random matrices") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto a = gaussian_matrix({seed}, 5, 12);
    const auto r = row_orthonormalize(a);
    CHECK(max_abs_difference(gram_rows(r.q), DenseMatrix::identity(5)) <= 1e-12);
    CHECK(max_abs_difference(multiply(r.transform, a), r.q) <= 1e-12);
    CHECK(std::abs(spectral_norm(r.q) - 1.0) <= 1e-10);
    // Row span preserved: every original row is reproduced by its projection onto range(q^T).
    for (std::size_t i = 0; i < a.rows(); ++i) {
      const Vector row(a.row(i).begin(), a.row(i).end());
      const Vector back = multiply_transposed(r.q, multiply(r.q, row));
      CHECK(norm_inf(subtract(row, back)) <= 1e-12 * (1 + norm_inf(row)));
    }
  }
}

TEST_CASE("spectral norm") {
  CHECK(spectral_norm(DenseMatrix::identity(4)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(spectral_norm(DenseMatrix(2, 2, {3, 0, 0, 1})) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(spectral_norm(DenseMatrix(2, 3)) == 0.0);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto a = gaussian_matrix({seed}, 6, 10);
    const double ref = oracle::spectral_norm(a);
    CHECK(std::abs(spectral_norm(a) - ref) <= 1e-8 * ref);
    const auto sv = singular_values(a);
    CHECK(std::abs(sv.front() - ref) <= 1e-8 * ref);
  }
}

TEST_CASE("singular values match the Jacobi eigen oracle") {
  const auto a = gaussian_matrix({3}, 4, 7);
  const auto sv = singular_values(a);
  const auto e = oracle::jacobi_eigen(oracle::outer_gram(oracle::from(a)));
  REQUIRE(sv.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) CHECK(sv[i] == doctest::Approx(std::sqrt(e.values[3 - i])).epsilon(1e-9));
  CHECK(condition_number(a) == doctest::Approx(sv.front() / sv.back()).epsilon(1e-12));
  CHECK(std::isinf(condition_number(DenseMatrix(2, 2, {1, 1, 1, 1}))));
}

TEST_CASE("nullspace basis") {
  SUBCASE("single row") {
    const auto z = nullspace_basis(DenseMatrix(1, 3, {1, 0, 0}));
    REQUIRE(z.cols() == 2);
    for (std::size_t j = 0; j < 2; ++j) CHECK(std::abs(z(0, j)) <= 1e-15);
  }
  SUBCASE("identity block") {
    DenseMatrix a(2, 5);
    a(0, 0) = a(1, 1) = 1.0;
    const auto z = nullspace_basis(a);
    REQUIRE(z.cols() == 3);
    CHECK(max_abs_entry(multiply(a, z)) <= 1e-15);
    CHECK(max_abs_difference(multiply(z.transposed(), z), DenseMatrix::identity(3)) <= 1e-12);
  }
  SUBCASE("random") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const auto a = gaussian_matrix({seed}, 4, 9);
      const auto z = nullspace_basis(a);
      REQUIRE(z.cols() == 5);
      CHECK(max_abs_entry(multiply(a, z)) <= 1e-10);
      CHECK(max_abs_difference(multiply(z.transposed(), z), DenseMatrix::identity(5)) <= 1e-12);
    }
  }
  SUBCASE("square input") {
    CHECK(code_of([] { nullspace_basis(DenseMatrix::identity(3)); }) == ErrorCode::kInvalidArgument);
  }
}

TEST_CASE("householder qr solves least squares") {
  const auto a = gaussian_matrix({11}, 8, 3);
  HouseholderQR qr(a);
  const Vector x{1.0, -2.0, 0.5};
  const auto b = multiply(a, x);
  const auto sol = qr.solve(b);
  for (std::size_t i = 0; i < 3; ++i) CHECK(sol[i] == doctest::Approx(x[i]).epsilon(1e-12));
  const auto q = qr.thin_q();
  CHECK(max_abs_difference(multiply(q.transposed(), q), DenseMatrix::identity(3)) <= 1e-12);
  const auto c = qr.complement_q();
  CHECK(max_abs_entry(multiply(a.transposed(), c)) <= 1e-12);
}

TEST_CASE("min l1 oracle trivial cases") {
  const auto eye = DenseMatrix::identity(2);
  const Vector b{1.0, 0.0};
  const auto r = min_l1_oracle(eye, b);
  CHECK(r.x[0] == doctest::Approx(1.0));
  CHECK(r.x[1] == doctest::Approx(0.0));
  const auto a = gaussian_matrix({2}, 3, 6);
  const auto zero = min_l1_oracle(a, Vector(3, 0.0));
  CHECK(norm1(zero.x) == 0.0);
}

TEST_CASE("min l1 oracle agrees with the dual certificate") {
  int certified = 0;
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const auto a = gaussian_matrix({seed}, 4, 8);
    Rng rng(derive_seed({seed}, 99));
    Vector x(8, 0.0);
    for (auto i : rng.subset(8, 2)) x[i] = rng.normal();
    const auto b = multiply(a, x);
    const auto cert = dual_certificate_check(a, x);
    const auto r = min_l1_oracle(a, b);
    CHECK(norm2(subtract(multiply(a, r.x), b)) <= 1e-9 * norm2(b));
    if (cert.certified) {
      ++certified;
      CHECK(norm_inf(subtract(r.x, x)) <= 1e-9);
    }
  }
  CHECK(certified >= 5);
}

TEST_CASE("min l1 oracle beats random feasible points") {
  const auto a = gaussian_matrix({5}, 4, 9);
  Rng rng({17});
  const auto b = multiply(a, rng.normal_vector(9));
  const auto r = min_l1_oracle(a, b);
  const auto z = nullspace_basis(a);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto w = rng.normal_vector(z.cols());
    Vector x = r.x;
    const auto step = multiply(z, w);
    axpy(1.0, step, x);
    CHECK(norm1(x) >= r.l1 - 1e-12);
  }
}

TEST_CASE("min l1 oracle rejects large or infeasible problems") {
  CHECK(code_of([] { min_l1_oracle(gaussian_matrix({1}, 3, 15), Vector(3, 1.0)); }) ==
        ErrorCode::kUnsupported);
  // Zero matrix with nonzero observations has no feasible point.
  CHECK(code_of([] { min_l1_oracle(DenseMatrix(2, 4), Vector{1.0, 0.0}); }) == ErrorCode::kInfeasible);
}

TEST_CASE("derived seeds are distinct and stable") {
  const auto s1 = derive_seed({1}, 0);
  const auto s2 = derive_seed({1}, 1);
  CHECK(s1.value != s2.value);
  CHECK(derive_seed({1}, 0).value == s1.value);
  Rng rng({3});
  const auto u = rng.unit_sphere(7);
  CHECK(norm2(u) == doctest::Approx(1.0).epsilon(1e-14));
  const auto sub = rng.subset(10, 4);
  REQUIRE(sub.size() == 4);
  for (std::size_t i = 1; i < sub.size(); ++i) CHECK(sub[i - 1] < sub[i]);
}
