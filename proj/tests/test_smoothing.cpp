#include <cmath>
#include <limits>

#include "doctest.h"
#include "oracles.hpp"
#include "sharpcs/error.hpp"
#include "sharpcs/experiments.hpp"
#include "sharpcs/linalg.hpp"
#include "sharpcs/rng.hpp"
#include "sharpcs/smoothing.hpp"

using namespace sharpcs;

namespace {

FeasibleSet random_equality(std::uint64_t seed, std::size_t n, std::size_t p) {
  const auto q = row_orthonormalize(gaussian_matrix({seed}, n, p)).q;
  Rng rng(derive_seed({seed}, 5));
  return FeasibleSet::equality(q, rng.normal_vector(n));
}

FeasibleSet random_ball(std::uint64_t seed, std::size_t n, std::size_t p, double eps) {
  auto set = random_equality(seed, n, p);
  return FeasibleSet::ball(set.a, set.b, eps);
}

}  // namespace

TEST_CASE("huber value and gradient closed forms") {
  const auto zero = huber_value_grad(Vector(3, 0.0), 0.5);
  CHECK(zero.value == 0.0);
  for (double g : zero.grad) CHECK(g == 0.0);
  const auto two = huber_value_grad(Vector{2.0}, 1.0);
  CHECK(two.value == 1.5);
  CHECK(two.grad[0] == 1.0);
  const auto inside = huber_value_grad(Vector{-0.25}, 1.0);
  CHECK(inside.value == doctest::Approx(0.03125));
  CHECK(inside.grad[0] == -0.25);
  CHECK(huber_value(Vector{2.0, -3.0}, 1.0) == 4.0);
}

TEST_CASE("huber rejects nonpositive smoothing") {
  CHECK_THROWS_AS(huber_value_grad(Vector{1.0}, 0.0), Error);
  CHECK_THROWS_AS(huber_value(Vector{1.0}, -1.0), Error);
}

TEST_CASE("huber sandwich holds") {
  Rng rng({42});
  for (int trial = 0; trial < 200; ++trial) {
    const double mu = std::exp(rng.normal() * 2);
    Vector x = rng.normal_vector(30);
    for (auto& v : x) v *= std::exp(rng.normal());
    const double value = huber_value(x, mu);
    const double l1 = norm1(x);
    CHECK(l1 - value >= 0.0);
    CHECK(l1 - value <= mu * 30 / 2.0 + 4 * std::numeric_limits<double>::epsilon() * l1);
  }
}

TEST_CASE("huber gradient matches central differences") {
  Rng rng({7});
  for (int trial = 0; trial < 20; ++trial) {
    const double mu = 0.3;
    const Vector x = rng.normal_vector(20);
    const auto vg = huber_value_grad(x, mu);
    for (std::size_t i = 0; i < x.size(); ++i) {
      Vector xp = x, xm = x;
      xp[i] += 1e-6;
      xm[i] -= 1e-6;
      const double fd = (huber_value(xp, mu) - huber_value(xm, mu)) / 2e-6;
      CHECK(std::abs(fd - vg.grad[i]) <= 1e-5);
    }
  }
}

TEST_CASE("huber gradient is Lipschitz with constant 1/mu") {
  Rng rng({8});
  for (int trial = 0; trial < 100; ++trial) {
    const double mu = 0.1 + rng.uniform();
    const Vector x = rng.normal_vector(15);
    const Vector y = rng.normal_vector(15);
    const auto gx = huber_value_grad(x, mu).grad;
    const auto gy = huber_value_grad(y, mu).grad;
    CHECK(norm2(subtract(gx, gy)) <= norm2(subtract(x, y)) / mu * (1 + 1e-12));
  }
}

TEST_CASE("feasible sets require orthonormal rows") {
  const auto a = gaussian_matrix({1}, 3, 7);
  CHECK_THROWS_AS(FeasibleSet::equality(a, Vector(3, 0.0)), Error);
  const auto q = row_orthonormalize(a).q;
  CHECK_THROWS_AS(FeasibleSet::equality(q, Vector(2, 0.0)), Error);
  CHECK_THROWS_AS(FeasibleSet::ball(q, Vector(3, 0.0), 0.0), Error);
  CHECK_NOTHROW(FeasibleSet::ball(q, Vector(3, 0.0), 0.1));
}

TEST_CASE("equality projection closed forms") {
  const auto set = random_equality(3, 5, 12);
  const auto from_zero = project_feasible(Vector(12, 0.0), set);
  const auto atb = multiply_transposed(set.a, set.b);
  CHECK(norm_inf(subtract(from_zero, atb)) <= 1e-14);
  const auto again = project_feasible(from_zero, set);
  CHECK(norm_inf(subtract(again, from_zero)) <= 1e-14);
}

TEST_CASE("projections match least-distance oracles") {
  Rng rng({9});
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto eq = random_equality(seed, 5, 12);
    const auto x = rng.normal_vector(12);
    const auto y = project_feasible(x, eq);
    CHECK(norm_inf(subtract(y, oracle::project_affine(eq.a, x, eq.b))) <= 1e-6);
    CHECK(feasibility_residual(y, eq) <= 1e-10);

    const auto ball = random_ball(seed, 5, 12, 0.3);
    const auto yb = project_feasible(x, ball);
    CHECK(norm_inf(subtract(yb, oracle::project_ball(ball.a, x, ball.b, 0.3))) <= 1e-6);
    CHECK(feasibility_residual(yb, ball) <= 1e-10);
  }
}

TEST_CASE("ball projection leaves feasible points unchanged") {
  const auto ball = random_ball(4, 4, 9, 0.5);
  const auto inside = project_feasible(multiply_transposed(ball.a, ball.b), ball);
  const auto same = project_feasible(inside, ball);
  CHECK(norm_inf(subtract(same, inside)) == 0.0);
}

TEST_CASE("projections are idempotent and nonexpansive") {
  Rng rng({10});
  const auto eq = random_equality(5, 6, 15);
  const auto ball = random_ball(5, 6, 15, 0.2);
  for (const FeasibleSet* set : {&eq, &ball}) {
    for (int trial = 0; trial < 100; ++trial) {
      const auto x = rng.normal_vector(15);
      const auto y = rng.normal_vector(15);
      const auto px = project_feasible(x, *set);
      const auto py = project_feasible(y, *set);
      CHECK(norm2(subtract(px, py)) <= norm2(subtract(x, y)) * (1 + 1e-12));
      CHECK(norm_inf(subtract(project_feasible(px, *set), px)) <= 1e-12);
    }
  }
}

TEST_CASE("nesterov solve with zero iterations returns the start") {
  const auto set = random_equality(6, 4, 10);
  const auto x0 = project_feasible(Vector(10, 1.0), set);
  const auto r = nesterov_solve(x0, 0, 0.1, set);
  CHECK(r.x == x0);
  CHECK(r.trace.iterations() == 0);
}

TEST_CASE("nesterov solve rejects infeasible starts and bad smoothing") {
  const auto set = random_equality(6, 4, 10);
  CHECK_THROWS_AS(nesterov_solve(Vector(10, 1.0), 5, 0.1, set), Error);
  const auto x0 = project_feasible(Vector(10, 1.0), set);
  CHECK_THROWS_AS(nesterov_solve(x0, 5, 0.0, set), Error);
}

TEST_CASE("nesterov solve reaches the accelerated bound on tiny instances") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto inst = gen_instance(10, 6, 2, 0.0, {seed});
    const auto set = FeasibleSet::equality(inst.a, inst.b);
    const auto x_hat = min_l1_oracle(inst.a, inst.b);
    const auto start = multiply_transposed(inst.a, inst.b);
    const double dist = norm2(subtract(start, x_hat.x));
    const std::size_t t = 2000;
    const double mu = std::sqrt(2.0) * dist / (t * std::sqrt(10.0));
    const auto r = nesterov_solve(start, t, mu, set);
    REQUIRE(r.trace.iterations() == t);
    CHECK(norm1(r.x) - x_hat.l1 <= 3 * std::sqrt(10.0) * dist / t);
    for (double res : r.trace.residual) CHECK(res <= 1e-10);
  }
}

TEST_CASE("monotone variant keeps the smoothed objective nonincreasing") {
  const auto inst = gen_instance(40, 20, 3, 0.0, {3});
  const auto set = FeasibleSet::equality(inst.a, inst.b);
  const auto start = multiply_transposed(inst.a, inst.b);
  NesterovOptions opts;
  opts.monotone = true;
  const auto r = nesterov_solve(start, 500, 1e-3, set, opts);
  for (std::size_t i = 1; i < r.trace.smoothed.size(); ++i)
    CHECK(r.trace.smoothed[i] <= r.trace.smoothed[i - 1] + 1e-12 * std::abs(r.trace.smoothed[i - 1]));
}

TEST_CASE("ball constrained solve stays feasible") {
  const auto inst = gen_instance(40, 20, 3, 1e-2, {4});
  const double eps = 1e-2 * spectral_norm(inst.a);
  const auto set = FeasibleSet::ball(inst.a, inst.b, eps);
  const auto start = project_feasible(Vector(40, 0.0), set);
  const auto r = nesterov_solve(start, 300, 1e-3, set);
  for (double res : r.trace.residual) CHECK(res <= 1e-10);
  CHECK(norm1(r.x) <= norm1(start));
}

TEST_CASE("balanced smoothing formula") {
  CHECK(balanced_smoothing(2.0, 10, 4) == doctest::Approx(std::sqrt(2.0) * 2.0 / (10 * 2.0)));
  CHECK_THROWS_AS(balanced_smoothing(1.0, 0, 4), Error);
}
