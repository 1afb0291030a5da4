#include "sharpcs/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "sharpcs/error.hpp"

namespace sharpcs {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

RngSeed derive_seed(RngSeed seed, std::uint64_t stream) {
  return RngSeed{splitmix64(splitmix64(seed.value) ^ splitmix64(stream + 0x632be59bd9b4e019ULL))};
}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  if (spare_) {
    const double value = *spare_;
    spare_.reset();
    return value;
  }
  double u1 = 0.0;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  return radius * std::cos(angle);
}

std::uint64_t Rng::below(std::uint64_t bound) {
  require(bound > 0, ErrorCode::kInvalidArgument, "Rng::below: bound must be positive");
  // Rejection sampling keeps the draw unbiased.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t draw = engine_();
  while (draw >= limit) draw = engine_();
  return draw % bound;
}

std::vector<double> Rng::normal_vector(std::size_t size) {
  std::vector<double> out(size);
  for (auto& v : out) v = normal();
  return out;
}

std::vector<double> Rng::unit_sphere(std::size_t size) {
  require(size > 0, ErrorCode::kInvalidArgument, "Rng::unit_sphere: empty dimension");
  for (;;) {
    auto v = normal_vector(size);
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (norm > 1e-300) {
      for (auto& x : v) x /= norm;
      return v;
    }
  }
}

std::vector<std::size_t> Rng::subset(std::size_t size, std::size_t count) {
  require(count <= size, ErrorCode::kInvalidArgument, "Rng::subset: count exceeds size");
  std::vector<std::size_t> pool(size);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  // Partial Fisher-Yates.
  for (std::size_t i = 0; i < count; ++i) {
    const auto j = i + static_cast<std::size_t>(below(size - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(count);
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace sharpcs
