#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

namespace sharpcs {

/// 64-bit seed. Same seed and same dimensions give identical draws within one
/// build; streams are not portable across implementations.
struct RngSeed {
  std::uint64_t value = 0;
};

/// Derives an independent child seed by SplitMix64 mixing of (seed, stream).
RngSeed derive_seed(RngSeed seed, std::uint64_t stream);

/// Mersenne Twister (mt19937_64) with Box-Muller normals.
class Rng {
 public:
  explicit Rng(RngSeed seed) : engine_(seed.value) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double normal();
  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);

  std::vector<double> normal_vector(std::size_t size);
  /// Uniformly distributed point on the unit sphere in R^size.
  std::vector<double> unit_sphere(std::size_t size);
  /// Uniformly random subset of {0..size-1} of the given cardinality, sorted.
  std::vector<std::size_t> subset(std::size_t size, std::size_t count);

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

}  // namespace sharpcs
