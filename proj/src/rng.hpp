#pragma once

// Deterministic random streams.
//
// Every replica of every experiment owns one RngStream identified by the pair
// (master_seed, replica_index). The generator is xoshiro256**, seeded from
// SplitMix64(master_seed XOR SplitMix64(replica_index + 0x9E3779B97F4A7C15)).
// All variate generators below are implemented here rather than taken from
// <random> so that output is bit-identical across standard libraries.

#include <array>
#include <cstdint>

namespace rcar {

std::uint64_t splitmix64(std::uint64_t &state);
std::uint64_t stream_key(std::uint64_t master_seed, std::uint64_t replica_index);

class RngStream {
public:
  RngStream(std::uint64_t master_seed, std::uint64_t replica_index);

  std::uint64_t master_seed() const { return master_seed_; }
  std::uint64_t replica_index() const { return replica_index_; }

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on the open interval (0, 1).
  double uniform_open();
  double normal();
  /// Logarithm of a Gamma(shape, 1) variate; usable for tiny shapes.
  double log_gamma(double shape);
  double gamma(double shape);
  /// Beta(a, b) variate clamped to the open interval (0, 1).
  double beta(double a, double b);
  /// Poisson(mean) by sequential inversion; mean must be <= 500.
  std::uint64_t poisson(double mean);

private:
  std::array<std::uint64_t, 4> s_{};
  std::uint64_t master_seed_;
  std::uint64_t replica_index_;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

} // namespace rcar
