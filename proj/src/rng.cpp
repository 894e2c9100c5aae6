#include "rng.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace rcar {

namespace {

constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

} // namespace

std::uint64_t splitmix64(std::uint64_t &state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t stream_key(std::uint64_t master_seed, std::uint64_t replica_index) {
  std::uint64_t r = replica_index + 0x9E3779B97F4A7C15ULL;
  std::uint64_t k = master_seed ^ splitmix64(r);
  return splitmix64(k);
}

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t replica_index)
    : master_seed_(master_seed), replica_index_(replica_index) {
  std::uint64_t sm = stream_key(master_seed, replica_index);
  for (auto &w : s_)
    w = splitmix64(sm);
}

std::uint64_t RngStream::next_u64() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double RngStream::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double RngStream::uniform_open() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

double RngStream::normal() {
  if (has_spare_normal_) {
    has_spare_normal_ = false;
    return spare_normal_;
  }
  double x, y, s;
  do {
    x = 2.0 * uniform() - 1.0;
    y = 2.0 * uniform() - 1.0;
    s = x * x + y * y;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_normal_ = y * f;
  has_spare_normal_ = true;
  return x * f;
}

// Marsaglia & Tsang (2000); shapes below one use the boost
// G(a) = G(a + 1) * U^(1/a), carried out on the log scale.
double RngStream::log_gamma(double shape) {
  if (!(shape > 0.0) || !std::isfinite(shape))
    throw std::invalid_argument("gamma shape must be positive and finite");
  if (shape < 1.0) {
    const double lu = std::log(uniform_open());
    return log_gamma(shape + 1.0) + lu / shape;
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform_open();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2 || std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v)))
      return std::log(d) + std::log(v);
  }
}

double RngStream::gamma(double shape) { return std::exp(log_gamma(shape)); }

double RngStream::beta(double a, double b) {
  const double lx = log_gamma(a);
  const double ly = log_gamma(b);
  // x / (x + y) = 1 / (1 + exp(ly - lx)), stable when both gammas underflow
  double t = 1.0 / (1.0 + std::exp(ly - lx));
  constexpr double lo = std::numeric_limits<double>::denorm_min();
  const double hi = std::nextafter(1.0, 0.0);
  if (t < lo)
    t = lo;
  if (t > hi)
    t = hi;
  return t;
}

std::uint64_t RngStream::poisson(double mean) {
  if (!(mean >= 0.0) || mean > 500.0)
    throw std::invalid_argument("poisson mean must lie in [0, 500]");
  if (mean == 0.0)
    return 0;
  double p = std::exp(-mean);
  double cdf = p;
  const double u = uniform();
  std::uint64_t k = 0;
  while (u > cdf) {
    ++k;
    p *= mean / static_cast<double>(k);
    cdf += p;
    if (p == 0.0 && cdf < u) // tail lost to rounding
      break;
  }
  return k;
}

} // namespace rcar
