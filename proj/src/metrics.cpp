#include "metrics.hpp"

#include "stats.hpp"

#include <algorithm>
#include <cmath>

namespace rcar {

void validate(const SemimetricParams &params) {
  if (!(params.omega > 0.0) || !(params.eta > 0.0) || !(params.theta > 0.0))
    throw InvalidInput("semimetric omega, eta and theta must be positive");
  if (!(params.s >= 0.0))
    throw InvalidInput("semimetric exponent s must be nonnegative");
  if (params.p < 1)
    throw InvalidInput("Lyapunov exponent p must be at least 1");
}

double lyapunov_V(const FieldVector &u, int p) {
  if (p < 1)
    throw InvalidInput("Lyapunov exponent p must be at least 1");
  return std::pow(h1_norm(u), p);
}

double d_s(const FieldVector &u, const FieldVector &v, const SemimetricParams &params) {
  const double dist = h1_distance(u, v);
  if (dist == 0.0)
    return 0.0;
  const auto [lo, hi] = std::minmax({h1_norm(u), h1_norm(v)});
  const double growth = 1.0 + params.eta * lo + params.eta * hi;
  const double raw = std::pow(growth, params.s) * dist / params.omega;
  return std::min(1.0, raw);
}

double tilde_d_s(const FieldVector &u, const FieldVector &v, const SemimetricParams &params) {
  const double d = d_s(u, v, params);
  if (d == 0.0)
    return 0.0;
  const auto [lo, hi] = std::minmax({lyapunov_V(u, params.p), lyapunov_V(v, params.p)});
  const double w = 2.0 + params.theta * lo + params.theta * hi;
  return std::sqrt(d * w);
}

double weak_triangle_ratio(const FieldVector &u, const FieldVector &v, const FieldVector &w,
                           const SemimetricParams &params) {
  const double denom = tilde_d_s(u, w, params) + tilde_d_s(w, v, params);
  if (denom == 0.0)
    throw InvalidInput("weak_triangle_ratio: u = w = v");
  return tilde_d_s(u, v, params) / denom;
}

GapEstimate expectation_gap(std::span<const double> samples_a, std::span<const double> samples_b) {
  if (samples_a.empty() || samples_b.empty())
    throw InvalidInput("expectation_gap: empty sample set");
  const MeanSe a = mean_and_se(samples_a);
  const MeanSe b = mean_and_se(samples_b);
  return {std::abs(a.mean - b.mean), std::sqrt(a.se * a.se + b.se * b.se)};
}

double coupled_tilde_d_mean(std::span<const std::pair<FieldVector, FieldVector>> pairs,
                            const SemimetricParams &params) {
  if (pairs.empty())
    throw InvalidInput("coupled_tilde_d_mean: no pairs");
  double sum = 0.0;
  for (const auto &[u, v] : pairs)
    sum += tilde_d_s(u, v, params);
  return sum / static_cast<double>(pairs.size());
}

} // namespace rcar
