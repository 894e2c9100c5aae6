#pragma once

#include "function_space.hpp"

#include <span>
#include <utility>
#include <vector>

namespace rcar {

/// (omega, eta, s, theta, p) for d_s, V and tilde d_s.
struct SemimetricParams {
  double omega = 1.0;
  double eta = 0.1;
  double s = 0.0;
  double theta = 0.01;
  int p = 2;
};

void validate(const SemimetricParams &params);

/// V(u) = ||u||^p.
double lyapunov_V(const FieldVector &u, int p);

/// d_s(u, v) = 1 ^ (1 + eta ||u|| + eta ||v||)^s ||u - v|| / omega.
double d_s(const FieldVector &u, const FieldVector &v, const SemimetricParams &params);
/// [d_s(u, v) (2 + theta V(u) + theta V(v))]^{1/2}.
double tilde_d_s(const FieldVector &u, const FieldVector &v, const SemimetricParams &params);

/// tilde_d(u, v) / (tilde_d(u, w) + tilde_d(w, v)).
double weak_triangle_ratio(const FieldVector &u, const FieldVector &v, const FieldVector &w,
                           const SemimetricParams &params);

struct GapEstimate {
  double gap = 0.0;
  double std_err = 0.0;
};

/// |mean(a) - mean(b)| with the pooled standard error sqrt(s_a^2/n_a + s_b^2/n_b).
GapEstimate expectation_gap(std::span<const double> samples_a, std::span<const double> samples_b);

/// Mean of tilde_d over coupled pairs: an upper bound on the transport semimetric.
double coupled_tilde_d_mean(std::span<const std::pair<FieldVector, FieldVector>> pairs,
                            const SemimetricParams &params);

} // namespace rcar
