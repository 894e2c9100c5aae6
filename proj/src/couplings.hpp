#pragma once

// Basic coupling of two RCAR chains and the diagnostics built on it.
//
// Both chains share the thinning multipliers, the innovation and the uniform
// used for the accept/reject decision.

#include "function_space.hpp"
#include "metrics.hpp"
#include "mh_core.hpp"
#include "stats.hpp"

#include <cstdint>
#include <vector>

namespace rcar {

struct CoupledStep {
  FieldVector u_next;
  FieldVector v_next;
  bool u_accepted = false;
  bool v_accepted = false;
};

CoupledStep basic_coupled_step(const FieldVector &u, const FieldVector &v, const ProposalKernel &k,
                               const Potential &p, RngStream &rng);

/// Pair state with cached potential values, advanced in place.
struct CoupledState {
  FieldVector u, v;
  double psi_u = 0.0, psi_v = 0.0;

  CoupledState(FieldVector u0, FieldVector v0, const Potential &p);
  /// u evolves under p_u, v under p_v; noise and uniform stay shared.
  CoupledState(FieldVector u0, FieldVector v0, const Potential &p_u, const Potential &p_v);
  void step(const ProposalKernel &k, const Potential &p, RngStream &rng) { step(k, p, p, rng); }
  void step(const ProposalKernel &k, const Potential &p_u, const Potential &p_v, RngStream &rng);
};

struct CoupledTrace {
  std::vector<double> d;       // d_s(u_k, v_k), k = 1..n
  std::vector<double> tilde_d; // tilde d_s(u_k, v_k)
  std::vector<double> V_u, V_v;
  FieldVector final_u, final_v;
};

CoupledTrace run_coupled_chain(const FieldVector &u0, const FieldVector &v0, std::uint64_t n,
                               const ProposalKernel &k, const Potential &p, RngStream &rng,
                               const SemimetricParams &params);

struct ContractionEstimate {
  double gamma1_hat = 0.0;
  double ci_halfwidth = 0.0; // 99%
  std::uint64_t pair_budget = 0;
  double d0 = 0.0;
  double mean_d1 = 0.0;
};

/// Ratio of means E d_s(u_1, v_1) / d_s(u, v) over `reps` coupled single steps.
ContractionEstimate estimate_contraction(const FieldVector &u, const FieldVector &v, std::uint64_t reps,
                                         const ProposalKernel &k, const Potential &p,
                                         const SemimetricParams &params, RngStream &rng);

/// Monte Carlo estimate of (PV)(u) = E ||u_1||^p_exp from `reps` one-step draws.
MeanSe estimate_drift(const FieldVector &u, std::uint64_t reps, const ProposalKernel &k, const Potential &p,
                      int p_exp, RngStream &rng);

struct DriftProbe {
  double V = 0.0;  // V(u_i)
  double PV = 0.0; // estimate of (PV)(u_i)
  double se = 0.0;
};

struct DriftEstimate {
  double kappa_hat = 0.0;
  double K_hat = 0.0;
  double residual = 0.0; // max over probes of PV_i - (kappa V_i + K), floored at 0
  std::size_t violations = 0; // probes with PV_i - (kappa V_i + K) > 3 se_i
  double free_slope = 0.0;    // unconstrained least-squares slope, for reference
};

/// Least-squares line kappa V + K through the probe estimates with
/// kappa >= 0, K >= 0 and kappa V_i + K >= PV_i - 3 se_i for every probe. The
/// fit itself leaves kappa unbounded above; the reported kappa_hat is capped at 1.
DriftEstimate fit_drift(const std::vector<DriftProbe> &probes);

struct SmallsetLevel {
  std::uint64_t n = 0;
  double mean = 0.0;
  double se = 0.0;
  double p99 = 0.0;
};

struct SmallsetResult {
  std::vector<SmallsetLevel> levels;
  std::vector<std::vector<double>> d_by_pair; // [pair][level]
  double acceptance = 0.0; // sublevel rejection-sampling acceptance rate
};

/// Pairs drawn from `draw_prior` conditioned on V <= R, advanced by the basic
/// coupling; d_s recorded at each step count in `grid` (sorted, may include 0).
SmallsetResult smallset_probe(double R, const std::vector<std::uint64_t> &grid, std::size_t n_pairs,
                              const ProposalKernel &k, const Potential &p, const SemimetricParams &params,
                              const std::function<FieldVector(RngStream &)> &draw_prior, RngStream &rng);

} // namespace rcar
