#pragma once

// Prior, thinning and innovation samplers. Every sampler takes its RngStream
// explicitly and is otherwise pure.

#include "function_space.hpp"
#include "rng.hpp"

namespace rcar {

class ParameterError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

struct GammaPriorSpec {
  double r = 0.5; // shape
  BasisSpec basis{64};
};

struct GaussianPriorSpec {
  BasisSpec basis{64};
};

/// Compound Poisson law sum_{j<=N} xi_j, N ~ Poisson(rate), xi_j ~ N(0, jump_std^2).
/// trunc_eps splits the jumps into a kept region |xi| >= eps and a discarded
/// region |xi| < eps.
struct CompoundPoissonSpec {
  double rate = 1.0;
  double jump_std = 1.0;
  double trunc_eps = 0.0;
};

void validate(const GammaPriorSpec &spec);
void validate(const CompoundPoissonSpec &spec);
void validate_beta(double beta);

FieldVector sample_gamma_prior(const GammaPriorSpec &spec, RngStream &rng);
FieldVector sample_gaussian_prior(const GaussianPriorSpec &spec, RngStream &rng);

/// Independent Beta(r beta, r (1 - beta)) multipliers tau_j, one per mode.
Eigen::VectorXd draw_beta_multipliers(std::size_t n, double r, double beta, RngStream &rng);
FieldVector sample_beta_thinning(const FieldVector &u, double r, double beta, RngStream &rng);
FieldVector sample_gamma_innovation(double r, double beta, const BasisSpec &basis, RngStream &rng);

/// N(0, (1 - beta^2) C) with C diagonal in the basis.
FieldVector sample_gaussian_innovation(double beta, const BasisSpec &basis, RngStream &rng);

struct PcnPair {
  FieldVector zeta;
  FieldVector xi;
};
PcnPair sample_pcn_pair(const FieldVector &u, double beta, const BasisSpec &basis, RngStream &rng);

/// Probability that a jump falls in the kept region, c_eps = P(|xi| >= eps).
double cp_kept_mass(const CompoundPoissonSpec &spec);

double sample_cp(const CompoundPoissonSpec &spec, RngStream &rng);
double sample_cp_truncated(const CompoundPoissonSpec &spec, RngStream &rng);
double sample_cp_remainder(const CompoundPoissonSpec &spec, RngStream &rng);

/// Single normal jump conditioned on |xi| >= eps (kept) or |xi| < eps.
double sample_kept_jump(double jump_std, double eps, RngStream &rng);
double sample_discarded_jump(double jump_std, double eps, RngStream &rng);

} // namespace rcar
