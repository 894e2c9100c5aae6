#pragma once

// Random coefficient autoregressive (RCAR) Metropolis-Hastings kernel.
//
// One step from u:
//   zeta ~ K_beta(u, .), xi ~ mu_beta, v = zeta + xi,
//   accept v iff U < 1 ^ exp(Psi(u) - Psi(v)) with a single U ~ Uniform[0, 1).
// Random draws are consumed in the fixed order thinning, innovation, uniform,
// which is what lets the coupling code replay the same noise on two chains.

#include "function_space.hpp"
#include "measures.hpp"
#include "potentials.hpp"
#include "rng.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace rcar {

enum class ThinningKind { Beta, Deterministic };
enum class InnovationKind { Gamma, Gaussian, ScalarCp, ScalarCpTruncated };

struct ProposalKernel {
  ThinningKind thinning = ThinningKind::Beta;
  InnovationKind innovation = InnovationKind::Gamma;
  double beta = 0.5;
  double r = 0.5; // shape for Beta thinning and Gamma innovation
  BasisSpec basis{64};
  CompoundPoissonSpec cp{};

  static ProposalKernel gamma_beta(double r, double beta, const BasisSpec &basis);
  static ProposalKernel pcn(double beta, const BasisSpec &basis);
  /// Deterministic thinning beta*u with a scalar compound Poisson innovation.
  static ProposalKernel scalar_cp(double beta, const CompoundPoissonSpec &spec, bool truncated);

  std::size_t state_size() const { return basis.n_modes(); }
};

void validate(const ProposalKernel &k);

/// Randomness of one proposal, kept separate so two chains can share it.
struct ProposalNoise {
  Eigen::VectorXd tau; // Beta multipliers; empty for deterministic thinning
  FieldVector xi;
};

ProposalNoise draw_proposal_noise(const ProposalKernel &k, RngStream &rng);
FieldVector thin(const ProposalKernel &k, const FieldVector &u, const ProposalNoise &noise);
FieldVector apply_proposal(const ProposalKernel &k, const FieldVector &u, const ProposalNoise &noise);

double acceptance_prob(double psi_u, double psi_v);

struct StepResult {
  FieldVector u_next;
  bool accepted = false;
  FieldVector proposal;
  double psi_next = 0.0;
};

StepResult rcar_step(const FieldVector &u, const ProposalKernel &k, const Potential &p, RngStream &rng);
/// Same as rcar_step but reuses a known Psi(u).
StepResult rcar_step_cached(const FieldVector &u, double psi_u, const ProposalKernel &k, const Potential &p,
                            RngStream &rng);

struct Functional {
  std::string name;
  std::function<double(const FieldVector &)> fn;

  static Functional norm();
  static Functional coeff(std::size_t j);
  static Functional eval_at(const BasisSpec &basis, double x);
  static Functional potential(const Potential &p);
  static Functional value_1d();
};

struct ChainConfig {
  std::uint64_t n_steps = 1000;
  std::uint64_t burn_in = 0;
  std::uint64_t seed = 1;
  std::uint64_t replica = 0;
  std::vector<Functional> record;
  bool record_states = false;
};

void validate(const ChainConfig &cfg);

struct ChainTrace {
  std::vector<std::string> names;
  std::vector<std::vector<double>> recorded; // one row per step
  std::vector<std::uint8_t> accepted;
  std::uint64_t accept_count = 0;
  std::uint64_t burn_in = 0;
  FieldVector final_state;
  std::vector<FieldVector> states;
  bool failed = false;
  std::string error;

  std::size_t column(const std::string &name) const;
  double accept_rate() const;
};

ChainTrace run_chain(const FieldVector &u0, const ProposalKernel &k, const Potential &p, const ChainConfig &cfg);

/// Mean of a recorded functional over the post-burn-in rows.
double cesaro_average(const ChainTrace &trace, const std::string &functional_name);

void write_trace_csv(std::ostream &os, const ChainTrace &trace);

/// Allocation-free path for one-dimensional states.
struct ScalarKernel {
  ProposalKernel kernel;

  double draw_zeta(double u, RngStream &rng) const;
  double draw_xi(RngStream &rng) const;
};

struct ScalarChainResult {
  double final_state = 0.0;
  std::uint64_t accept_count = 0;
};

/// Runs n steps of the 1-D chain; observer(step, u) is called after every step.
ScalarChainResult run_scalar_chain(double u0, const ProposalKernel &k, const std::function<double(double)> &psi,
                                   std::uint64_t n_steps, RngStream &rng,
                                   const std::function<void(std::uint64_t, double)> &observer);

} // namespace rcar
