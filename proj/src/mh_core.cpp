#include "mh_core.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace rcar {

ProposalKernel ProposalKernel::gamma_beta(double r, double beta, const BasisSpec &basis) {
  ProposalKernel k;
  k.thinning = ThinningKind::Beta;
  k.innovation = InnovationKind::Gamma;
  k.r = r;
  k.beta = beta;
  k.basis = basis;
  validate(k);
  return k;
}

ProposalKernel ProposalKernel::pcn(double beta, const BasisSpec &basis) {
  ProposalKernel k;
  k.thinning = ThinningKind::Deterministic;
  k.innovation = InnovationKind::Gaussian;
  k.beta = beta;
  k.basis = basis;
  validate(k);
  return k;
}

ProposalKernel ProposalKernel::scalar_cp(double beta, const CompoundPoissonSpec &spec, bool truncated) {
  ProposalKernel k;
  k.thinning = ThinningKind::Deterministic;
  k.innovation = truncated ? InnovationKind::ScalarCpTruncated : InnovationKind::ScalarCp;
  k.beta = beta;
  k.basis = BasisSpec(1);
  k.cp = spec;
  validate(k);
  return k;
}

void validate(const ProposalKernel &k) {
  validate_beta(k.beta);
  switch (k.innovation) {
  case InnovationKind::Gamma:
    if (k.thinning != ThinningKind::Beta)
      throw ParameterError("gamma innovation pairs only with beta thinning");
    if (!(k.r > 0.0))
      throw ParameterError("kernel shape r must be positive");
    break;
  case InnovationKind::Gaussian:
    if (k.thinning != ThinningKind::Deterministic)
      throw ParameterError("gaussian innovation pairs only with deterministic thinning");
    break;
  case InnovationKind::ScalarCp:
  case InnovationKind::ScalarCpTruncated:
    if (k.thinning != ThinningKind::Deterministic)
      throw ParameterError("compound Poisson innovation pairs only with deterministic thinning");
    if (k.basis.n_modes() != 1)
      throw ParameterError("compound Poisson innovation is one-dimensional");
    validate(k.cp);
    break;
  }
}

ProposalNoise draw_proposal_noise(const ProposalKernel &k, RngStream &rng) {
  ProposalNoise noise;
  const std::size_t n = k.state_size();
  if (k.thinning == ThinningKind::Beta)
    noise.tau = draw_beta_multipliers(n, k.r, k.beta, rng);
  switch (k.innovation) {
  case InnovationKind::Gamma:
    noise.xi = sample_gamma_innovation(k.r, k.beta, k.basis, rng);
    break;
  case InnovationKind::Gaussian:
    noise.xi = sample_gaussian_innovation(k.beta, k.basis, rng);
    break;
  case InnovationKind::ScalarCp:
    noise.xi = FieldVector{sample_cp(k.cp, rng)};
    break;
  case InnovationKind::ScalarCpTruncated:
    noise.xi = FieldVector{sample_cp_truncated(k.cp, rng)};
    break;
  }
  return noise;
}

FieldVector thin(const ProposalKernel &k, const FieldVector &u, const ProposalNoise &noise) {
  if (u.size() != k.state_size())
    throw InvalidInput("state size does not match kernel basis");
  if (k.thinning == ThinningKind::Beta)
    return FieldVector(Eigen::VectorXd(noise.tau.cwiseProduct(u.coeffs())));
  return k.beta * u;
}

FieldVector apply_proposal(const ProposalKernel &k, const FieldVector &u, const ProposalNoise &noise) {
  FieldVector v = thin(k, u, noise);
  v += noise.xi;
  return v;
}

double acceptance_prob(double psi_u, double psi_v) {
  if (std::isnan(psi_u) || std::isnan(psi_v))
    throw InvalidInput("acceptance_prob: NaN potential value");
  const double d = psi_u - psi_v;
  if (std::isnan(d)) // both infinite with the same sign
    throw InvalidInput("acceptance_prob: undefined potential difference");
  if (d >= 0.0)
    return 1.0;
  return std::exp(d);
}

StepResult rcar_step_cached(const FieldVector &u, double psi_u, const ProposalKernel &k, const Potential &p,
                            RngStream &rng) {
  const ProposalNoise noise = draw_proposal_noise(k, rng);
  StepResult res;
  res.proposal = apply_proposal(k, u, noise);
  const double psi_v = p(res.proposal);
  const double a = acceptance_prob(psi_u, psi_v);
  res.accepted = rng.uniform() < a;
  res.u_next = res.accepted ? res.proposal : u;
  res.psi_next = res.accepted ? psi_v : psi_u;
  return res;
}

StepResult rcar_step(const FieldVector &u, const ProposalKernel &k, const Potential &p, RngStream &rng) {
  return rcar_step_cached(u, p(u), k, p, rng);
}

Functional Functional::norm() {
  return {"norm", [](const FieldVector &u) { return h1_norm(u); }};
}

Functional Functional::coeff(std::size_t j) {
  return {"coeff(" + std::to_string(j) + ")", [j](const FieldVector &u) { return u[j]; }};
}

Functional Functional::eval_at(const BasisSpec &basis, double x) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "eval_at(%.6g)", x);
  return {buf, [basis, x](const FieldVector &u) { return evaluate_at(basis, u, x); }};
}

Functional Functional::potential(const Potential &p) {
  return {"potential", [p](const FieldVector &u) { return p(u); }};
}

Functional Functional::value_1d() {
  return {"u", [](const FieldVector &u) { return u[0]; }};
}

void validate(const ChainConfig &cfg) {
  if (cfg.n_steps > 0 && cfg.burn_in >= cfg.n_steps)
    throw ParameterError("burn_in must be smaller than n_steps");
}

std::size_t ChainTrace::column(const std::string &name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name)
      return i;
  throw InvalidInput("functional '" + name + "' was not recorded");
}

double ChainTrace::accept_rate() const {
  return accepted.empty() ? 0.0 : static_cast<double>(accept_count) / static_cast<double>(accepted.size());
}

ChainTrace run_chain(const FieldVector &u0, const ProposalKernel &k, const Potential &p, const ChainConfig &cfg) {
  validate(cfg);
  validate(k);
  ChainTrace trace;
  trace.burn_in = cfg.burn_in;
  for (const auto &f : cfg.record)
    trace.names.push_back(f.name);
  trace.final_state = u0;
  if (cfg.n_steps == 0)
    return trace;

  trace.recorded.reserve(cfg.n_steps);
  trace.accepted.reserve(cfg.n_steps);
  RngStream rng(cfg.seed, cfg.replica);
  FieldVector u = u0;
  try {
    double psi = p(u);
    for (std::uint64_t step = 0; step < cfg.n_steps; ++step) {
      StepResult s = rcar_step_cached(u, psi, k, p, rng);
      u = std::move(s.u_next);
      psi = s.psi_next;
      trace.accepted.push_back(s.accepted ? 1 : 0);
      trace.accept_count += s.accepted ? 1 : 0;
      std::vector<double> row;
      row.reserve(cfg.record.size());
      for (const auto &f : cfg.record)
        row.push_back(f.fn(u));
      trace.recorded.push_back(std::move(row));
      if (cfg.record_states)
        trace.states.push_back(u);
    }
  } catch (const std::exception &e) {
    trace.failed = true;
    trace.error = e.what();
  }
  trace.final_state = u;
  return trace;
}

double cesaro_average(const ChainTrace &trace, const std::string &functional_name) {
  const std::size_t col = trace.column(functional_name);
  if (trace.recorded.size() <= trace.burn_in)
    throw InvalidInput("cesaro_average: no rows after burn-in");
  double sum = 0.0;
  for (std::size_t i = trace.burn_in; i < trace.recorded.size(); ++i)
    sum += trace.recorded[i][col];
  return sum / static_cast<double>(trace.recorded.size() - trace.burn_in);
}

void write_trace_csv(std::ostream &os, const ChainTrace &trace) {
  os << "step,accepted";
  for (const auto &n : trace.names)
    os << ',' << n;
  os << '\n';
  char buf[40];
  for (std::size_t i = 0; i < trace.recorded.size(); ++i) {
    os << (i + 1) << ',' << static_cast<int>(trace.accepted[i]);
    for (double v : trace.recorded[i]) {
      std::snprintf(buf, sizeof buf, ",%.17g", v);
      os << buf;
    }
    os << '\n';
  }
}

double ScalarKernel::draw_zeta(double u, RngStream &rng) const {
  if (kernel.thinning == ThinningKind::Beta)
    return rng.beta(kernel.r * kernel.beta, kernel.r * (1.0 - kernel.beta)) * u;
  return kernel.beta * u;
}

double ScalarKernel::draw_xi(RngStream &rng) const {
  switch (kernel.innovation) {
  case InnovationKind::Gamma:
    return std::sqrt(kernel.basis.eigenvalue(0)) * rng.gamma(kernel.r * (1.0 - kernel.beta));
  case InnovationKind::Gaussian:
    return std::sqrt((1.0 - kernel.beta * kernel.beta) * kernel.basis.eigenvalue(0)) * rng.normal();
  case InnovationKind::ScalarCp:
    return sample_cp(kernel.cp, rng);
  case InnovationKind::ScalarCpTruncated:
    return sample_cp_truncated(kernel.cp, rng);
  }
  return 0.0;
}

ScalarChainResult run_scalar_chain(double u0, const ProposalKernel &k, const std::function<double(double)> &psi,
                                   std::uint64_t n_steps, RngStream &rng,
                                   const std::function<void(std::uint64_t, double)> &observer) {
  validate(k);
  if (k.state_size() != 1)
    throw InvalidInput("run_scalar_chain needs a one-dimensional kernel");
  const ScalarKernel sk{k};
  ScalarChainResult res;
  double u = u0;
  double psi_u = psi(u);
  for (std::uint64_t step = 0; step < n_steps; ++step) {
    const double zeta = sk.draw_zeta(u, rng);
    const double v = zeta + sk.draw_xi(rng);
    const double psi_v = psi(v);
    if (rng.uniform() < acceptance_prob(psi_u, psi_v)) {
      u = v;
      psi_u = psi_v;
      ++res.accept_count;
    }
    if (observer)
      observer(step, u);
  }
  res.final_state = u;
  return res;
}

} // namespace rcar
