#include "measures.hpp"

#include <cmath>
#include <numbers>

namespace rcar {

void validate(const GammaPriorSpec &spec) {
  if (!(spec.r > 0.0) || !std::isfinite(spec.r))
    throw ParameterError("gamma prior shape r must be positive");
}

void validate(const CompoundPoissonSpec &spec) {
  if (!(spec.rate > 0.0) || !std::isfinite(spec.rate))
    throw ParameterError("compound Poisson rate must be positive");
  if (!(spec.jump_std > 0.0) || !std::isfinite(spec.jump_std))
    throw ParameterError("compound Poisson jump_std must be positive");
  if (!(spec.trunc_eps >= 0.0) || !std::isfinite(spec.trunc_eps))
    throw ParameterError("truncation level must be nonnegative");
}

void validate_beta(double beta) {
  if (!(beta > 0.0 && beta < 1.0))
    throw ParameterError("beta must lie in (0, 1)");
}

FieldVector sample_gamma_prior(const GammaPriorSpec &spec, RngStream &rng) {
  validate(spec);
  const std::size_t n = spec.basis.n_modes();
  FieldVector u(n);
  for (std::size_t j = 0; j < n; ++j)
    u[j] = std::sqrt(spec.basis.eigenvalue(j)) * rng.gamma(spec.r);
  return u;
}

FieldVector sample_gaussian_prior(const GaussianPriorSpec &spec, RngStream &rng) {
  const std::size_t n = spec.basis.n_modes();
  FieldVector u(n);
  for (std::size_t j = 0; j < n; ++j)
    u[j] = std::sqrt(spec.basis.eigenvalue(j)) * rng.normal();
  return u;
}

Eigen::VectorXd draw_beta_multipliers(std::size_t n, double r, double beta, RngStream &rng) {
  validate_beta(beta);
  if (!(r > 0.0))
    throw ParameterError("thinning shape r must be positive");
  Eigen::VectorXd tau(static_cast<Eigen::Index>(n));
  for (Eigen::Index j = 0; j < tau.size(); ++j)
    tau[j] = rng.beta(r * beta, r * (1.0 - beta));
  return tau;
}

FieldVector sample_beta_thinning(const FieldVector &u, double r, double beta, RngStream &rng) {
  const Eigen::VectorXd tau = draw_beta_multipliers(u.size(), r, beta, rng);
  return FieldVector(Eigen::VectorXd(tau.cwiseProduct(u.coeffs())));
}

FieldVector sample_gamma_innovation(double r, double beta, const BasisSpec &basis, RngStream &rng) {
  validate_beta(beta);
  if (!(r > 0.0))
    throw ParameterError("innovation shape r must be positive");
  const double shape = r * (1.0 - beta);
  FieldVector xi(basis.n_modes());
  for (std::size_t j = 0; j < basis.n_modes(); ++j)
    xi[j] = std::sqrt(basis.eigenvalue(j)) * rng.gamma(shape);
  return xi;
}

FieldVector sample_gaussian_innovation(double beta, const BasisSpec &basis, RngStream &rng) {
  validate_beta(beta);
  const double scale = std::sqrt(1.0 - beta * beta);
  FieldVector xi(basis.n_modes());
  for (std::size_t j = 0; j < basis.n_modes(); ++j)
    xi[j] = scale * std::sqrt(basis.eigenvalue(j)) * rng.normal();
  return xi;
}

PcnPair sample_pcn_pair(const FieldVector &u, double beta, const BasisSpec &basis, RngStream &rng) {
  validate_beta(beta);
  if (u.size() != basis.n_modes())
    throw InvalidInput("sample_pcn_pair: state does not match basis");
  return {beta * u, sample_gaussian_innovation(beta, basis, rng)};
}

double cp_kept_mass(const CompoundPoissonSpec &spec) {
  return std::erfc(spec.trunc_eps / (spec.jump_std * std::numbers::sqrt2));
}

double sample_kept_jump(double jump_std, double eps, RngStream &rng) {
  const double a = eps / jump_std;
  if (a <= 2.0) {
    for (;;) {
      const double z = rng.normal();
      if (std::abs(z) >= a)
        return jump_std * z;
    }
  }
  // Marsaglia's tail method for |z| >= a.
  for (;;) {
    const double z = std::sqrt(a * a - 2.0 * std::log(rng.uniform_open()));
    if (rng.uniform() * z <= a) {
      const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
      return sign * jump_std * z;
    }
  }
}

double sample_discarded_jump(double jump_std, double eps, RngStream &rng) {
  const double a = eps / jump_std;
  if (a <= 0.0)
    throw ParameterError("discarded region is empty for eps = 0");
  if (a >= 1.0) {
    for (;;) {
      const double z = rng.normal();
      if (std::abs(z) < a)
        return jump_std * z;
    }
  }
  // Uniform proposal on (-a, a), accept with the normal density ratio.
  for (;;) {
    const double z = a * (2.0 * rng.uniform() - 1.0);
    if (rng.uniform() < std::exp(-0.5 * z * z))
      return jump_std * z;
  }
}

double sample_cp(const CompoundPoissonSpec &spec, RngStream &rng) {
  validate(spec);
  const std::uint64_t n = rng.poisson(spec.rate);
  double sum = 0.0;
  for (std::uint64_t k = 0; k < n; ++k)
    sum += spec.jump_std * rng.normal();
  return sum;
}

double sample_cp_truncated(const CompoundPoissonSpec &spec, RngStream &rng) {
  validate(spec);
  if (spec.trunc_eps == 0.0)
    return sample_cp(spec, rng);
  const double c = cp_kept_mass(spec);
  const std::uint64_t n = rng.poisson(spec.rate * c);
  double sum = 0.0;
  for (std::uint64_t k = 0; k < n; ++k)
    sum += sample_kept_jump(spec.jump_std, spec.trunc_eps, rng);
  return sum;
}

double sample_cp_remainder(const CompoundPoissonSpec &spec, RngStream &rng) {
  validate(spec);
  if (spec.trunc_eps == 0.0)
    return 0.0;
  const double discarded = std::erf(spec.trunc_eps / (spec.jump_std * std::numbers::sqrt2));
  const std::uint64_t n = rng.poisson(spec.rate * discarded);
  double sum = 0.0;
  for (std::uint64_t k = 0; k < n; ++k)
    sum += sample_discarded_jump(spec.jump_std, spec.trunc_eps, rng);
  return sum;
}

} // namespace rcar
