#include "experiments_common.hpp"

#include <boost/math/distributions/normal.hpp>

#include <fstream>

#ifndef RCAR_GIT_DESCRIBE
#define RCAR_GIT_DESCRIBE "unknown"
#endif

namespace rcar {

namespace detail {

std::uint64_t stream_id(Stream family, std::uint64_t index) {
  return (static_cast<std::uint64_t>(family) << 40) ^ index;
}

RngStream make_stream(std::uint64_t seed, Stream family, std::uint64_t index) {
  return RngStream(seed, stream_id(family, index));
}

std::size_t replicas_or(const RunOptions &opts, std::size_t fallback) {
  return opts.replicas > 0 ? opts.replicas : fallback;
}

std::uint64_t steps_or(const Config &cfg, std::uint64_t fallback) {
  const std::uint64_t n = cfg.count("chain.n_steps");
  return n > 0 ? n : fallback;
}

std::vector<double> sweep_or(const Config &cfg, std::vector<double> fallback) {
  std::vector<double> v = cfg.list("sweep.values");
  return v.empty() ? fallback : v;
}

BasisSpec basis_from(const Config &cfg) {
  const std::uint64_t m = cfg.count("chain.n_modes");
  if (m == 0)
    throw ConfigError("chain.n_modes must be positive");
  return BasisSpec(m);
}

SemimetricParams semimetric_from(const Config &cfg, double q) {
  SemimetricParams sp;
  sp.omega = cfg.real("semimetric.omega");
  sp.eta = cfg.real("semimetric.eta");
  sp.theta = cfg.real("semimetric.theta");
  sp.p = static_cast<int>(cfg.integer("semimetric.p"));
  const double s = cfg.real("semimetric.s");
  sp.s = s < 0.0 ? q : s;
  validate(sp);
  return sp;
}

FieldVector draw_prior(PriorKind kind, const Config &cfg, const BasisSpec &basis, RngStream &rng) {
  if (kind == PriorKind::Gamma)
    return sample_gamma_prior(GammaPriorSpec{cfg.real("kernel.r"), basis}, rng);
  return sample_gaussian_prior(GaussianPriorSpec{basis}, rng);
}

ObservationData ssl_data(const Config &cfg, const BasisSpec &basis, PriorKind truth_prior) {
  const double sigma = cfg.real("potential.sigma");
  const std::string &file = cfg.raw("potential.data_file");
  if (!file.empty()) {
    std::ifstream in(file);
    if (!in)
      throw ConfigError("cannot open data file '" + file + "'");
    return read_observations_csv(in, sigma);
  }
  const std::uint64_t n_obs = cfg.count("potential.n_obs");
  if (n_obs == 0)
    throw ConfigError("potential.n_obs must be positive");
  RngStream rng(cfg.count("potential.data_seed"), stream_id(Stream::Data, 0));
  const FieldVector truth = draw_prior(truth_prior, cfg, basis, rng);
  const double h = cfg.real("potential.h");
  auto forward = [&](const FieldVector &u) {
    std::vector<double> out;
    for (double x : equispaced_points(n_obs))
      out.push_back(std::tanh(h * evaluate_at(basis, u, x)));
    return out;
  };
  return generate_observations(forward, truth, equispaced_points(n_obs), sigma, rng);
}

Potential ssl_potential(const Config &cfg, const BasisSpec &basis, const ObservationData &data) {
  return make_ssl_potential(basis, SslPotential{data, cfg.real("potential.h")});
}

nlohmann::ordered_json base_summary(const std::string &name, const Config &cfg, const RunOptions &opts,
                                    std::size_t replicas) {
  nlohmann::ordered_json j;
  j["experiment"] = name;
  j["seed"] = opts.seed;
  j["replicas"] = replicas;
  j["git_describe"] = RCAR_GIT_DESCRIBE;
  nlohmann::ordered_json c;
  for (const auto &k : config_schema())
    c[k.section][k.key] = cfg.raw(k.full_name());
  j["config"] = c;
  return j;
}

double z_two_sided(double confidence) {
  if (!(confidence > 0.0 && confidence < 1.0))
    throw ConfigError("confidence must lie in (0, 1)");
  return boost::math::quantile(boost::math::normal(), 0.5 + 0.5 * confidence);
}

} // namespace detail

const std::vector<std::string> &experiment_names() {
  static const std::vector<std::string> names{"reversibility",     "posterior1d", "perturb-projection",
                                              "perturb-innovation", "mse-curve",   "diagnostics"};
  return names;
}

ExperimentResult run_experiment(const std::string &name, const Config &cfg, const RunOptions &opts) {
  if (name == "reversibility")
    return exp_reversibility(cfg, opts);
  if (name == "posterior1d")
    return exp_posterior_1d(cfg, opts);
  if (name == "perturb-projection")
    return exp_perturb_projection(cfg, opts);
  if (name == "perturb-innovation")
    return exp_perturb_innovation(cfg, opts);
  if (name == "mse-curve")
    return exp_mse_curve(cfg, opts);
  if (name == "diagnostics")
    return exp_diagnostics(cfg, opts);
  throw ConfigError("unknown experiment '" + name + "'");
}

} // namespace rcar
