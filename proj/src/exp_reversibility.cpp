#include "experiments_common.hpp"
#include "parallel.hpp"

#include <cmath>

namespace rcar {

namespace {

struct Variant {
  std::string name;
  detail::PriorKind prior;
  double innovation_beta;
  bool control;
};

} // namespace

ExperimentResult exp_reversibility(const Config &cfg, const RunOptions &opts) {
  using namespace detail;
  const BasisSpec basis = basis_from(cfg);
  const std::size_t n_modes = basis.n_modes();
  const std::size_t reps = replicas_or(opts, 10000);
  const double beta = cfg.real("kernel.beta");
  const double r = cfg.real("kernel.r");
  const double beta_bad = cfg.real("kernel.beta_mismatch");
  const double level = cfg.real("sweep.ks_level");
  const double required = cfg.real("sweep.pass_fraction");
  validate_beta(beta);
  validate_beta(beta_bad);

  ExperimentResult res;
  res.experiment = "reversibility";
  res.summary = base_summary(res.experiment, cfg, opts, reps);

  const std::vector<Variant> variants{
      {"pcn", PriorKind::Gaussian, beta, false},
      {"gamma_beta", PriorKind::Gamma, beta, false},
      {"pcn_mismatch", PriorKind::Gaussian, beta_bad, true},
      {"gamma_beta_mismatch", PriorKind::Gamma, beta_bad, true},
  };

  for (std::size_t vi = 0; vi < variants.size(); ++vi) {
    const Variant &var = variants[vi];
    // samples[j][i]: mode j of the proposal from replica i, rescaled by 1/sqrt(lambda_j).
    std::vector<std::vector<double>> samples(n_modes, std::vector<double>(reps));
    parallel_for(reps, opts.threads, [&](std::size_t i) {
      RngStream rng = make_stream(opts.seed, Stream::Reversibility, vi * reps + i);
      const FieldVector u = draw_prior(var.prior, cfg, basis, rng);
      FieldVector v;
      if (var.prior == PriorKind::Gaussian) {
        v = beta * u + sample_gaussian_innovation(var.innovation_beta, basis, rng);
      } else {
        v = sample_beta_thinning(u, r, beta, rng);
        v += sample_gamma_innovation(r, var.innovation_beta, basis, rng);
      }
      for (std::size_t j = 0; j < n_modes; ++j)
        samples[j][i] = v[j] / std::sqrt(basis.eigenvalue(j));
    });

    std::function<double(double)> cdf;
    double ref_mean;
    if (var.prior == PriorKind::Gaussian) {
      cdf = [](double x) { return normal_cdf(x); };
      ref_mean = 0.0;
    } else {
      cdf = [r](double x) { return gamma_cdf(r, x); };
      ref_mean = r;
    }
    SweepTable table("reversibility_" + var.name, {"ks_statistic", "ks_p_value", "reference_mean"});
    std::size_t passed = 0;
    for (std::size_t j = 0; j < n_modes; ++j) {
      const KsResult ks = ks_one_sample(samples[j], cdf);
      const MeanSe m = mean_and_se(samples[j]);
      if (ks.p_value >= level)
        ++passed;
      table.add_row(static_cast<double>(j), m.mean, m.se, static_cast<double>(reps),
                    {ks.statistic, ks.p_value, ref_mean});
    }
    const double fraction = static_cast<double>(passed) / static_cast<double>(n_modes);
    res.summary["pass_fraction"][var.name] = fraction;
    if (var.control)
      res.verdict(var.name + "_control_fails", fraction < 0.5);
    else
      res.verdict(var.name + "_stationary", fraction >= required);
    res.tables.push_back(std::move(table));
  }
  return res;
}

} // namespace rcar
