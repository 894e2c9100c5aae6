#include "experiments_common.hpp"
#include "mh_core.hpp"
#include "parallel.hpp"

#include <cmath>

namespace rcar {

namespace {

/// Masses of u^{r-1} e^{-u - psi(u)} over the bins of (0, u_max] plus the tail
/// beyond u_max, normalized. Integrated in t = u^r, where the density is smooth.
std::vector<double> oracle_masses(double r, const std::function<double(double)> &psi, double u_max,
                                  std::size_t bins) {
  auto f = [&](double t) {
    const double u = std::pow(t, 1.0 / r);
    return std::exp(-u - psi(u)) / r;
  };
  std::vector<double> m(bins + 1);
  const double w = u_max / static_cast<double>(bins);
  for (std::size_t b = 0; b < bins; ++b)
    m[b] = integrate(f, std::pow(w * static_cast<double>(b), r), std::pow(w * static_cast<double>(b + 1), r));
  m[bins] = integrate(f, std::pow(u_max, r), std::pow(u_max + 60.0, r));
  double z = 0.0;
  for (double x : m)
    z += x;
  for (double &x : m)
    x /= z;
  return m;
}

struct HistogramRun {
  std::vector<double> mass; // normalized, bins + overflow
  std::vector<double> se;   // batch-means standard errors
  double tv = 0.0;
  double tv_se = 0.0;
  std::uint64_t n = 0;
};

HistogramRun summarize(const std::vector<std::vector<double>> &batch_counts, const std::vector<double> &oracle) {
  HistogramRun h;
  const std::size_t nb = batch_counts.size();
  const std::size_t k = oracle.size();
  std::vector<double> total(k, 0.0);
  double n = 0.0;
  for (const auto &b : batch_counts)
    for (std::size_t i = 0; i < k; ++i) {
      total[i] += b[i];
      n += b[i];
    }
  h.n = static_cast<std::uint64_t>(n);
  h.mass.resize(k);
  h.se.resize(k);
  double var_tv = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    h.mass[i] = total[i] / n;
    std::vector<double> fr;
    for (const auto &b : batch_counts) {
      double bn = 0.0;
      for (double c : b)
        bn += c;
      fr.push_back(b[i] / bn);
    }
    h.se[i] = nb > 1 ? mean_and_se(fr).se : 0.0;
    h.tv += 0.5 * std::abs(h.mass[i] - oracle[i]);
    var_tv += h.se[i] * h.se[i];
  }
  h.tv_se = 0.5 * std::sqrt(var_tv);
  return h;
}

} // namespace

ExperimentResult exp_posterior_1d(const Config &cfg, const RunOptions &opts) {
  using namespace detail;
  const double r = cfg.real("kernel.r");
  const double beta = cfg.real("kernel.beta");
  const std::uint64_t n_steps = steps_or(cfg, 1000000);
  const std::uint64_t burn = cfg.count("chain.burn_in");
  const std::uint64_t n_short = cfg.count("sweep.short_steps");
  const std::size_t bins = cfg.count("sweep.hist_bins");
  const double u_max = cfg.real("sweep.u_max");
  const double tol = cfg.real("sweep.tv_tol");
  const double u0 = cfg.real("chain.u0");
  const std::size_t chains = replicas_or(opts, 1);
  if (bins == 0 || !(u_max > 0.0))
    throw ConfigError("histogram needs positive bins and u_max");
  if (n_short == 0 || n_short >= n_steps)
    throw ConfigError("sweep.short_steps must lie in (0, n_steps)");
  if (burn >= n_short)
    throw ConfigError("chain.burn_in must be smaller than sweep.short_steps");
  constexpr std::size_t n_batches = 50;

  const ProposalKernel kernel = ProposalKernel::gamma_beta(r, beta, BasisSpec(1));

  ExperimentResult res;
  res.experiment = "posterior1d";
  res.summary = base_summary(res.experiment, cfg, opts, chains);

  const double c = cfg.real("potential.quad_center");
  const double scale = cfg.real("potential.quad_scale");
  struct Target {
    std::string name;
    std::function<double(double)> psi;
  };
  const std::vector<Target> targets{
      {"quadratic", [c, scale](double u) { return 0.5 * scale * (u - c) * (u - c); }},
      {"prior", [](double) { return 0.0; }},
  };

  SweepTable tv_table("posterior1d_tv", {"target", "acceptance_rate"});
  for (std::size_t ti = 0; ti < targets.size(); ++ti) {
    const Target &t = targets[ti];
    const std::vector<double> oracle = oracle_masses(r, t.psi, u_max, bins);
    // counts[chain][window][batch][bin]; window 0 is the short prefix.
    struct ChainCounts {
      std::vector<std::vector<double>> short_batches, full_batches;
      std::uint64_t accepts = 0;
    };
    auto chain_counts = parallel_map<ChainCounts>(chains, opts.threads, [&](std::size_t ci) {
      ChainCounts cc;
      cc.short_batches.assign(n_batches, std::vector<double>(bins + 1, 0.0));
      cc.full_batches.assign(n_batches, std::vector<double>(bins + 1, 0.0));
      RngStream rng = make_stream(opts.seed, Stream::Posterior, ti * chains + ci);
      const double short_len = static_cast<double>(n_short - burn);
      const double full_len = static_cast<double>(n_steps - burn);
      auto result = run_scalar_chain(u0, kernel, t.psi, n_steps, rng, [&](std::uint64_t step, double u) {
        if (step < burn)
          return;
        std::size_t bin;
        if (u <= 0.0)
          bin = 0;
        else if (u > u_max)
          bin = bins;
        else
          bin = std::min(bins - 1, static_cast<std::size_t>(std::ceil(u / u_max * static_cast<double>(bins))) - 1);
        const double pos = static_cast<double>(step - burn);
        cc.full_batches[static_cast<std::size_t>(pos / full_len * n_batches)][bin] += 1.0;
        if (step < n_short)
          cc.short_batches[static_cast<std::size_t>(pos / short_len * n_batches)][bin] += 1.0;
      });
      cc.accepts = result.accept_count;
      return cc;
    });
    std::vector<std::vector<double>> short_b, full_b;
    std::uint64_t accepts = 0;
    for (auto &cc : chain_counts) {
      short_b.insert(short_b.end(), cc.short_batches.begin(), cc.short_batches.end());
      full_b.insert(full_b.end(), cc.full_batches.begin(), cc.full_batches.end());
      accepts += cc.accepts;
    }
    const HistogramRun hs = summarize(short_b, oracle);
    const HistogramRun hf = summarize(full_b, oracle);
    const double acc = static_cast<double>(accepts) / static_cast<double>(n_steps * chains);

    tv_table.add_row(static_cast<double>(n_short), hs.tv, hs.tv_se, static_cast<double>(hs.n),
                     {static_cast<double>(ti), acc});
    tv_table.add_row(static_cast<double>(n_steps), hf.tv, hf.tv_se, static_cast<double>(hf.n),
                     {static_cast<double>(ti), acc});

    SweepTable hist("posterior1d_histogram_" + t.name, {"oracle_mass"});
    const double w = u_max / static_cast<double>(bins);
    for (std::size_t b = 0; b <= bins; ++b)
      hist.add_row(b < bins ? (static_cast<double>(b) + 0.5) * w : u_max, hf.mass[b], hf.se[b],
                   static_cast<double>(hf.n), {oracle[b]});
    res.tables.push_back(std::move(hist));

    auto &js = res.summary["targets"][t.name];
    js["tv_short"] = hs.tv;
    js["tv_full"] = hf.tv;
    js["tv_full_se"] = hf.tv_se;
    js["acceptance_rate"] = acc;
    res.verdict(t.name + "_tv_below_tolerance", hf.tv < tol);
    if (ti == 0)
      res.verdict(t.name + "_tv_decreases", hf.tv < hs.tv);
  }
  res.tables.insert(res.tables.begin(), std::move(tv_table));
  return res;
}

} // namespace rcar
