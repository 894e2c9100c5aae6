#include "couplings.hpp"
#include "experiments_common.hpp"
#include "mh_core.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rcar {

namespace {

FieldVector normalized(FieldVector w) {
  const double n = h1_norm(w);
  if (n == 0.0)
    throw InvalidInput("cannot normalize the zero vector");
  w *= 1.0 / n;
  return w;
}

FieldVector random_direction(std::size_t n, std::size_t first, std::size_t last, RngStream &rng) {
  FieldVector d(n);
  for (std::size_t j = first; j < last; ++j)
    d[j] = rng.normal();
  return normalized(std::move(d));
}

/// rho with d_s(u, u + rho w) = target; d_s is increasing in rho for w >= 0.
double solve_offset(const FieldVector &u, const FieldVector &w, double target, const SemimetricParams &sp) {
  double lo = 0.0, hi = 1.0;
  while (d_s(u, u + hi * w, sp) < target)
    hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (d_s(u, u + mid * w, sp) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

} // namespace

ExperimentResult exp_diagnostics(const Config &cfg, const RunOptions &opts) {
  using namespace detail;
  const BasisSpec basis = basis_from(cfg);
  const std::size_t m = basis.n_modes();
  const double beta = cfg.real("kernel.beta");
  const double r = cfg.real("kernel.r");
  const std::size_t n_boot = cfg.count("sweep.bootstrap");
  const double conf = cfg.real("sweep.confidence");

  const ObservationData data = ssl_data(cfg, basis, PriorKind::Gamma);
  const Potential ssl = ssl_potential(cfg, basis, data);
  const SemimetricParams sp = semimetric_from(cfg, ssl.q());
  const ProposalKernel kernel = ProposalKernel::gamma_beta(r, beta, basis);
  auto prior = [&](RngStream &rng) { return draw_prior(PriorKind::Gamma, cfg, basis, rng); };

  ExperimentResult res;
  res.experiment = "diagnostics";
  res.summary = base_summary(res.experiment, cfg, opts, 0);
  res.summary["semimetric"] = {{"omega", sp.omega}, {"eta", sp.eta}, {"s", sp.s}, {"theta", sp.theta}, {"p", sp.p}};

  // Lyapunov drift.
  {
    const std::vector<double> radii = cfg.list("sweep.probe_radii");
    const std::size_t dirs = cfg.count("sweep.probe_directions");
    const std::size_t reps = cfg.count("sweep.drift_reps");
    if (radii.size() * dirs < 2)
      throw ConfigError("drift fit needs at least two probe points");
    std::vector<DriftProbe> probes = parallel_map<DriftProbe>(
        radii.size() * dirs, opts.threads, [&](std::size_t i) {
          const std::size_t ri = i / dirs, di = i % dirs;
          RngStream dir_rng = make_stream(opts.seed, Stream::Drift, di);
          const FieldVector u = radii[ri] * normalized(prior(dir_rng));
          RngStream rng = make_stream(opts.seed, Stream::Drift, (std::uint64_t{1} << 32) + i);
          const MeanSe pv = estimate_drift(u, reps, kernel, ssl, sp.p, rng);
          return DriftProbe{lyapunov_V(u, sp.p), pv.mean, pv.se};
        });
    const DriftEstimate fit = fit_drift(probes);
    SweepTable t("diagnostics_drift", {"V", "direction", "envelope"});
    for (std::size_t i = 0; i < probes.size(); ++i)
      t.add_row(radii[i / dirs], probes[i].PV, probes[i].se, static_cast<double>(reps),
                {probes[i].V, static_cast<double>(i % dirs), fit.kappa_hat * probes[i].V + fit.K_hat});
    res.tables.push_back(std::move(t));
    res.summary["drift"] = {{"kappa_hat", fit.kappa_hat},   {"K_hat", fit.K_hat},
                            {"residual", fit.residual},     {"violations", fit.violations},
                            {"free_slope", fit.free_slope}};
    res.verdict("drift_kappa_below_one", fit.kappa_hat < 1.0 && fit.violations == 0);
  }

  // d-contraction on nearby pairs.
  {
    const std::size_t pairs = cfg.count("sweep.contraction_pairs");
    const std::size_t reps = cfg.count("sweep.contraction_reps");
    const double d_max = cfg.real("sweep.contraction_d_max");
    if (!(d_max > 0.0 && d_max <= 1.0))
      throw ConfigError("sweep.contraction_d_max must lie in (0, 1]");
    std::vector<ContractionEstimate> est = parallel_map<ContractionEstimate>(pairs, opts.threads, [&](std::size_t i) {
      RngStream rng = make_stream(opts.seed, Stream::Contraction, i);
      const FieldVector u = prior(rng);
      const FieldVector w = normalized(prior(rng));
      const double target = d_max * static_cast<double>(i + 1) / static_cast<double>(pairs + 1);
      const FieldVector v = u + solve_offset(u, w, target, sp) * w;
      return estimate_contraction(u, v, reps, kernel, ssl, sp, rng);
    });
    SweepTable t("diagnostics_contraction", {"d0", "ci_halfwidth", "upper"});
    bool all_below = !est.empty();
    double worst = 0.0;
    for (std::size_t i = 0; i < est.size(); ++i) {
      const double upper = est[i].gamma1_hat + est[i].ci_halfwidth;
      all_below = all_below && upper < 1.0;
      worst = std::max(worst, upper);
      t.add_row(static_cast<double>(i), est[i].gamma1_hat, est[i].ci_halfwidth / 2.5758293035489004,
                static_cast<double>(reps), {est[i].d0, est[i].ci_halfwidth, upper});
    }
    res.tables.push_back(std::move(t));
    res.summary["contraction"] = {{"pairs", pairs}, {"reps", reps}, {"max_upper", worst}};
    res.verdict("contraction_gamma1_below_one", all_below);
  }

  // Small sets.
  {
    const double R = cfg.real("sweep.smallset_R");
    const std::size_t pairs = replicas_or(opts, cfg.count("sweep.smallset_pairs"));
    const std::uint64_t n_max = cfg.count("sweep.smallset_n_max");
    std::vector<std::uint64_t> grid{0};
    for (std::uint64_t n = 1; n <= n_max; n *= 2)
      grid.push_back(n);
    std::vector<SmallsetResult> per = parallel_map<SmallsetResult>(pairs, opts.threads, [&](std::size_t i) {
      RngStream rng = make_stream(opts.seed, Stream::Smallset, i);
      return smallset_probe(R, grid, 1, kernel, ssl, sp, prior, rng);
    });
    std::vector<std::vector<double>> d;
    double acc = 0.0;
    for (auto &p : per) {
      d.push_back(p.d_by_pair.front());
      acc += p.acceptance;
    }
    SweepTable t("diagnostics_smallset", {"p99"});
    bool below_one = false;
    for (std::size_t g = 0; g < grid.size(); ++g) {
      std::vector<double> col;
      for (const auto &row : d)
        col.push_back(row[g]);
      const MeanSe ms = mean_and_se(col);
      if (grid[g] >= 1 && ms.mean < 1.0)
        below_one = true;
      t.add_row(static_cast<double>(grid[g]), ms.mean, ms.se, static_cast<double>(pairs), {quantile(col, 0.99)});
    }
    // Trend over n >= 1.
    const auto boot = bootstrap(pairs, n_boot, stream_id(Stream::Bootstrap, opts.seed), [&](auto idx) {
      std::vector<double> s(grid.size() - 1, 0.0);
      for (std::size_t i : idx)
        for (std::size_t g = 1; g < grid.size(); ++g)
          s[g - 1] += d[i][g];
      for (double &x : s)
        x /= static_cast<double>(idx.size());
      return s;
    });
    const TrendCheck tc = no_significant_increase(boot, conf);
    res.tables.push_back(std::move(t));
    res.summary["smallset"] = {{"R", R},
                               {"pairs", pairs},
                               {"sublevel_acceptance", acc / static_cast<double>(pairs)},
                               {"trend_ok", tc.ok},
                               {"increase_lower_bounds", tc.increase_lower}};
    res.verdict("smallset_mean_below_one", below_one);
    res.verdict("smallset_nonincreasing", tc.ok);
  }

  // Weak triangle constant.
  {
    const std::size_t triples = cfg.count("sweep.triangle_triples");
    auto draw = [&](RngStream &rng) {
      const double scale = std::exp(std::log(10.0) * (2.0 * rng.uniform() - 1.0));
      return scale * prior(rng);
    };
    auto scan = [&](std::uint64_t which) {
      const std::size_t chunks = 64;
      auto parts = parallel_map<std::vector<double>>(chunks, opts.threads, [&](std::size_t c) {
        RngStream rng = make_stream(opts.seed, Stream::Triangle, which * chunks + c);
        std::vector<double> out;
        for (std::size_t i = c; i < triples; i += chunks) {
          const FieldVector u = draw(rng), v = draw(rng), w = draw(rng);
          out.push_back(weak_triangle_ratio(u, v, w, sp));
        }
        return out;
      });
      std::vector<double> all;
      for (auto &p : parts)
        all.insert(all.end(), p.begin(), p.end());
      return all;
    };
    const std::vector<double> first = scan(0), second = scan(1);
    const double G = *std::max_element(first.begin(), first.end());
    const double G2 = *std::max_element(second.begin(), second.end());
    SweepTable t("diagnostics_weak_triangle", {"mean_ratio"});
    const MeanSe m1 = mean_and_se(first), m2 = mean_and_se(second);
    t.add_row(0, G, m1.se, static_cast<double>(first.size()), {m1.mean});
    t.add_row(1, G2, m2.se, static_cast<double>(second.size()), {m2.mean});
    res.tables.push_back(std::move(t));
    res.summary["weak_triangle"] = {{"G_hat", G}, {"resample_max", G2}};
    res.verdict("weak_triangle_stable", std::isfinite(G) && G2 <= 2.0 * G);
  }

  // Tail probe on the deconvolution potential and its tail-modified variant.
  {
    const std::size_t n_pairs = cfg.count("sweep.tail_pairs");
    const double floor_m4 = cfg.real("sweep.tail_floor");
    const double b = cfg.real("potential.tail_b"), bt = cfg.real("potential.tail_beta");
    if (!(b > 0.0 && b < 1.0 && bt > 0.0 && bt < 1.0))
      throw ConfigError("tail_b and tail_beta must lie in (0, 1)");
    const double c = b * (1.0 - bt);
    const TailModParams tp{cfg.real("potential.tail_eps"), cfg.real("potential.tail_R0")};
    const std::uint64_t n_obs = cfg.count("potential.n_obs");
    const ConvolutionKernel gk =
        ConvolutionKernel::gaussian(basis.frequency(m - 1), cfg.real("potential.deconv_decay"));
    const std::vector<double> pts = equispaced_points(n_obs);
    RngStream data_rng(cfg.count("potential.data_seed"), stream_id(Stream::Data, 1));
    const FieldVector truth = prior(data_rng);
    const ObservationData dd = generate_observations(
        [&](const FieldVector &u) { return deconv_forward(basis, gk, u, pts); }, truth, pts, 1.0, data_rng);
    const Potential plain = make_deconv_potential(basis, gk, dd);
    const Potential modified = make_tail_modified(plain, tp);
    const double g_norm = operator_norm(deconv_matrix(basis, gk, pts));
    const double bound = tail_guidance_bound(c, g_norm);
    double y2 = 0.0;
    for (double y : dd.values)
      y2 += y * y;

    const std::size_t hf_first = std::max<std::size_t>(1, (3 * m) / 4);
    struct Probe {
      double log_ratio_plain, log_ratio_mod, hf_ratio, norm_growth;
    };
    std::vector<Probe> probes = parallel_map<Probe>(n_pairs, opts.threads, [&](std::size_t i) {
      RngStream rng = make_stream(opts.seed, Stream::Tail, i);
      const double radius = 10.0 * std::exp(std::log(10.0) * rng.uniform());
      const FieldVector hf = random_direction(m, hf_first, m, rng);
      // ||truth + t hf|| = radius.
      const double a = truth.coeffs().dot(hf.coeffs());
      const double t = -a + std::sqrt(a * a - truth.coeffs().squaredNorm() + radius * radius);
      const FieldVector u = truth + t * hf;
      const FieldVector dir = (i % 2 == 0) ? random_direction(m, 0, std::min<std::size_t>(3, m), rng)
                                           : random_direction(m, 0, m, rng);
      const FieldVector v = bt * u + (c * h1_norm(u) * rng.uniform()) * dir;
      return Probe{plain(u) - plain(v), modified(u) - modified(v), std::exp(plain(truth) - plain(u)),
                   h1_norm(u) / h1_norm(truth)};
    });
    const double log_floor = std::log(floor_m4);
    std::vector<double> lp, lm, hfr, growth;
    for (const auto &p : probes) {
      lp.push_back(p.log_ratio_plain);
      lm.push_back(p.log_ratio_mod);
      hfr.push_back(p.hf_ratio);
      growth.push_back(p.norm_growth);
    }
    const double min_plain = *std::min_element(lp.begin(), lp.end());
    const double min_mod = *std::min_element(lm.begin(), lm.end());
    auto frac_below = [&](const std::vector<double> &x) {
      return static_cast<double>(std::count_if(x.begin(), x.end(), [&](double v) { return v < log_floor; })) /
             static_cast<double>(x.size());
    };
    SweepTable t("diagnostics_tail_probe", {"mean_log_ratio", "fraction_below_floor"});
    const MeanSe mp = mean_and_se(lp), mm = mean_and_se(lm);
    t.add_row(0, min_plain, mp.se, static_cast<double>(n_pairs), {mp.mean, frac_below(lp)});
    t.add_row(1, min_mod, mm.se, static_cast<double>(n_pairs), {mm.mean, frac_below(lm)});
    res.tables.push_back(std::move(t));

    // Growth inequality for ||u|| >= R0, ||v|| <= c ||u||.
    const double lead = tp.eps_t - c * c * (2.0 * g_norm * g_norm + tp.eps_t);
    std::vector<double> slack = parallel_map<double>(n_pairs, opts.threads, [&](std::size_t i) {
      RngStream rng = make_stream(opts.seed, Stream::Tail, (std::uint64_t{1} << 32) + i);
      const double radius = tp.R0 * std::exp(std::log(30.0) * rng.uniform());
      const FieldVector u = radius * random_direction(m, 0, m, rng);
      const FieldVector v = (c * radius * rng.uniform()) * random_direction(m, 0, m, rng);
      const double lhs = modified(u) - modified(v);
      const double rhs = lead * radius * radius - 2.0 * y2;
      return lhs - rhs;
    });
    const std::size_t violations = static_cast<std::size_t>(
        std::count_if(slack.begin(), slack.end(), [](double s) { return s < 0.0; }));
    SweepTable tg("diagnostics_growth", {"violations"});
    const MeanSe ms = mean_and_se(slack);
    tg.add_row(0, *std::min_element(slack.begin(), slack.end()), ms.se, static_cast<double>(n_pairs),
               {static_cast<double>(violations)});
    res.tables.push_back(std::move(tg));

    std::vector<double> hf_sorted = hfr, gr_sorted = growth;
    res.summary["tail"] = {{"c", c},
                           {"G_norm", g_norm},
                           {"eps_guidance_bound", bound},
                           {"eps_exceeds_bound", tp.eps_t > bound},
                           {"c2_G2", c * c * g_norm * g_norm},
                           {"plain_min_log_ratio", min_plain},
                           {"modified_min_log_ratio", min_mod},
                           {"log_floor", log_floor},
                           {"high_frequency_median_ratio", quantile(hf_sorted, 0.5)},
                           {"high_frequency_median_norm_growth", quantile(gr_sorted, 0.5)},
                           {"growth_violations", violations}};
    res.verdict("plain_deconvolution_tail_probe_fails", min_plain < log_floor);
    res.verdict("tail_modified_probe_passes", min_mod >= log_floor);
    res.verdict("growth_inequality_holds", violations == 0);
  }
  return res;
}

} // namespace rcar
