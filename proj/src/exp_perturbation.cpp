#include "couplings.hpp"
#include "experiments_common.hpp"
#include "mh_core.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <cmath>

namespace rcar {

namespace {

/// Bootstrap over replicas of |mean_r x[r][k]| for every sweep column k.
std::vector<std::vector<double>> bootstrap_abs_means(const std::vector<std::vector<double>> &x, std::size_t n_boot,
                                                     std::uint64_t seed) {
  const std::size_t k = x.empty() ? 0 : x.front().size();
  return bootstrap(x.size(), n_boot, seed, [&](std::span<const std::size_t> idx) {
    std::vector<double> s(k, 0.0);
    for (std::size_t i : idx)
      for (std::size_t c = 0; c < k; ++c)
        s[c] += x[i][c];
    for (double &v : s)
      v = std::abs(v / static_cast<double>(idx.size()));
    return s;
  });
}

std::vector<double> column(const std::vector<std::vector<double>> &x, std::size_t c) {
  std::vector<double> out;
  out.reserve(x.size());
  for (const auto &row : x)
    out.push_back(row[c]);
  return out;
}

nlohmann::ordered_json trend_json(const TrendCheck &tc) {
  nlohmann::ordered_json j;
  j["ok"] = tc.ok;
  j["increase_lower_bounds"] = tc.increase_lower;
  return j;
}

} // namespace

ExperimentResult exp_perturb_projection(const Config &cfg, const RunOptions &opts) {
  using namespace detail;
  const BasisSpec basis = basis_from(cfg);
  const std::size_t m = basis.n_modes();
  const double beta = cfg.real("kernel.beta");
  std::vector<double> sweep = sweep_or(cfg, {2, 4, 8, 16, 32, 64});
  std::vector<std::size_t> cuts;
  for (double v : sweep) {
    if (!(v >= 0.0) || v != std::floor(v))
      throw ConfigError("projection sweep values must be nonnegative integers");
    cuts.push_back(static_cast<std::size_t>(v));
  }
  if (!std::is_sorted(cuts.begin(), cuts.end()))
    throw ConfigError("projection sweep must be increasing");
  const std::size_t reps = replicas_or(opts, 64);
  const std::uint64_t n_steps = steps_or(cfg, 2000);
  const std::uint64_t burn = cfg.count("chain.burn_in");
  if (burn >= n_steps)
    throw ConfigError("chain.burn_in must be smaller than n_steps");
  const std::size_t starts = cfg.count("sweep.one_step_starts");
  const std::size_t n_boot = cfg.count("sweep.bootstrap");
  const double conf = cfg.real("sweep.confidence");

  const ObservationData data = ssl_data(cfg, basis, PriorKind::Gaussian);
  const Potential exact = ssl_potential(cfg, basis, data);
  std::vector<Potential> projected;
  for (std::size_t c : cuts)
    projected.push_back(make_projected(exact, c));
  const SemimetricParams sp = semimetric_from(cfg, exact.q());
  const ProposalKernel kernel = ProposalKernel::pcn(beta, basis);

  ExperimentResult res;
  res.experiment = "perturb-projection";
  res.summary = base_summary(res.experiment, cfg, opts, reps);
  res.summary["one_step_starts"] = starts;

  // (i) one-step coupled tilde_d between exact and projected acceptance.
  std::vector<std::vector<double>> one_step = parallel_map<std::vector<double>>(
      starts, opts.threads, [&](std::size_t i) {
        RngStream rng = make_stream(opts.seed, Stream::ProjectionOneStep, i);
        const FieldVector u = sample_gaussian_prior(GaussianPriorSpec{basis}, rng);
        const ProposalNoise noise = draw_proposal_noise(kernel, rng);
        const FieldVector v = apply_proposal(kernel, u, noise);
        const double sigma = rng.uniform();
        const bool acc_exact = sigma < acceptance_prob(exact(u), exact(v));
        const double gap = tilde_d_s(u, v, sp);
        std::vector<double> out;
        for (const auto &pp : projected) {
          const bool acc_proj = sigma < acceptance_prob(pp(u), pp(v));
          out.push_back(acc_proj == acc_exact ? 0.0 : gap);
        }
        return out;
      });
  SweepTable t1("projection_one_step", {"disagreement_rate"});
  for (std::size_t c = 0; c < cuts.size(); ++c) {
    const std::vector<double> col = column(one_step, c);
    const MeanSe ms = mean_and_se(col);
    const double dis =
        static_cast<double>(std::count_if(col.begin(), col.end(), [](double x) { return x != 0.0; })) /
        static_cast<double>(col.size());
    t1.add_row(static_cast<double>(cuts[c]), ms.mean, ms.se, static_cast<double>(starts), {dis});
    res.summary["one_step_gap"].push_back(ms.mean);
  }
  const TrendCheck one_trend = no_significant_increase(
      bootstrap_abs_means(one_step, n_boot, stream_id(Stream::Bootstrap, opts.seed)), conf);
  res.summary["one_step_trend"] = trend_json(one_trend);
  bool zero_at_full = true;
  for (std::size_t c = 0; c < cuts.size(); ++c)
    if (cuts[c] >= m)
      zero_at_full = zero_at_full && t1.rows()[c][1] == 0.0;
  res.verdict("one_step_gap_zero_at_full_resolution", zero_at_full);
  res.verdict("one_step_gap_nonincreasing", one_trend.ok);
  res.tables.push_back(std::move(t1));

  // (ii) stationary gaps between coupled exact and projected chains.
  std::vector<Functional> battery{Functional::norm()};
  for (std::size_t j = 0; j < std::min<std::size_t>(8, m); ++j)
    battery.push_back(Functional::coeff(j));
  for (double x : {0.5, 2.0, 4.0})
    battery.push_back(Functional::eval_at(basis, x));
  const std::size_t nf = battery.size();

  // diffs[r][c * nf + f] = average of functional f, exact minus projected.
  std::vector<std::vector<double>> diffs = parallel_map<std::vector<double>>(
      reps, opts.threads, [&](std::size_t rep) {
        std::vector<double> out(cuts.size() * nf, 0.0);
        for (std::size_t c = 0; c < cuts.size(); ++c) {
          RngStream rng = make_stream(opts.seed, Stream::ProjectionChain, rep);
          const FieldVector u0 = sample_gaussian_prior(GaussianPriorSpec{basis}, rng);
          CoupledState st(u0, u0, exact, projected[c]);
          for (std::uint64_t s = 0; s < n_steps; ++s) {
            st.step(kernel, exact, projected[c], rng);
            if (s < burn)
              continue;
            for (std::size_t f = 0; f < nf; ++f)
              out[c * nf + f] += battery[f].fn(st.u) - battery[f].fn(st.v);
          }
          for (std::size_t f = 0; f < nf; ++f)
            out[c * nf + f] /= static_cast<double>(n_steps - burn);
        }
        return out;
      });

  std::vector<std::string> extra{"norm_gap_signed"};
  for (std::size_t f = 1; f < nf; ++f)
    extra.push_back(battery[f].name + "_gap");
  SweepTable t2("projection_stationary", extra);
  std::vector<std::vector<double>> norm_diffs(reps, std::vector<double>(cuts.size()));
  for (std::size_t rep = 0; rep < reps; ++rep)
    for (std::size_t c = 0; c < cuts.size(); ++c)
      norm_diffs[rep][c] = diffs[rep][c * nf];
  for (std::size_t c = 0; c < cuts.size(); ++c) {
    std::vector<double> row_extra;
    MeanSe norm_ms;
    for (std::size_t f = 0; f < nf; ++f) {
      const MeanSe ms = mean_and_se(column(diffs, c * nf + f));
      if (f == 0) {
        norm_ms = ms;
        row_extra.push_back(ms.mean);
      } else {
        row_extra.push_back(std::abs(ms.mean));
      }
    }
    t2.add_row(static_cast<double>(cuts[c]), std::abs(norm_ms.mean), norm_ms.se, static_cast<double>(reps),
               row_extra);
    res.summary["stationary_norm_gap"].push_back(std::abs(norm_ms.mean));
  }
  const TrendCheck stat_trend = no_significant_increase(
      bootstrap_abs_means(norm_diffs, n_boot, stream_id(Stream::Bootstrap, opts.seed + 1)), conf);
  res.summary["stationary_trend"] = trend_json(stat_trend);
  res.verdict("stationary_norm_gap_nonincreasing", stat_trend.ok);
  res.tables.push_back(std::move(t2));
  return res;
}

ExperimentResult exp_perturb_innovation(const Config &cfg, const RunOptions &opts) {
  using namespace detail;
  const double beta = cfg.real("kernel.beta");
  const std::vector<double> eps = sweep_or(cfg, {1, 0.5, 0.25, 0.125, 0.0625, 0});
  for (std::size_t i = 0; i < eps.size(); ++i)
    if (!(eps[i] >= 0.0) || (i > 0 && !(eps[i] < eps[i - 1])))
      throw ConfigError("innovation sweep must be nonnegative and strictly decreasing");
  const std::size_t reps = replicas_or(opts, 128);
  const std::uint64_t n_steps = steps_or(cfg, 20000);
  const std::uint64_t burn = cfg.count("chain.burn_in");
  if (burn >= n_steps)
    throw ConfigError("chain.burn_in must be smaller than n_steps");
  const std::size_t draws = cfg.count("sweep.moment_draws");
  const std::size_t n_boot = cfg.count("sweep.bootstrap");
  const double conf = cfg.real("sweep.confidence");
  const double u0 = cfg.real("chain.u0");
  const Potential quad = make_quadratic_1d(cfg.real("potential.quad_center"), cfg.real("potential.quad_scale"));
  const double q = quad.q();
  const double center = cfg.real("potential.quad_center"), scale = cfg.real("potential.quad_scale");
  auto psi_fast = [center, scale](double u) { return 0.5 * scale * (u - center) * (u - center); };

  CompoundPoissonSpec base{cfg.real("kernel.cp_rate"), cfg.real("kernel.cp_jump_std"), 0.0};
  validate(base);
  validate_beta(beta);

  ExperimentResult res;
  res.experiment = "perturb-innovation";
  res.summary = base_summary(res.experiment, cfg, opts, reps);

  // (i) remainder moments E[(1 + |w|)^{2q} |w|].
  std::vector<MeanSe> moments = parallel_map<MeanSe>(eps.size(), opts.threads, [&](std::size_t e) {
    CompoundPoissonSpec spec = base;
    spec.trunc_eps = eps[e];
    RngStream rng = make_stream(opts.seed, Stream::InnovationMoment, e);
    std::vector<double> x(draws);
    for (auto &v : x) {
      const double w = std::abs(sample_cp_remainder(spec, rng));
      v = std::pow(1.0 + w, 2.0 * q) * w;
    }
    return mean_and_se(x);
  });

  // (ii) coupled exact / truncated chains: exact innovation xi_eps + w_eps.
  std::vector<std::vector<double>> diffs = parallel_map<std::vector<double>>(
      reps, opts.threads, [&](std::size_t rep) {
        std::vector<double> out(eps.size());
        for (std::size_t e = 0; e < eps.size(); ++e) {
          CompoundPoissonSpec spec = base;
          spec.trunc_eps = eps[e];
          RngStream rng = make_stream(opts.seed, Stream::InnovationChain, rep);
          double ue = u0, ut = u0;
          double pe = psi_fast(ue), pt = psi_fast(ut);
          double acc = 0.0;
          for (std::uint64_t s = 0; s < n_steps; ++s) {
            const double xi = sample_cp_truncated(spec, rng);
            const double w = sample_cp_remainder(spec, rng);
            const double ve = beta * ue + xi + w;
            const double vt = beta * ut + xi;
            const double pve = psi_fast(ve), pvt = psi_fast(vt);
            const double sigma = rng.uniform();
            if (sigma < acceptance_prob(pe, pve)) {
              ue = ve;
              pe = pve;
            }
            if (sigma < acceptance_prob(pt, pvt)) {
              ut = vt;
              pt = pvt;
            }
            if (s >= burn)
              acc += ue - ut;
          }
          out[e] = acc / static_cast<double>(n_steps - burn);
        }
        return out;
      });

  SweepTable tm("innovation_moment", {});
  SweepTable tg("innovation_gap", {"gap_signed", "ratio_to_moment", "ratio_upper"});
  const double z = z_two_sided(conf);
  std::vector<double> ratio_upper;
  double ref_ratio = 0.0;
  bool moment_decreasing = true;
  for (std::size_t e = 0; e < eps.size(); ++e) {
    tm.add_row(eps[e], moments[e].mean, moments[e].se, static_cast<double>(draws));
    if (e > 0 && !(moments[e].mean < moments[e - 1].mean))
      moment_decreasing = false;
    const MeanSe g = mean_and_se(column(diffs, e));
    const double gap = std::abs(g.mean);
    const double ratio = moments[e].mean > 0.0 ? gap / moments[e].mean : 0.0;
    const double upper = moments[e].mean > 0.0 ? (gap + z * g.se) / moments[e].mean : 0.0;
    if (e == 0)
      ref_ratio = upper;
    ratio_upper.push_back(upper);
    tg.add_row(eps[e], gap, g.se, static_cast<double>(reps), {g.mean, ratio, upper});
  }
  const TrendCheck gap_trend = no_significant_increase(
      bootstrap_abs_means(diffs, n_boot, stream_id(Stream::Bootstrap, opts.seed)), conf);
  bool ratio_bounded = true;
  for (double u : ratio_upper)
    ratio_bounded = ratio_bounded && std::isfinite(u) && u <= 10.0 * std::max(ref_ratio, 1e-300);

  bool zero_case = true;
  for (std::size_t e = 0; e < eps.size(); ++e)
    if (eps[e] == 0.0)
      zero_case = zero_case && moments[e].mean == 0.0 && tg.rows()[e][1] == 0.0;

  res.summary["gap_trend"] = trend_json(gap_trend);
  res.summary["ratio_upper"] = ratio_upper;
  res.verdict("moment_strictly_decreasing", moment_decreasing);
  res.verdict("gap_nonincreasing", gap_trend.ok);
  res.verdict("gap_to_moment_ratio_bounded", ratio_bounded);
  res.verdict("no_truncation_gives_zero", zero_case);
  res.tables.push_back(std::move(tm));
  res.tables.push_back(std::move(tg));
  return res;
}

} // namespace rcar
