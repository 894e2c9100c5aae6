#include "experiments_common.hpp"
#include "invariant_solver.hpp"
#include "mh_core.hpp"
#include "parallel.hpp"

#include <cmath>

namespace rcar {

namespace {

struct CurveFit {
  double A = 0.0, B = 0.0;
};

/// Weighted least squares MSE(n) = A + B / n.
CurveFit fit_plateau(const std::vector<double> &inv_n, const std::vector<double> &mse,
                     const std::vector<double> &w) {
  const LineFit f = fit_line(inv_n, mse, w);
  return {f.intercept, f.slope};
}

} // namespace

ExperimentResult exp_mse_curve(const Config &cfg, const RunOptions &opts) {
  using namespace detail;
  const double beta = cfg.real("kernel.beta");
  std::vector<double> eps = sweep_or(cfg, {1, 0.5, 0.25, 0.125, 0.0625, 0});
  if (eps.back() != 0.0)
    eps.push_back(0.0);
  for (std::size_t i = 0; i < eps.size(); ++i)
    if (!(eps[i] >= 0.0) || (i > 0 && !(eps[i] < eps[i - 1])))
      throw ConfigError("mse sweep must be nonnegative and strictly decreasing");
  const std::int64_t k_min = cfg.integer("sweep.n_min_log2");
  const std::int64_t k_max = cfg.integer("sweep.n_max_log2");
  if (k_min < 1 || k_max <= k_min || k_max > 40)
    throw ConfigError("need 1 <= n_min_log2 < n_max_log2 <= 40");
  std::vector<std::uint64_t> ns;
  for (std::int64_t k = k_min; k <= k_max; ++k)
    ns.push_back(std::uint64_t{1} << k);
  const std::size_t reps = replicas_or(opts, 256);
  const std::size_t n_boot = cfg.count("sweep.bootstrap");
  const double conf = cfg.real("sweep.confidence");
  const double u0 = cfg.real("chain.u0");
  const double center = cfg.real("potential.quad_center"), scale = cfg.real("potential.quad_scale");
  const std::function<double(double)> psi = [center, scale](double u) {
    return 0.5 * scale * (u - center) * (u - center);
  };
  const CompoundPoissonSpec base{cfg.real("kernel.cp_rate"), cfg.real("kernel.cp_jump_std"), 0.0};
  validate(base);

  ExperimentResult res;
  res.experiment = "mse-curve";
  res.summary = base_summary(res.experiment, cfg, opts, reps);

  const double half = cfg.real("sweep.grid_half_width");
  const GridInvariant inv = solve_cp_invariant(beta, base, psi, -half, half, cfg.real("sweep.grid_h"));
  const double truth = inv.expectation([](double u) { return u; });
  res.summary["truth"] = {{"value", truth}, {"solver_iterations", inv.iterations}, {"solver_residual", inv.residual}};

  // avg[e][r][i]: Cesaro average of u over the first ns[i] steps.
  const std::size_t ne = eps.size(), nn = ns.size();
  std::vector<std::vector<std::vector<double>>> avg(ne, std::vector<std::vector<double>>(reps));
  parallel_for(ne * reps, opts.threads, [&](std::size_t task) {
    const std::size_t e = task / reps, r = task % reps;
    CompoundPoissonSpec spec = base;
    spec.trunc_eps = eps[e];
    const ProposalKernel kernel = ProposalKernel::scalar_cp(beta, spec, eps[e] > 0.0);
    RngStream rng = make_stream(opts.seed, Stream::MseChain, r);
    std::vector<double> out(nn);
    double sum = 0.0;
    std::size_t next = 0;
    run_scalar_chain(u0, kernel, psi, ns.back(), rng, [&](std::uint64_t step, double u) {
      sum += u;
      if (step + 1 == ns[next]) {
        out[next] = sum / static_cast<double>(ns[next]);
        ++next;
      }
    });
    avg[e][r] = std::move(out);
  });

  std::vector<double> inv_n;
  for (auto n : ns)
    inv_n.push_back(1.0 / static_cast<double>(n));

  // Statistics for one resample of replica indices: per eps, MSE and bias per n.
  struct Curves {
    std::vector<std::vector<double>> mse, bias;
  };
  auto curves = [&](std::span<const std::size_t> idx) {
    Curves c;
    c.mse.assign(ne, std::vector<double>(nn, 0.0));
    c.bias.assign(ne, std::vector<double>(nn, 0.0));
    for (std::size_t e = 0; e < ne; ++e)
      for (std::size_t r : idx)
        for (std::size_t i = 0; i < nn; ++i) {
          const double err = avg[e][r][i] - truth;
          c.mse[e][i] += err * err;
          c.bias[e][i] += err;
        }
    for (std::size_t e = 0; e < ne; ++e)
      for (std::size_t i = 0; i < nn; ++i) {
        c.mse[e][i] /= static_cast<double>(idx.size());
        c.bias[e][i] /= static_cast<double>(idx.size());
      }
    return c;
  };

  SweepTable grid("mse_grid", {"eps", "bias", "bias_se"});
  std::vector<std::vector<double>> weights(ne, std::vector<double>(nn));
  std::vector<CurveFit> fits(ne), bias_fits(ne);
  std::vector<double> slopes(ne);
  for (std::size_t e = 0; e < ne; ++e) {
    std::vector<double> mse(nn), bias(nn);
    for (std::size_t i = 0; i < nn; ++i) {
      std::vector<double> sq(reps), er(reps);
      for (std::size_t r = 0; r < reps; ++r) {
        er[r] = avg[e][r][i] - truth;
        sq[r] = er[r] * er[r];
      }
      const MeanSe ms = mean_and_se(sq), bs = mean_and_se(er);
      mse[i] = ms.mean;
      bias[i] = bs.mean;
      weights[e][i] = ms.se > 0.0 ? 1.0 / (ms.se * ms.se) : 1.0;
      grid.add_row(static_cast<double>(ns[i]), ms.mean, ms.se, static_cast<double>(reps), {eps[e], bs.mean, bs.se});
    }
    fits[e] = fit_plateau(inv_n, mse, weights[e]);
    bias_fits[e] = fit_plateau(inv_n, bias, {});
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < nn; ++i) {
      lx.push_back(std::log(static_cast<double>(ns[i])));
      ly.push_back(std::log(mse[i]));
    }
    slopes[e] = fit_line(lx, ly).slope;
  }

  // Bootstrap: [A(eps_0..), |bias(n_max)|(eps_0..)].
  const auto boot = bootstrap(reps, n_boot, stream_id(Stream::Bootstrap, opts.seed), [&](auto idx) {
    const Curves c = curves(idx);
    std::vector<double> s(2 * ne);
    for (std::size_t e = 0; e < ne; ++e) {
      s[e] = fit_plateau(inv_n, c.mse[e], weights[e]).A;
      s[ne + e] = std::abs(c.bias[e].back());
    }
    return s;
  });
  auto slice = [&](std::size_t offset) {
    std::vector<std::vector<double>> out;
    for (const auto &b : boot)
      out.emplace_back(b.begin() + static_cast<std::ptrdiff_t>(offset),
                       b.begin() + static_cast<std::ptrdiff_t>(offset + ne));
    return out;
  };
  const TrendCheck a_trend = no_significant_increase(slice(0), conf);
  const TrendCheck b_trend = no_significant_increase(slice(ne), conf);

  SweepTable fit_table("mse_fit", {"A_lower", "A_upper", "B", "loglog_slope", "bias_nmax", "bias_nmax_se",
                                   "bias_plateau", "bias_inv_n"});
  const double alpha = 1.0 - conf;
  bool exact_plateau_zero = false, exact_slope_ok = false;
  for (std::size_t e = 0; e < ne; ++e) {
    std::vector<double> a_boot;
    for (const auto &b : boot)
      a_boot.push_back(b[e]);
    const MeanSe a_ms = mean_and_se(a_boot);
    const double a_sd = a_ms.se * std::sqrt(static_cast<double>(a_boot.size()));
    const double lo = quantile(a_boot, 0.5 * alpha), hi = quantile(a_boot, 1.0 - 0.5 * alpha);
    std::vector<double> er(reps);
    for (std::size_t r = 0; r < reps; ++r)
      er[r] = avg[e][r].back() - truth;
    const MeanSe bs = mean_and_se(er);
    fit_table.add_row(eps[e], fits[e].A, a_sd, static_cast<double>(reps),
                      {lo, hi, fits[e].B, slopes[e], bs.mean, bs.se, bias_fits[e].A, bias_fits[e].B});
    if (eps[e] == 0.0) {
      exact_plateau_zero = lo <= 0.0 && 0.0 <= hi;
      exact_slope_ok = slopes[e] >= -1.2 && slopes[e] <= -0.8;
      res.summary["exact"] = {{"plateau", fits[e].A}, {"plateau_ci", {lo, hi}}, {"loglog_slope", slopes[e]}};
    }
  }
  res.summary["plateau_trend"] = {{"ok", a_trend.ok}, {"increase_lower_bounds", a_trend.increase_lower}};
  res.summary["bias_trend"] = {{"ok", b_trend.ok}, {"increase_lower_bounds", b_trend.increase_lower}};
  res.verdict("exact_plateau_zero", exact_plateau_zero);
  res.verdict("exact_loglog_slope", exact_slope_ok);
  res.verdict("plateau_nonincreasing", a_trend.ok);
  res.verdict("bias_nonincreasing", b_trend.ok);
  res.tables.push_back(std::move(fit_table));
  res.tables.push_back(std::move(grid));
  return res;
}

} // namespace rcar
