#include "couplings.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rcar {

CoupledState::CoupledState(FieldVector u0, FieldVector v0, const Potential &p)
    : CoupledState(std::move(u0), std::move(v0), p, p) {}

CoupledState::CoupledState(FieldVector u0, FieldVector v0, const Potential &p_u, const Potential &p_v)
    : u(std::move(u0)), v(std::move(v0)), psi_u(p_u(u)), psi_v(p_v(v)) {}

void CoupledState::step(const ProposalKernel &k, const Potential &p_u, const Potential &p_v, RngStream &rng) {
  const ProposalNoise noise = draw_proposal_noise(k, rng);
  FieldVector u_star = apply_proposal(k, u, noise);
  FieldVector v_star = apply_proposal(k, v, noise);
  const double psi_us = p_u(u_star);
  const double psi_vs = p_v(v_star);
  const double sigma = rng.uniform();
  if (sigma < acceptance_prob(psi_u, psi_us)) {
    u = std::move(u_star);
    psi_u = psi_us;
  }
  if (sigma < acceptance_prob(psi_v, psi_vs)) {
    v = std::move(v_star);
    psi_v = psi_vs;
  }
}

CoupledStep basic_coupled_step(const FieldVector &u, const FieldVector &v, const ProposalKernel &k,
                               const Potential &p, RngStream &rng) {
  const ProposalNoise noise = draw_proposal_noise(k, rng);
  FieldVector u_star = apply_proposal(k, u, noise);
  FieldVector v_star = apply_proposal(k, v, noise);
  const double a_u = acceptance_prob(p(u), p(u_star));
  const double a_v = acceptance_prob(p(v), p(v_star));
  const double sigma = rng.uniform();
  CoupledStep out;
  out.u_accepted = sigma < a_u;
  out.v_accepted = sigma < a_v;
  out.u_next = out.u_accepted ? std::move(u_star) : u;
  out.v_next = out.v_accepted ? std::move(v_star) : v;
  return out;
}

CoupledTrace run_coupled_chain(const FieldVector &u0, const FieldVector &v0, std::uint64_t n,
                               const ProposalKernel &k, const Potential &p, RngStream &rng,
                               const SemimetricParams &params) {
  validate(params);
  CoupledTrace tr;
  tr.d.reserve(n);
  tr.tilde_d.reserve(n);
  tr.V_u.reserve(n);
  tr.V_v.reserve(n);
  CoupledState st(u0, v0, p);
  for (std::uint64_t i = 0; i < n; ++i) {
    st.step(k, p, rng);
    tr.d.push_back(d_s(st.u, st.v, params));
    tr.tilde_d.push_back(tilde_d_s(st.u, st.v, params));
    tr.V_u.push_back(lyapunov_V(st.u, params.p));
    tr.V_v.push_back(lyapunov_V(st.v, params.p));
  }
  tr.final_u = std::move(st.u);
  tr.final_v = std::move(st.v);
  return tr;
}

ContractionEstimate estimate_contraction(const FieldVector &u, const FieldVector &v, std::uint64_t reps,
                                         const ProposalKernel &k, const Potential &p,
                                         const SemimetricParams &params, RngStream &rng) {
  validate(params);
  const double d0 = d_s(u, v, params);
  if (d0 == 0.0)
    throw InvalidInput("estimate_contraction: u and v coincide");
  if (d0 >= 1.0)
    throw InvalidInput("estimate_contraction: pair is not d-close (d_s >= 1)");
  if (reps < 2)
    throw InvalidInput("estimate_contraction: need at least two replicas");
  const CoupledState start(u, v, p);
  std::vector<double> d1(reps);
  for (auto &x : d1) {
    CoupledState st = start;
    st.step(k, p, rng);
    x = d_s(st.u, st.v, params);
  }
  const MeanSe m = mean_and_se(d1);
  ContractionEstimate est;
  est.d0 = d0;
  est.mean_d1 = m.mean;
  est.gamma1_hat = m.mean / d0;
  est.ci_halfwidth = 2.5758293035489004 * m.se / d0;
  est.pair_budget = reps;
  return est;
}

MeanSe estimate_drift(const FieldVector &u, std::uint64_t reps, const ProposalKernel &k, const Potential &p,
                      int p_exp, RngStream &rng) {
  if (reps < 1000)
    throw InvalidInput("estimate_drift: at least 1000 replicas required");
  const double psi_u = p(u);
  std::vector<double> v(reps);
  for (auto &x : v)
    x = lyapunov_V(rcar_step_cached(u, psi_u, k, p, rng).u_next, p_exp);
  return mean_and_se(v);
}

namespace {

struct Halfplane {
  double a0, a1, b; // a0 kappa + a1 K >= b
};

double drift_objective(const std::vector<DriftProbe> &probes, double kappa, double K) {
  double f = 0.0;
  for (const auto &pr : probes) {
    const double r = pr.PV - kappa * pr.V - K;
    f += r * r;
  }
  return f;
}

bool satisfies(const std::vector<Halfplane> &cons, double kappa, double K) {
  for (const auto &c : cons) {
    const double scale = std::max({1.0, std::abs(c.b), std::abs(c.a0 * kappa), std::abs(c.a1 * K)});
    if (c.a0 * kappa + c.a1 * K < c.b - 1e-10 * scale)
      return false;
  }
  return true;
}

} // namespace

DriftEstimate fit_drift(const std::vector<DriftProbe> &probes) {
  if (probes.size() < 2)
    throw InvalidInput("fit_drift: need at least two probe points");

  std::vector<double> xs, ys;
  for (const auto &pr : probes) {
    xs.push_back(pr.V);
    ys.push_back(pr.PV);
  }
  DriftEstimate est;
  LineFit free{};
  try {
    free = fit_line(xs, ys);
  } catch (const std::invalid_argument &) {
    free = {0.0, ys.front()};
  }
  est.free_slope = free.slope;

  std::vector<Halfplane> cons{{1, 0, 0}, {0, 1, 0}};
  for (const auto &pr : probes)
    cons.push_back({pr.V, 1.0, pr.PV - 3.0 * pr.se});

  std::vector<std::array<double, 2>> candidates{{free.slope, free.intercept}};
  // Minimizer on each constraint line.
  for (const auto &c : cons) {
    const double nn = c.a0 * c.a0 + c.a1 * c.a1;
    const double x0 = c.a0 * c.b / nn, y0 = c.a1 * c.b / nn;
    const double dx = -c.a1, dy = c.a0;
    double num = 0.0, den = 0.0;
    for (const auto &pr : probes) {
      const double g = dx * pr.V + dy;
      num += (pr.PV - x0 * pr.V - y0) * g;
      den += g * g;
    }
    const double t = den > 0.0 ? num / den : 0.0;
    candidates.push_back({x0 + t * dx, y0 + t * dy});
  }
  // Vertices.
  for (std::size_t i = 0; i < cons.size(); ++i)
    for (std::size_t j = i + 1; j < cons.size(); ++j) {
      const double det = cons[i].a0 * cons[j].a1 - cons[i].a1 * cons[j].a0;
      if (std::abs(det) < 1e-300)
        continue;
      candidates.push_back({(cons[i].b * cons[j].a1 - cons[i].a1 * cons[j].b) / det,
                            (cons[i].a0 * cons[j].b - cons[i].b * cons[j].a0) / det});
    }

  double best = std::numeric_limits<double>::infinity();
  bool found = false;
  for (const auto &[kappa, K] : candidates) {
    if (!std::isfinite(kappa) || !std::isfinite(K) || !satisfies(cons, kappa, K))
      continue;
    const double f = drift_objective(probes, kappa, K);
    if (f < best) {
      best = f;
      est.kappa_hat = std::clamp(kappa, 0.0, 1.0);
      est.K_hat = std::max(0.0, K);
      found = true;
    }
  }
  if (!found)
    throw std::runtime_error("fit_drift: no admissible envelope among the candidates");
  for (const auto &pr : probes) {
    const double excess = pr.PV - (est.kappa_hat * pr.V + est.K_hat);
    est.residual = std::max(est.residual, excess);
    if (excess > 3.0 * pr.se * (1.0 + 1e-9))
      ++est.violations;
  }
  return est;
}

SmallsetResult smallset_probe(double R, const std::vector<std::uint64_t> &grid, std::size_t n_pairs,
                              const ProposalKernel &k, const Potential &p, const SemimetricParams &params,
                              const std::function<FieldVector(RngStream &)> &draw_prior, RngStream &rng) {
  validate(params);
  if (!(R > 0.0))
    throw InvalidInput("smallset_probe: R must be positive");
  if (grid.empty() || !std::is_sorted(grid.begin(), grid.end()))
    throw InvalidInput("smallset_probe: step grid must be nonempty and sorted");
  if (n_pairs == 0)
    throw InvalidInput("smallset_probe: need at least one pair");

  std::uint64_t attempts = 0, accepted = 0;
  auto draw_sublevel = [&]() {
    for (;;) {
      ++attempts;
      FieldVector u = draw_prior(rng);
      if (lyapunov_V(u, params.p) <= R) {
        ++accepted;
        return u;
      }
      if (attempts >= 10000 && static_cast<double>(accepted) < 1e-3 * static_cast<double>(attempts))
        throw ParameterError("smallset_probe: sublevel set rejection rate above 99.9%");
    }
  };

  SmallsetResult res;
  res.d_by_pair.assign(n_pairs, std::vector<double>(grid.size()));
  for (std::size_t i = 0; i < n_pairs; ++i) {
    FieldVector u0 = draw_sublevel();
    FieldVector v0 = draw_sublevel();
    CoupledState st(std::move(u0), std::move(v0), p);
    std::uint64_t done = 0;
    for (std::size_t g = 0; g < grid.size(); ++g) {
      for (; done < grid[g]; ++done)
        st.step(k, p, rng);
      res.d_by_pair[i][g] = d_s(st.u, st.v, params);
    }
  }
  res.acceptance = static_cast<double>(accepted) / static_cast<double>(attempts);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    std::vector<double> col(n_pairs);
    for (std::size_t i = 0; i < n_pairs; ++i)
      col[i] = res.d_by_pair[i][g];
    const MeanSe m = mean_and_se(col);
    res.levels.push_back({grid[g], m.mean, m.se, quantile(col, 0.99)});
  }
  return res;
}

} // namespace rcar
