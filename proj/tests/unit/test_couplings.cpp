#include "couplings.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace rcar;

namespace {

constexpr std::size_t kModes = 16;

Potential ssl_target(const BasisSpec &b) {
  SslPotential s;
  s.data.points = equispaced_points(6);
  s.data.values = {0.6, -0.3, 0.8, 0.2, -0.5, 0.4};
  s.data.sigma = 0.5;
  return make_ssl_potential(b, s);
}

FieldVector gamma_draw(const BasisSpec &b, RngStream &rng) { return sample_gamma_prior(GammaPriorSpec{0.5, b}, rng); }

SemimetricParams default_params() {
  SemimetricParams p;
  p.s = 0.0;
  return p;
}

} // namespace

TEST(Couplings, DiagonalIsAbsorbing) {
  const BasisSpec b(kModes);
  const ProposalKernel k = ProposalKernel::gamma_beta(0.5, 0.5, b);
  const Potential p = ssl_target(b);
  RngStream rng(1, 0);
  const FieldVector u = gamma_draw(b, rng);
  CoupledState st(u, u, p);
  for (int i = 0; i < 1000; ++i) {
    st.step(k, p, rng);
    ASSERT_EQ(st.u, st.v);
  }
}

TEST(Couplings, ConstantPotentialContractsEveryStep) {
  const BasisSpec b(kModes);
  const ProposalKernel k = ProposalKernel::gamma_beta(0.5, 0.5, b);
  const Potential p = make_constant_potential();
  RngStream rng(2, 0);
  for (int i = 0; i < 1000; ++i) {
    const FieldVector u = gamma_draw(b, rng), v = gamma_draw(b, rng);
    const CoupledStep s = basic_coupled_step(u, v, k, p, rng);
    ASSERT_TRUE(s.u_accepted && s.v_accepted);
    ASSERT_LT(h1_distance(s.u_next, s.v_next), h1_distance(u, v));
  }
}

TEST(Couplings, MarginalsMatchUncoupledKernel) {
  const BasisSpec b(kModes);
  const ProposalKernel k = ProposalKernel::gamma_beta(0.5, 0.5, b);
  const Potential p = ssl_target(b);
  RngStream init(3, 0);
  const FieldVector u = gamma_draw(b, init), v = gamma_draw(b, init);
  const int n = 100000;
  std::vector<double> cu, cv, mu, mv;
  RngStream rc(3, 1), ru(3, 2), rv(3, 3);
  for (int i = 0; i < n; ++i) {
    const CoupledStep s = basic_coupled_step(u, v, k, p, rc);
    cu.push_back(h1_norm(s.u_next));
    cv.push_back(h1_norm(s.v_next));
    mu.push_back(h1_norm(rcar_step(u, k, p, ru).u_next));
    mv.push_back(h1_norm(rcar_step(v, k, p, rv).u_next));
  }
  EXPECT_LT(oracle::ks_two_sample(cu, mu), oracle::ks_critical_1pct(n / 2.0));
  EXPECT_LT(oracle::ks_two_sample(cv, mv), oracle::ks_critical_1pct(n / 2.0));
}

TEST(Couplings, CoupledChainFromEqualStartsStaysAtZero) {
  const BasisSpec b(kModes);
  const ProposalKernel k = ProposalKernel::pcn(0.5, b);
  RngStream rng(4, 0);
  const FieldVector u = gamma_draw(b, rng);
  const CoupledTrace t = run_coupled_chain(u, u, 200, k, ssl_target(b), rng, default_params());
  ASSERT_EQ(t.d.size(), 200u);
  for (double d : t.d)
    ASSERT_EQ(d, 0.0);
  for (double d : t.tilde_d)
    ASSERT_EQ(d, 0.0);
}

TEST(Couplings, CoupledChainIsDeterministic) {
  const BasisSpec b(kModes);
  const ProposalKernel k = ProposalKernel::gamma_beta(0.5, 0.5, b);
  RngStream i(5, 0);
  const FieldVector u = gamma_draw(b, i), v = gamma_draw(b, i);
  RngStream r1(5, 1), r2(5, 1);
  const CoupledTrace a = run_coupled_chain(u, v, 300, k, ssl_target(b), r1, default_params());
  const CoupledTrace c = run_coupled_chain(u, v, 300, k, ssl_target(b), r2, default_params());
  EXPECT_EQ(a.d, c.d);
  EXPECT_EQ(a.V_u, c.V_u);
  EXPECT_EQ(a.final_v, c.final_v);
}

TEST(Couplings, MedianDistanceDoesNotGrowAlongDyadicSteps) {
  const BasisSpec b(kModes);
  const ProposalKernel k = ProposalKernel::gamma_beta(0.5, 0.5, b);
  const Potential p = ssl_target(b);
  const std::vector<std::size_t> grid{1, 2, 4, 8, 16, 32, 64};
  const std::size_t reps = 256;
  std::vector<std::vector<double>> d(reps);
  for (std::size_t r = 0; r < reps; ++r) {
    RngStream rng(6, r);
    const FieldVector u = gamma_draw(b, rng), v = gamma_draw(b, rng);
    const CoupledTrace t = run_coupled_chain(u, v, 64, k, p, rng, default_params());
    for (std::size_t g : grid)
      d[r].push_back(t.d[g - 1]);
  }
  const auto reps_stats = bootstrap(reps, 1000, 6, [&](std::span<const std::size_t> idx) {
    std::vector<double> med;
    for (std::size_t g = 0; g < grid.size(); ++g) {
      std::vector<double> col;
      for (auto i : idx)
        col.push_back(d[i][g]);
      med.push_back(quantile(col, 0.5));
    }
    return med;
  });
  EXPECT_TRUE(no_significant_increase(reps_stats, 0.99).ok);
}

TEST(Couplings, ContractionInputValidation) {
  const BasisSpec b(4);
  const ProposalKernel k = ProposalKernel::pcn(0.5, b);
  const Potential p = make_constant_potential();
  RngStream rng(7, 0);
  const FieldVector u{0.1, 0, 0, 0};
  EXPECT_THROW(estimate_contraction(u, u, 100, k, p, default_params(), rng), InvalidInput);
  EXPECT_THROW(estimate_contraction(u, 20.0 * u, 100, k, p, default_params(), rng), InvalidInput);
}

TEST(Couplings, ContractionUnderConstantPotentialWithinThinningBound) {
  const double r = 0.5, beta = 0.5;
  const BasisSpec b(kModes);
  const ProposalKernel k = ProposalKernel::gamma_beta(r, beta, b);
  RngStream rng(8, 0);
  const FieldVector u = gamma_draw(b, rng);
  FieldVector dir = gamma_draw(b, rng);
  dir *= 0.3 / h1_norm(dir);
  const ContractionEstimate e =
      estimate_contraction(u, u + dir, 10000, k, make_constant_potential(), default_params(), rng);
  EXPECT_LE(e.gamma1_hat, std::sqrt(beta * (r * beta + 1) / (r + 1)) + e.ci_halfwidth);
  EXPECT_EQ(e.pair_budget, 10000u);
  EXPECT_NEAR(e.d0, 0.3, 1e-12);
}

TEST(Couplings, NearbyPairContractsOnSslTarget) {
  const BasisSpec b(kModes);
  const ProposalKernel k = ProposalKernel::gamma_beta(0.5, 0.5, b);
  RngStream rng(9, 0);
  const FieldVector u = gamma_draw(b, rng);
  FieldVector dir = gamma_draw(b, rng);
  dir *= 0.2 / h1_norm(dir);
  SemimetricParams params;
  params.s = 0.0;
  const ContractionEstimate e = estimate_contraction(u, u + dir, 10000, k, ssl_target(b), params, rng);
  EXPECT_LT(e.gamma1_hat + e.ci_halfwidth, 1.0);
}

TEST(Couplings, DriftMatchesInnovationMomentAtOrigin) {
  const double r = 0.5, beta = 0.5, a = r * (1 - beta);
  const BasisSpec b(kModes);
  const ProposalKernel k = ProposalKernel::gamma_beta(r, beta, b);
  RngStream rng(10, 0);
  EXPECT_THROW(estimate_drift(FieldVector::zero(kModes), 999, k, make_constant_potential(), 2, rng), InvalidInput);
  const MeanSe m = estimate_drift(FieldVector::zero(kModes), 100000, k, make_constant_potential(), 2, rng);
  double expected = 0.0;
  for (std::size_t j = 0; j < kModes; ++j)
    expected += b.eigenvalue(j) * a * (a + 1);
  EXPECT_NEAR(m.mean, expected, 4 * m.se);
}

TEST(Couplings, DriftMatchesPcnClosedForm) {
  const double beta = 0.6;
  const BasisSpec b(kModes);
  const ProposalKernel k = ProposalKernel::pcn(beta, b);
  RngStream rng(11, 0);
  FieldVector u(kModes);
  u[0] = 3.0;
  u[5] = -2.0;
  const MeanSe m = estimate_drift(u, 100000, k, make_constant_potential(), 2, rng);
  const double expected = beta * beta * 13.0 + (1 - beta * beta) * b.eigenvalues().sum();
  EXPECT_NEAR(m.mean, expected, 4 * m.se);
}

TEST(Couplings, DriftFitRecoversLine) {
  std::vector<DriftProbe> probes;
  for (double V : {1.0, 4.0, 25.0, 100.0})
    probes.push_back({V, 0.5 * V + 1.0, 0.01});
  const DriftEstimate e = fit_drift(probes);
  EXPECT_NEAR(e.kappa_hat, 0.5, 1e-9);
  EXPECT_NEAR(e.K_hat, 1.0, 1e-7);
  EXPECT_EQ(e.violations, 0u);
  EXPECT_NEAR(e.free_slope, 0.5, 1e-9);
  EXPECT_THROW(fit_drift({probes[0]}), InvalidInput);
}

TEST(Couplings, DriftFitExposesGrowth) {
  std::vector<DriftProbe> probes;
  for (double V : {1.0, 4.0, 25.0, 100.0})
    probes.push_back({V, 2.0 * V, 0.01});
  const DriftEstimate e = fit_drift(probes);
  EXPECT_EQ(e.kappa_hat, 1.0);
  EXPECT_GT(e.violations, 0u);
  EXPECT_GT(e.free_slope, 1.0);
}

TEST(Couplings, DriftFitEnvelopeRespectsErrorBars) {
  const std::vector<DriftProbe> probes{{1.0, 3.0, 0.5}, {4.0, 2.5, 0.5}, {25.0, 12.0, 1.0}, {100.0, 40.0, 2.0}};
  const DriftEstimate e = fit_drift(probes);
  EXPECT_LT(e.kappa_hat, 1.0);
  EXPECT_GE(e.K_hat, 0.0);
  for (const auto &pr : probes)
    EXPECT_GE(e.kappa_hat * pr.V + e.K_hat, pr.PV - 3 * pr.se - 1e-9);
  EXPECT_EQ(e.violations, 0u);
}

TEST(Couplings, SmallsetLevelsSummarizePairs) {
  const BasisSpec b(kModes);
  const ProposalKernel k = ProposalKernel::gamma_beta(0.5, 0.5, b);
  RngStream rng(12, 0);
  const auto draw = [&b](RngStream &r) { return gamma_draw(b, r); };
  const SmallsetResult s =
      smallset_probe(25.0, {0, 1, 4, 16}, 32, k, ssl_target(b), default_params(), draw, rng);
  ASSERT_EQ(s.levels.size(), 4u);
  ASSERT_EQ(s.d_by_pair.size(), 32u);
  for (std::size_t g = 0; g < 4; ++g) {
    std::vector<double> col;
    for (const auto &row : s.d_by_pair)
      col.push_back(row[g]);
    EXPECT_DOUBLE_EQ(s.levels[g].mean, mean_and_se(col).mean);
  }
  EXPECT_GT(s.acceptance, 0.0);
  EXPECT_LE(s.acceptance, 1.0);
}

TEST(Couplings, SmallsetWithIdenticalStartsIsZero) {
  const BasisSpec b(kModes);
  const ProposalKernel k = ProposalKernel::gamma_beta(0.5, 0.5, b);
  RngStream rng(13, 0);
  const FieldVector fixed = gamma_draw(b, rng);
  const auto draw = [&fixed](RngStream &) { return fixed; };
  const SmallsetResult s = smallset_probe(1e6, {0, 8}, 8, k, ssl_target(b), default_params(), draw, rng);
  for (const auto &l : s.levels)
    EXPECT_EQ(l.mean, 0.0);
}

TEST(Couplings, SmallsetInputValidation) {
  const BasisSpec b(kModes);
  const ProposalKernel k = ProposalKernel::gamma_beta(0.5, 0.5, b);
  const Potential p = ssl_target(b);
  RngStream rng(14, 0);
  const auto draw = [&b](RngStream &r) { return gamma_draw(b, r); };
  EXPECT_THROW(smallset_probe(1e-9, {0, 1}, 4, k, p, default_params(), draw, rng), ParameterError);
  EXPECT_THROW(smallset_probe(25.0, {4, 1}, 4, k, p, default_params(), draw, rng), InvalidInput);
  EXPECT_THROW(smallset_probe(25.0, {1}, 0, k, p, default_params(), draw, rng), InvalidInput);
  EXPECT_THROW(smallset_probe(0.0, {1}, 4, k, p, default_params(), draw, rng), InvalidInput);
}
