#include "invariant_solver.hpp"
#include "mh_core.hpp"
#include "oracles.hpp"
#include "stats.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace rcar;

TEST(InvariantSolver, ContinuousDensityMassExcludesAtom) {
  const CompoundPoissonSpec spec{1.0, 1.0, 0.0};
  const double mass = oracle::simpson([&](double x) { return cp_continuous_density(spec, x); }, -30.0, 30.0, 60000);
  EXPECT_NEAR(mass, 1.0 - std::exp(-1.0), 1e-8);
  EXPECT_NEAR(cp_continuous_density(spec, 0.7), cp_continuous_density(spec, -0.7), 1e-15);
}

TEST(InvariantSolver, ZeroPotentialGivesAutoregressiveLaw) {
  // X = beta X + xi with Var(xi) = rate * jump_std^2, so Var(X) = 1 / (1 - beta^2).
  const CompoundPoissonSpec spec{1.0, 1.0, 0.0};
  const GridInvariant g = solve_cp_invariant(0.5, spec, [](double) { return 0.0; });
  double total = 0.0;
  for (double m : g.mass)
    total += m;
  EXPECT_NEAR(total, 1.0, 1e-12);
  EXPECT_NEAR(g.expectation([](double x) { return x; }), 0.0, 1e-10);
  EXPECT_NEAR(g.expectation([](double x) { return x * x; }), 4.0 / 3.0, 2e-3);
  EXPECT_LT(g.residual, 1e-13);
}

TEST(InvariantSolver, MatchesLongChainForQuadraticPotential) {
  const CompoundPoissonSpec spec{1.0, 1.0, 0.0};
  const auto psi = [](double x) { return 0.5 * (x - 1) * (x - 1); };
  const GridInvariant g = solve_cp_invariant(0.5, spec, psi);
  const ProposalKernel k = ProposalKernel::scalar_cp(0.5, spec, false);
  RngStream rng(1, 0);
  const std::size_t n = 1000000, batches = 100;
  std::vector<double> sums(batches, 0.0), sq(batches, 0.0);
  run_scalar_chain(0.0, k, psi, n, rng, [&](std::uint64_t i, double u) {
    sums[i / (n / batches)] += u;
    sq[i / (n / batches)] += u * u;
  });
  for (auto &s : sums)
    s /= n / batches;
  for (auto &s : sq)
    s /= n / batches;
  const MeanSe m1 = mean_and_se(sums), m2 = mean_and_se(sq);
  EXPECT_NEAR(g.expectation([](double x) { return x; }), m1.mean, 4 * m1.se);
  EXPECT_NEAR(g.expectation([](double x) { return x * x; }), m2.mean, 4 * m2.se);
}

TEST(InvariantSolver, RejectsTruncatedInnovation) {
  EXPECT_THROW(solve_cp_invariant(0.5, CompoundPoissonSpec{1.0, 1.0, 0.5}, [](double) { return 0.0; }),
               std::invalid_argument);
}
