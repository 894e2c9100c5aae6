#pragma once

// Invariant law of the one-dimensional MH chain with deterministic thinning
// beta*u and a compound Poisson innovation, computed on a uniform grid.
//
// The transition kernel has three parts: an atom at beta*u (no jumps, mass
// e^{-rate}) accepted with alpha(u, beta u); a continuous part
// alpha(u, v) g(v - beta u) with g the jump-sum density given N >= 1; and the
// rejection mass kept at u. The discretized kernel is row stochastic and its
// left Perron vector is found by power iteration.

#include "measures.hpp"

#include <cstddef>
#include <functional>
#include <vector>

namespace rcar {

struct GridInvariant {
  std::vector<double> grid;
  std::vector<double> mass; // sums to one
  std::size_t iterations = 0;
  double residual = 0.0; // final L1 change

  double expectation(const std::function<double(double)> &phi) const;
};

/// Density of sum_{j<=N} xi_j restricted to N >= 1 (total mass 1 - e^{-rate}).
double cp_continuous_density(const CompoundPoissonSpec &spec, double x);

GridInvariant solve_cp_invariant(double beta, const CompoundPoissonSpec &spec,
                                 const std::function<double(double)> &psi, double lo = -10.0, double hi = 10.0,
                                 double h = 0.01, double tol = 1e-14, std::size_t max_iter = 20000);

} // namespace rcar
