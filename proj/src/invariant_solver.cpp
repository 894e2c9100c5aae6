#include "invariant_solver.hpp"

#include "mh_core.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace rcar {

double GridInvariant::expectation(const std::function<double(double)> &phi) const {
  double s = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i)
    s += mass[i] * phi(grid[i]);
  return s;
}

double cp_continuous_density(const CompoundPoissonSpec &spec, double x) {
  validate(spec);
  double total = 0.0;
  double w = std::exp(-spec.rate); // Poisson weight, updated to k
  for (int k = 1; k < 200; ++k) {
    w *= spec.rate / k;
    const double var = k * spec.jump_std * spec.jump_std;
    total += w * std::exp(-0.5 * x * x / var) / std::sqrt(2.0 * std::numbers::pi * var);
    if (w < 1e-18 && k > spec.rate)
      break;
  }
  return total;
}

GridInvariant solve_cp_invariant(double beta, const CompoundPoissonSpec &spec,
                                 const std::function<double(double)> &psi, double lo, double hi, double h,
                                 double tol, std::size_t max_iter) {
  validate_beta(beta);
  validate(spec);
  if (spec.trunc_eps != 0.0)
    throw ParameterError("grid invariant solver supports the untruncated innovation only");
  if (!(hi > lo) || !(h > 0.0))
    throw ParameterError("invalid grid");
  const auto n = static_cast<Eigen::Index>(std::llround((hi - lo) / h)) + 1;
  GridInvariant out;
  out.grid.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i)
    out.grid[static_cast<std::size_t>(i)] = lo + h * static_cast<double>(i);
  std::vector<double> psi_grid(out.grid.size());
  for (std::size_t i = 0; i < out.grid.size(); ++i)
    psi_grid[i] = psi(out.grid[i]);

  const double atom = std::exp(-spec.rate);
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double u = out.grid[static_cast<std::size_t>(i)];
    double row = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double w = (j == 0 || j == n - 1) ? 0.5 * h : h;
      const double t = acceptance_prob(psi_grid[static_cast<std::size_t>(i)], psi_grid[static_cast<std::size_t>(j)]) *
                       cp_continuous_density(spec, out.grid[static_cast<std::size_t>(j)] - beta * u) * w;
      T(i, j) = t;
      row += t;
    }
    // Atom at beta*u, split linearly between neighbouring nodes.
    const double z = beta * u;
    const double a = atom * acceptance_prob(psi_grid[static_cast<std::size_t>(i)], psi(z));
    const double pos = (z - lo) / h;
    auto left = static_cast<Eigen::Index>(std::floor(pos));
    left = std::clamp<Eigen::Index>(left, 0, n - 2);
    const double frac = pos - static_cast<double>(left);
    T(i, left) += a * (1.0 - frac);
    T(i, left + 1) += a * frac;
    row += a;
    T(i, i) += std::max(0.0, 1.0 - row);
  }
  // Rows of T may sum slightly above one through quadrature error.
  for (Eigen::Index i = 0; i < n; ++i)
    T.row(i) /= T.row(i).sum();

  Eigen::VectorXd p = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  const Eigen::MatrixXd Tt = T.transpose();
  for (out.iterations = 1; out.iterations <= max_iter; ++out.iterations) {
    Eigen::VectorXd next = Tt * p;
    next /= next.sum();
    out.residual = (next - p).lpNorm<1>();
    p = std::move(next);
    if (out.residual < tol)
      break;
  }
  out.mass.assign(p.data(), p.data() + p.size());
  return out;
}

} // namespace rcar
