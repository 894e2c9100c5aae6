#pragma once

// Likelihood potentials Psi(u; y).

#include "function_space.hpp"
#include "rng.hpp"

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace rcar {

struct ObservationData {
  std::vector<double> points; // x_j in [0, 2 pi)
  std::vector<double> values; // y_j
  double sigma = 1.0;
};

void validate(const ObservationData &data);

/// x_j = 2 pi (j + 1/2) / m.
std::vector<double> equispaced_points(std::size_t m);

struct SslPotential {
  ObservationData data;
  double h = 1.0; // sigmoid steepness in g_h(t) = tanh(h t)
};

/// Fourier multipliers of a smooth periodic kernel g(x) = g_0 + sum_k g_k cos(k x).
struct ConvolutionKernel {
  std::vector<double> symbol; // g_k for k = 0, 1, ..., indexed by frequency

  /// g_k = exp(-decay k^2) up to max_frequency.
  static ConvolutionKernel gaussian(int max_frequency, double decay = 0.5);
  /// Symbol for which every basis multiplier is one.
  static ConvolutionKernel identity(int max_frequency);

  /// Diagonal action on mode j: 2 pi g_0 on the constant, pi g_k otherwise.
  double multiplier(const BasisSpec &basis, std::size_t j) const;
  /// g(x) reconstructed from the symbol.
  double kernel_value(double x) const;
};

struct TailModParams {
  double eps_t = 100.0;
  double R0 = 3.0;
};

/// A potential evaluator plus the metadata the diagnostics need.
class Potential {
public:
  using Fn = std::function<double(const FieldVector &)>;

  Potential(std::string name, double lipschitz_exponent, Fn fn);

  /// Evaluates Psi(u); throws InvalidInput on a non-finite state.
  double operator()(const FieldVector &u) const;
  const std::string &name() const { return name_; }
  /// Exponent q in |Psi(u) - Psi(v)| <= L (1 v ||u||^q v ||v||^q) ||u - v||.
  double q() const { return q_; }

private:
  std::string name_;
  double q_;
  Fn fn_;
};

double ssl_eval(const BasisSpec &basis, const SslPotential &p, const FieldVector &u);
std::vector<double> deconv_forward(const BasisSpec &basis, const ConvolutionKernel &k, const FieldVector &u,
                                   const std::vector<double> &points);
double deconv_eval(const BasisSpec &basis, const ConvolutionKernel &k, const ObservationData &data,
                   const FieldVector &u);
double tail_modified_eval(const Potential &base, const TailModParams &t, const FieldVector &u);
double projected_eval(const Potential &base, std::size_t m_cut, const FieldVector &u);

/// Matrix of the linear forward map u -> (g * u)(x_j).
Eigen::MatrixXd deconv_matrix(const BasisSpec &basis, const ConvolutionKernel &k, const std::vector<double> &points);
/// Largest singular value by power iteration on A^T A.
double operator_norm(const Eigen::MatrixXd &a, int max_iter = 500, double tol = 1e-13);

/// 2 c^2 / (1 - c^2) ||G||^2, the lower bound eps_t should exceed.
double tail_guidance_bound(double c, double g_norm);

Potential make_constant_potential(double value = 0.0);
Potential make_ssl_potential(const BasisSpec &basis, SslPotential p);
Potential make_deconv_potential(const BasisSpec &basis, const ConvolutionKernel &k, ObservationData data);
Potential make_tail_modified(Potential base, TailModParams t);
Potential make_projected(Potential base, std::size_t m_cut);
/// One-dimensional Psi(u) = scale (u - center)^2 / 2 on a length-1 state.
Potential make_quadratic_1d(double center = 1.0, double scale = 1.0);

/// y_j = forward(truth)_j + sigma z_j.
ObservationData generate_observations(const std::function<std::vector<double>(const FieldVector &)> &forward,
                                      const FieldVector &truth, std::vector<double> points, double sigma,
                                      RngStream &rng);

void write_observations_csv(std::ostream &os, const ObservationData &data);
/// Reads the x,y CSV written above; sigma is not part of the file.
ObservationData read_observations_csv(std::istream &is, double sigma);

} // namespace rcar
