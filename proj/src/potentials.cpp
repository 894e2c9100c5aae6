#include "potentials.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

namespace rcar {

void validate(const ObservationData &data) {
  if (data.points.size() != data.values.size())
    throw InvalidInput("observation points and values differ in length");
  if (!(data.sigma > 0.0) || !std::isfinite(data.sigma))
    throw InvalidInput("observation sigma must be positive");
  for (double x : data.points)
    if (!std::isfinite(x) || x < 0.0 || x >= 2.0 * std::numbers::pi)
      throw InvalidInput("observation point outside [0, 2 pi)");
  for (double y : data.values)
    if (!std::isfinite(y))
      throw InvalidInput("non-finite observation value");
  std::vector<double> sorted = data.points;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw InvalidInput("observation points must be distinct");
}

std::vector<double> equispaced_points(std::size_t m) {
  std::vector<double> x(m);
  for (std::size_t j = 0; j < m; ++j)
    x[j] = 2.0 * std::numbers::pi * (static_cast<double>(j) + 0.5) / static_cast<double>(m);
  return x;
}

ConvolutionKernel ConvolutionKernel::gaussian(int max_frequency, double decay) {
  ConvolutionKernel k;
  for (int f = 0; f <= max_frequency; ++f)
    k.symbol.push_back(std::exp(-decay * f * f));
  return k;
}

ConvolutionKernel ConvolutionKernel::identity(int max_frequency) {
  ConvolutionKernel k;
  k.symbol.push_back(1.0 / (2.0 * std::numbers::pi));
  for (int f = 1; f <= max_frequency; ++f)
    k.symbol.push_back(1.0 / std::numbers::pi);
  return k;
}

double ConvolutionKernel::multiplier(const BasisSpec &basis, std::size_t j) const {
  const auto f = static_cast<std::size_t>(basis.frequency(j));
  if (f >= symbol.size())
    return 0.0;
  return (f == 0 ? 2.0 : 1.0) * std::numbers::pi * symbol[f];
}

double ConvolutionKernel::kernel_value(double x) const {
  double g = symbol.empty() ? 0.0 : symbol[0];
  for (std::size_t f = 1; f < symbol.size(); ++f)
    g += symbol[f] * std::cos(static_cast<double>(f) * x);
  return g;
}

Potential::Potential(std::string name, double lipschitz_exponent, Fn fn)
    : name_(std::move(name)), q_(lipschitz_exponent), fn_(std::move(fn)) {}

double Potential::operator()(const FieldVector &u) const {
  require_finite(u);
  const double v = fn_(u);
  if (std::isnan(v))
    throw InvalidInput("potential '" + name_ + "' evaluated to NaN");
  return v;
}

namespace {

double ssl_misfit(const Eigen::VectorXd &evals, const SslPotential &p) {
  double sum = 0.0;
  for (Eigen::Index j = 0; j < evals.size(); ++j) {
    const double r = std::tanh(p.h * evals[j]) - p.data.values[static_cast<std::size_t>(j)];
    sum += r * r;
  }
  return sum / (2.0 * p.data.sigma * p.data.sigma);
}

void check_basis(const BasisSpec &basis, const FieldVector &u) {
  if (u.size() != basis.n_modes())
    throw InvalidInput("state does not match basis size");
  require_finite(u);
}

} // namespace

double ssl_eval(const BasisSpec &basis, const SslPotential &p, const FieldVector &u) {
  check_basis(basis, u);
  Eigen::VectorXd evals(static_cast<Eigen::Index>(p.data.points.size()));
  for (std::size_t j = 0; j < p.data.points.size(); ++j)
    evals[static_cast<Eigen::Index>(j)] = evaluate_at(basis, u, p.data.points[j]);
  return ssl_misfit(evals, p);
}

Eigen::MatrixXd deconv_matrix(const BasisSpec &basis, const ConvolutionKernel &k, const std::vector<double> &points) {
  Eigen::MatrixXd g = evaluation_matrix(basis, points);
  for (std::size_t j = 0; j < basis.n_modes(); ++j)
    g.col(static_cast<Eigen::Index>(j)) *= k.multiplier(basis, j);
  return g;
}

std::vector<double> deconv_forward(const BasisSpec &basis, const ConvolutionKernel &k, const FieldVector &u,
                                   const std::vector<double> &points) {
  check_basis(basis, u);
  const Eigen::VectorXd out = deconv_matrix(basis, k, points) * u.coeffs();
  return {out.data(), out.data() + out.size()};
}

double deconv_eval(const BasisSpec &basis, const ConvolutionKernel &k, const ObservationData &data,
                   const FieldVector &u) {
  const std::vector<double> gu = deconv_forward(basis, k, u, data.points);
  if (gu.size() != data.values.size())
    throw InvalidInput("deconvolution data size does not match forward output");
  double sum = 0.0;
  for (std::size_t j = 0; j < gu.size(); ++j)
    sum += (gu[j] - data.values[j]) * (gu[j] - data.values[j]);
  return 0.5 * sum;
}

double tail_modified_eval(const Potential &base, const TailModParams &t, const FieldVector &u) {
  const double n = h1_norm(u);
  return base(u) + std::max(0.0, t.eps_t * n * n - t.R0 * t.R0);
}

double projected_eval(const Potential &base, std::size_t m_cut, const FieldVector &u) {
  return base(project(u, m_cut));
}

double operator_norm(const Eigen::MatrixXd &a, int max_iter, double tol) {
  if (a.size() == 0)
    return 0.0;
  const Eigen::MatrixXd ata = a.transpose() * a;
  Eigen::VectorXd x = Eigen::VectorXd::Ones(ata.cols()) / std::sqrt(static_cast<double>(ata.cols()));
  double lambda = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    Eigen::VectorXd y = ata * x;
    const double n = y.norm();
    if (n == 0.0)
      return 0.0;
    const double next = x.dot(y);
    x = y / n;
    if (std::abs(next - lambda) <= tol * std::abs(next)) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  return std::sqrt(lambda);
}

double tail_guidance_bound(double c, double g_norm) {
  if (!(c > 0.0 && c < 1.0))
    throw InvalidInput("tail guidance constant c must lie in (0, 1)");
  return 2.0 * c * c / (1.0 - c * c) * g_norm * g_norm;
}

Potential make_constant_potential(double value) {
  return Potential("constant", 0.0, [value](const FieldVector &) { return value; });
}

Potential make_ssl_potential(const BasisSpec &basis, SslPotential p) {
  validate(p.data);
  if (!(p.h > 0.0))
    throw InvalidInput("SSL steepness h must be positive");
  Eigen::MatrixXd e = evaluation_matrix(basis, p.data.points);
  const std::size_t n = basis.n_modes();
  return Potential("ssl", 0.0, [e = std::move(e), p = std::move(p), n](const FieldVector &u) {
    if (u.size() != n)
      throw InvalidInput("ssl potential: state does not match basis size");
    return ssl_misfit(e * u.coeffs(), p);
  });
}

Potential make_deconv_potential(const BasisSpec &basis, const ConvolutionKernel &k, ObservationData data) {
  validate(data);
  Eigen::MatrixXd g = deconv_matrix(basis, k, data.points);
  Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(data.values.data(), static_cast<Eigen::Index>(data.values.size()));
  const std::size_t n = basis.n_modes();
  return Potential("deconvolution", 1.0, [g = std::move(g), y = std::move(y), n](const FieldVector &u) {
    if (u.size() != n)
      throw InvalidInput("deconvolution potential: state does not match basis size");
    return 0.5 * (g * u.coeffs() - y).squaredNorm();
  });
}

Potential make_tail_modified(Potential base, TailModParams t) {
  if (!(t.eps_t > 0.0) || !(t.R0 > 0.0))
    throw InvalidInput("tail modification needs eps_t > 0 and R0 > 0");
  const std::string name = base.name() + "+tail";
  const double q = std::max(1.0, base.q());
  return Potential(name, q, [base = std::move(base), t](const FieldVector &u) { return tail_modified_eval(base, t, u); });
}

Potential make_projected(Potential base, std::size_t m_cut) {
  const std::string name = base.name() + "@" + std::to_string(m_cut);
  const double q = base.q();
  return Potential(name, q, [base = std::move(base), m_cut](const FieldVector &u) { return projected_eval(base, m_cut, u); });
}

Potential make_quadratic_1d(double center, double scale) {
  return Potential("quadratic_1d", 1.0, [center, scale](const FieldVector &u) {
    if (u.size() != 1)
      throw InvalidInput("quadratic_1d expects a one-dimensional state");
    const double d = u[0] - center;
    return 0.5 * scale * d * d;
  });
}

ObservationData generate_observations(const std::function<std::vector<double>(const FieldVector &)> &forward,
                                      const FieldVector &truth, std::vector<double> points, double sigma,
                                      RngStream &rng) {
  ObservationData data;
  data.sigma = sigma;
  data.values = forward(truth);
  data.points = std::move(points);
  if (data.values.size() != data.points.size())
    throw InvalidInput("forward map output does not match observation points");
  for (double &y : data.values)
    y += sigma * rng.normal();
  validate(data);
  return data;
}

void write_observations_csv(std::ostream &os, const ObservationData &data) {
  char buf[64];
  os << "x,y\n";
  for (std::size_t j = 0; j < data.points.size(); ++j) {
    std::snprintf(buf, sizeof buf, "%.17g,", data.points[j]);
    os << buf;
    std::snprintf(buf, sizeof buf, "%.17g\n", data.values[j]);
    os << buf;
  }
}

ObservationData read_observations_csv(std::istream &is, double sigma) {
  ObservationData data;
  data.sigma = sigma;
  std::string line;
  if (!std::getline(is, line) || line.rfind("x,y", 0) != 0)
    throw InvalidInput("observation CSV must start with header 'x,y'");
  while (std::getline(is, line)) {
    if (line.empty())
      continue;
    std::istringstream ls(line);
    std::string xs, ys;
    if (!std::getline(ls, xs, ',') || !std::getline(ls, ys))
      throw InvalidInput("malformed observation CSV row: " + line);
    try {
      data.points.push_back(std::stod(xs));
      data.values.push_back(std::stod(ys));
    } catch (const std::exception &) {
      throw InvalidInput("malformed observation CSV row: " + line);
    }
  }
  validate(data);
  return data;
}

} // namespace rcar
