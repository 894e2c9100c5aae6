#include "function_space.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace rcar {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

} // namespace

BasisSpec::BasisSpec(std::size_t n_modes) : n_modes_(n_modes) {
  if (n_modes == 0)
    throw InvalidInput("BasisSpec: n_modes must be positive");
  eigenvalues_.resize(static_cast<Eigen::Index>(n_modes));
  for (std::size_t j = 0; j < n_modes; ++j) {
    const double k = frequency(j);
    eigenvalues_[static_cast<Eigen::Index>(j)] = 1.0 / (1.0 + k * k);
  }
}

int BasisSpec::frequency(std::size_t j) const { return static_cast<int>((j + 1) / 2); }

ModeKind BasisSpec::kind(std::size_t j) const {
  if (j == 0)
    return ModeKind::Constant;
  return (j % 2 == 1) ? ModeKind::Cosine : ModeKind::Sine;
}

double BasisSpec::basis_amplitude(std::size_t j) const {
  if (j == 0)
    return 1.0 / std::sqrt(kTwoPi);
  const double k = frequency(j);
  return 1.0 / std::sqrt(std::numbers::pi * (1.0 + k * k));
}

double BasisSpec::basis_value(std::size_t j, double x) const {
  const double a = basis_amplitude(j);
  switch (kind(j)) {
  case ModeKind::Constant:
    return a;
  case ModeKind::Cosine:
    return a * std::cos(frequency(j) * x);
  case ModeKind::Sine:
    return a * std::sin(frequency(j) * x);
  }
  return 0.0;
}

double BasisSpec::basis_derivative(std::size_t j, double x) const {
  const double a = basis_amplitude(j);
  const double k = frequency(j);
  switch (kind(j)) {
  case ModeKind::Constant:
    return 0.0;
  case ModeKind::Cosine:
    return -a * k * std::sin(k * x);
  case ModeKind::Sine:
    return a * k * std::cos(k * x);
  }
  return 0.0;
}

FieldVector::FieldVector(Eigen::VectorXd coeffs) : coeffs_(std::move(coeffs)) {}

FieldVector::FieldVector(std::initializer_list<double> values)
    : coeffs_(static_cast<Eigen::Index>(values.size())) {
  Eigen::Index i = 0;
  for (double v : values)
    coeffs_[i++] = v;
}

FieldVector FieldVector::unit(std::size_t n, std::size_t j) {
  FieldVector e(n);
  e[j] = 1.0;
  return e;
}

FieldVector &FieldVector::operator+=(const FieldVector &o) {
  if (o.size() != size())
    throw InvalidInput("FieldVector: size mismatch");
  coeffs_ += o.coeffs_;
  return *this;
}

FieldVector &FieldVector::operator-=(const FieldVector &o) {
  if (o.size() != size())
    throw InvalidInput("FieldVector: size mismatch");
  coeffs_ -= o.coeffs_;
  return *this;
}

FieldVector &FieldVector::operator*=(double s) {
  coeffs_ *= s;
  return *this;
}

void require_finite(const FieldVector &u) {
  if (!u.all_finite())
    throw InvalidInput("non-finite coefficient in field vector");
}

double h1_norm(const FieldVector &u) {
  require_finite(u);
  return u.coeffs().norm();
}

double h1_distance(const FieldVector &u, const FieldVector &v) {
  if (u.size() != v.size())
    throw InvalidInput("h1_distance: size mismatch");
  return (u.coeffs() - v.coeffs()).norm();
}

FieldVector project(const FieldVector &u, std::size_t m_cut) {
  FieldVector out = u;
  for (std::size_t j = m_cut; j < out.size(); ++j)
    out[j] = 0.0;
  return out;
}

double evaluate_at(const BasisSpec &basis, const FieldVector &u, double x) {
  if (!std::isfinite(x))
    throw InvalidInput("evaluate_at: non-finite point");
  if (u.size() > basis.n_modes())
    throw InvalidInput("evaluate_at: vector longer than basis");
  require_finite(u);
  double sum = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j)
    sum += u[j] * basis.basis_value(j, x);
  return sum;
}

Eigen::MatrixXd evaluation_matrix(const BasisSpec &basis, const std::vector<double> &points) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(points.size()), static_cast<Eigen::Index>(basis.n_modes()));
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!std::isfinite(points[i]))
      throw InvalidInput("evaluation_matrix: non-finite point");
    for (std::size_t j = 0; j < basis.n_modes(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = basis.basis_value(j, points[i]);
  }
  return m;
}

} // namespace rcar
