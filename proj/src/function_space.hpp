#pragma once

// Truncated H^1(T) coefficient space in the real Fourier basis.
//
// Mode ordering is [const, cos 1, sin 1, cos 2, sin 2, ...]. Each basis
// function is normalized in H^1(T), so the H^1 norm of a function is the
// Euclidean norm of its coefficient vector.

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace rcar {

class InvalidInput : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

enum class ModeKind { Constant, Cosine, Sine };

class BasisSpec {
public:
  explicit BasisSpec(std::size_t n_modes);

  std::size_t n_modes() const { return n_modes_; }
  int frequency(std::size_t j) const;
  ModeKind kind(std::size_t j) const;
  /// Covariance / prior scale lambda_j = (1 + k_j^2)^{-1}.
  double eigenvalue(std::size_t j) const { return eigenvalues_[j]; }
  const Eigen::VectorXd &eigenvalues() const { return eigenvalues_; }

  /// phi_j(x) for the H^1-normalized basis function j.
  double basis_value(std::size_t j, double x) const;
  /// d/dx phi_j(x).
  double basis_derivative(std::size_t j, double x) const;
  /// Sup norm of phi_j over the circle.
  double basis_amplitude(std::size_t j) const;

private:
  std::size_t n_modes_;
  Eigen::VectorXd eigenvalues_;
};

/// Coefficient vector of a function along the H^1-orthonormal basis.
class FieldVector {
public:
  FieldVector() = default;
  explicit FieldVector(std::size_t n) : coeffs_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n))) {}
  explicit FieldVector(Eigen::VectorXd coeffs);
  FieldVector(std::initializer_list<double> values);

  static FieldVector zero(std::size_t n) { return FieldVector(n); }
  static FieldVector unit(std::size_t n, std::size_t j);

  std::size_t size() const { return static_cast<std::size_t>(coeffs_.size()); }
  double operator[](std::size_t j) const { return coeffs_[static_cast<Eigen::Index>(j)]; }
  double &operator[](std::size_t j) { return coeffs_[static_cast<Eigen::Index>(j)]; }
  const Eigen::VectorXd &coeffs() const { return coeffs_; }
  Eigen::VectorXd &coeffs() { return coeffs_; }

  bool all_finite() const { return coeffs_.allFinite(); }

  FieldVector &operator+=(const FieldVector &o);
  FieldVector &operator-=(const FieldVector &o);
  FieldVector &operator*=(double s);

  friend FieldVector operator+(FieldVector a, const FieldVector &b) { return a += b; }
  friend FieldVector operator-(FieldVector a, const FieldVector &b) { return a -= b; }
  friend FieldVector operator*(double s, FieldVector a) { return a *= s; }
  friend bool operator==(const FieldVector &a, const FieldVector &b) {
    return a.coeffs_.size() == b.coeffs_.size() && a.coeffs_ == b.coeffs_;
  }

private:
  Eigen::VectorXd coeffs_;
};

/// Throws InvalidInput if any coefficient is NaN or infinite.
void require_finite(const FieldVector &u);

double h1_norm(const FieldVector &u);
/// ||u - v|| without allocating a temporary.
double h1_distance(const FieldVector &u, const FieldVector &v);

/// Keep the first m_cut coefficients, zero the rest.
FieldVector project(const FieldVector &u, std::size_t m_cut);

double evaluate_at(const BasisSpec &basis, const FieldVector &u, double x);

/// Row j of the matrix maps coefficients to u(points[j]).
Eigen::MatrixXd evaluation_matrix(const BasisSpec &basis, const std::vector<double> &points);

} // namespace rcar
