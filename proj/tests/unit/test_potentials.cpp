#include "measures.hpp"
#include "oracles.hpp"
#include "potentials.hpp"

#include <Eigen/SVD>
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace rcar;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

ObservationData small_data() {
  ObservationData d;
  d.points = equispaced_points(6);
  d.values = {0.3, -0.2, 0.9, -0.7, 0.1, 0.5};
  d.sigma = 0.8;
  return d;
}

FieldVector gaussian_draw(std::size_t n, RngStream &rng, double scale = 1.0) {
  return scale * sample_gaussian_prior(GaussianPriorSpec{BasisSpec(n)}, rng);
}

// Independent SSL misfit written directly from the definition.
double ssl_reference(const ObservationData &d, double h, const FieldVector &u) {
  double s = 0.0;
  for (std::size_t j = 0; j < d.points.size(); ++j) {
    double ux = u[0] / std::sqrt(kTwoPi);
    for (std::size_t m = 1; m < u.size(); ++m) {
      const int k = static_cast<int>((m + 1) / 2);
      const double amp = 1.0 / std::sqrt(std::numbers::pi * (1.0 + k * k));
      ux += u[m] * amp * (m % 2 ? std::cos(k * d.points[j]) : std::sin(k * d.points[j]));
    }
    const double r = std::tanh(h * ux) - d.values[j];
    s += r * r;
  }
  return s / (2 * d.sigma * d.sigma);
}

} // namespace

TEST(Potentials, SslPerfectFitIsZero) {
  const BasisSpec b(9);
  RngStream rng(1, 0);
  const FieldVector u = gaussian_draw(9, rng);
  SslPotential p{small_data(), 1.7};
  for (std::size_t j = 0; j < p.data.points.size(); ++j)
    p.data.values[j] = std::tanh(1.7 * evaluate_at(b, u, p.data.points[j]));
  EXPECT_NEAR(ssl_eval(b, p, u), 0.0, 1e-28);
}

TEST(Potentials, SslSingleObservationAtZeroState) {
  SslPotential p;
  p.data.points = {1.0};
  p.data.values = {1.0};
  p.data.sigma = 1.0;
  EXPECT_DOUBLE_EQ(ssl_eval(BasisSpec(4), p, FieldVector::zero(4)), 0.5);
}

TEST(Potentials, SslMatchesReferenceImplementation) {
  const BasisSpec b(33);
  SslPotential p{small_data(), 1.3};
  const Potential pot = make_ssl_potential(b, p);
  RngStream rng(2, 0);
  for (int t = 0; t < 200; ++t) {
    const FieldVector u = gaussian_draw(33, rng, 3.0);
    const double ref = ssl_reference(p.data, p.h, u);
    EXPECT_NEAR(ssl_eval(b, p, u), ref, 1e-12 * (1 + ref));
    EXPECT_NEAR(pot(u), ref, 1e-12 * (1 + ref));
  }
}

TEST(Potentials, SslIsBoundedAndLipschitz) {
  const BasisSpec b(16);
  SslPotential p{small_data(), 2.0};
  const Potential pot = make_ssl_potential(b, p);
  double bound = 0.0, lip = 0.0;
  const Eigen::MatrixXd e = evaluation_matrix(b, p.data.points);
  for (std::size_t j = 0; j < p.data.points.size(); ++j) {
    bound += (1 + std::abs(p.data.values[j])) * (1 + std::abs(p.data.values[j]));
    lip += (1 + std::abs(p.data.values[j])) * e.row(static_cast<Eigen::Index>(j)).norm();
  }
  bound /= 2 * p.data.sigma * p.data.sigma;
  lip *= p.h / (p.data.sigma * p.data.sigma);
  RngStream rng(3, 0);
  double max_ratio = 0.0;
  for (int t = 0; t < 100000; ++t) {
    const FieldVector u = gaussian_draw(16, rng, 2.0);
    const FieldVector v = u + gaussian_draw(16, rng, 0.1);
    const double pu = pot(u), pv = pot(v);
    ASSERT_GE(pu, 0.0);
    ASSERT_LE(pu, bound);
    max_ratio = std::max(max_ratio, std::abs(pu - pv) / h1_distance(u, v));
  }
  EXPECT_LE(max_ratio, lip);
  EXPECT_GT(max_ratio, 0.0);
}

TEST(Potentials, SslTailConditionOnLargeStates) {
  const BasisSpec b(16);
  SslPotential p{small_data(), 1.0};
  p.data.sigma = 1.0;
  const Potential pot = make_ssl_potential(b, p);
  double y1 = 0.0;
  for (double y : p.data.values)
    y1 += std::abs(y);
  const double floor = std::exp(-4.0 * y1 - static_cast<double>(p.data.values.size()));
  RngStream rng(4, 0);
  for (int t = 0; t < 10000; ++t) {
    FieldVector u = gaussian_draw(16, rng);
    u *= (10.0 + 90.0 * rng.uniform()) / h1_norm(u);
    FieldVector dir = gaussian_draw(16, rng);
    dir *= 0.4 * h1_norm(u) * rng.uniform() / h1_norm(dir);
    const FieldVector v = 0.5 * u + dir;
    ASSERT_GE(std::exp(pot(u) - pot(v)), floor);
  }
}

TEST(Potentials, DeconvolutionOfZeroIsZero) {
  const BasisSpec b(12);
  const auto out = deconv_forward(b, ConvolutionKernel::gaussian(20), FieldVector::zero(12), equispaced_points(5));
  for (double x : out)
    EXPECT_EQ(x, 0.0);
}

TEST(Potentials, IdentitySymbolGivesPointEvaluation) {
  const BasisSpec b(15);
  RngStream rng(5, 0);
  const FieldVector u = gaussian_draw(15, rng);
  const auto pts = equispaced_points(7);
  const auto out = deconv_forward(b, ConvolutionKernel::identity(7), u, pts);
  for (std::size_t j = 0; j < pts.size(); ++j)
    EXPECT_NEAR(out[j], evaluate_at(b, u, pts[j]), 1e-13);
}

TEST(Potentials, DeconvolutionMatchesPeriodicQuadrature) {
  const BasisSpec b(16);
  const double decay = 0.5;
  const ConvolutionKernel k = ConvolutionKernel::gaussian(30, decay);
  auto g = [decay](double x) {
    double s = 1.0;
    for (int f = 1; f <= 30; ++f)
      s += std::exp(-decay * f * f) * std::cos(f * x);
    return s;
  };
  RngStream rng(6, 0);
  const FieldVector u = gaussian_draw(16, rng);
  const auto pts = equispaced_points(5);
  const auto out = deconv_forward(b, k, u, pts);
  const int m = 4096;
  for (std::size_t j = 0; j < pts.size(); ++j) {
    double s = 0.0;
    for (int i = 0; i < m; ++i) {
      const double y = kTwoPi * i / m;
      s += g(pts[j] - y) * evaluate_at(b, u, y);
    }
    EXPECT_NEAR(out[j], s * kTwoPi / m, 1e-6);
  }
}

TEST(Potentials, DeconvolutionMisfitValues) {
  const BasisSpec b(10);
  const ConvolutionKernel k = ConvolutionKernel::gaussian(10);
  RngStream rng(7, 0);
  const FieldVector u = gaussian_draw(10, rng);
  ObservationData d;
  d.points = equispaced_points(4);
  d.values = deconv_forward(b, k, u, d.points);
  EXPECT_NEAR(deconv_eval(b, k, d, u), 0.0, 1e-28);
  ObservationData two;
  two.points = {0.5, 1.5};
  two.values = {1.0, 1.0};
  EXPECT_DOUBLE_EQ(deconv_eval(b, k, two, FieldVector::zero(10)), 1.0);
  const Potential pot = make_deconv_potential(b, k, d);
  for (int t = 0; t < 50; ++t) {
    const FieldVector w = gaussian_draw(10, rng, 2.0);
    EXPECT_NEAR(pot(w), deconv_eval(b, k, d, w), 1e-10 * (1 + pot(w)));
  }
  EXPECT_THROW(deconv_eval(b, k, d, FieldVector::zero(3)), InvalidInput);
  EXPECT_THROW(pot(FieldVector::zero(3)), InvalidInput);
}

TEST(Potentials, OperatorNormMatchesSvd) {
  const BasisSpec b(24);
  const Eigen::MatrixXd g = deconv_matrix(b, ConvolutionKernel::gaussian(30, 0.1), equispaced_points(9));
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(g);
  EXPECT_NEAR(operator_norm(g), svd.singularValues()[0], 1e-8 * svd.singularValues()[0]);
}

TEST(Potentials, TailModificationValues) {
  const Potential base = make_constant_potential(0.25);
  const TailModParams t{1.0, 1.0};
  EXPECT_DOUBLE_EQ(tail_modified_eval(base, t, FieldVector::zero(3)), 0.25);
  EXPECT_DOUBLE_EQ(tail_modified_eval(base, t, FieldVector{2.0, 0.0, 0.0}), 3.25);
  EXPECT_DOUBLE_EQ(tail_modified_eval(base, t, FieldVector{0.5, 0.0, 0.0}), 0.25);
  EXPECT_THROW(make_tail_modified(base, TailModParams{0.0, 1.0}), InvalidInput);
}

TEST(Potentials, TailModificationIsContinuous) {
  const Potential pot = make_tail_modified(make_constant_potential(), TailModParams{100.0, 3.0});
  const FieldVector dir{0.6, 0.8};
  double prev = pot(FieldVector::zero(2));
  for (int i = 1; i <= 20000; ++i) {
    const double t = 1.0 * i / 20000;
    const double cur = pot(t * dir);
    ASSERT_LT(std::abs(cur - prev), 0.02);
    prev = cur;
  }
}

TEST(Potentials, ProjectionConvergesToFullPotential) {
  const BasisSpec b(64);
  const Potential full = make_ssl_potential(b, SslPotential{small_data(), 1.0});
  RngStream rng(8, 0);
  std::vector<FieldVector> states;
  for (int t = 0; t < 100; ++t)
    states.push_back(gaussian_draw(64, rng, 2.0));
  auto mean_gap = [&](std::size_t m) {
    const Potential p = make_projected(full, m);
    double s = 0.0;
    for (const auto &u : states)
      s += std::abs(p(u) - full(u));
    return s / static_cast<double>(states.size());
  };
  EXPECT_EQ(mean_gap(64), 0.0);
  EXPECT_EQ(mean_gap(200), 0.0);
  EXPECT_LT(mean_gap(32), mean_gap(2));
  EXPECT_DOUBLE_EQ(make_projected(full, 0)(states[0]), full(FieldVector::zero(64)));
}

TEST(Potentials, GuidanceBound) {
  EXPECT_DOUBLE_EQ(tail_guidance_bound(0.5, 2.0), 2.0 * 0.25 / 0.75 * 4.0);
  EXPECT_THROW(tail_guidance_bound(1.0, 2.0), InvalidInput);
}

TEST(Potentials, Quadratic1d) {
  const Potential q = make_quadratic_1d(1.0, 2.0);
  EXPECT_DOUBLE_EQ(q(FieldVector{3.0}), 4.0);
  EXPECT_THROW(q(FieldVector{1.0, 2.0}), InvalidInput);
}

TEST(Potentials, NonFiniteStateRejected) {
  const Potential c = make_constant_potential();
  EXPECT_THROW(c(FieldVector{std::nan("")}), InvalidInput);
}

TEST(Potentials, ObservationCsvRoundTrip) {
  RngStream rng(9, 0);
  const BasisSpec b(8);
  const FieldVector truth = gaussian_draw(8, rng);
  const ObservationData d = generate_observations(
      [&](const FieldVector &u) {
        std::vector<double> out;
        for (double x : equispaced_points(5))
          out.push_back(std::tanh(evaluate_at(b, u, x)));
        return out;
      },
      truth, equispaced_points(5), 0.1, rng);
  std::stringstream ss;
  write_observations_csv(ss, d);
  const ObservationData back = read_observations_csv(ss, 0.1);
  EXPECT_EQ(back.points, d.points);
  EXPECT_EQ(back.values, d.values);
}

TEST(Potentials, ObservationValidation) {
  ObservationData d = small_data();
  d.sigma = 0.0;
  EXPECT_THROW(validate(d), InvalidInput);
  d = small_data();
  d.points[1] = d.points[0];
  EXPECT_THROW(validate(d), InvalidInput);
  d = small_data();
  d.points[0] = kTwoPi;
  EXPECT_THROW(validate(d), InvalidInput);
  d = small_data();
  d.values.pop_back();
  EXPECT_THROW(validate(d), InvalidInput);
  std::stringstream bad("a,b\n1,2\n");
  EXPECT_THROW(read_observations_csv(bad, 1.0), InvalidInput);
  std::stringstream junk("x,y\n1,abc\n");
  EXPECT_THROW(read_observations_csv(junk, 1.0), InvalidInput);
}
