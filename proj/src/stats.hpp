#pragma once

// Statistical helpers shared by the samplers' tests and the experiments.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace rcar {

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;  // standard error of the mean
  double var = 0.0; // unbiased sample variance
  std::size_t n = 0;
};

MeanSe mean_and_se(std::span<const double> xs);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// P(K > lambda) for the Kolmogorov distribution.
double kolmogorov_survival(double lambda);

/// One-sample test against a continuous CDF. Sorts a copy of the samples.
KsResult ks_one_sample(std::span<const double> samples, const std::function<double(double)> &cdf);
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

double gamma_cdf(double shape, double x);
double normal_cdf(double x, double sd = 1.0);

/// Linear interpolation quantile, q in [0, 1].
double quantile(std::vector<double> xs, double q);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

/// Weighted least squares y ~ intercept + slope x. Empty weights means unweighted.
LineFit fit_line(std::span<const double> x, std::span<const double> y, std::span<const double> w = {});

/// Adaptive Gauss-Kronrod integral of f over [a, b].
double integrate(const std::function<double(double)> &f, double a, double b, double tol = 1e-12);

/// Runs n_boot bootstrap replicates over n_items resampled indices. stat
/// receives the resampled index list and returns a vector of statistics; the
/// result holds one such vector per replicate.
std::vector<std::vector<double>> bootstrap(std::size_t n_items, std::size_t n_boot, std::uint64_t seed,
                                           const std::function<std::vector<double>(std::span<const std::size_t>)> &stat);

/// Ordered sweep check: for each consecutive pair (i, i+1) of the statistics
/// produced by `bootstrap`, the increase stat[i+1] - stat[i] is significant when
/// its lower (1 - confidence) bootstrap quantile is above zero.
struct TrendCheck {
  bool ok = true;
  std::vector<double> increase_lower; // one per consecutive pair
};
TrendCheck no_significant_increase(const std::vector<std::vector<double>> &replicates, double confidence);

} // namespace rcar
