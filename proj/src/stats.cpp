#include "stats.hpp"

#include "rng.hpp"

#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rcar {

MeanSe mean_and_se(std::span<const double> xs) {
  MeanSe r;
  r.n = xs.size();
  if (xs.empty())
    return r;
  // Welford
  double mean = 0.0, m2 = 0.0;
  std::size_t k = 0;
  for (double x : xs) {
    ++k;
    const double d = x - mean;
    mean += d / static_cast<double>(k);
    m2 += d * (x - mean);
  }
  r.mean = mean;
  if (xs.size() > 1) {
    r.var = m2 / static_cast<double>(xs.size() - 1);
    r.se = std::sqrt(r.var / static_cast<double>(xs.size()));
  }
  return r;
}

double kolmogorov_survival(double lambda) {
  if (lambda <= 0.0)
    return 1.0;
  if (lambda < 1.18) {
    // Theta-function form converges fast for small lambda.
    const double t = std::numbers::pi * std::numbers::pi / (8.0 * lambda * lambda);
    double sum = 0.0;
    for (int k = 1; k <= 50; k += 2)
      sum += std::exp(-static_cast<double>(k * k) * t);
    return std::clamp(1.0 - std::sqrt(2.0 * std::numbers::pi) / lambda * sum, 0.0, 1.0);
  }
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-300)
      break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

namespace {

double ks_p_value(double d, double n_eff) {
  const double sn = std::sqrt(n_eff);
  return kolmogorov_survival((sn + 0.12 + 0.11 / sn) * d);
}

} // namespace

KsResult ks_one_sample(std::span<const double> samples, const std::function<double(double)> &cdf) {
  if (samples.empty())
    throw std::invalid_argument("ks_one_sample: no samples");
  std::vector<double> xs(samples.begin(), samples.end());
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return {d, ks_p_value(d, n)};
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("ks_two_sample: empty sample");
  std::vector<double> xa(a.begin(), a.end()), xb(b.begin(), b.end());
  std::sort(xa.begin(), xa.end());
  std::sort(xb.begin(), xb.end());
  const double na = static_cast<double>(xa.size()), nb = static_cast<double>(xb.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < xa.size() && j < xb.size()) {
    const double x = std::min(xa[i], xb[j]);
    while (i < xa.size() && xa[i] == x)
      ++i;
    while (j < xb.size() && xb[j] == x)
      ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return {d, ks_p_value(d, na * nb / (na + nb))};
}

double gamma_cdf(double shape, double x) {
  if (x <= 0.0)
    return 0.0;
  return boost::math::gamma_p(shape, x);
}

double normal_cdf(double x, double sd) { return boost::math::cdf(boost::math::normal(0.0, sd), x); }

double quantile(std::vector<double> xs, double q) {
  if (xs.empty())
    throw std::invalid_argument("quantile of empty set");
  std::sort(xs.begin(), xs.end());
  const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(xs.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, xs.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return xs[lo] + frac * (xs[hi] - xs[lo]);
}

LineFit fit_line(std::span<const double> x, std::span<const double> y, std::span<const double> w) {
  if (x.size() != y.size() || x.size() < 2 || (!w.empty() && w.size() != x.size()))
    throw std::invalid_argument("fit_line: need at least two matching points");
  double sw = 0, sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double wi = w.empty() ? 1.0 : w[i];
    sw += wi;
    sx += wi * x[i];
    sy += wi * y[i];
  }
  const double mx = sx / sw, my = sy / sw;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double wi = w.empty() ? 1.0 : w[i];
    sxx += wi * (x[i] - mx) * (x[i] - mx);
    sxy += wi * (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0)
    throw std::invalid_argument("fit_line: degenerate abscissae");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  return f;
}

double integrate(const std::function<double(double)> &f, double a, double b, double tol) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, tol);
}

std::vector<std::vector<double>> bootstrap(std::size_t n_items, std::size_t n_boot, std::uint64_t seed,
                                           const std::function<std::vector<double>(std::span<const std::size_t>)> &stat) {
  if (n_items == 0)
    throw std::invalid_argument("bootstrap: nothing to resample");
  RngStream rng(seed, 0xB007);
  std::vector<std::vector<double>> out;
  out.reserve(n_boot);
  std::vector<std::size_t> idx(n_items);
  for (std::size_t b = 0; b < n_boot; ++b) {
    for (auto &i : idx)
      i = static_cast<std::size_t>(rng.uniform() * static_cast<double>(n_items));
    out.push_back(stat(idx));
  }
  return out;
}

TrendCheck no_significant_increase(const std::vector<std::vector<double>> &replicates, double confidence) {
  TrendCheck tc;
  if (replicates.empty())
    return tc;
  const std::size_t k = replicates.front().size();
  for (std::size_t i = 0; i + 1 < k; ++i) {
    std::vector<double> diffs;
    diffs.reserve(replicates.size());
    for (const auto &r : replicates)
      diffs.push_back(r[i + 1] - r[i]);
    const double lower = quantile(std::move(diffs), 1.0 - confidence);
    tc.increase_lower.push_back(lower);
    if (lower > 0.0)
      tc.ok = false;
  }
  return tc;
}

} // namespace rcar
