#include "rmtlab/stats.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/binomial.hpp>

#include "rmtlab/errors.hpp"

namespace rmt {

double MeanAccumulator::variance() const {
  if (count < 2) return 0.0;
  const double n = static_cast<double>(count);
  const double m = sum.value() / n;
  return std::max(0.0, (sum_sq.value() - n * m * m) / (n - 1.0));
}

double MeanAccumulator::stderr_of_mean() const {
  return count < 2 ? 0.0 : std::sqrt(variance() / static_cast<double>(count));
}

double mean_of(const std::vector<double>& xs) {
  CompensatedSum s;
  for (double x : xs) s.add(x);
  return xs.empty() ? 0.0 : s.value() / static_cast<double>(xs.size());
}

double stderr_of(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean_of(xs);
  CompensatedSum s;
  for (double x : xs) s.add((x - m) * (x - m));
  const double n = static_cast<double>(xs.size());
  return std::sqrt(s.value() / (n - 1.0) / n);
}

double quantile(std::vector<double> xs, double q) {
  require(!xs.empty(), "quantile: empty sample");
  require(q >= 0.0 && q <= 1.0, "quantile: q outside [0, 1]");
  std::sort(xs.begin(), xs.end());
  const double pos = q * static_cast<double>(xs.size() - 1);
  const auto i = static_cast<std::size_t>(std::floor(pos));
  if (i + 1 >= xs.size()) return xs.back();
  const double t = pos - static_cast<double>(i);
  return (1.0 - t) * xs[i] + t * xs[i + 1];
}

double ks_distance(std::vector<double> sample, const std::function<double(double)>& cdf) {
  require(!sample.empty(), "KS distance: empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  require(!a.empty() && !b.empty(), "KS two-sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

double ks_pvalue(double d, double n_effective) {
  const double l = (std::sqrt(n_effective) + 0.12 + 0.11 / std::sqrt(n_effective)) * d;
  if (l < 1e-3) return 1.0;
  double p = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = 2.0 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * l * l);
    p += term;
    if (std::abs(term) < 1e-16) break;
  }
  return std::clamp(p, 0.0, 1.0);
}

LinearFit ols_fit(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size(), "OLS: size mismatch");
  require(x.size() >= 3, "OLS: need at least 3 points");
  const double n = static_cast<double>(x.size());
  const double mx = mean_of(x), my = mean_of(y);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  require(sxx > 0.0, "OLS: degenerate abscissae");
  LinearFit f;
  f.points = x.size();
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - f.intercept - f.slope * x[i];
    rss += r * r;
  }
  const double s2 = rss / (n - 2.0);
  f.slope_stderr = std::sqrt(s2 / sxx);
  f.intercept_stderr = std::sqrt(s2 * (1.0 / n + mx * mx / sxx));
  f.r2 = syy > 0.0 ? 1.0 - rss / syy : 1.0;
  return f;
}

ProportionInterval clopper_pearson(std::uint64_t k, std::uint64_t n, double confidence) {
  require(n >= 1, "Clopper-Pearson: n must be positive");
  require(k <= n, "Clopper-Pearson: k exceeds n");
  require(confidence > 0.0 && confidence < 1.0, "Clopper-Pearson: confidence outside (0, 1)");
  const double alpha = 1.0 - confidence;
  const double kd = static_cast<double>(k), nd = static_cast<double>(n);
  ProportionInterval out;
  out.estimate = kd / nd;
  out.lower = k == 0 ? 0.0 : boost::math::quantile(boost::math::beta_distribution<>(kd, nd - kd + 1.0), alpha / 2.0);
  out.upper =
      k == n ? 1.0 : boost::math::quantile(boost::math::beta_distribution<>(kd + 1.0, nd - kd), 1.0 - alpha / 2.0);
  return out;
}

PowerLawFit truncated_power_law_mle(const std::vector<double>& sample, double lo, double hi) {
  require(lo > 0.0 && hi > lo, "power-law fit: need 0 < lo < hi");
  std::vector<double> logs;
  for (double s : sample)
    if (s >= lo && s <= hi) logs.push_back(std::log(s));
  require(logs.size() >= 10, "power-law fit: fewer than 10 points in the window");
  const double mean_log = mean_of(logs);
  const double llo = std::log(lo), lhi = std::log(hi);
  // Mean of log s under density (a+1) s^a / (hi^{a+1} - lo^{a+1}) on [lo, hi]:
  // strictly increasing in a, so the score equation has one root.
  auto expected_log = [&](double a) {
    const double b = a + 1.0;
    if (std::abs(b) < 1e-10) return 0.5 * (llo + lhi);
    const double elo = std::exp(b * llo), ehi = std::exp(b * lhi);
    return (lhi * ehi - llo * elo) / (ehi - elo) - 1.0 / b;
  };
  auto variance_log = [&](double a) {
    const double b = a + 1.0;
    const double d = lhi - llo;
    if (std::abs(b) < 1e-10) return d * d / 12.0;
    // Var of log s = 1/b^2 - d^2 e^{b d} / (e^{b d} - 1)^2
    const double e = std::exp(b * d);
    return 1.0 / (b * b) - d * d * e / ((e - 1.0) * (e - 1.0));
  };
  double a_lo = -20.0, a_hi = 40.0;
  require(mean_log > expected_log(a_lo) && mean_log < expected_log(a_hi), "power-law fit: exponent out of range");
  for (int it = 0; it < 200 && a_hi - a_lo > 1e-12; ++it) {
    const double mid = 0.5 * (a_lo + a_hi);
    (expected_log(mid) < mean_log ? a_lo : a_hi) = mid;
  }
  PowerLawFit f;
  f.exponent = 0.5 * (a_lo + a_hi);
  f.count = logs.size();
  f.standard_error = 1.0 / std::sqrt(static_cast<double>(logs.size()) * variance_log(f.exponent));
  return f;
}

double sign_test_pvalue(std::uint64_t positive, std::uint64_t n) {
  require(n >= 1 && positive <= n, "sign test: invalid counts");
  const boost::math::binomial_distribution<> bin(static_cast<double>(n), 0.5);
  const double k = static_cast<double>(positive);
  const double lower = boost::math::cdf(bin, k);
  const double upper = k >= 1.0 ? boost::math::cdf(boost::math::complement(bin, k - 1.0)) : 1.0;
  return std::min(1.0, 2.0 * std::min(lower, upper));
}

}  // namespace rmt
