#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace rmt {

/// Neumaier compensated sum.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    comp_ += std::abs(sum_) >= std::abs(x) ? (sum_ - t) + x : (x - t) + sum_;
    sum_ = t;
  }
  CompensatedSum& operator+=(double x) noexcept {
    add(x);
    return *this;
  }
  void merge(const CompensatedSum& o) noexcept {
    add(o.sum_);
    add(o.comp_);
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Running mean / variance over a stream, compensated.
struct MeanAccumulator {
  std::size_t count = 0;
  CompensatedSum sum;
  CompensatedSum sum_sq;

  void add(double x) {
    ++count;
    sum.add(x);
    sum_sq.add(x * x);
  }
  void merge(const MeanAccumulator& o) {
    count += o.count;
    sum.merge(o.sum);
    sum_sq.merge(o.sum_sq);
  }
  double mean() const { return count ? sum.value() / static_cast<double>(count) : 0.0; }
  /// Unbiased sample variance.
  double variance() const;
  double stderr_of_mean() const;
};

double mean_of(const std::vector<double>& xs);
/// Standard error of the mean.
double stderr_of(const std::vector<double>& xs);
double quantile(std::vector<double> xs, double q);

/// sup |F_emp - F| over the sample (both one-sided limits).
double ks_distance(std::vector<double> sample, const std::function<double(double)>& cdf);
double ks_two_sample(std::vector<double> a, std::vector<double> b);
/// Asymptotic Kolmogorov p-value for distance d with effective size n.
double ks_pvalue(double d, double n_effective);

struct LinearFit {
  double intercept = 0.0;
  double slope = 0.0;
  double slope_stderr = 0.0;
  double intercept_stderr = 0.0;
  double r2 = 0.0;
  std::size_t points = 0;
};

/// Ordinary least squares y = a + b x. Needs at least 3 points.
LinearFit ols_fit(const std::vector<double>& x, const std::vector<double>& y);

struct ProportionInterval {
  double estimate = 0.0;
  double lower = 0.0;
  double upper = 1.0;
};

/// Exact (Clopper-Pearson) two-sided interval for k successes in n trials.
ProportionInterval clopper_pearson(std::uint64_t k, std::uint64_t n, double confidence = 0.95);

struct PowerLawFit {
  double exponent = 0.0;
  double standard_error = 0.0;
  std::size_t count = 0;
};

/// Maximum-likelihood exponent a of a density proportional to s^a on
/// [lo, hi], fitted to the sample values falling in that window.
PowerLawFit truncated_power_law_mle(const std::vector<double>& sample, double lo, double hi);

/// Two-sided sign test p-value for `positive` successes out of `n`.
double sign_test_pvalue(std::uint64_t positive, std::uint64_t n);

}  // namespace rmt
