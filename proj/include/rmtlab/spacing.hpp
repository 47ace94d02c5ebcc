#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "rmtlab/reference.hpp"
#include "rmtlab/resolvent.hpp"
#include "rmtlab/stats.hpp"

namespace rmt {

/// Unfolded nearest-neighbour gaps near E.
struct GapSample {
  double energy = 0.0;
  double window = 0.0;
  int n = 0;
  std::vector<double> gaps;
  std::size_t count() const noexcept { return gaps.size(); }
};

/// Default window t = N^{-0.2}.
double default_gap_window(int n);
/// Appends s_i = N rho_sc(E) (lambda_{i+1} - lambda_i) for consecutive pairs
/// with both points inside [E - t, E + t]. `eigenvalues` ascending.
void append_gaps(GapSample& gaps, const std::vector<double>& eigenvalues);
GapSample unfold_gaps(const std::vector<SpectralData>& samples, double energy, double window = -1.0,
                      double kappa = 0.2);
GapSample make_gap_sample(int n, double energy, double window = -1.0, double kappa = 0.2);

struct GapCdfResult {
  std::vector<double> grid;
  std::vector<double> empirical;
  std::vector<double> reference;
  double ks = 0.0;  ///< exact sup over the sample points
  std::size_t count = 0;
};

/// Empirical CDF on `grid` and the KS distance to `reference_cdf`, whose
/// support [lo, hi] must cover every gap (a CDF equal to 0 below its first
/// grid point and 1 above its last).
GapCdfResult gap_cdf(const std::vector<double>& gaps, const ReferenceCurve& reference_cdf,
                     const std::vector<double>& grid = {});
/// Reference CDF curves: Fredholm (GUE) or Wigner surmise for beta.
ReferenceCurve fredholm_gap_cdf_curve();
ReferenceCurve surmise_cdf_curve(int beta);

struct HistogramRow {
  double center, density;
  std::uint64_t count;
};
std::vector<HistogramRow> histogram(const std::vector<double>& values, double lo, double hi, int bins);

/// MLE exponent of the gap density on [lo, hi] (default 0.05..0.4).
PowerLawFit small_gap_exponent(const std::vector<double>& gaps, double lo = 0.05, double hi = 0.4);

// ---------------------------------------------------------------------------

enum class CorrelationKernel { Hard, Lorentzian };

struct CorrelationConfig {
  int k = 2;
  double energy = 0.0;
  double half_width = 0.1;  ///< b
  double alpha_max = 3.0;   ///< bins cover [-alpha_max, alpha_max] per axis
  double bin_width = 0.1;
  CorrelationKernel kernel = CorrelationKernel::Hard;
  void validate(int n) const;
  int bins_per_axis() const;
};

/// k = 1: axis alpha. k = 2: axis alpha_2 - alpha_1. k = 3: the grid
/// (alpha_2 - alpha_1, alpha_3 - alpha_1), row-major.
struct CorrelationEstimate {
  int k = 0;
  double energy = 0.0;
  double half_width = 0.0;
  std::vector<double> centers;  ///< bin centres along one axis
  std::vector<double> value;
  std::vector<double> standard_error;
  int samples = 0;
};

/// One sample's estimate (same layout as CorrelationEstimate::value).
std::vector<double> correlation_sample(const std::vector<double>& eigenvalues, int n, const CorrelationConfig& config);
CorrelationEstimate correlation_from_samples(const std::vector<std::vector<double>>& per_sample,
                                             const CorrelationConfig& config);
CorrelationEstimate correlation_estimate(const std::vector<SpectralData>& samples, const CorrelationConfig& config);

/// Expected value of the hard-binned k = 2 estimate for GUE of size n, from
/// the exact density rho_2 = N det[K_N(sqrt(N) x_i, sqrt(N) x_j)] integrated
/// over the anchor window and each bin by Gauss-Legendre quadrature.
std::vector<double> expected_correlation_gue(int n, const CorrelationConfig& config);
/// Bin averages of 1 - sinc^2 on the k = 2 bin grid.
std::vector<double> sine_correlation_bins(const CorrelationConfig& config);

// ---------------------------------------------------------------------------

struct EdgeResult {
  int n = 0;
  std::vector<double> top;     ///< N^{2/3} (lambda_N - 2)
  std::vector<double> bottom;  ///< N^{2/3} (-lambda_1 - 2)
  double ks_top = 0.0;         ///< to F_2
  double ks_bottom = 0.0;
  double ks_mirror = 0.0;      ///< two-sample KS between top and bottom
  double tail_above_3 = 0.0;   ///< fraction of top values > 3
};

EdgeResult edge_statistics(const std::vector<double>& largest, const std::vector<double>& smallest, int n);
EdgeResult edge_statistics(const std::vector<SpectralData>& samples);

}  // namespace rmt
