#pragma once

#include <cstdint>
#include <vector>

#include "rmtlab/ensemble.hpp"
#include "rmtlab/resolvent.hpp"
#include "rmtlab/stats.hpp"

namespace rmt {

/// Geometric grid of `points` values from lo to hi inclusive.
std::vector<double> geometric_grid(double lo, double hi, int points);

// ---------------------------------------------------------------------------
// Local semicircle law scan

struct LscScanConfig {
  EnsembleSpec spec;
  std::vector<double> energies{0.0};
  std::vector<double> etas;  ///< ascending, all > 0
  double kappa = 0.2;
  int samples = 20;
  std::uint64_t seed = 1;
  int workers = 1;
  /// Only energies with |E| <= 2 - kappa enter the slope fits.
  void validate() const;
};

struct LscCell {
  double energy = 0.0;
  double eta = 0.0;
  MeanAccumulator lambda, lambda_d, lambda_o;
  double max_lambda = 0.0, max_lambda_d = 0.0, max_lambda_o = 0.0;
  double envelope = 0.0;          ///< 1 / (N eta)
  double offdiag_envelope = 0.0;  ///< sqrt(Im m_sc / (N eta)) + 1 / (N eta)
};

struct LscScanResult {
  int n = 0;
  int samples = 0;
  std::vector<LscCell> cells;  ///< energy-major, eta-minor
  /// log(mean Lambda) and log(mean Lambda_o) against log(N eta), bulk cells.
  LinearFit lambda_fit;
  LinearFit lambda_o_fit;
};

/// Adds one sample's summaries (one per cell, same order as `result.cells`).
void accumulate_lsc(LscScanResult& result, const std::vector<ResolventSummary>& per_cell);
/// Per-sample resolvent summaries over the config grid.
std::vector<ResolventSummary> lsc_sample(const LscScanConfig& config, const SpectralData& spec);
LscScanResult lsc_scan(const LscScanConfig& config);
/// Fits the two slopes from the accumulated cells.
void fit_lsc_slopes(LscScanResult& result, double kappa);

// ---------------------------------------------------------------------------
// Rigidity and counting

struct RigidityResult {
  int n = 0;
  int samples = 0;
  std::vector<double> mean_deviation;  ///< mean |lambda_j - gamma_j|
  std::vector<double> median_deviation;
  std::vector<double> q90_deviation;
  std::vector<double> envelope;        ///< min(j, N-j+1)^{-1/3} N^{-2/3}
  double q_estimate = 0.0;             ///< mean over samples of sum_j (lambda_j - gamma_j)^2
  /// Fraction of (sample, bulk index) pairs with |lambda_j - gamma_j| <= threshold.
  double bulk_fraction_within = 0.0;
  double bulk_threshold = 0.0;
};

/// Bulk indices are 0.1 N <= j <= 0.9 N (1-based). Default threshold 5 log N / N.
RigidityResult rigidity(const std::vector<SpectralData>& samples, double threshold = -1.0);

/// Normalized counting function: fraction of eigenvalues <= e.
double empirical_counting(const SpectralData& spec, double e);
/// Number of eigenvalues in [a, b].
int count_in(const std::vector<double>& sorted, double a, double b);

struct CountingResult {
  std::vector<double> sup_deviation;  ///< per sample sup_E |n(E) - n_sc(E)|
  std::vector<double> scaled;         ///< N * sup_deviation
  double median_scaled = 0.0;
};

/// The sup runs over the grid plus both one-sided limits at every
/// eigenvalue inside the grid range, so it is exact for step functions.
CountingResult counting_compare(const std::vector<SpectralData>& samples, const std::vector<double>& energies);

// ---------------------------------------------------------------------------
// Delocalization

struct DelocResult {
  std::vector<double> p_values;
  /// per sample, per bulk vector: N^{1/2 - 1/p} ||v||_p for each p
  std::vector<std::vector<std::vector<double>>> scaled_norms;
  /// per sample, per bulk vector: sqrt(N) ||v||_inf
  std::vector<std::vector<double>> scaled_sup;
  std::vector<double> max_scaled_norm;  ///< per p, over everything
  double max_scaled_sup = 0.0;
  double min_scaled_norm = 0.0;         ///< smallest over all p and vectors (>= 1)
  int bulk_vectors = 0;
};

DelocResult delocalization(const std::vector<SpectralData>& samples, const std::vector<double>& p_values,
                           double kappa = 0.2);
/// N^{1/2 - 1/p} ||v||_p of a single vector (p = infinity allowed).
double scaled_lp_norm(const std::vector<double>& abs_entries, double p);

// ---------------------------------------------------------------------------
// Level repulsion

struct RepulsionPoint {
  double epsilon = 0.0;
  std::uint64_t trials = 0;      ///< sample x window pairs
  std::uint64_t at_least_n = 0;  ///< N_I >= n
  std::uint64_t at_least_one = 0;
  ProportionInterval p_n;
  ProportionInterval p_one;
};

struct RepulsionResult {
  int n = 2;
  int beta = 2;
  double target_exponent = 0.0;  ///< n^2 or n(n+1)/2
  std::vector<RepulsionPoint> points;
  LinearFit fit;               ///< log P(N_I >= n) against log epsilon
  double wegner_ratio_max = 0.0;  ///< max over eps of P(N_I >= 1) / eps
  double wegner_ratio_min = 0.0;
  bool fitted = false;            ///< false when some epsilon has no events
};

struct RepulsionConfig {
  int matrix_size = 0;
  int beta = 2;
  int n = 2;
  double energy = 0.0;
  std::vector<double> epsilons;
  /// Disjoint windows of width eps/N tile [E - half_width, E + half_width];
  /// half_width = 0 uses the single window centred at E.
  double half_width = 0.0;
};

/// Accumulates window counts from one sample's eigenvalues (ascending; must
/// contain every eigenvalue inside the scanned range).
void accumulate_repulsion(RepulsionResult& result, const RepulsionConfig& config,
                          const std::vector<double>& eigenvalues);
RepulsionResult make_repulsion_result(const RepulsionConfig& config);
void finish_repulsion(RepulsionResult& result);
RepulsionResult level_repulsion(const std::vector<SpectralData>& samples, const RepulsionConfig& config);

// ---------------------------------------------------------------------------
// Overlaps

struct OverlapResult {
  std::vector<double> xi;  ///< pooled xi_alpha over samples
  double mean = 0.0;
  double variance = 0.0;
  /// KS distance to Exp(1) (hermitian) or chi^2_1 (symmetric).
  double ks_to_gaussian_law = 0.0;
};

/// xi_alpha = N |a . u_alpha|^2 for the column `k` with its diagonal entry
/// removed and the eigenvectors u_alpha of the minor H^(k).
std::vector<double> overlap_variables(const MatrixSample& sample, int k = 0);
OverlapResult overlap_stats(const std::vector<MatrixSample>& samples, int k = 0);

// ---------------------------------------------------------------------------
// Large deviation bounds

struct LdpForm {
  std::uint64_t exceed = 0;
  std::uint64_t trials = 0;
  double max_ratio = 0.0;  ///< largest |statistic| / threshold seen
  ProportionInterval frequency;
};

struct LdpReport {
  int n = 0;
  double alpha = 1.0;
  LdpForm linear, diagonal, offdiagonal;
};

struct LdpConfig {
  int n = 10000;
  std::uint64_t trials = 10000;
  double alpha = 1.0;
  int offdiag_band = 8;  ///< frozen B_ij supported on 0 < |i - j| <= band
  std::uint64_t seed = 7;
  int workers = 1;
};

/// Draws A_i and B_ij once from `seed`, then the a_i per trial from `dist`.
LdpReport ldp_check(const EntryDistribution& dist, const LdpConfig& config);

}  // namespace rmt
