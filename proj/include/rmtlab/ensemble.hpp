#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <utility>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rmtlab/keyvalue.hpp"
#include "rmtlab/rng.hpp"

namespace rmt {

enum class Symmetry { Symmetric = 1, Hermitian = 2 };

constexpr int beta_of(Symmetry s) noexcept { return static_cast<int>(s); }
Symmetry symmetry_from_beta(int beta);
std::string to_string(Symmetry s);
Symmetry parse_symmetry(const std::string& name);

/// Law of a standardized (mean 0, variance 1) real variable. Entries are
/// `sigma_ij * X`; for the hermitian class the real and imaginary parts are
/// independent copies of X scaled by 1/sqrt(2).
class EntryDistribution {
 public:
  enum class Kind { Gaussian, Bernoulli, Discrete, GaussianConvolved };

  static EntryDistribution gaussian();
  static EntryDistribution bernoulli();
  /// Finitely supported law; probabilities must be nonnegative, sum to 1,
  /// and the law must be standardized (both within 1e-12).
  static EntryDistribution discrete(std::vector<double> points, std::vector<double> probs);
  /// sqrt(1 - gamma) * base + sqrt(gamma) * G with G standard Gaussian.
  static EntryDistribution gaussian_convolved(EntryDistribution base, double gamma);

  Kind kind() const noexcept { return kind_; }
  const std::vector<double>& points() const noexcept { return points_; }
  const std::vector<double>& probabilities() const noexcept { return probs_; }
  double gamma() const noexcept { return gamma_; }
  const EntryDistribution& base() const;
  /// (m3, m4) handed to match_four_moments when the law came from it.
  const std::optional<std::pair<double, double>>& matched_targets() const noexcept { return targets_; }

  /// Analytic moments E X^k, k = 0..4.
  std::array<double, 5> moments() const;
  double moment(int k) const { return moments().at(static_cast<std::size_t>(k)); }

  /// Deterministic draw addressed by (a, b, lane) of a counter-based generator.
  double sample(const CounterRng& rng, std::uint64_t a, std::uint64_t b, std::uint64_t lane) const;

  std::string describe() const;

 private:
  Kind kind_ = Kind::Gaussian;
  std::vector<double> points_;
  std::vector<double> probs_;
  std::vector<double> cdf_;
  double gamma_ = 0.0;
  std::shared_ptr<const EntryDistribution> base_;
  std::optional<std::pair<double, double>> targets_;

  friend EntryDistribution match_four_moments(double m3, double m4, double gamma);
};

/// Band profile function sampled on a uniform grid over [x_min, x_max],
/// linearly interpolated and zero outside.
struct BandFunction {
  double x_min = -0.5;
  double x_max = 0.5;
  std::vector<double> values{1.0, 1.0};

  static BandFunction indicator() { return {}; }
  double operator()(double x) const;
  double integral() const;
};

/// Matrix of variances sigma_ij^2. Symmetric, nonnegative, every row sums to 1.
class VarianceProfile {
 public:
  enum class Kind { Flat, Band, Explicit };

  static VarianceProfile flat(int n);
  /// Band entries sit within periodic distance `width` of the diagonal:
  /// sigma_ij^2 is proportional to f([i-j]_N / (2 width)), each row then
  /// renormalized to sum exactly to 1.
  static VarianceProfile band(int n, double width, const BandFunction& f = BandFunction::indicator());
  /// Caller-provided matrix; validated, not renormalized.
  static VarianceProfile explicit_matrix(const Eigen::MatrixXd& sigma2);

  Kind kind() const noexcept { return kind_; }
  int size() const noexcept { return n_; }
  double band_width() const noexcept { return width_; }
  double variance(int i, int j) const {
    return kind_ == Kind::Flat ? 1.0 / n_ : sigma2_(i, j);
  }
  /// M = 1 / max sigma_ij^2.
  double spread() const noexcept { return spread_; }
  Eigen::MatrixXd matrix() const;

 private:
  Kind kind_ = Kind::Flat;
  int n_ = 0;
  double width_ = 0.0;
  double spread_ = 0.0;
  Eigen::MatrixXd sigma2_;
};

/// Full recipe for a Wigner-type ensemble.
struct EnsembleSpec {
  int n = 0;
  Symmetry symmetry = Symmetry::Hermitian;
  EntryDistribution dist = EntryDistribution::gaussian();
  EntryDistribution diagonal_dist = EntryDistribution::gaussian();
  VarianceProfile profile;
  /// Diagonal variance is diagonal_scale * sigma_ii^2. The invariant GOE
  /// has diagonal_scale = 2; everything else defaults to 1.
  double diagonal_scale = 1.0;

  void validate() const;
  std::string describe() const;
  /// Stable 64-bit fingerprint of the recipe (used in output rows).
  std::uint64_t hash() const;
};

EnsembleSpec make_gue(int n);
EnsembleSpec make_goe(int n);
EnsembleSpec make_wigner(int n, Symmetry symmetry, const EntryDistribution& dist);

/// One dense draw. Exactly one of `real` / `complex` is populated.
struct MatrixSample {
  Symmetry symmetry = Symmetry::Hermitian;
  std::uint64_t seed = 0;
  Eigen::MatrixXd real;
  Eigen::MatrixXcd complex;
  std::shared_ptr<const EnsembleSpec> spec;

  int size() const noexcept {
    return static_cast<int>(symmetry == Symmetry::Hermitian ? complex.rows() : real.rows());
  }
  bool is_complex() const noexcept { return symmetry == Symmetry::Hermitian; }
  Eigen::MatrixXcd as_complex() const;
  std::complex<double> operator()(int i, int j) const {
    return is_complex() ? complex(i, j) : std::complex<double>(real(i, j), 0.0);
  }
  /// max |H_ij - conj(H_ji)|
  double hermiticity_defect() const;
};

EnsembleSpec make_spec_from_config(const KeyValues& kv);
KeyValues spec_to_config(const EnsembleSpec& spec, std::uint64_t seed);

VarianceProfile build_variance_profile(const std::string& kind, int n, double band_width = 0.0,
                                       const BandFunction& f = BandFunction::indicator());

MatrixSample sample_matrix(const EnsembleSpec& spec, std::uint64_t seed);

/// H = X^* X with X an M x N matrix of i.i.d. entries of variance 1/M.
MatrixSample sample_covariance_matrix(int m, int n, const EntryDistribution& dist, std::uint64_t seed,
                                      Symmetry symmetry = Symmetry::Symmetric);

/// Three-point law with moments (0, 1, m3_xi, m4_xi) convolved with a
/// Gaussian of weight gamma so that the result has third moment m3 and
/// fourth moment within O(gamma) of m4. Requires m4 - m3^2 - 1 >= 0,
/// m4 <= 100 and 0 <= gamma < largest_matching_gamma(m3, m4).
EntryDistribution match_four_moments(double m3, double m4, double gamma);
double largest_matching_gamma(double m3, double m4);
inline constexpr double kMatchingFourthMomentCap = 100.0;

/// e^{-t/2} base + (1 - e^{-t})^{1/2} V with V an independent GOE/GUE.
/// t = +infinity returns V itself.
MatrixSample gaussian_convolve_matrix(const MatrixSample& base, double t, std::uint64_t seed);

/// Invariant Gaussian ensemble (GOE with diagonal variance 2/N, or GUE) of the given size.
MatrixSample sample_gaussian_invariant(int n, Symmetry symmetry, std::uint64_t seed, std::uint64_t stream = 0);

/// Binary dump: "RMTM" magic, u32 version, u64 rows, u64 cols, u8 beta,
/// then row-major doubles (complex entries as re, im).
void write_matrix_binary(std::ostream& out, const MatrixSample& sample);
MatrixSample read_matrix_binary(std::istream& in);

}  // namespace rmt
