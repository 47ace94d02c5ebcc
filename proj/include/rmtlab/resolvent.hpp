#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rmtlab/ensemble.hpp"

namespace rmt {

using cplx = std::complex<double>;

/// Ascending eigenvalues of one sample, optionally with orthonormal
/// eigenvectors stored column-wise (real or complex to match the sample).
struct SpectralData {
  std::vector<double> eigenvalues;
  Eigen::MatrixXd real_vectors;
  Eigen::MatrixXcd complex_vectors;
  std::uint64_t seed = 0;

  int size() const noexcept { return static_cast<int>(eigenvalues.size()); }
  bool has_vectors() const noexcept { return real_vectors.size() > 0 || complex_vectors.size() > 0; }
  bool complex_valued() const noexcept { return complex_vectors.size() > 0; }
  /// |v_k(i)|^2
  double weight(int i, int k) const {
    return complex_valued() ? std::norm(complex_vectors(i, k)) : real_vectors(i, k) * real_vectors(i, k);
  }

  static SpectralData from_eigenvalues(std::vector<double> values, std::uint64_t seed = 0);
};

/// z = E + i eta with eta > 0.
struct SpectralPoint {
  double energy = 0.0;
  double eta = 1.0;
  cplx z() const { return {energy, eta}; }
};

struct ResolventSummary {
  cplx m;           ///< (1/N) Tr G
  double lambda;    ///< |m - m_sc|
  double lambda_d;  ///< max_k |G_kk - m_sc|
  double lambda_o;  ///< max_{k != l} |G_kl|
};

SpectralData eigendecompose(const MatrixSample& sample, bool with_vectors);

cplx stieltjes_empirical(const SpectralData& spec, cplx z);
/// Stieltjes transform of the semicircle law on the branch with
/// sqrt(z^2 - 4) ~ z at infinity. Also valid on the real axis off [-2, 2].
cplx stieltjes_semicircle(cplx z);
double density_semicircle(double e);
double density_mp(double e, double d);
double counting_semicircle(double e);
/// gamma_j with N n_sc(gamma_j) = j, j = 1..N.
std::vector<double> classical_locations(int n);

Eigen::MatrixXcd resolvent_matrix(const MatrixSample& sample, cplx z);
/// G(z) from a spectral decomposition; requires eigenvectors.
Eigen::MatrixXcd resolvent_matrix(const SpectralData& spec, cplx z);
ResolventSummary summarize_resolvent(const Eigen::MatrixXcd& g, cplx z);
ResolventSummary resolvent_summary(const MatrixSample& sample, cplx z);
ResolventSummary resolvent_summary(const SpectralData& spec, cplx z);

struct IdentityFailure {
  std::string identity;
  int i = -1, j = -1, k = -1;
  double error = 0.0;
};

struct IdentityReport {
  bool passed = true;
  double max_schur = 0.0;        ///< one-row Schur formula for G_ii
  double max_diag_removal = 0.0; ///< G_ii = G_ii^(j) + G_ij G_ji / G_jj
  double max_offdiag_removal = 0.0;
  double max_ward = 0.0;         ///< sum_l |G_kl|^2 = Im G_kk / eta
  double max_interlacing_violation = 0.0;
  std::vector<IdentityFailure> failures;
};

/// Default identity tolerance: 1e-9 up to N = 64, then N * eps * ||H|| scaled.
double default_identity_tolerance(int n, double norm);

/// Checks the resolvent identities and eigenvalue interlacing for every
/// minor against a brute-force dense inversion. Errors are measured
/// relative to max(1, |lhs|).
IdentityReport verify_resolvent_identities(const MatrixSample& sample, cplx z, double tol);

struct GridRow {
  double energy, eta;
  cplx m, msc;
  double lambda, lambda_d, lambda_o;
};
void write_resolvent_grid_csv(std::ostream& out, const std::vector<GridRow>& rows);

// ---------------------------------------------------------------------------
// Tridiagonal route for the invariant Gaussian ensembles.

/// Symmetric tridiagonal matrix whose eigenvalues have exactly the GOE
/// (beta = 1) or GUE (beta = 2) joint law in this library's normalization.
struct Tridiagonal {
  std::vector<double> diag;
  std::vector<double> off;  ///< length n - 1
  int size() const noexcept { return static_cast<int>(diag.size()); }
};

Tridiagonal sample_gaussian_tridiagonal(int n, Symmetry symmetry, std::uint64_t seed);
/// Number of eigenvalues strictly below x (Sturm sequence).
int sturm_count(const Tridiagonal& t, double x);
/// Eigenvalues inside [lo, hi] by bisection, ascending, to absolute accuracy tol.
std::vector<double> tridiagonal_eigenvalues_in(const Tridiagonal& t, double lo, double hi, double tol = 1e-13);
double tridiagonal_largest_eigenvalue(const Tridiagonal& t, double tol = 1e-13);
double tridiagonal_smallest_eigenvalue(const Tridiagonal& t, double tol = 1e-13);
std::vector<double> tridiagonal_eigenvalues(const Tridiagonal& t);

}  // namespace rmt
