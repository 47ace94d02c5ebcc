#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace rmt {

/// Analytic curve sampled on an ascending grid.
struct ReferenceCurve {
  std::string kind;
  std::vector<double> grid;
  std::vector<double> values;
  std::map<std::string, std::string> metadata;

  std::size_t size() const noexcept { return grid.size(); }
  /// Linear interpolation; clamps to the end values outside the grid.
  double interpolate(double x) const;
  /// Grid ascending, sizes match, values finite.
  void validate() const;

  void write_csv(std::ostream& out) const;
  static ReferenceCurve read_csv(std::istream& in);
};

/// Uniform grid of n points on [a, b].
std::vector<double> linear_grid(double a, double b, int n);
std::uint64_t grid_hash(const std::vector<double>& grid);

/// Looks the curve up in the directory named by RMTLAB_CACHE (keyed by kind,
/// grid hash and quadrature order) and computes + stores it on a miss. With
/// the variable unset this just calls `compute`.
ReferenceCurve cached_curve(const std::string& kind, const std::vector<double>& grid, int order,
                            const std::function<ReferenceCurve()>& compute);

// ---------------------------------------------------------------------------
// Bulk: sine kernel and the gap law.

double sine_kernel(double x);
/// det(K(a_i - a_j)), the rescaled k-point correlation of the sine process.
double sine_det(const std::vector<double>& alphas);

/// E(alpha) = det(1 - K) for the sine kernel on (0, alpha), by Nystrom on
/// `order` Gauss-Legendre nodes. Negative alpha gives the analytic
/// continuation det(1 + K on (0, |alpha|)), used by the derivative stencils.
double sine_gap_probability(double alpha, int order = 48);

struct GapLaw {
  ReferenceCurve gap_probability;  ///< E(alpha)
  ReferenceCurve density;          ///< p(alpha) = E''(alpha)
  ReferenceCurve cdf;              ///< int_0^alpha p = 1 + E'(alpha)
};

/// Gap density of the GUE bulk on the grid (every point in (0, 6]). Throws
/// RuntimeFailure if E at orders m and 2m differ by more than 1e-8.
GapLaw gap_density_fredholm(const std::vector<double>& grid, int order = 48);
/// Same curves on the default grid 0.01..6 (step 0.01), through the cache.
const GapLaw& default_gap_law();
double gap_density(double s);
double gap_cdf_reference(double s);

double wigner_surmise(double s, int beta);
double wigner_surmise_cdf(double s, int beta);

// ---------------------------------------------------------------------------
// Finite-N GUE kernel, weight exp(-x^2/2).

/// psi_0..psi_{n-1} at x.
std::vector<double> hermite_functions(int n, double x);
double hermite_kernel(int n, double x, double y);
/// Rescaled kernel at energy E: K_N(x_a, x_b) / (rho_sc(E) sqrt N) with
/// x_a = sqrt(N) (E + a / (N rho_sc(E))).
double hermite_kernel_rescaled(int n, double energy, double a, double b);

// ---------------------------------------------------------------------------
// Edge: Airy and Tracy-Widom.

struct AiryPair {
  double ai;
  double aip;
};

/// Ai and Ai' for any x >= -15 (no range check; the tail uses asymptotics).
AiryPair airy_pair(double x);
double airy_function(double x);
double airy_derivative(double x);
double airy_kernel(double x, double y);

/// F_2(s) = det(1 - A) on (s, inf) by Nystrom with x = s + c (1 + t)/(1 - t).
double tracy_widom_cdf(double s, int beta = 2, int order = 80);

/// F_2 on a grid from the Hastings-McLeod solution of Painleve II,
/// integrated backward from s0 with q(s0) = Ai(s0).
ReferenceCurve tracy_widom_painleve(const std::vector<double>& grid, double s0 = 6.0);
/// F_2 on -8..6, step 0.005, through the cache.
const ReferenceCurve& default_tracy_widom();

// ---------------------------------------------------------------------------

/// C_k = binom(2k, k) / (k + 1); exact for k <= 36.
std::uint64_t catalan_moment(int k);

}  // namespace rmt
