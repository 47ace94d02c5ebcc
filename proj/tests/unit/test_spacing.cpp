#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rmtlab/errors.hpp"
#include "rmtlab/quadrature.hpp"
#include "rmtlab/resolvent.hpp"
#include "rmtlab/runner.hpp"
#include "rmtlab/spacing.hpp"

using namespace rmt;
using Catch::Approx;

namespace {

std::vector<SpectralData> tridiagonal_gue(int n, int samples, std::uint64_t seed) {
  std::vector<SpectralData> out;
  for (int s = 0; s < samples; ++s)
    out.push_back(SpectralData::from_eigenvalues(
        tridiagonal_eigenvalues(sample_gaussian_tridiagonal(n, Symmetry::Hermitian, mix_seed(seed, s)))));
  return out;
}

// Inverse of the semicircle counting function by bisection.
double semicircle_quantile(double u) {
  double lo = -2.0, hi = 2.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (counting_semicircle(mid) < u ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("classical locations unfold to unit gaps", "[spacing]") {
  const int n = 1000;
  const double t = 0.03;
  GapSample g;
  g.energy = 0.0;
  g.window = t;
  g.n = n;
  append_gaps(g, classical_locations(n));
  REQUIRE(g.count() > 10);
  for (double s : g.gaps) CHECK(std::abs(s - 1.0) <= 2.0 / n + t * t);
}

TEST_CASE("gap unfolding preconditions", "[spacing]") {
  const auto samples = std::vector<SpectralData>{SpectralData::from_eigenvalues(classical_locations(50))};
  CHECK_THROWS_AS(unfold_gaps(samples, 0.0, 1e-6), ValidationError);
  CHECK_THROWS_AS(unfold_gaps(samples, 1.9, 0.1), ValidationError);
  const auto g = unfold_gaps(samples, 0.0, 0.3);
  for (double s : g.gaps) CHECK(s >= 0.0);
}

TEST_CASE("GUE mean gap", "[spacing][mc]") {
  const auto g = unfold_gaps(tridiagonal_gue(400, 60, 3), 0.0);
  CHECK(g.count() > 1000);
  const double m = mean_of(g.gaps);
  CHECK(m >= 0.97);
  CHECK(m <= 1.03);
}

TEST_CASE("gap CDF of a degenerate sample is a step at 1", "[spacing]") {
  const std::vector<double> ones(1000, 1.0);
  const auto r = gap_cdf(ones, surmise_cdf_curve(2), linear_grid(0.0, 2.0, 41));
  for (std::size_t i = 0; i < r.grid.size(); ++i) CHECK(r.empirical[i] == (r.grid[i] < 1.0 ? 0.0 : 1.0));
  CHECK(r.ks == Approx(std::max(wigner_surmise_cdf(1.0, 2), 1.0 - wigner_surmise_cdf(1.0, 2))).margin(1e-4));
  std::vector<double> far(1000, 1.0);
  far.back() = 20.0;
  CHECK_THROWS_AS(gap_cdf(far, surmise_cdf_curve(2)), ValidationError);
  CHECK_THROWS_AS(gap_cdf(std::vector<double>(10, 1.0), surmise_cdf_curve(2)), ValidationError);
}

TEST_CASE("histogram densities integrate to the captured fraction", "[spacing]") {
  const auto h = histogram({0.1, 0.2, 0.2, 0.9, 5.0}, 0.0, 1.0, 4);
  double mass = 0.0;
  for (const auto& r : h) mass += r.density * 0.25;
  CHECK(mass == Approx(0.8));
  CHECK(h[0].count == 3);
}

TEST_CASE("k = 1 correlation of the classical configuration", "[spacing]") {
  CorrelationConfig c;
  c.k = 1;
  c.half_width = 0.1;
  const auto v = correlation_sample(classical_locations(1000), 1000, c);
  for (double x : v) CHECK(x == Approx(1.0).margin(0.01));
}

TEST_CASE("k = 1 correlation of GUE", "[spacing][mc]") {
  CorrelationConfig c;
  c.k = 1;
  c.half_width = 0.1;
  const auto est = correlation_estimate(tridiagonal_gue(400, 200, 5), c);
  CHECK(mean_of(est.value) == Approx(1.0).margin(0.03));
  for (std::size_t m = 0; m < est.value.size(); ++m)
    CHECK(std::abs(est.value[m] - 1.0) <= 0.03 + 4.0 * est.standard_error[m]);
}

TEST_CASE("k = 2 correlation of independent points is flat", "[spacing][mc]") {
  // N i.i.d. semicircle points: rho_2 = N (N - 1) rho rho, so R_2 = 1 - 1/N.
  const int n = 1000, samples = 200;
  CorrelationConfig c;
  c.k = 2;
  c.half_width = 0.2;
  c.bin_width = 0.25;
  std::vector<std::vector<double>> per;
  for (int s = 0; s < samples; ++s) {
    const CounterRng rng(mix_seed(11, s));
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) x[i] = semicircle_quantile(rng.uniform(i, 0));
    std::sort(x.begin(), x.end());
    per.push_back(correlation_sample(x, n, c));
  }
  const auto est = correlation_from_samples(per, c);
  for (std::size_t m = 0; m < est.value.size(); ++m)
    CHECK(std::abs(est.value[m] - (1.0 - 1.0 / n)) <= 4.0 * est.standard_error[m] + 0.005);
  CHECK(mean_of(est.value) == Approx(1.0).margin(0.02));
}

TEST_CASE("k = 2 estimates are mirror symmetric and nonnegative", "[spacing][property]") {
  CorrelationConfig c;
  c.k = 2;
  c.half_width = 0.2;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto ev = eigendecompose(sample_matrix(make_gue(200), seed), false).eigenvalues;
    const auto v = correlation_sample(ev, 200, c);
    for (std::size_t m = 0; m < v.size(); ++m) {
      CHECK(v[m] == v[v.size() - 1 - m]);
      CHECK(v[m] >= 0.0);
    }
  }
}

TEST_CASE("exact finite-N k = 2 expectation", "[spacing]") {
  CorrelationConfig c;
  c.k = 2;
  c.half_width = 0.1;
  const auto exact = expected_correlation_gue(200, c);
  const auto sine = sine_correlation_bins(c);
  REQUIRE(exact.size() == sine.size());
  for (std::size_t m = 0; m < exact.size(); ++m) {
    CHECK(std::abs(exact[m] - sine[m]) <= 0.01);
    CHECK(exact[m] == exact[exact.size() - 1 - m]);
  }
  const int mid = c.bins_per_axis() / 2;  // bin [0, w)
  const double avg = integrate_composite([](double x) { return 1.0 - std::pow(sine_kernel(x), 2); }, 0.0, 0.1, 4) / 0.1;
  CHECK(sine[mid] == Approx(avg).epsilon(1e-8));
}

TEST_CASE("correlation config validation", "[spacing]") {
  CorrelationConfig c;
  c.k = 4;
  CHECK_THROWS_AS(c.validate(100), ValidationError);
  c.k = 2;
  c.half_width = 0.001;
  CHECK_THROWS_AS(c.validate(100), ValidationError);
  c.half_width = 0.1;
  c.energy = 1.95;
  CHECK_THROWS_AS(c.validate(1000), ValidationError);
}

TEST_CASE("edge statistics", "[spacing][mc]") {
  CHECK_THROWS_AS(edge_statistics(std::vector<double>(10, 2.0), std::vector<double>(10, -2.0), 100),
                  ValidationError);
  const int n = 200, samples = 800;
  std::vector<double> top, bottom;
  for (int s = 0; s < samples; ++s) {
    const auto t = sample_gaussian_tridiagonal(n, Symmetry::Hermitian, mix_seed(21, s));
    top.push_back(tridiagonal_largest_eigenvalue(t));
    bottom.push_back(tridiagonal_smallest_eigenvalue(t));
  }
  const auto r = edge_statistics(top, bottom, n);
  CHECK(r.ks_top <= 0.08);
  CHECK(r.ks_bottom <= 0.08);
  CHECK(ks_pvalue(r.ks_mirror, samples / 2.0) > 1e-3);
  CHECK(r.tail_above_3 <= 0.01);
  for (double v : r.top) CHECK(std::isfinite(v));
}

TEST_CASE("smoothed and hard-binned correlations agree", "[spacing][mc]") {
  // The Lorentzian kernel (half-width = bin_width / 2) blurs 1 - sinc^2 only
  // slightly away from the hole at alpha = 0.
  const auto spectra = tridiagonal_gue(400, 100, 17);
  CorrelationConfig hard;
  hard.k = 2;
  hard.half_width = 0.2;
  CorrelationConfig smooth = hard;
  smooth.kernel = CorrelationKernel::Lorentzian;
  const auto h = correlation_estimate(spectra, hard);
  const auto s = correlation_estimate(spectra, smooth);
  REQUIRE(h.value.size() == s.value.size());
  for (std::size_t m = 0; m < h.value.size(); ++m) {
    CHECK(s.value[m] >= 0.0);
    if (std::abs(h.centers[m]) < 0.5) continue;
    CHECK(std::abs(s.value[m] - h.value[m]) <= 0.06 + 4.0 * h.standard_error[m]);
  }
  // Both sit near the sine law away from the diagonal.
  const auto sine = sine_correlation_bins(hard);
  for (std::size_t m = 0; m < sine.size(); ++m)
    if (std::abs(h.centers[m]) >= 1.0) CHECK(std::abs(s.value[m] - sine[m]) <= 0.08);
}
