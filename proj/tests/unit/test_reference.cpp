#include <catch_amalgamated.hpp>

#include <boost/math/special_functions/airy.hpp>

#include <cmath>
#include <complex>
#include <cstdlib>
#include <filesystem>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>

#include "rmtlab/errors.hpp"
#include "rmtlab/quadrature.hpp"
#include "rmtlab/reference.hpp"

using namespace rmt;
using Catch::Approx;

namespace {

constexpr double pi = std::numbers::pi;

// Ai(x) = (1/pi) Im int_0^inf e^{i pi/3} exp(-r^3/3 - x r e^{i pi/3}) dr, the
// defining contour integral rotated onto the steepest-descent rays.
double airy_contour(double x) {
  const std::complex<double> w = std::polar(1.0, pi / 3.0);
  auto f = [&](double r) { return (w * std::exp(-r * r * r / 3.0 - x * r * w)).imag(); };
  return integrate_composite(f, 0.0, 12.0, 120, 20) / pi;
}

double min_eigenvalue(const Eigen::MatrixXd& m) {
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
}

// Fredholm series det(1 - K) on (0, a) through the m = 3 term.
double gap_series(double a) {
  const auto q = gauss_legendre(24, 0.0, a);
  const std::size_t n = q.nodes.size();
  double t2 = 0.0, t3 = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double kij = sine_kernel(q.nodes[i] - q.nodes[j]);
      t2 += q.weights[i] * q.weights[j] * (1.0 - kij * kij);
      for (std::size_t k = 0; k < n; ++k)
        t3 += q.weights[i] * q.weights[j] * q.weights[k] * sine_det({q.nodes[i], q.nodes[j], q.nodes[k]});
    }
  return 1.0 - a + t2 / 2.0 - t3 / 6.0;
}

}  // namespace

TEST_CASE("Gauss-Legendre rules", "[quadrature]") {
  for (int m : {1, 5, 20, 64}) {
    const auto q = gauss_legendre(m, -1.0, 3.0);
    double total = 0.0;
    for (double w : q.weights) {
      CHECK(w > 0.0);
      total += w;
    }
    CHECK(total == Approx(4.0).margin(1e-14));
    // Exact for degree 2m - 1.
    const int deg = 2 * m - 1;
    const double exact = (std::pow(3.0, deg + 1) - std::pow(-1.0, deg + 1)) / (deg + 1);
    CHECK(integrate([&](double x) { return std::pow(x, deg); }, q) == Approx(exact).epsilon(1e-12));
  }
}

TEST_CASE("sine kernel values", "[reference]") {
  CHECK(sine_kernel(0.0) == 1.0);
  CHECK(sine_kernel(1.0) == Approx(0.0).margin(1e-16));
  CHECK(sine_kernel(0.5) == Approx(2.0 / pi).margin(1e-15));
  CHECK(sine_det({0.3}) == Approx(1.0));
  CHECK(sine_det({0.7, 0.7}) == Approx(0.0).margin(1e-15));
  CHECK(sine_det({0.0, 0.5}) == Approx(1.0 - 4.0 / (pi * pi)).margin(1e-15));
}

TEST_CASE("kernel matrices are symmetric positive semidefinite", "[reference][property]") {
  const int n = 20;
  Eigen::MatrixXd s(n, n), a(n, n), h(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double xi = 4.0 * i / (n - 1), xj = 4.0 * j / (n - 1);
      s(i, j) = sine_kernel(xi - xj);
      a(i, j) = airy_kernel(xi, xj);
      h(i, j) = hermite_kernel(30, 2.0 * xi - 4.0, 2.0 * xj - 4.0);
    }
  for (const auto* m : {&s, &a, &h}) {
    CHECK(((*m) - m->transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(min_eigenvalue(*m) >= -1e-10);
  }
}

TEST_CASE("gap probability", "[reference]") {
  CHECK(sine_gap_probability(1e-12) == Approx(1.0).margin(1e-11));
  for (double a : {0.1, 0.25, 0.4, 0.5}) CHECK(sine_gap_probability(a) == Approx(gap_series(a)).margin(1e-3));
  // The series converges quickly here, so it pins E far tighter than the stated bound.
  CHECK(sine_gap_probability(0.25) == Approx(gap_series(0.25)).margin(1e-6));
  double prev = 1.0;
  for (double a = 0.1; a <= 4.0; a += 0.1) {
    const double e = sine_gap_probability(a);
    CHECK(e <= prev);
    CHECK(e >= 0.0);
    prev = e;
  }
}

TEST_CASE("gap density from the Fredholm determinant", "[reference]") {
  const auto grid = linear_grid(0.01, 6.0, 600);
  const auto law = gap_density_fredholm(grid);
  double mass = 0.0, mean = 0.0, surmise = 0.0;
  const double h = grid[1] - grid[0];
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double p = law.density.values[i];
    CHECK(p >= -1e-10);
    // Trapezoid from 0 (p(0) = 0).
    const double w = (i + 1 == grid.size()) ? h / 2 : h;
    mass += w * p;
    mean += w * grid[i] * p;
    if (grid[i] <= 3.0) surmise = std::max(surmise, std::abs(p - wigner_surmise(grid[i], 2)));
    if (i > 0) CHECK(law.cdf.values[i] >= law.cdf.values[i - 1] - 1e-12);
  }
  CHECK(mass == Approx(1.0).margin(1e-3));
  CHECK(mean == Approx(1.0).margin(1e-3));
  CHECK(surmise <= 0.02);
  CHECK(law.cdf.values.back() == Approx(1.0).margin(1e-6));
  CHECK(law.cdf.values.front() >= 0.0);
}

TEST_CASE("Wigner surmise", "[reference]") {
  for (int beta : {1, 2}) {
    const double mass = integrate_composite([&](double s) { return wigner_surmise(s, beta); }, 0.0, 12.0, 48);
    const double mean = integrate_composite([&](double s) { return s * wigner_surmise(s, beta); }, 0.0, 12.0, 48);
    CHECK(mass == Approx(1.0).margin(1e-10));
    CHECK(mean == Approx(1.0).margin(1e-10));
    CHECK(wigner_surmise(0.0, beta) == 0.0);
    CHECK(wigner_surmise_cdf(1.3, beta) ==
          Approx(integrate_composite([&](double s) { return wigner_surmise(s, beta); }, 0.0, 1.3, 16)).margin(1e-12));
  }
  // Linear and quadratic vanishing at the origin.
  CHECK(wigner_surmise(1e-5, 1) / 1e-5 == Approx(pi / 2).epsilon(1e-6));
  CHECK(wigner_surmise(1e-5, 2) / 1e-10 == Approx(32.0 / (pi * pi)).epsilon(1e-6));
  CHECK_THROWS_AS(wigner_surmise(1.0, 4), ValidationError);
}

TEST_CASE("Hermite kernel", "[reference]") {
  const int n = 20;
  SECTION("trace") {
    CHECK(integrate_composite([&](double x) { return hermite_kernel(n, x, x); }, -25.0, 25.0, 200) ==
          Approx(n).margin(1e-8));
  }
  SECTION("reproducing property") {
    for (auto [x, y] : {std::pair{0.0, 0.0}, std::pair{0.3, -1.1}, std::pair{2.5, 4.0}}) {
      const double lhs = integrate_composite(
          [&](double t) { return hermite_kernel(n, x, t) * hermite_kernel(n, t, y); }, -25.0, 25.0, 200);
      CHECK(lhs == Approx(hermite_kernel(n, x, y)).margin(1e-8));
    }
  }
  SECTION("orthonormal functions") {
    const double ip = integrate_composite(
        [&](double x) {
          const auto p = hermite_functions(6, x);
          return p[2] * p[5] + p[4] * p[4];
        },
        -25.0, 25.0, 200);
    CHECK(ip == Approx(1.0).margin(1e-12));
  }
  SECTION("exact symmetry") {
    for (double x : {-3.0, 0.1, 2.2})
      for (double y : {-1.0, 0.7}) CHECK(hermite_kernel(n, x, y) == hermite_kernel(n, y, x));
  }
  SECTION("size cap") { CHECK_THROWS_AS(hermite_kernel(501, 0.0, 0.0), ValidationError); }
}

TEST_CASE("rescaled Hermite kernel approaches the sine kernel", "[reference]") {
  double worst = 0.0;
  for (double a = -3.0; a <= 3.0; a += 0.25)
    for (double b = -3.0; b <= 3.0; b += 0.25)
      worst = std::max(worst, std::abs(hermite_kernel_rescaled(200, 0.0, a, b) - sine_kernel(a - b)));
  CHECK(worst <= 0.02);
}

TEST_CASE("Airy function", "[reference]") {
  SECTION("contour-integral oracle") {
    CHECK(airy_function(0.0) == Approx(airy_contour(0.0)).margin(1e-12));
    for (double x = -8.0; x <= 4.0; x += 0.5) CHECK(airy_function(x) == Approx(airy_contour(x)).margin(1e-10));
  }
  SECTION("Boost cross-check") {
    for (double x = -15.0; x <= 15.0; x += 0.125) {
      const double ai = boost::math::airy_ai(x), aip = boost::math::airy_ai_prime(x);
      CHECK(airy_function(x) == Approx(ai).epsilon(1e-9).margin(1e-13));
      CHECK(airy_derivative(x) == Approx(aip).epsilon(1e-9).margin(1e-12));
    }
  }
  SECTION("Airy equation residual") {
    const double h = 0.01;
    double worst = 0.0;
    for (double x = -10.0; x <= 5.0; x += 0.05) {
      const double d2 = (2 * airy_function(x - 3 * h) - 27 * airy_function(x - 2 * h) + 270 * airy_function(x - h) -
                         490 * airy_function(x) + 270 * airy_function(x + h) - 27 * airy_function(x + 2 * h) +
                         2 * airy_function(x + 3 * h)) /
                        (180 * h * h);
      worst = std::max(worst, std::abs(d2 - x * airy_function(x)));
    }
    CHECK(worst <= 1e-8);
  }
  SECTION("monotone decay on the right") {
    double prev = airy_function(2.0);
    for (double x = 2.05; x <= 15.0; x += 0.05) {
      const double v = airy_function(x);
      CHECK(v < prev);
      CHECK(v > 0.0);
      prev = v;
    }
  }
}

TEST_CASE("Airy kernel", "[reference]") {
  for (double x : {-3.0, -0.4, 0.0, 1.3, 4.0}) {
    CHECK(std::abs(airy_kernel(x, x + 1e-7) - airy_kernel(x, x)) <= 1e-5);
    CHECK(airy_kernel(x, 0.9) == airy_kernel(0.9, x));
    // Diagonal: Ai'(x)^2 - x Ai(x)^2.
    const double a = airy_function(x), ap = airy_derivative(x);
    CHECK(airy_kernel(x, x) == Approx(ap * ap - x * a * a).margin(1e-12));
  }
}

TEST_CASE("Tracy-Widom distribution", "[reference]") {
  CHECK(tracy_widom_cdf(6.0) >= 1.0 - 1e-8);
  CHECK(tracy_widom_cdf(-8.0) <= 1e-8);
  const double s = 4.0;
  const double tail = 1.0 - tracy_widom_cdf(s);
  const double asym = std::exp(-4.0 / 3.0 * std::pow(s, 1.5)) / (16.0 * pi * std::pow(s, 1.5));
  CHECK(tail / asym >= 1.0 / 1.2);
  CHECK(tail / asym <= 1.2);

  const auto grid = linear_grid(-6.0, 4.0, 101);
  const auto pii = tracy_widom_painleve(grid);
  double worst = 0.0, prev = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double f = tracy_widom_cdf(grid[i]);
    worst = std::max(worst, std::abs(f - pii.values[i]));
    CHECK(f >= prev);
    prev = f;
  }
  CHECK(worst <= 1e-6);
  CHECK_THROWS_AS(tracy_widom_cdf(0.0, 1), ValidationError);
}

TEST_CASE("Catalan numbers", "[reference]") {
  CHECK(catalan_moment(0) == 1);
  CHECK(catalan_moment(1) == 1);
  CHECK(catalan_moment(2) == 2);
  CHECK(catalan_moment(3) == 5);
  CHECK(catalan_moment(4) == 14);
  CHECK(catalan_moment(30) == 3814986502092304ULL);
  CHECK(catalan_moment(36) == 11959798385860453492ULL);
  CHECK_THROWS_AS(catalan_moment(37), ValidationError);

  // Exhaustive Dyck paths: +-1 steps of length 2k that never go below 0.
  for (int k = 1; k <= 5; ++k) {
    std::uint64_t paths = 0;
    for (unsigned mask = 0; mask < (1u << (2 * k)); ++mask) {
      int h = 0;
      bool ok = true;
      for (int i = 0; i < 2 * k && ok; ++i) {
        h += (mask >> i) & 1u ? 1 : -1;
        ok = h >= 0;
      }
      paths += ok && h == 0;
    }
    CHECK(catalan_moment(k) == paths);
  }
}

TEST_CASE("reference curves", "[reference]") {
  ReferenceCurve c;
  c.kind = "test";
  c.grid = {0.0, 1.0, 2.0};
  c.values = {0.0, 2.0, 3.0};
  c.metadata["note"] = "x";
  CHECK(c.interpolate(0.5) == Approx(1.0));
  CHECK(c.interpolate(-1.0) == 0.0);
  CHECK(c.interpolate(5.0) == 3.0);
  std::stringstream buf;
  c.write_csv(buf);
  const auto back = ReferenceCurve::read_csv(buf);
  CHECK(back.kind == c.kind);
  CHECK(back.grid == c.grid);
  CHECK(back.values == c.values);
  c.grid = {0.0, 2.0, 1.0};
  CHECK_THROWS_AS(c.validate(), ValidationError);
}

TEST_CASE("curve cache", "[reference]") {
  const auto dir = std::filesystem::temp_directory_path() / "rmtlab-cache-test";
  std::filesystem::remove_all(dir);
  ::setenv("RMTLAB_CACHE", dir.c_str(), 1);
  int calls = 0;
  auto compute = [&] {
    ++calls;
    ReferenceCurve c;
    c.kind = "cache-probe";
    c.grid = linear_grid(0.0, 1.0, 5);
    for (double x : c.grid) c.values.push_back(std::sqrt(x) / 3.0);
    return c;
  };
  const auto grid = linear_grid(0.0, 1.0, 5);
  const auto a = cached_curve("cache-probe", grid, 7, compute);
  const auto b = cached_curve("cache-probe", grid, 7, compute);
  CHECK(calls == 1);
  CHECK(a.values == b.values);
  cached_curve("cache-probe", grid, 8, compute);
  CHECK(calls == 2);
  ::unsetenv("RMTLAB_CACHE");
  std::filesystem::remove_all(dir);
}
