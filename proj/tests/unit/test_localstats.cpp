#include <catch_amalgamated.hpp>

#include <cmath>

#include "rmtlab/errors.hpp"
#include "rmtlab/localstats.hpp"
#include "rmtlab/reference.hpp"
#include "rmtlab/runner.hpp"

using namespace rmt;
using Catch::Approx;

TEST_CASE("geometric grid", "[localstats]") {
  const auto g = geometric_grid(1e-3, 1.0, 4);
  REQUIRE(g.size() == 4);
  CHECK(g[0] == Approx(1e-3));
  CHECK(g[1] == Approx(1e-2));
  CHECK(g[3] == Approx(1.0));
}

TEST_CASE("local semicircle scan", "[localstats][mc]") {
  LscScanConfig c;
  c.spec = make_gue(300);
  c.energies = {-1.0, 0.0, 0.5};
  c.etas = geometric_grid(std::pow(300.0, -0.9), std::pow(300.0, -0.3), 6);
  c.samples = 6;
  c.seed = 4;
  const auto r = lsc_scan(c);
  REQUIRE(r.cells.size() == 18);
  for (const auto& cell : r.cells) {
    CHECK(std::isfinite(cell.lambda.mean()));
    CHECK(cell.lambda.mean() <= cell.lambda_d.mean() + 1e-15);
    CHECK(cell.envelope == Approx(1.0 / (300.0 * cell.eta)));
    CHECK(cell.lambda.count == 6);
  }
  CHECK(r.lambda_fit.slope >= -1.3);
  CHECK(r.lambda_fit.slope <= -0.7);
  CHECK(r.lambda_o_fit.slope >= -0.75);
  CHECK(r.lambda_o_fit.slope <= -0.25);

  LscScanConfig far = c;
  far.etas = {10.0};
  far.energies = {-3.0, 0.0, 3.0};
  far.samples = 2;
  for (const auto& cell : lsc_scan(far).cells) CHECK(cell.max_lambda <= 0.05);

  LscScanConfig bad = c;
  bad.etas = {0.0};
  CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("rigidity of the classical configuration", "[localstats]") {
  const int n = 200;
  const std::vector<SpectralData> s{SpectralData::from_eigenvalues(classical_locations(n))};
  const auto r = rigidity(s);
  for (double d : r.mean_deviation) CHECK(d == 0.0);
  CHECK(r.q_estimate == 0.0);
  CHECK(r.bulk_fraction_within == 1.0);
  for (int j = 0; j < n; ++j) {
    CHECK(r.envelope[j] > 0.0);
    CHECK(r.envelope[j] == r.envelope[n - 1 - j]);
  }
}

TEST_CASE("GUE rigidity", "[localstats][mc]") {
  const int n = 500;
  std::vector<SpectralData> s;
  for (int i = 0; i < 10; ++i)
    s.push_back(SpectralData::from_eigenvalues(
        tridiagonal_eigenvalues(sample_gaussian_tridiagonal(n, Symmetry::Hermitian, mix_seed(8, i)))));
  const auto r = rigidity(s);
  CHECK(r.bulk_fraction_within >= 0.99);
  CHECK(n * r.q_estimate <= std::pow(std::log(n), 3));
}

TEST_CASE("counting function", "[localstats]") {
  const auto spec = SpectralData::from_eigenvalues({-1.0, 0.0, 0.5, 1.5});
  CHECK(empirical_counting(spec, -2.0) == 0.0);
  CHECK(empirical_counting(spec, 0.0) == 0.5);
  CHECK(empirical_counting(spec, 0.7) == 0.75);
  CHECK(count_in(spec.eigenvalues, -1.0, 0.5) == 3);

  const int n = 300;
  const std::vector<SpectralData> cl{SpectralData::from_eigenvalues(classical_locations(n))};
  const auto r = counting_compare(cl, linear_grid(-2.5, 2.5, 501));
  CHECK(r.sup_deviation[0] <= 1.0 / n + 1e-12);

  // Brute-force sup over a fine grid never exceeds the exact sup.
  const auto g = eigendecompose(sample_matrix(make_gue(100), 2), false);
  const auto exact = counting_compare({g}, linear_grid(-2.5, 2.5, 51)).sup_deviation[0];
  double brute = 0.0;
  for (double e : linear_grid(-2.5, 2.5, 20001))
    brute = std::max(brute, std::abs(empirical_counting(g, e) - counting_semicircle(e)));
  CHECK(brute <= exact + 1e-15);
  CHECK(exact - brute <= 0.011);
}

TEST_CASE("scaled lp norms", "[localstats]") {
  const int n = 64;
  const std::vector<double> flat(n, 1.0 / std::sqrt(n));
  for (double p : {1.0, 2.0, 4.0, 10.0, std::numeric_limits<double>::infinity()})
    CHECK(scaled_lp_norm(flat, p) == Approx(1.0).epsilon(1e-12));
  std::vector<double> e1(n, 0.0);
  e1[0] = 1.0;
  CHECK(scaled_lp_norm(e1, std::numeric_limits<double>::infinity()) == Approx(std::sqrt(n)));
  CHECK(scaled_lp_norm(e1, 4.0) == Approx(std::pow(n, 0.25)));
}

TEST_CASE("delocalization of GOE eigenvectors", "[localstats][mc]") {
  std::vector<SpectralData> s;
  for (int i = 0; i < 3; ++i) s.push_back(eigendecompose(sample_matrix(make_goe(300), i + 1), true));
  const auto r = delocalization(s, {4.0, 8.0});
  CHECK(r.bulk_vectors > 0);
  CHECK(r.min_scaled_norm >= 1.0 - 1e-12);
  CHECK(r.max_scaled_sup <= 6.0);
}

TEST_CASE("level repulsion bookkeeping", "[localstats]") {
  RepulsionConfig c;
  c.matrix_size = 100;
  c.n = 2;
  c.epsilons = {0.5, 1.0};
  c.half_width = 0.05;
  auto r = make_repulsion_result(c);
  CHECK(r.target_exponent == 4.0);
  // Windows of width eps/N = 0.005 (0.01) tile [-0.05, 0.05]: 20 (10) windows.
  accumulate_repulsion(r, c, {-0.0449, -0.0448, 0.0201, 0.5});
  CHECK(r.points[0].trials == 20);
  CHECK(r.points[1].trials == 10);
  CHECK(r.points[0].at_least_n == 1);
  CHECK(r.points[0].at_least_one == 2);
  CHECK(r.points[1].at_least_n == 1);

  RepulsionConfig sym = c;
  sym.beta = 1;
  CHECK(make_repulsion_result(sym).target_exponent == 3.0);
}

TEST_CASE("level repulsion saturates for wide windows", "[localstats]") {
  // epsilon is capped at 1, so widen the windows through the nominal size:
  // eps / N = 0.5 tiles [-0.5, 0.5] with two windows holding ~30 levels each.
  RepulsionConfig c;
  c.matrix_size = 2;
  c.n = 2;
  c.epsilons = {1.0};
  c.half_width = 0.5;
  auto r = make_repulsion_result(c);
  accumulate_repulsion(r, c, eigendecompose(sample_matrix(make_gue(200), 3), false).eigenvalues);
  CHECK(r.points[0].trials == 2);
  CHECK(r.points[0].at_least_one == r.points[0].trials);
  c.epsilons = {1.5};
  CHECK_THROWS_AS(make_repulsion_result(c), ValidationError);
}

TEST_CASE("overlap variables", "[localstats]") {
  SECTION("Parseval for a = e_1") {
    // With H = [[0, 1, 0..], ...] the first column minus its diagonal is e_1 of the minor.
    const int n = 6;
    MatrixSample h;
    h.symmetry = Symmetry::Symmetric;
    h.real = Eigen::MatrixXd::Zero(n, n);
    h.real(0, 1) = h.real(1, 0) = 1.0;
    for (int i = 1; i + 1 < n; ++i) h.real(i, i + 1) = h.real(i + 1, i) = 0.3 * i;
    double total = 0.0;
    for (double x : overlap_variables(h, 0)) total += x;
    CHECK(total == Approx(n).epsilon(1e-12));
  }
  SECTION("GUE overlaps are exponential") {
    std::vector<MatrixSample> s;
    for (int i = 0; i < 50; ++i) s.push_back(sample_matrix(make_gue(200), mix_seed(2, i)));
    const auto r = overlap_stats(s);
    CHECK(r.mean == Approx(1.0).margin(0.05));
    CHECK(r.ks_to_gaussian_law <= 0.05);
  }
}

TEST_CASE("large deviation bounds", "[localstats][mc]") {
  LdpConfig c;
  c.n = 400;
  c.trials = 400;
  const auto g = ldp_check(EntryDistribution::gaussian(), c);
  CHECK(g.linear.frequency.estimate < 1e-2);
  CHECK(g.diagonal.frequency.estimate < 1e-2);
  CHECK(g.offdiagonal.frequency.estimate < 1e-2);
  CHECK(g.linear.trials == 400);
  const auto b = ldp_check(EntryDistribution::bernoulli(), c);
  CHECK(b.linear.frequency.estimate < 1e-2);
}
