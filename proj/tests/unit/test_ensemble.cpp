#include <catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "rmtlab/ensemble.hpp"
#include "rmtlab/errors.hpp"
#include "rmtlab/resolvent.hpp"
#include "rmtlab/stats.hpp"

using namespace rmt;
using Catch::Approx;

TEST_CASE("flat profile is 1/N everywhere", "[ensemble]") {
  const auto p = VarianceProfile::flat(4);
  const auto m = p.matrix();
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) CHECK(m(i, j) == 0.25);
  CHECK(p.spread() == Approx(4.0));
}

TEST_CASE("band profile N=6 W=1 is periodic tridiagonal with unit rows", "[ensemble]") {
  const auto p = VarianceProfile::band(6, 1.0);
  const auto m = p.matrix();
  for (int i = 0; i < 6; ++i) {
    CHECK(m.row(i).sum() == Approx(1.0).margin(1e-12));
    for (int j = 0; j < 6; ++j) {
      const int d = std::min(std::abs(i - j), 6 - std::abs(i - j));
      if (d > 1) CHECK(m(i, j) == 0.0);
      else CHECK(m(i, j) > 0.0);
      CHECK(m(i, j) == m(j, i));
    }
  }
}

TEST_CASE("band profiles stay doubly stochastic", "[ensemble][property]") {
  for (int n : {7, 20, 51}) {
    for (double w : {1.0, 2.5, 6.0}) {
      const auto m = VarianceProfile::band(n, w).matrix();
      CHECK((m - m.transpose()).cwiseAbs().maxCoeff() == 0.0);
      CHECK(m.minCoeff() >= 0.0);
      for (int i = 0; i < n; ++i) CHECK(std::abs(m.row(i).sum() - 1.0) <= 1e-10);
    }
  }
}

TEST_CASE("explicit profile must have unit rows", "[ensemble]") {
  Eigen::MatrixXd s = Eigen::MatrixXd::Constant(3, 3, 1.0 / 3.0);
  CHECK_NOTHROW(VarianceProfile::explicit_matrix(s));
  s(0, 0) -= 0.1;
  CHECK_THROWS_AS(VarianceProfile::explicit_matrix(s), ValidationError);
}

TEST_CASE("sample_matrix is a pure function of the seed", "[ensemble]") {
  const auto spec = make_gue(2);
  const auto a = sample_matrix(spec, 42);
  const auto b = sample_matrix(spec, 42);
  CHECK(a.complex == b.complex);
  const auto c = sample_matrix(spec, 43);
  CHECK(a.complex != c.complex);
}

TEST_CASE("samples are exactly hermitian", "[ensemble][property]") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    CHECK(sample_matrix(make_gue(30), seed).hermiticity_defect() == 0.0);
    CHECK(sample_matrix(make_goe(31), seed).hermiticity_defect() == 0.0);
    auto band = make_gue(40);
    band.profile = VarianceProfile::band(40, 4.0);
    CHECK(sample_matrix(band, seed).hermiticity_defect() == 0.0);
  }
}

TEST_CASE("Bernoulli hermitian entries sit on the four corners", "[ensemble]") {
  const int n = 100;
  const auto h = sample_matrix(make_wigner(n, Symmetry::Hermitian, EntryDistribution::bernoulli()), 5);
  const double a = 1.0 / std::sqrt(2.0 * n);
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) {
        worst = std::max(worst, std::abs(std::abs(h.complex(i, j).real()) - a));
        worst = std::max(worst, std::abs(std::abs(h.complex(i, j).imag()) - a));
      }
  CHECK(worst <= 1e-15);
}

TEST_CASE("GOE off-diagonal moments", "[ensemble][mc]") {
  // h_12 alone: N = 50 keeps this fast; the check scales with N.
  const int n = 50, samples = 2000;
  const auto spec = make_goe(n);
  MeanAccumulator acc;
  for (int s = 0; s < samples; ++s) acc.add(sample_matrix(spec, mix_seed(9, s)).real(0, 1));
  CHECK(std::abs(acc.mean()) <= 4.0 / std::sqrt(static_cast<double>(n) * samples));
  CHECK(acc.variance() == Approx(1.0 / n).epsilon(0.10));
}

TEST_CASE("GOE diagonal has variance 2/N", "[ensemble][mc]") {
  const int n = 20, samples = 3000;
  MeanAccumulator acc;
  for (int s = 0; s < samples; ++s) acc.add(sample_matrix(make_goe(n), mix_seed(3, s)).real(2, 2));
  CHECK(acc.variance() == Approx(2.0 / n).epsilon(0.10));
}

TEST_CASE("eigenvalue sum equals the trace", "[ensemble]") {
  const auto h = sample_matrix(make_goe(50), 11);
  const auto spec = eigendecompose(h, false);
  double s = 0.0;
  for (double l : spec.eigenvalues) s += l;
  CHECK(s == Approx(h.real.trace()).margin(1e-8));
}

TEST_CASE("covariance matrices", "[ensemble]") {
  SECTION("scalar case") {
    const auto h = sample_covariance_matrix(1, 1, EntryDistribution::gaussian(), 3);
    CHECK(h.real(0, 0) >= 0.0);
  }
  SECTION("M < N leaves N - M zero eigenvalues") {
    const auto h = sample_covariance_matrix(50, 100, EntryDistribution::gaussian(), 4);
    const auto e = eigendecompose(h, false).eigenvalues;
    int zeros = 0;
    for (double l : e) zeros += std::abs(l) <= 1e-8;
    CHECK(zeros >= 50);
  }
  SECTION("Marchenko-Pastur support") {
    const double d = 0.25, lo = std::pow(1 - std::sqrt(d), 2), hi = std::pow(1 + std::sqrt(d), 2);
    int outside = 0, total = 0;
    for (int s = 0; s < 20; ++s) {
      for (double l : eigendecompose(sample_covariance_matrix(400, 100, EntryDistribution::gaussian(), s), false)
                          .eigenvalues) {
        outside += (l < lo || l > hi);
        ++total;
      }
    }
    CHECK(static_cast<double>(outside) / total < 0.02);
  }
}

TEST_CASE("match_four_moments", "[ensemble]") {
  SECTION("m4 = 1 gives the symmetric Bernoulli law") {
    const auto d = match_four_moments(0.0, 1.0, 0.0);
    const auto& b = d.kind() == EntryDistribution::Kind::GaussianConvolved ? d.base() : d;
    REQUIRE(b.points().size() == 2);
    CHECK(b.points()[0] == Approx(-1.0));
    CHECK(b.points()[1] == Approx(1.0));
    CHECK(b.probabilities()[0] == Approx(0.5));
    CHECK(b.probabilities()[1] == Approx(0.5));
  }
  SECTION("infeasible or capped inputs") {
    CHECK_THROWS_AS(match_four_moments(0.0, 0.5, 0.0), ValidationError);
    CHECK_THROWS_AS(match_four_moments(0.0, 101.0, 0.0), ValidationError);
    CHECK_THROWS_AS(match_four_moments(0.0, 3.0, -0.1), ValidationError);
    CHECK_THROWS_AS(match_four_moments(0.0, 3.0, 1.0), ValidationError);
  }
  SECTION("third moment exact, fourth within O(gamma)") {
    for (double m3 : {-1.0, 0.0, 0.5, 2.0}) {
      for (double m4 : {m3 * m3 + 1.0, m3 * m3 + 2.5, 9.0}) {
        if (m4 - m3 * m3 - 1.0 < 0.0) continue;
        for (double g : {0.0, 0.05, 0.2}) {
          if (g >= largest_matching_gamma(m3, m4)) continue;
          const auto m = match_four_moments(m3, m4, g).moments();
          CHECK(m[0] == Approx(1.0).margin(1e-12));
          CHECK(m[1] == Approx(0.0).margin(1e-12));
          CHECK(m[2] == Approx(1.0).margin(1e-12));
          CHECK(m[3] == Approx(m3).margin(1e-10));
          CHECK(std::abs(m[4] - m4) <= 6.0 * g * (1.0 + m4) + 1e-10);
        }
      }
    }
  }
  SECTION("gamma near 1 approaches the Gaussian fourth moment") {
    const auto m = match_four_moments(0.0, 3.0, 0.999).moments();
    CHECK(m[4] == Approx(3.0).margin(1e-2));
  }
}

TEST_CASE("discrete law must be standardized", "[ensemble]") {
  CHECK_THROWS_AS(EntryDistribution::discrete({-1.0, 2.0}, {0.5, 0.5}), ValidationError);
  CHECK_THROWS_AS(EntryDistribution::discrete({-1.0, 1.0}, {0.6, 0.5}), ValidationError);
  CHECK_NOTHROW(EntryDistribution::discrete({-1.0, 1.0}, {0.5, 0.5}));
}

TEST_CASE("gaussian convolution of matrices", "[ensemble]") {
  const auto base = sample_matrix(make_wigner(20, Symmetry::Hermitian, EntryDistribution::bernoulli()), 8);
  CHECK(gaussian_convolve_matrix(base, 0.0, 3).complex == base.complex);
  const auto inf = gaussian_convolve_matrix(base, std::numeric_limits<double>::infinity(), 3);
  CHECK(inf.hermiticity_defect() == 0.0);
  CHECK((inf.complex - base.complex).norm() > 1.0);
  CHECK_THROWS_AS(gaussian_convolve_matrix(base, -1.0, 3), ValidationError);
}

TEST_CASE("convolved entries keep variance 1/N", "[ensemble][mc]") {
  const int n = 20, samples = 2000;
  const double t = 0.7;
  MeanAccumulator acc;
  for (int s = 0; s < samples; ++s) {
    const auto base = sample_matrix(make_wigner(n, Symmetry::Symmetric, EntryDistribution::bernoulli()), mix_seed(1, s));
    acc.add(gaussian_convolve_matrix(base, t, mix_seed(2, s)).real(0, 1));
  }
  CHECK(acc.variance() == Approx(1.0 / n).epsilon(0.10));
}

TEST_CASE("binary dump round trip", "[ensemble]") {
  for (auto spec : {make_gue(7), make_goe(5)}) {
    const auto h = sample_matrix(spec, 21);
    std::stringstream buf;
    write_matrix_binary(buf, h);
    const auto back = read_matrix_binary(buf);
    CHECK(back.symmetry == h.symmetry);
    if (h.is_complex()) CHECK(back.complex == h.complex);
    else CHECK(back.real == h.real);
  }
  std::stringstream junk("XXXXnot a matrix");
  CHECK_THROWS(read_matrix_binary(junk));
}

TEST_CASE("spec config round trip", "[ensemble]") {
  auto spec = make_wigner(30, Symmetry::Hermitian, match_four_moments(0.5, 4.0, 0.1));
  spec.profile = VarianceProfile::band(30, 3.0);
  const auto kv = spec_to_config(spec, 99);
  const auto back = make_spec_from_config(kv);
  CHECK(back.hash() == spec.hash());
  CHECK(sample_matrix(back, 5).complex == sample_matrix(spec, 5).complex);
}
