#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "rmtlab/errors.hpp"
#include "rmtlab/keyvalue.hpp"
#include "rmtlab/parallel.hpp"
#include "rmtlab/rng.hpp"
#include "rmtlab/stats.hpp"

using namespace rmt;
using Catch::Approx;

TEST_CASE("compensated sums", "[stats]") {
  CompensatedSum s;
  s.add(1e16);
  for (int i = 0; i < 1000; ++i) s.add(1.0);
  s.add(-1e16);
  CHECK(s.value() == 1000.0);
  MeanAccumulator a, b, all;
  for (int i = 0; i < 10; ++i) {
    (i < 4 ? a : b).add(i * 0.5);
    all.add(i * 0.5);
  }
  a.merge(b);
  CHECK(a.mean() == Approx(all.mean()));
  CHECK(a.variance() == Approx(all.variance()));
  CHECK(all.variance() == Approx(55.0 / 6.0 * 0.25));
}

TEST_CASE("Kolmogorov-Smirnov distances", "[stats]") {
  CHECK(ks_distance({0.5}, [](double x) { return x; }) == Approx(0.5));
  CHECK(ks_distance({0.25, 0.75}, [](double x) { return x; }) == Approx(0.25));
  CHECK(ks_two_sample({1, 2, 3}, {1, 2, 3}) == 0.0);
  CHECK(ks_two_sample({1, 2}, {3, 4}) == 1.0);
  CHECK(ks_pvalue(0.0, 100) == Approx(1.0));
  // Kolmogorov Q(1.36) = 0.0494; at n = 1e6 the finite-n correction is negligible.
  CHECK(ks_pvalue(1.36 / 1000.0, 1e6) == Approx(0.0494).margin(2e-4));
}

TEST_CASE("ordinary least squares", "[stats]") {
  const auto f = ols_fit({1, 2, 3, 4}, {3, 5, 7, 9});
  CHECK(f.slope == Approx(2.0));
  CHECK(f.intercept == Approx(1.0));
  CHECK(f.r2 == Approx(1.0));
  CHECK(f.slope_stderr == Approx(0.0).margin(1e-12));
  CHECK_THROWS_AS(ols_fit({1, 2}, {1, 2}), ValidationError);
}

TEST_CASE("Clopper-Pearson intervals", "[stats]") {
  const auto z = clopper_pearson(0, 10);
  CHECK(z.lower == 0.0);
  CHECK(z.upper == Approx(1.0 - std::pow(0.025, 0.1)).epsilon(1e-10));
  const auto f = clopper_pearson(10, 10);
  CHECK(f.upper == 1.0);
  CHECK(f.lower == Approx(std::pow(0.025, 0.1)).epsilon(1e-10));
  const auto h = clopper_pearson(50, 100);
  CHECK(h.estimate == 0.5);
  CHECK(h.lower == Approx(0.3983).margin(1e-4));
  CHECK(h.upper == Approx(0.6017).margin(1e-4));
}

TEST_CASE("sign test", "[stats]") {
  CHECK(sign_test_pvalue(10, 10) == Approx(2.0 / 1024.0));
  CHECK(sign_test_pvalue(5, 10) == Approx(1.0));
  CHECK(sign_test_pvalue(0, 10) == Approx(2.0 / 1024.0));
}

TEST_CASE("truncated power-law MLE recovers the exponent", "[stats]") {
  // Inverse-CDF draws from s^a on [lo, hi].
  for (double a : {1.0, 2.0, 4.0}) {
    const double lo = 0.05, hi = 0.4;
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> xs;
    for (int i = 0; i < 20000; ++i) {
      const double l = std::pow(lo, a + 1), h = std::pow(hi, a + 1);
      xs.push_back(std::pow(l + u(gen) * (h - l), 1.0 / (a + 1)));
    }
    xs.push_back(1.0);  // outside the window, ignored
    const auto f = truncated_power_law_mle(xs, lo, hi);
    CHECK(f.count == 20000);
    CHECK(std::abs(f.exponent - a) <= 4.0 * f.standard_error);
    CHECK(f.standard_error < 0.1);
  }
}

TEST_CASE("quantiles", "[stats]") {
  CHECK(quantile({3, 1, 2}, 0.5) == 2.0);
  CHECK(quantile({1, 2, 3, 4}, 0.0) == 1.0);
  CHECK(quantile({1, 2, 3, 4}, 1.0) == 4.0);
}

TEST_CASE("counter generator", "[rng]") {
  const CounterRng r(5);
  CHECK(r.bits(1, 2, 3) == CounterRng(5).bits(1, 2, 3));
  CHECK(r.bits(1, 2, 3) != r.bits(2, 1, 3));
  CHECK(CounterRng(5, 1).bits(1, 2) != r.bits(1, 2));
  MeanAccumulator m;
  for (int i = 0; i < 20000; ++i) m.add(r.normal(i, 0));
  CHECK(std::abs(m.mean()) <= 4.0 * m.stderr_of_mean());
  CHECK(m.variance() == Approx(1.0).epsilon(0.03));
  for (int i = 0; i < 1000; ++i) {
    const double u = r.uniform(i, 9);
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("parallel_map keeps index order and rethrows", "[parallel]") {
  const auto out = parallel_map(100, 4, [](std::size_t i) { return static_cast<int>(i * i); });
  for (std::size_t i = 0; i < 100; ++i) CHECK(out[i] == static_cast<int>(i * i));
  CHECK_THROWS_AS(parallel_map(10, 3,
                               [](std::size_t i) -> int {
                                 if (i == 7) throw RuntimeFailure("boom");
                                 return 0;
                               }),
                  RuntimeFailure);
}

TEST_CASE("key-value configs", "[config]") {
  const auto kv = KeyValues::parse("# c\nn = 10\nname = gue  # trailing\nxs = 1, 2.5,3\n");
  CHECK(kv.get_int("n") == 10);
  CHECK(kv.get_string("name") == "gue");
  CHECK(kv.get_doubles("xs") == std::vector<double>{1.0, 2.5, 3.0});
  CHECK(kv.get_double("missing", 4.5) == 4.5);
  CHECK_THROWS_AS(kv.get_int("name"), ValidationError);
  CHECK_THROWS_AS(kv.get_string("missing"), ValidationError);
  const auto js = KeyValues::parse(R"({"n": 10, "name": "gue", "xs": [1, 2.5, 3]})");
  CHECK(js.get_int("n") == 10);
  CHECK(js.get_doubles("xs") == kv.get_doubles("xs"));
  CHECK(KeyValues::parse(kv.to_text()).to_text() == kv.to_text());
  CHECK_THROWS_AS(KeyValues::load("/nonexistent/rmtlab.cfg"), ValidationError);
}
