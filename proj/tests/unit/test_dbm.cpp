#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <sstream>

#include "rmtlab/dbm.hpp"
#include "rmtlab/errors.hpp"
#include "rmtlab/resolvent.hpp"
#include "rmtlab/stats.hpp"

using namespace rmt;
using Catch::Approx;

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

ParticleState bernoulli_start(int n, std::uint64_t seed) {
  const auto h = sample_matrix(make_wigner(n, Symmetry::Hermitian, EntryDistribution::bernoulli()), seed);
  return ParticleState{eigendecompose(h, false).eigenvalues, 0.0};
}

double q_of(const ParticleState& s, const std::vector<double>& g) {
  double q = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) q += (s.x[i] - g[i]) * (s.x[i] - g[i]);
  return q;
}

}  // namespace

TEST_CASE("two-particle drift by hand", "[dbm]") {
  const double a = 0.7;
  for (int beta : {1, 2}) {
    const ParticleState s{{-a, a}, 0.0};
    const auto f = dbm_interaction(s, beta);
    CHECK(f[0] == Approx(-beta / (4.0 * 2 * a)));
    CHECK(f[1] == Approx(beta / (4.0 * 2 * a)));
    const auto d = dbm_drift(s, beta);
    CHECK(d[0] - f[0] == Approx(beta * a / 4.0));
    CHECK(d[1] - f[1] == Approx(-beta * a / 4.0));
  }
}

TEST_CASE("interaction conserves momentum and mirrors", "[dbm][property]") {
  const auto s = bernoulli_start(60, 3);
  const auto f = dbm_interaction(s, 2);
  double total = 0.0, scale = 0.0;
  for (double v : f) {
    total += v;
    scale = std::max(scale, std::abs(v));
  }
  CHECK(std::abs(total) <= 1e-10 * std::max(1.0, scale));

  std::vector<double> half{0.1, 0.4, 0.45, 1.2};
  std::vector<double> x;
  for (auto it = half.rbegin(); it != half.rend(); ++it) x.push_back(-*it);
  x.insert(x.end(), half.begin(), half.end());
  const auto d = dbm_drift(ParticleState{x, 0.0}, 1);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(d[i] == Approx(-d[x.size() - 1 - i]).margin(1e-14));
}

TEST_CASE("drift nearly cancels at the classical locations", "[dbm]") {
  const int n = 100;
  const auto g = classical_locations(n);
  // gamma_N = 2 sits on the edge; use midpoints of the quantile cells.
  std::vector<double> x(n);
  double lo = -2.0;
  for (int j = 0; j < n; ++j) {
    x[j] = 0.5 * (lo + g[j]);
    lo = g[j];
  }
  const auto d = dbm_drift(ParticleState{x, 0.0}, 2);
  double worst = 0.0;
  for (int j = n / 10; j < 9 * n / 10; ++j) worst = std::max(worst, std::abs(d[j]));
  CHECK(worst <= 0.5);
}

TEST_CASE("drift preconditions", "[dbm]") {
  CHECK_THROWS_AS(dbm_drift(ParticleState{{0.0, 0.0}, 0.0}, 2), ValidationError);
  CHECK_THROWS_AS(dbm_drift(ParticleState{{0.0, 1.0}, 0.0}, 3), ValidationError);
  CHECK_THROWS_AS(local_relaxation_drift(ParticleState{{0.0, 1.0}, 0.0}, 2, 0.0, {0.0, 1.0}), ValidationError);
}

TEST_CASE("local relaxation drift", "[dbm]") {
  const auto s = bernoulli_start(40, 5);
  const auto g = classical_locations(40);
  const auto a = local_relaxation_drift(s, 2, inf, g);
  const auto b = dbm_drift(s, 2);
  CHECK(a == b);
  const ParticleState pinned{std::vector<double>(g.begin(), g.end() - 1), 0.0};
  std::vector<double> g1(g.begin(), g.end() - 1);
  const auto c = local_relaxation_drift(pinned, 2, 0.1, g1);
  CHECK(c == dbm_drift(pinned, 2));
}

TEST_CASE("one particle follows the OU mean", "[dbm]") {
  // N = 1 has no interaction; the mean obeys x' = -(beta/4) x. Averaging over
  // paths removes the noise, and Euler's bias is O(dt).
  const double dt = 1e-3, t_end = 1.0, x0 = 1.5;
  for (int beta : {1, 2}) {
    MeanAccumulator m;
    for (int p = 0; p < 4000; ++p) {
      DbmConfig c;
      c.beta = beta;
      c.n = 1;
      c.dt = dt;
      c.t_end = t_end;
      c.seed = mix_seed(77, p);
      const auto run = simulate_dbm(ParticleState{{x0}, 0.0}, c, FlowSpec{beta}, {t_end});
      m.add(run.snapshots.back().x[0]);
    }
    const double exact = x0 * std::exp(-beta / 4.0 * t_end);
    CHECK(std::abs(m.mean() - exact) <= 4.0 * m.stderr_of_mean() + dt);
    // The deterministic Euler map itself is within O(dt^2) per step.
    const double euler = x0 * std::pow(1.0 - beta / 4.0 * dt, t_end / dt);
    CHECK(std::abs(euler - exact) <= t_end * dt);
  }
}

TEST_CASE("DBM steps are deterministic in (seed, step)", "[dbm]") {
  const auto s = bernoulli_start(30, 9);
  const CounterRng rng(4);
  const auto a = dbm_step(s, 1e-4, FlowSpec{2}, rng, 17);
  const auto b = dbm_step(s, 1e-4, FlowSpec{2}, rng, 17);
  CHECK(a.x == b.x);
  CHECK(a.t == Approx(1e-4));
  CHECK(dbm_step(s, 1e-4, FlowSpec{2}, rng, 18).x != a.x);
}

TEST_CASE("ordering failures", "[dbm]") {
  // dt = 1e-2 on spacing 0.1: the noise (~0.06) sometimes beats the repulsion.
  const ParticleState s{{-0.1, 0.0, 0.1}, 0.0};
  const CounterRng rng(1);
  int broken = -1;
  for (int step = 0; step < 500 && broken < 0; ++step) {
    try {
      dbm_step(s, 1e-2, FlowSpec{2}, rng, step, DbmScheme::EulerMaruyama);
    } catch (const RuntimeFailure& e) {
      CHECK(std::string(e.what()).find("state:") != std::string::npos);
      broken = step;
    }
  }
  REQUIRE(broken >= 0);
  const auto ok = dbm_step(s, 1e-2, FlowSpec{2}, rng, broken, DbmScheme::EulerSubstep, 30);
  CHECK(ok.ordered());
  CHECK(ok.t == Approx(1e-2));
  CHECK_THROWS_AS(dbm_step(s, 1e-2, FlowSpec{2}, rng, broken, DbmScheme::EulerSubstep, 0), RuntimeFailure);
}

TEST_CASE("ordering survives a long run", "[dbm][slow]") {
  const int n = 200;
  DbmConfig c;
  c.n = n;
  c.t_end = 1e5 * c.step();
  c.seed = 12;
  const auto run = simulate_dbm(bernoulli_start(n, 2), c, FlowSpec{2}, {c.t_end});
  CHECK(run.steps >= 100000);
  CHECK(run.snapshots.back().ordered());
}

TEST_CASE("matrix OU flow limits", "[dbm]") {
  const auto base = sample_matrix(make_wigner(10, Symmetry::Symmetric, EntryDistribution::bernoulli()), 3);
  CHECK(matrix_ou_flow(base, 0.0, 5).real == base.real);
  const auto inf_flow = matrix_ou_flow(base, inf, 5);
  CHECK(inf_flow.hermiticity_defect() == 0.0);
  CHECK((inf_flow.real - base.real).norm() > 0.5);
}

TEST_CASE("Q diagnostic", "[dbm]") {
  const auto g = classical_locations(20);
  std::vector<double> gi(g.begin(), g.end());
  const std::vector<std::vector<ParticleState>> pinned{{ParticleState{gi, 0.0}, ParticleState{gi, 1.0}}};
  const auto q = q_diagnostic(pinned, gi);
  for (double v : q.q) CHECK(v == 0.0);
  CHECK(q.sup == 0.0);
}

TEST_CASE("trajectory CSV", "[dbm]") {
  std::ostringstream out;
  write_trajectory_csv(out, {ParticleState{{-1.0, 1.0}, 0.0}, ParticleState{{-0.5, 0.5}, 0.1}});
  const auto text = out.str();
  CHECK(text.rfind("# schema:", 0) == 0);
  CHECK(text.find("0.1") != std::string::npos);
}

TEST_CASE("local relaxation speeds up the decay of Q", "[dbm][mc]") {
  const int n = 100, seeds = 20;
  const auto gamma = classical_locations(n);
  const double t = 0.05;
  std::uint64_t faster = 0;
  for (int s = 0; s < seeds; ++s) {
    DbmConfig c;
    c.n = n;
    c.dt = 1e-5;
    c.t_end = t;
    c.seed = mix_seed(31, s);
    const auto start = bernoulli_start(n, mix_seed(32, s));
    FlowSpec plain{2};
    FlowSpec local{2, std::pow(n, -0.25), gamma};
    const double q_plain = q_of(simulate_dbm(start, c, plain, {t}).snapshots.back(), gamma);
    const double q_local = q_of(simulate_dbm(start, c, local, {t}).snapshots.back(), gamma);
    faster += q_local < q_plain;
  }
  CHECK(faster > seeds / 2);
  CHECK(sign_test_pvalue(faster, seeds) < 0.05);
}

TEST_CASE("GUE start keeps Q roughly constant", "[dbm][mc]") {
  const int n = 100;
  const auto gamma = classical_locations(n);
  std::vector<std::vector<ParticleState>> states;
  const std::vector<double> times{0.0, 0.05, 0.1};
  for (int s = 0; s < 10; ++s) {
    DbmConfig c;
    c.n = n;
    c.dt = 1e-5;
    c.t_end = times.back();
    c.seed = mix_seed(41, s);
    const ParticleState start{tridiagonal_eigenvalues(sample_gaussian_tridiagonal(n, Symmetry::Hermitian, mix_seed(42, s))),
                              0.0};
    states.push_back(simulate_dbm(start, c, FlowSpec{2}, times).snapshots);
  }
  const auto q = q_diagnostic(states, gamma);
  REQUIRE(q.q.size() == 3);
  CHECK(q.q[2] / q.q[0] >= 0.5);
  CHECK(q.q[2] / q.q[0] <= 2.0);
}

TEST_CASE("relaxation scan at equilibrium sits on the noise floor", "[dbm][mc]") {
  RelaxationConfig c;
  c.start = make_gue(200);
  c.times = {inf};
  c.batch = 10;
  c.replicates = 4;
  c.energies = {0.0};
  c.window = 0.3;
  const auto r = relaxation_scan(c);
  REQUIRE(r.points.size() == 1);
  CHECK(r.points[0].distance >= 0.0);
  const double se = std::hypot(r.points[0].standard_error, r.noise_floor.standard_error);
  CHECK(std::abs(r.points[0].distance - r.noise_floor.distance) <= 4.0 * se + 1e-12);
}

TEST_CASE("Bernoulli start is already at the gap-statistics noise floor", "[dbm][mc]") {
  // Bulk universality: local gaps of a Bernoulli matrix match GUE at t = 0,
  // so the scan cannot show a drop from t = 0 at this size.
  RelaxationConfig c;
  c.start = make_wigner(200, Symmetry::Hermitian, EntryDistribution::bernoulli());
  c.times = {0.0};
  c.batch = 10;
  c.replicates = 8;
  c.seed = 5;
  const auto r = relaxation_scan(c);
  const double se = std::hypot(r.points[0].standard_error, r.noise_floor.standard_error);
  CHECK(std::abs(r.points[0].distance - r.noise_floor.distance) <= 4.0 * se);
}
