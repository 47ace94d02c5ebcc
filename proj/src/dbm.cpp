#include "rmtlab/dbm.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "rmtlab/errors.hpp"
#include "rmtlab/parallel.hpp"
#include "rmtlab/resolvent.hpp"

namespace rmt {

void DbmConfig::validate() const {
  require(beta == 1 || beta == 2, "dbm: beta must be 1 or 2");
  require(n >= 1, "dbm: N must be positive");
  require(dt >= 0.0, "dbm: dt must be positive");
  require(t_end >= 0.0, "dbm: end time must be nonnegative");
  require(max_halvings >= 0, "dbm: max halvings must be nonnegative");
}

bool ParticleState::ordered() const noexcept {
  for (std::size_t i = 1; i < x.size(); ++i)
    if (!(x[i] > x[i - 1])) return false;
  return true;
}

std::vector<double> dbm_interaction(const ParticleState& state, int beta) {
  require(beta == 1 || beta == 2, "dbm drift: beta must be 1 or 2");
  require(state.ordered(), "dbm drift: points must be strictly increasing");
  const auto n = state.x.size();
  std::vector<double> f(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = 1.0 / (state.x[i] - state.x[j]);
      f[i] += d;
      f[j] -= d;
    }
  }
  const double c = beta / (2.0 * static_cast<double>(n));
  for (auto& v : f) v *= c;
  return f;
}

std::vector<double> dbm_drift(const ParticleState& state, int beta) {
  std::vector<double> f = dbm_interaction(state, beta);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] += -0.25 * beta * state.x[i];
  return f;
}

std::vector<double> local_relaxation_drift(const ParticleState& state, int beta, double r,
                                           const std::vector<double>& gamma) {
  require(r > 0.0, "local relaxation: R must be positive");
  if (std::isinf(r)) return dbm_drift(state, beta);
  require(gamma.size() == state.x.size(), "local relaxation: gamma has the wrong length");
  std::vector<double> f = dbm_drift(state, beta);
  const double c = 1.0 / (2.0 * r * r);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] -= c * (state.x[i] - gamma[i]);
  return f;
}

std::vector<double> FlowSpec::drift(const ParticleState& s) const {
  return std::isinf(r) ? dbm_drift(s, beta) : local_relaxation_drift(s, beta, r, gamma);
}

namespace {

// Advances over [t, t + dt] given the Brownian increment w (variance dt per
// coordinate, before the 1/sqrt(N) scale). On an ordering violation the
// interval is halved: the midpoint value of the Brownian path is drawn from
// its bridge law N(w/2, dt/4), addressed by the binary-tree index `node`.
bool advance(std::vector<double>& x, double dt, const std::vector<double>& w, const FlowSpec& flow,
             const CounterRng& rng, std::uint64_t step, std::uint64_t node, int depth, int max_depth,
             bool allow_split, std::uint64_t& splits) {
  const auto n = x.size();
  const double noise_scale = 1.0 / std::sqrt(static_cast<double>(n));
  const std::vector<double> drift = flow.drift(ParticleState{x, 0.0});
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + drift[i] * dt + noise_scale * w[i];
  bool ok = true;
  for (std::size_t i = 1; i < n && ok; ++i) ok = y[i] > y[i - 1];
  if (ok) {
    x.swap(y);
    return true;
  }
  if (!allow_split || depth >= max_depth) return false;
  ++splits;
  std::vector<double> w1(n), w2(n);
  const double sd = 0.5 * std::sqrt(dt);
  for (std::size_t i = 0; i < n; ++i) {
    w1[i] = 0.5 * w[i] + sd * rng.normal(step, i, node + 1);
    w2[i] = w[i] - w1[i];
  }
  std::vector<double> trial = x;
  if (!advance(trial, 0.5 * dt, w1, flow, rng, step, 2 * node + 1, depth + 1, max_depth, true, splits)) return false;
  if (!advance(trial, 0.5 * dt, w2, flow, rng, step, 2 * node + 2, depth + 1, max_depth, true, splits)) return false;
  x.swap(trial);
  return true;
}

ParticleState step_impl(const ParticleState& state, double dt, const FlowSpec& flow, const CounterRng& rng,
                        std::uint64_t step, DbmScheme scheme, int max_halvings, std::uint64_t& splits) {
  require(dt > 0.0, "dbm step: dt must be positive");
  require(state.ordered(), "dbm step: state must be strictly increasing");
  const auto n = state.x.size();
  std::vector<double> w(n);
  const double sd = std::sqrt(dt);
  for (std::size_t i = 0; i < n; ++i) w[i] = sd * rng.normal(step, i, 0);
  std::vector<double> x = state.x;
  // Depth is bounded by max_halvings; node indices stay far below 2^64 for
  // any realistic limit.
  if (!advance(x, dt, w, flow, rng, step, 0, 0, max_halvings, scheme == DbmScheme::EulerSubstep, splits)) {
    std::ostringstream msg;
    msg << "dbm step: ordering lost at t=" << state.t << " (step " << step << ", dt " << dt << "); state:";
    msg << std::setprecision(17);
    for (double v : state.x) msg << " " << v;
    throw RuntimeFailure(msg.str());
  }
  return ParticleState{std::move(x), state.t + dt};
}

}  // namespace

ParticleState dbm_step(const ParticleState& state, double dt, const FlowSpec& flow, const CounterRng& rng,
                       std::uint64_t step, DbmScheme scheme, int max_halvings) {
  require(max_halvings >= 0 && max_halvings <= 40, "dbm step: max halvings must lie in [0, 40]");
  std::uint64_t splits = 0;
  return step_impl(state, dt, flow, rng, step, scheme, max_halvings, splits);
}

DbmRun simulate_dbm(const ParticleState& initial, const DbmConfig& config, const FlowSpec& flow,
                    const std::vector<double>& record_times) {
  config.validate();
  require(initial.size() == config.n, "dbm: initial state has the wrong size");
  require(flow.beta == config.beta, "dbm: flow beta differs from the configuration");
  for (std::size_t i = 0; i < record_times.size(); ++i) {
    require(record_times[i] >= initial.t, "dbm: record time before the initial time");
    if (i > 0) require(record_times[i] >= record_times[i - 1], "dbm: record times not ascending");
  }
  const double dt = config.step();
  const CounterRng rng(config.seed, 0xDB);
  DbmRun run;
  ParticleState s = initial;
  std::uint64_t step = 0;
  for (double target : record_times) {
    while (s.t < target - 1e-12 * std::max(1.0, target)) {
      const double h = std::min(dt, target - s.t);
      s = step_impl(s, h, flow, rng, step++, config.scheme, config.max_halvings, run.substeps);
    }
    s.t = target;
    run.snapshots.push_back(s);
  }
  run.steps = step;
  return run;
}

MatrixSample matrix_ou_flow(const MatrixSample& base, double t, std::uint64_t seed) {
  require(t >= 0.0, "matrix OU flow: t must be nonnegative");
  return gaussian_convolve_matrix(base, t, seed);
}

double matrix_time_for_dbm(double t, int beta) {
  require(beta == 1 || beta == 2, "dbm: beta must be 1 or 2");
  return 0.5 * beta * t;
}

QDiagnostic q_diagnostic(const std::vector<std::vector<ParticleState>>& states, const std::vector<double>& gamma,
                         double t0) {
  require(!states.empty(), "Q diagnostic: no samples");
  const std::size_t times = states.front().size();
  QDiagnostic q;
  q.q.assign(times, 0.0);
  for (std::size_t k = 0; k < times; ++k) q.times.push_back(states.front()[k].t);
  for (const auto& traj : states) {
    require(traj.size() == times, "Q diagnostic: trajectories of different lengths");
    for (std::size_t k = 0; k < times; ++k) {
      require(traj[k].x.size() == gamma.size(), "Q diagnostic: gamma has the wrong length");
      CompensatedSum s;
      for (std::size_t j = 0; j < gamma.size(); ++j) {
        const double d = traj[k].x[j] - gamma[j];
        s.add(d * d);
      }
      q.q[k] += s.value() / static_cast<double>(states.size());
    }
  }
  for (std::size_t k = 0; k < times; ++k)
    if (q.times[k] >= t0) q.sup = std::max(q.sup, q.q[k]);
  return q;
}

void write_trajectory_csv(std::ostream& out, const std::vector<ParticleState>& states, int stride) {
  require(stride >= 1, "trajectory csv: stride must be positive");
  out << "# schema: rmtlab.dbm_trajectory v1\n";
  if (states.empty()) return;
  out << "t";
  for (int i = 1; i <= states.front().size(); ++i) out << ",x_" << i;
  out << "\n" << std::setprecision(17);
  for (std::size_t k = 0; k < states.size(); k += static_cast<std::size_t>(stride)) {
    out << states[k].t;
    for (double v : states[k].x) out << "," << v;
    out << "\n";
  }
}

// ---------------------------------------------------------------------------

RelaxationStatistic parse_relaxation_statistic(const std::string& name) {
  if (name == "gap-ks" || name == "gap-KS-to-equilibrium") return RelaxationStatistic::GapKs;
  if (name == "k2" || name == "k2-correlation-distance") return RelaxationStatistic::K2Distance;
  throw ValidationError("relaxation scan: unknown statistic '" + name + "'");
}

void RelaxationConfig::validate() const {
  start.validate();
  require(!times.empty(), "relaxation scan: empty time grid");
  for (double t : times) require(t >= 0.0, "relaxation scan: negative time");
  require(batch >= 1, "relaxation scan: batch must be positive");
  require(replicates >= 2, "relaxation scan: need at least 2 replicates for error bars");
  require(!energies.empty(), "relaxation scan: empty energy list");
  require(window > 0.0, "relaxation scan: window must be positive");
  if (statistic == RelaxationStatistic::K2Distance) {
    require(correlation.k == 2, "relaxation scan: correlation statistic needs k = 2");
    correlation.validate(start.n);
  }
}

namespace {

struct BatchFeatures {
  std::vector<double> gaps;
  std::vector<double> k2;  // mean per-sample k=2 estimate
};

BatchFeatures batch_features(const std::vector<std::vector<double>>& spectra, const RelaxationConfig& cfg) {
  BatchFeatures f;
  const int n = cfg.start.n;
  for (double e : cfg.energies) {
    GapSample g = make_gap_sample(n, e, cfg.window, 0.2);
    for (const auto& ev : spectra) append_gaps(g, ev);
    f.gaps.insert(f.gaps.end(), g.gaps.begin(), g.gaps.end());
  }
  if (cfg.statistic == RelaxationStatistic::K2Distance) {
    std::vector<std::vector<double>> per;
    for (const auto& ev : spectra) per.push_back(correlation_sample(ev, n, cfg.correlation));
    f.k2 = correlation_from_samples(per, cfg.correlation).value;
  }
  return f;
}

double batch_distance(const BatchFeatures& a, const BatchFeatures& b, RelaxationStatistic stat) {
  if (stat == RelaxationStatistic::GapKs) {
    require(!a.gaps.empty() && !b.gaps.empty(), "relaxation scan: empty gap batch");
    return ks_two_sample(a.gaps, b.gaps);
  }
  double d = 0.0;
  for (std::size_t i = 0; i < a.k2.size(); ++i) d = std::max(d, std::abs(a.k2[i] - b.k2[i]));
  return d;
}

}  // namespace

RelaxationScan relaxation_scan(const RelaxationConfig& config) {
  config.validate();
  const int n = config.start.n;
  const auto per_batch = static_cast<std::size_t>(config.batch);
  const auto reps = static_cast<std::size_t>(config.replicates);
  // Points: one per time plus the equilibrium-vs-equilibrium floor (index = times.size()).
  const std::size_t points = config.times.size() + 1;
  const std::size_t jobs = points * reps * per_batch * 2;
  // Each job is one spectrum: (point, replicate, slot, side); side 0 = flow
  // (or equilibrium for the floor), side 1 = fresh equilibrium.
  const auto spectra = parallel_map(jobs, config.workers, [&](std::size_t job) {
    const std::size_t side = job % 2;
    const std::size_t slot = (job / 2) % per_batch;
    const std::size_t rep = (job / 2 / per_batch) % reps;
    const std::size_t point = job / 2 / per_batch / reps;
    const std::uint64_t seed = mix_seed(mix_seed(mix_seed(config.seed, point), rep), slot * 2 + side);
    MatrixSample m;
    if (side == 1 || point == config.times.size()) {
      m = sample_gaussian_invariant(n, config.start.symmetry, seed, 0x5EED);
    } else {
      const MatrixSample base = sample_matrix(config.start, seed);
      m = matrix_ou_flow(base, config.times[point], mix_seed(seed, 0x0F));
    }
    return eigendecompose(m, false).eigenvalues;
  });

  RelaxationScan scan;
  for (std::size_t p = 0; p < points; ++p) {
    std::vector<double> d;
    for (std::size_t r = 0; r < reps; ++r) {
      std::vector<std::vector<double>> a, b;
      for (std::size_t s = 0; s < per_batch; ++s) {
        const std::size_t base = ((p * reps + r) * per_batch + s) * 2;
        a.push_back(spectra[base]);
        b.push_back(spectra[base + 1]);
      }
      d.push_back(batch_distance(batch_features(a, config), batch_features(b, config), config.statistic));
    }
    RelaxationPoint pt;
    pt.t = p < config.times.size() ? config.times[p] : std::numeric_limits<double>::infinity();
    pt.distance = mean_of(d);
    pt.standard_error = stderr_of(d);
    if (p < config.times.size()) scan.points.push_back(pt);
    else scan.noise_floor = pt;
  }
  for (std::size_t k = 1; k < scan.points.size(); ++k) {
    const auto& a = scan.points[k - 1];
    const auto& b = scan.points[k];
    const double se = std::hypot(a.standard_error, b.standard_error);
    const double rise = b.distance - a.distance;
    if (se > 0.0) scan.worst_increase_sigma = std::max(scan.worst_increase_sigma, rise / se);
    else if (rise > 0.0) scan.worst_increase_sigma = std::numeric_limits<double>::infinity();
  }
  return scan;
}

}  // namespace rmt
