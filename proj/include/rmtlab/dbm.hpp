#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "rmtlab/ensemble.hpp"
#include "rmtlab/rng.hpp"
#include "rmtlab/spacing.hpp"

namespace rmt {

enum class DbmScheme { EulerMaruyama, EulerSubstep };

struct DbmConfig {
  int beta = 2;
  int n = 0;
  double dt = 0.0;  ///< 0 selects the default 0.1 / N^2
  double t_end = 0.0;
  /// EulerSubstep retries a step that breaks the ordering on halves with a
  /// Brownian-bridge split; EulerMaruyama fails immediately instead.
  DbmScheme scheme = DbmScheme::EulerSubstep;
  int max_halvings = 20;
  std::uint64_t seed = 1;

  double step() const { return dt > 0.0 ? dt : 0.1 / (static_cast<double>(n) * n); }
  void validate() const;
};

struct ParticleState {
  std::vector<double> x;  ///< strictly increasing
  double t = 0.0;

  int size() const noexcept { return static_cast<int>(x.size()); }
  bool ordered() const noexcept;
};

/// (beta / 2N) sum_{j != i} 1 / (x_i - x_j).
std::vector<double> dbm_interaction(const ParticleState& state, int beta);
/// -(beta / 4) x_i plus the interaction term.
std::vector<double> dbm_drift(const ParticleState& state, int beta);
/// DBM drift plus -(x_j - gamma_j) / (2 R^2). R = +infinity returns
/// dbm_drift unchanged.
std::vector<double> local_relaxation_drift(const ParticleState& state, int beta, double r,
                                           const std::vector<double>& gamma);

/// Which drift to integrate.
struct FlowSpec {
  int beta = 2;
  double r = std::numeric_limits<double>::infinity();  ///< local relaxation radius
  std::vector<double> gamma;                           ///< needed when r is finite
  std::vector<double> drift(const ParticleState& s) const;
};

/// One Euler-Maruyama step with noise sqrt(dt / N) per coordinate. The
/// Brownian increments are a pure function of (rng, step). Throws
/// RuntimeFailure if the ordering cannot be kept.
ParticleState dbm_step(const ParticleState& state, double dt, const FlowSpec& flow, const CounterRng& rng,
                       std::uint64_t step, DbmScheme scheme = DbmScheme::EulerSubstep, int max_halvings = 20);

struct DbmRun {
  std::vector<ParticleState> snapshots;  ///< at each requested time
  std::uint64_t steps = 0;
  std::uint64_t substeps = 0;  ///< halvings triggered by ordering violations
};

/// Integrates from `initial` and records the state at each time in
/// `record_times` (ascending, >= initial.t).
DbmRun simulate_dbm(const ParticleState& initial, const DbmConfig& config, const FlowSpec& flow,
                    const std::vector<double>& record_times);

/// e^{-t/2} base + sqrt(1 - e^{-t}) V (exact law of the matrix OU flow).
MatrixSample matrix_ou_flow(const MatrixSample& base, double t, std::uint64_t seed);
/// Matrix OU time matching DBM time t for symmetry class beta.
double matrix_time_for_dbm(double t, int beta);

struct QDiagnostic {
  std::vector<double> times;
  std::vector<double> q;  ///< mean over samples of sum_j (x_j - gamma_j)^2
  double sup = 0.0;       ///< over times >= t0
};

/// states[s][k]: sample s at time index k.
QDiagnostic q_diagnostic(const std::vector<std::vector<ParticleState>>& states, const std::vector<double>& gamma,
                         double t0 = 0.0);

void write_trajectory_csv(std::ostream& out, const std::vector<ParticleState>& states, int stride = 1);

// ---------------------------------------------------------------------------

enum class RelaxationStatistic { GapKs, K2Distance };
RelaxationStatistic parse_relaxation_statistic(const std::string& name);

struct RelaxationConfig {
  EnsembleSpec start;               ///< H-hat
  std::vector<double> times;        ///< matrix OU times; +infinity allowed
  RelaxationStatistic statistic = RelaxationStatistic::GapKs;
  int batch = 20;                   ///< matrices per batch
  int replicates = 5;               ///< batch pairs per time
  std::vector<double> energies{-0.5, 0.0, 0.5};
  double window = 0.2;              ///< gap window half-width at each energy
  CorrelationConfig correlation{};  ///< used by K2Distance
  std::uint64_t seed = 1;
  int workers = 1;
  void validate() const;
};

struct RelaxationPoint {
  double t = 0.0;
  double distance = 0.0;
  double standard_error = 0.0;
};

struct RelaxationScan {
  std::vector<RelaxationPoint> points;
  RelaxationPoint noise_floor;  ///< equilibrium batch against equilibrium batch
  /// Largest increase d(t_{k+1}) - d(t_k) in units of the combined error.
  double worst_increase_sigma = 0.0;
};

RelaxationScan relaxation_scan(const RelaxationConfig& config);

}  // namespace rmt
