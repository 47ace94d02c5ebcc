#include "rmtlab/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include <openssl/evp.h>

#include <json.hpp>

#include "rmtlab/dbm.hpp"
#include "rmtlab/errors.hpp"
#include "rmtlab/localstats.hpp"
#include "rmtlab/parallel.hpp"
#include "rmtlab/reference.hpp"
#include "rmtlab/spacing.hpp"
#include "rmtlab/stats.hpp"

#ifndef RMTLAB_VERSION
#define RMTLAB_VERSION "0.0.0"
#endif

namespace rmt {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

const std::vector<std::pair<ExperimentKind, std::string>>& kind_table() {
  static const std::vector<std::pair<ExperimentKind, std::string>> table{
      {ExperimentKind::LscScan, "lsc-scan"},   {ExperimentKind::Rigidity, "rigidity"},
      {ExperimentKind::Deloc, "deloc"},        {ExperimentKind::Repulsion, "repulsion"},
      {ExperimentKind::Gaps, "gaps"},          {ExperimentKind::Corr, "corr"},
      {ExperimentKind::Edge, "edge"},          {ExperimentKind::DbmRelax, "dbm-relax"},
      {ExperimentKind::Moments, "moments"},    {ExperimentKind::GfcCompare, "gfc-compare"},
  };
  return table;
}

std::string num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string hex16(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// In-memory CSV with the schema header and the (ensemble hash, N, samples)
/// columns appended to every row.
class CsvTable {
 public:
  CsvTable(std::string schema, std::vector<std::string> columns, const EnsembleSpec& spec, int samples)
      : schema_(std::move(schema)), columns_(std::move(columns)),
        suffix_("," + hex16(spec.hash()) + "," + std::to_string(spec.n) + "," + std::to_string(samples)),
        ensemble_(spec.describe()) {}

  void row(const std::vector<double>& values) {
    require(values.size() == columns_.size(), "csv: row width mismatch");
    std::string line;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) line += ',';
      line += num(values[i]);
    }
    rows_.push_back(line + suffix_);
  }

  std::string csv() const {
    std::string out = "# schema: rmtlab." + schema_ + " v1\n# ensemble: " + ensemble_ + "\n";
    out += header() + "\n";
    for (const auto& r : rows_) out += r + "\n";
    return out;
  }

  /// Whitespace-separated variant for gnuplot.
  std::string dat() const {
    std::string h = header();
    std::replace(h.begin(), h.end(), ',', ' ');
    std::string out = "# " + h + "\n";
    for (auto r : rows_) {
      std::replace(r.begin(), r.end(), ',', ' ');
      out += r + "\n";
    }
    return out;
  }

 private:
  std::string header() const {
    std::string h;
    for (const auto& c : columns_) h += c + ",";
    return h + "ensemble_hash,n,samples";
  }

  std::string schema_;
  std::vector<std::string> columns_;
  std::string suffix_;
  std::string ensemble_;
  std::vector<std::string> rows_;
};

/// Collected outputs of one experiment, written by the calling thread only.
struct Outputs {
  std::vector<std::pair<std::string, std::string>> files;  // name, contents
  json summary = json::object();
  std::string status = "ok";

  void add(const std::string& stem, const CsvTable& table, bool plot) {
    files.emplace_back(stem + ".csv", table.csv());
    if (plot) files.emplace_back(stem + ".dat", table.dat());
  }
};

double key_double(const KeyValues& kv, const std::string& key, double fallback, double lo, double hi) {
  const double v = kv.get_double(key, fallback);
  require(v >= lo && v <= hi, "config key '" + key + "': value " + num(v) + " outside [" + num(lo) + ", " + num(hi) + "]");
  return v;
}

int key_int(const KeyValues& kv, const std::string& key, long long fallback, long long lo, long long hi) {
  const long long v = kv.get_int(key, fallback);
  require(v >= lo && v <= hi, "config key '" + key + "': value " + std::to_string(v) + " outside [" +
                                  std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return static_cast<int>(v);
}

std::vector<double> key_list(const KeyValues& kv, const std::string& key, std::vector<double> fallback) {
  if (!kv.has(key)) return fallback;
  auto v = kv.get_doubles(key);
  require(!v.empty(), "config key '" + key + "': empty list");
  return v;
}

/// Dense or tridiagonal eigenvalue route for kinds that allow both.
bool use_tridiagonal(const ExperimentConfig& c) {
  const auto method = c.params.get_string("method", "dense");
  require(method == "dense" || method == "tridiagonal", "config key 'method': expected dense or tridiagonal");
  if (method == "dense") return false;
  const auto& s = c.spec;
  require(s.dist.kind() == EntryDistribution::Kind::Gaussian && s.profile.kind() == VarianceProfile::Kind::Flat,
          "config key 'method': tridiagonal needs a flat gaussian ensemble");
  require(s.symmetry == Symmetry::Hermitian ? s.diagonal_scale == 1.0 : s.diagonal_scale == 2.0,
          "config key 'method': tridiagonal needs the invariant ensemble (diag_scale = 2 for symmetric)");
  return true;
}

/// Accumulates the CDF of `values` on a grid.
std::vector<double> ecdf_on(std::vector<double> values, const std::vector<double>& grid) {
  std::sort(values.begin(), values.end());
  std::vector<double> out;
  out.reserve(grid.size());
  for (double x : grid) {
    const auto k = std::upper_bound(values.begin(), values.end(), x) - values.begin();
    out.push_back(static_cast<double>(k) / static_cast<double>(values.size()));
  }
  return out;
}

// --- experiments -----------------------------------------------------------

void run_lsc(const ExperimentConfig& c, Outputs& out) {
  const int n = c.spec.n;
  LscScanConfig cfg;
  cfg.spec = c.spec;
  cfg.energies = key_list(c.params, "energies", {-1.0, 0.0, 1.0});
  const double eta_min = key_double(c.params, "eta_min", std::pow(n, -0.9), 1e-12, 10.0);
  const double eta_max = key_double(c.params, "eta_max", std::pow(n, -0.3), eta_min, 10.0);
  cfg.etas = geometric_grid(eta_min, eta_max, key_int(c.params, "eta_points", 8, 2, 1000));
  cfg.kappa = key_double(c.params, "kappa", 0.2, 0.0, 1.0);
  cfg.samples = c.samples;
  cfg.seed = c.seed;
  cfg.workers = c.workers;
  const auto r = lsc_scan(cfg);
  CsvTable t("lsc_scan",
             {"energy", "eta", "mean_lambda", "se_lambda", "max_lambda", "mean_lambda_d", "max_lambda_d",
              "mean_lambda_o", "se_lambda_o", "max_lambda_o", "envelope", "offdiag_envelope"},
             c.spec, c.samples);
  for (const auto& cell : r.cells)
    t.row({cell.energy, cell.eta, cell.lambda.mean(), cell.lambda.stderr_of_mean(), cell.max_lambda,
           cell.lambda_d.mean(), cell.max_lambda_d, cell.lambda_o.mean(), cell.lambda_o.stderr_of_mean(),
           cell.max_lambda_o, cell.envelope, cell.offdiag_envelope});
  out.add("lsc_scan", t, c.plot_data);
  out.summary["lambda_slope"] = r.lambda_fit.slope;
  out.summary["lambda_slope_stderr"] = r.lambda_fit.slope_stderr;
  out.summary["lambda_o_slope"] = r.lambda_o_fit.slope;
  out.summary["lambda_o_slope_stderr"] = r.lambda_o_fit.slope_stderr;
}

void run_rigidity(const ExperimentConfig& c, Outputs& out) {
  const double thr = c.params.get_double("threshold", -1.0);
  const auto spectra = generate_spectra(c.spec, c.samples, c.seed, c.workers, false);
  const auto r = rigidity(spectra, thr);
  const auto gamma = classical_locations(r.n);
  CsvTable t("rigidity", {"j", "gamma", "mean_dev", "median_dev", "q90_dev", "envelope"}, c.spec, c.samples);
  for (int j = 0; j < r.n; ++j) {
    const auto u = static_cast<std::size_t>(j);
    t.row({static_cast<double>(j + 1), gamma[u], r.mean_deviation[u], r.median_deviation[u], r.q90_deviation[u],
           r.envelope[u]});
  }
  out.add("rigidity", t, c.plot_data);
  const double log_n = std::log(static_cast<double>(r.n));
  out.summary["bulk_fraction_within"] = r.bulk_fraction_within;
  out.summary["bulk_threshold"] = r.bulk_threshold;
  out.summary["n_times_q"] = r.n * r.q_estimate;
  out.summary["log_n_cubed"] = log_n * log_n * log_n;
}

void run_deloc(const ExperimentConfig& c, Outputs& out) {
  const auto ps = key_list(c.params, "p", {4.0});
  for (double p : ps) require(p >= 2.0, "config key 'p': each p must be >= 2");
  const double kappa = key_double(c.params, "kappa", 0.2, 0.0, 1.0);
  const auto spectra = generate_spectra(c.spec, c.samples, c.seed, c.workers, true);
  const auto r = delocalization(spectra, ps, kappa);
  CsvTable t("deloc", {"p", "max_scaled_norm"}, c.spec, c.samples);
  for (std::size_t i = 0; i < ps.size(); ++i) t.row({ps[i], r.max_scaled_norm[i]});
  t.row({std::numeric_limits<double>::infinity(), r.max_scaled_sup});
  out.add("deloc", t, c.plot_data);
  out.summary["max_scaled_sup"] = r.max_scaled_sup;
  out.summary["min_scaled_norm"] = r.min_scaled_norm;
  out.summary["bulk_vectors"] = r.bulk_vectors;
}

void run_repulsion(const ExperimentConfig& c, Outputs& out) {
  RepulsionConfig cfg;
  cfg.matrix_size = c.spec.n;
  cfg.beta = beta_of(c.spec.symmetry);
  cfg.n = key_int(c.params, "level_n", 2, 1, 10);
  cfg.energy = key_double(c.params, "energy", 0.0, -1.9, 1.9);
  cfg.epsilons = key_list(c.params, "epsilons", {0.05, 0.1, 0.2, 0.4});
  cfg.half_width = key_double(c.params, "half_width", 0.25, 0.0, 1.0);
  for (double e : cfg.epsilons) require(e > 0.0 && e <= 10.0, "config key 'epsilons': each must be in (0, 10]");
  const bool tri = use_tridiagonal(c);
  const double emax = *std::max_element(cfg.epsilons.begin(), cfg.epsilons.end());
  const double pad = emax / cfg.matrix_size;
  const double lo = cfg.energy - cfg.half_width - pad, hi = cfg.energy + cfg.half_width + pad;
  auto result = make_repulsion_result(cfg);
  const auto per_sample = parallel_map(static_cast<std::size_t>(c.samples), c.workers, [&](std::size_t i) {
    const auto seed = mix_seed(c.seed, i);
    if (tri) return tridiagonal_eigenvalues_in(sample_gaussian_tridiagonal(c.spec.n, c.spec.symmetry, seed), lo, hi);
    return eigendecompose(sample_matrix(c.spec, seed), false).eigenvalues;
  });
  for (const auto& ev : per_sample) accumulate_repulsion(result, cfg, ev);
  finish_repulsion(result);
  CsvTable t("repulsion",
             {"epsilon", "trials", "at_least_n", "p_n", "p_n_lower", "p_n_upper", "at_least_one", "p_one"}, c.spec,
             c.samples);
  for (const auto& p : result.points)
    t.row({p.epsilon, static_cast<double>(p.trials), static_cast<double>(p.at_least_n), p.p_n.estimate, p.p_n.lower,
           p.p_n.upper, static_cast<double>(p.at_least_one), p.p_one.estimate});
  out.add("repulsion", t, c.plot_data);
  out.summary["fitted"] = result.fitted;
  out.summary["exponent"] = result.fit.slope;
  out.summary["exponent_stderr"] = result.fit.slope_stderr;
  out.summary["target_exponent"] = result.target_exponent;
  out.summary["wegner_ratio_max"] = result.wegner_ratio_max;
}

void run_gaps(const ExperimentConfig& c, Outputs& out) {
  const double energy = key_double(c.params, "energy", 0.0, -1.9, 1.9);
  const double window = key_double(c.params, "window", default_gap_window(c.spec.n), 1e-6, 1.0);
  const double kappa = key_double(c.params, "kappa", 0.2, 0.0, 1.0);
  const auto reference = c.params.get_string("reference", "fredholm");
  require(reference == "fredholm" || reference == "surmise", "config key 'reference': expected fredholm or surmise");
  const auto spectra = generate_spectra(c.spec, c.samples, c.seed, c.workers, false);
  const auto g = unfold_gaps(spectra, energy, window, kappa);
  const auto curve = reference == "fredholm" ? fredholm_gap_cdf_curve() : surmise_cdf_curve(beta_of(c.spec.symmetry));
  const auto cdf = gap_cdf(g.gaps, curve);
  CsvTable t("gap_cdf", {"s", "empirical", "reference"}, c.spec, c.samples);
  for (std::size_t i = 0; i < cdf.grid.size(); ++i) t.row({cdf.grid[i], cdf.empirical[i], cdf.reference[i]});
  out.add("gap_cdf", t, c.plot_data);
  CsvTable h("gap_histogram", {"s", "density", "count"}, c.spec, c.samples);
  for (const auto& row : histogram(g.gaps, 0.0, 4.0, 80))
    h.row({row.center, row.density, static_cast<double>(row.count)});
  out.add("gap_histogram", h, c.plot_data);
  out.summary["gaps"] = g.count();
  out.summary["ks"] = cdf.ks;
  const auto fit = small_gap_exponent(g.gaps);
  out.summary["small_gap_exponent"] = fit.exponent;
  out.summary["small_gap_exponent_stderr"] = fit.standard_error;
}

void run_corr(const ExperimentConfig& c, Outputs& out) {
  CorrelationConfig cfg;
  cfg.k = key_int(c.params, "k", 2, 1, 3);
  cfg.energy = key_double(c.params, "energy", 0.0, -1.9, 1.9);
  cfg.half_width = key_double(c.params, "b", 0.1, 1e-6, 1.0);
  cfg.alpha_max = key_double(c.params, "alpha_max", 3.0, 0.1, 50.0);
  cfg.bin_width = key_double(c.params, "bin_width", 0.1, 1e-3, 10.0);
  const auto kernel = c.params.get_string("kernel", "hard");
  require(kernel == "hard" || kernel == "lorentzian", "config key 'kernel': expected hard or lorentzian");
  cfg.kernel = kernel == "hard" ? CorrelationKernel::Hard : CorrelationKernel::Lorentzian;
  cfg.validate(c.spec.n);
  const auto per_sample = parallel_map(static_cast<std::size_t>(c.samples), c.workers, [&](std::size_t i) {
    const auto ev = eigendecompose(sample_matrix(c.spec, mix_seed(c.seed, i)), false).eigenvalues;
    return correlation_sample(ev, c.spec.n, cfg);
  });
  const auto est = correlation_from_samples(per_sample, cfg);
  const std::size_t nb = est.centers.size();
  if (cfg.k < 3) {
    CsvTable t("correlation", {"alpha", "value", "stderr", "sine_prediction"}, c.spec, c.samples);
    for (std::size_t i = 0; i < nb; ++i) {
      const double a = est.centers[i];
      const double pred = cfg.k == 1 ? 1.0 : 1.0 - std::pow(sine_kernel(a), 2);
      t.row({a, est.value[i], est.standard_error[i], pred});
    }
    out.add("correlation", t, c.plot_data);
  } else {
    CsvTable t("correlation3", {"alpha_21", "alpha_31", "value", "stderr", "sine_prediction"}, c.spec, c.samples);
    for (std::size_t i = 0; i < nb; ++i)
      for (std::size_t j = 0; j < nb; ++j) {
        const double a = est.centers[i], b = est.centers[j];
        t.row({a, b, est.value[i * nb + j], est.standard_error[i * nb + j], sine_det({0.0, a, b})});
      }
    out.add("correlation", t, c.plot_data);
  }
  out.summary["k"] = cfg.k;
  out.summary["bins"] = est.value.size();
}

void run_edge(const ExperimentConfig& c, Outputs& out) {
  const bool tri = use_tridiagonal(c);
  const auto per_sample = parallel_map(static_cast<std::size_t>(c.samples), c.workers, [&](std::size_t i) {
    const auto seed = mix_seed(c.seed, i);
    if (tri) {
      const auto t = sample_gaussian_tridiagonal(c.spec.n, c.spec.symmetry, seed);
      return std::pair{tridiagonal_largest_eigenvalue(t), tridiagonal_smallest_eigenvalue(t)};
    }
    const auto ev = eigendecompose(sample_matrix(c.spec, seed), false).eigenvalues;
    return std::pair{ev.back(), ev.front()};
  });
  std::vector<double> top, bottom;
  for (const auto& [a, b] : per_sample) {
    top.push_back(a);
    bottom.push_back(b);
  }
  const auto r = edge_statistics(top, bottom, c.spec.n);
  const auto grid = linear_grid(-6.0, 4.0, 201);
  const auto ft = ecdf_on(r.top, grid), fb = ecdf_on(r.bottom, grid);
  const auto& tw = default_tracy_widom();
  CsvTable t("edge", {"s", "cdf_top", "cdf_bottom", "tracy_widom"}, c.spec, c.samples);
  for (std::size_t i = 0; i < grid.size(); ++i) t.row({grid[i], ft[i], fb[i], tw.interpolate(grid[i])});
  out.add("edge", t, c.plot_data);
  out.summary["ks_top"] = r.ks_top;
  out.summary["ks_bottom"] = r.ks_bottom;
  out.summary["ks_mirror"] = r.ks_mirror;
  out.summary["tail_above_3"] = r.tail_above_3;
}

void run_dbm_relax(const ExperimentConfig& c, Outputs& out) {
  RelaxationConfig cfg;
  cfg.start = c.spec;
  cfg.times = key_list(c.params, "times", {0.0, 0.01, 0.03, 0.1, 0.3, 1.0, std::numeric_limits<double>::infinity()});
  cfg.statistic = parse_relaxation_statistic(c.params.get_string("statistic", "gap-ks"));
  cfg.batch = c.samples;
  cfg.replicates = key_int(c.params, "replicates", 5, 2, 1000);
  cfg.energies = key_list(c.params, "energies", {-0.5, 0.0, 0.5});
  cfg.window = key_double(c.params, "window", 0.2, 1e-6, 1.0);
  cfg.correlation.k = 2;
  cfg.correlation.half_width = key_double(c.params, "b", 0.1, 1e-6, 1.0);
  cfg.seed = c.seed;
  cfg.workers = c.workers;
  const auto r = relaxation_scan(cfg);
  CsvTable t("relaxation_scan", {"t", "distance", "stderr"}, c.spec, c.samples);
  for (const auto& p : r.points) t.row({p.t, p.distance, p.standard_error});
  out.add("relaxation_scan", t, c.plot_data);
  out.summary["noise_floor"] = r.noise_floor.distance;
  out.summary["noise_floor_stderr"] = r.noise_floor.standard_error;
  out.summary["worst_increase_sigma"] = r.worst_increase_sigma;
}

void run_moments(const ExperimentConfig& c, Outputs& out) {
  const int kmax = key_int(c.params, "kmax", 5, 1, 18);
  const auto spectra = generate_spectra(c.spec, c.samples, c.seed, c.workers, false);
  const auto rows = trace_moments(spectra, kmax);
  CsvTable t("moments", {"k", "mean", "stderr", "catalan"}, c.spec, c.samples);
  for (const auto& r : rows) t.row({static_cast<double>(r.k), r.mean, r.standard_error, r.catalan});
  out.add("moments", t, c.plot_data);
  double worst = 0.0;
  for (const auto& r : rows)
    if (r.k % 2 == 0) worst = std::max(worst, std::abs(r.mean - r.catalan) / r.catalan);
  out.summary["max_relative_even_error"] = worst;
}

/// Spec B: the A keys overridden by every "b.<key>" entry.
EnsembleSpec second_spec(const KeyValues& kv) {
  KeyValues b;
  for (const auto& [k, v] : kv.entries())
    if (k.rfind("b.", 0) != 0) b.set(k, v);
  for (const auto& [k, v] : kv.entries())
    if (k.rfind("b.", 0) == 0) b.set(k.substr(2), v);
  return make_spec_from_config(b);
}

void run_gfc(const ExperimentConfig& c, Outputs& out) {
  GfcOptions opt;
  opt.samples = c.samples;
  opt.seed = c.seed;
  opt.workers = c.workers;
  opt.energies = key_list(c.params, "energies", {});
  opt.eta = key_double(c.params, "eta", 0.0, 0.0, 10.0);
  opt.sigmas = key_double(c.params, "sigmas", 3.0, 0.1, 100.0);
  const auto spec_b = second_spec(c.params);
  const auto r = gfc_compare(c.spec, spec_b, opt);
  CsvTable t("gfc_compare", {"energy", "mean_a", "se_a", "mean_b", "se_b", "difference", "se", "z"}, c.spec,
             c.samples);
  for (const auto& row : r.rows)
    t.row({row.energy, row.mean_a, row.se_a, row.mean_b, row.se_b, row.difference, row.se, row.z()});
  out.add("gfc_compare", t, c.plot_data);
  out.summary["delta_m3"] = r.delta_m3;
  out.summary["delta_m4"] = r.delta_m4;
  out.summary["refused"] = r.refused;
  out.summary["passed"] = r.passed;
  out.summary["max_abs_z"] = r.max_abs_z;
  out.summary["eta"] = r.eta;
  out.summary["message"] = r.message;
  out.status = r.refused ? "refused" : (r.passed ? "ok" : "failed");
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw RuntimeFailure("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& contents) {
  const auto tmp = p.string() + ".tmp";
  {
    std::ofstream o(tmp, std::ios::binary | std::ios::trunc);
    if (!o) throw RuntimeFailure("cannot write " + tmp);
    o << contents;
    if (!o) throw RuntimeFailure("write failed for " + tmp);
  }
  std::error_code ec;
  fs::rename(tmp, p, ec);
  if (ec) throw RuntimeFailure("cannot rename " + tmp + ": " + ec.message());
}

}  // namespace

// ---------------------------------------------------------------------------

ExperimentKind parse_experiment_kind(const std::string& name) {
  for (const auto& [k, s] : kind_table())
    if (s == name) return k;
  throw ValidationError("unknown experiment kind '" + name + "'");
}

std::string to_string(ExperimentKind kind) {
  for (const auto& [k, s] : kind_table())
    if (k == kind) return s;
  return "unknown";
}

const std::vector<std::string>& experiment_kind_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& e : kind_table()) v.push_back(e.second);
    return v;
  }();
  return names;
}

ExperimentConfig ExperimentConfig::from_keyvalues(ExperimentKind kind, const KeyValues& kv) {
  ExperimentConfig c;
  c.kind = kind;
  if (kv.has("kind"))
    require(parse_experiment_kind(kv.get_string("kind")) == kind, "config key 'kind': does not match the command");
  for (const auto& [k, v] : kv.entries())
    if (k != "workers" && k != "out" && k != "kind") c.params.set(k, v);
  c.spec = make_spec_from_config(kv);
  const long long samples = kv.get_int("samples", 1);
  require(samples >= 1, "config key 'samples': must be at least 1");
  require(samples <= 100000000, "config key 'samples': too large");
  c.samples = static_cast<int>(samples);
  c.seed = kv.get_u64("seed", 1);
  c.workers = key_int(kv, "workers", 1, 0, 4096);
  c.out_dir = kv.get_string("out", c.out_dir);
  return c;
}

std::string ExperimentConfig::hash() const {
  return sha256_hex("kind = " + to_string(kind) + "\n" + params.to_text() + (plot_data ? "plot_data = 1\n" : ""));
}

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw RuntimeFailure("sha256 failed");
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return os.str();
}

std::string sha256_file(const std::string& path) { return sha256_hex(read_file(path)); }

std::string code_version() { return RMTLAB_VERSION; }

std::string RunManifest::to_json() const {
  json j;
  j["schema"] = "rmtlab.manifest v1";
  j["kind"] = kind;
  j["config_hash"] = config_hash;
  j["code_version"] = code_version;
  j["started"] = started;
  j["finished"] = finished;
  j["wall_seconds"] = wall_seconds;
  j["workers"] = workers;
  j["status"] = status;
  j["files"] = json::array();
  for (const auto& f : files) j["files"].push_back({{"name", f.name}, {"sha256", f.sha256}, {"bytes", f.bytes}});
  return j.dump(2) + "\n";
}

RunManifest RunManifest::from_json(const std::string& text) {
  RunManifest m;
  try {
    const auto j = json::parse(text);
    m.kind = j.at("kind").get<std::string>();
    m.config_hash = j.at("config_hash").get<std::string>();
    m.code_version = j.at("code_version").get<std::string>();
    m.started = j.at("started").get<std::string>();
    m.finished = j.at("finished").get<std::string>();
    m.wall_seconds = j.at("wall_seconds").get<double>();
    m.workers = j.at("workers").get<int>();
    m.status = j.value("status", std::string("ok"));
    for (const auto& f : j.at("files"))
      m.files.push_back({f.at("name").get<std::string>(), f.at("sha256").get<std::string>(),
                         f.at("bytes").get<std::uint64_t>()});
  } catch (const json::exception& e) {
    throw ValidationError(std::string("manifest: ") + e.what());
  }
  return m;
}

bool verify_manifest(const std::string& out_dir, std::string* problem) {
  auto fail = [&](const std::string& why) {
    if (problem) *problem = why;
    return false;
  };
  const fs::path dir(out_dir);
  if (!fs::exists(dir / "manifest.json")) return fail("no manifest.json");
  RunManifest m;
  try {
    m = RunManifest::from_json(read_file(dir / "manifest.json"));
  } catch (const std::exception& e) {
    return fail(e.what());
  }
  for (const auto& f : m.files) {
    if (!fs::exists(dir / f.name)) return fail("missing " + f.name);
    if (sha256_file((dir / f.name).string()) != f.sha256) return fail("checksum mismatch for " + f.name);
  }
  return true;
}

std::vector<SpectralData> generate_spectra(const EnsembleSpec& spec, int samples, std::uint64_t seed, int workers,
                                           bool with_vectors) {
  require(samples >= 1, "samples: must be at least 1");
  return parallel_map(static_cast<std::size_t>(samples), workers, [&](std::size_t i) {
    const auto s = mix_seed(seed, i);
    try {
      return eigendecompose(sample_matrix(spec, s), with_vectors);
    } catch (const RuntimeFailure& e) {
      throw RuntimeFailure("sample " + std::to_string(i) + " (seed " + std::to_string(s) + "): " + e.what());
    }
  });
}

RunManifest run_experiment(const ExperimentConfig& config) {
  const fs::path dir(config.out_dir);
  const auto hash = config.hash();
  {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw RuntimeFailure("cannot create output directory " + dir.string() + ": " + ec.message());
  }
  if (fs::exists(dir / "manifest.json") && verify_manifest(dir.string())) {
    auto m = RunManifest::from_json(read_file(dir / "manifest.json"));
    if (m.config_hash == hash) {
      m.reused = true;
      return m;
    }
  }

  RunManifest m;
  m.kind = to_string(config.kind);
  m.config_hash = hash;
  m.code_version = code_version();
  m.started = utc_now();
  m.workers = resolve_workers(config.workers);
  const auto t0 = std::chrono::steady_clock::now();

  Outputs out;
  switch (config.kind) {
    case ExperimentKind::LscScan: run_lsc(config, out); break;
    case ExperimentKind::Rigidity: run_rigidity(config, out); break;
    case ExperimentKind::Deloc: run_deloc(config, out); break;
    case ExperimentKind::Repulsion: run_repulsion(config, out); break;
    case ExperimentKind::Gaps: run_gaps(config, out); break;
    case ExperimentKind::Corr: run_corr(config, out); break;
    case ExperimentKind::Edge: run_edge(config, out); break;
    case ExperimentKind::DbmRelax: run_dbm_relax(config, out); break;
    case ExperimentKind::Moments: run_moments(config, out); break;
    case ExperimentKind::GfcCompare: run_gfc(config, out); break;
  }
  out.summary["schema"] = "rmtlab.summary v1";
  out.summary["kind"] = m.kind;
  out.summary["ensemble"] = config.spec.describe();
  out.summary["ensemble_hash"] = hex16(config.spec.hash());
  out.summary["n"] = config.spec.n;
  out.summary["samples"] = config.samples;
  out.summary["seed"] = config.seed;
  out.files.emplace_back("summary.json", out.summary.dump(2) + "\n");
  out.files.emplace_back("config.txt", "kind = " + m.kind + "\n" + config.params.to_text());

  for (const auto& [name, contents] : out.files) {
    write_file(dir / name, contents);
    m.files.push_back({name, sha256_hex(contents), contents.size()});
  }
  m.status = out.status;
  m.finished = utc_now();
  m.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_file(dir / "manifest.json", m.to_json());
  return m;
}

// ---------------------------------------------------------------------------

std::vector<MomentRow> trace_moments(const std::vector<SpectralData>& samples, int kmax) {
  require(!samples.empty(), "moments: need at least one sample");
  require(kmax >= 1 && kmax <= 18, "moments: kmax must be in [1, 18]");
  const int top = 2 * kmax;
  std::vector<MeanAccumulator> acc(static_cast<std::size_t>(top));
  for (const auto& s : samples) {
    std::vector<CompensatedSum> sums(static_cast<std::size_t>(top));
    for (double l : s.eigenvalues) {
      double p = 1.0;
      for (int k = 1; k <= top; ++k) {
        p *= l;
        sums[static_cast<std::size_t>(k - 1)].add(p);
      }
    }
    for (int k = 0; k < top; ++k)
      acc[static_cast<std::size_t>(k)].add(sums[static_cast<std::size_t>(k)].value() / s.size());
  }
  std::vector<MomentRow> rows;
  for (int k = 1; k <= top; ++k) {
    const auto& a = acc[static_cast<std::size_t>(k - 1)];
    rows.push_back({k, a.mean(), a.stderr_of_mean(), k % 2 == 0 ? static_cast<double>(catalan_moment(k / 2)) : 0.0});
  }
  return rows;
}

GfcReport gfc_compare(const EnsembleSpec& a, const EnsembleSpec& b, const GfcOptions& options) {
  a.validate();
  b.validate();
  require(a.n == b.n, "gfc_compare: ensembles must have the same size");
  require(a.symmetry == b.symmetry, "gfc_compare: ensembles must have the same symmetry class");
  require(options.samples >= 2, "gfc_compare: need at least 2 samples");
  GfcReport r;
  r.n = a.n;
  r.eta = options.eta > 0.0 ? options.eta : 1.0 / a.n;
  auto gap = [](const EntryDistribution& x, const EntryDistribution& y, int k) {
    return std::abs(x.moment(k) - y.moment(k));
  };
  r.delta_m3 = std::max(gap(a.dist, b.dist, 3), gap(a.diagonal_dist, b.diagonal_dist, 3));
  r.delta_m4 = std::max(gap(a.dist, b.dist, 4), gap(a.diagonal_dist, b.diagonal_dist, 4));
  const double m3_limit = 1.0 / std::sqrt(static_cast<double>(a.n));
  if (r.delta_m3 > m3_limit || r.delta_m4 > 0.1) {
    r.refused = true;
    std::ostringstream os;
    os << "moment gate: |dm3| = " << r.delta_m3 << " (limit " << m3_limit << "), |dm4| = " << r.delta_m4
       << " (limit 0.1)";
    r.message = os.str();
    return r;
  }
  auto energies = options.energies;
  if (energies.empty()) energies = linear_grid(-1.5, 1.5, 21);
  for (double e : energies) require(std::abs(e) < 2.0, "gfc_compare: energies must lie inside (-2, 2)");

  auto run = [&](const EnsembleSpec& spec, std::uint64_t seed) {
    const auto per = parallel_map(static_cast<std::size_t>(options.samples), options.workers, [&](std::size_t i) {
      const auto sd = eigendecompose(sample_matrix(spec, mix_seed(seed, i)), false);
      std::vector<double> v;
      v.reserve(energies.size());
      for (double e : energies) v.push_back(stieltjes_empirical(sd, {e, r.eta}).imag());
      return v;
    });
    std::vector<MeanAccumulator> acc(energies.size());
    for (const auto& v : per)
      for (std::size_t j = 0; j < v.size(); ++j) acc[j].add(v[j]);
    return acc;
  };
  const auto acc_a = run(a, options.seed);
  const auto acc_b = run(b, splitmix64(options.seed ^ 0xB0B0B0B0ULL));
  r.passed = true;
  for (std::size_t j = 0; j < energies.size(); ++j) {
    GfcRow row;
    row.energy = energies[j];
    row.mean_a = acc_a[j].mean();
    row.se_a = acc_a[j].stderr_of_mean();
    row.mean_b = acc_b[j].mean();
    row.se_b = acc_b[j].stderr_of_mean();
    row.difference = row.mean_a - row.mean_b;
    row.se = std::hypot(row.se_a, row.se_b);
    r.max_abs_z = std::max(r.max_abs_z, std::abs(row.z()));
    if (std::abs(row.difference) > options.sigmas * row.se) r.passed = false;
    r.rows.push_back(row);
  }
  std::ostringstream os;
  os << (r.passed ? "all" : "not all") << " grid points within " << options.sigmas << " sigma (max |z| = " << r.max_abs_z
     << ")";
  r.message = os.str();
  return r;
}

}  // namespace rmt
