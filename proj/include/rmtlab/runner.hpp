#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rmtlab/ensemble.hpp"
#include "rmtlab/keyvalue.hpp"
#include "rmtlab/resolvent.hpp"

namespace rmt {

enum class ExperimentKind { LscScan, Rigidity, Deloc, Repulsion, Gaps, Corr, Edge, DbmRelax, Moments, GfcCompare };

ExperimentKind parse_experiment_kind(const std::string& name);
std::string to_string(ExperimentKind kind);
const std::vector<std::string>& experiment_kind_names();

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::LscScan;
  EnsembleSpec spec;
  int samples = 1;
  std::uint64_t seed = 1;
  KeyValues params;  ///< the full key set, including kind-specific keys
  std::string out_dir = "rmtlab-out";
  int workers = 1;
  bool plot_data = false;

  /// Parses and validates. Errors name the offending key.
  static ExperimentConfig from_keyvalues(ExperimentKind kind, const KeyValues& kv);
  /// SHA-256 of the canonical key-value text plus the kind.
  std::string hash() const;
};

struct OutputFile {
  std::string name;
  std::string sha256;
  std::uint64_t bytes = 0;
};

struct RunManifest {
  std::string kind;
  std::string config_hash;
  std::string code_version;
  std::string started;   ///< UTC, ISO 8601
  std::string finished;
  double wall_seconds = 0.0;
  int workers = 1;
  std::vector<OutputFile> files;
  /// "ok", or for gfc-compare "refused" (moment gate) / "failed" (some point beyond the bound).
  std::string status = "ok";
  bool reused = false;  ///< outputs were already present and verified

  std::string to_json() const;
  static RunManifest from_json(const std::string& text);
};

/// Runs the experiment, writes its CSV/JSON outputs and manifest.json into
/// config.out_dir. If a manifest with the same config hash already exists and
/// every listed file still matches its checksum, nothing is recomputed.
RunManifest run_experiment(const ExperimentConfig& config);

/// Recomputes checksums of the files listed in out_dir/manifest.json.
bool verify_manifest(const std::string& out_dir, std::string* problem = nullptr);

std::string sha256_hex(const std::string& data);
std::string sha256_file(const std::string& path);
std::string code_version();

/// Eigen-decompositions of `samples` draws with seeds mix(seed, i).
std::vector<SpectralData> generate_spectra(const EnsembleSpec& spec, int samples, std::uint64_t seed, int workers,
                                           bool with_vectors);

// ---------------------------------------------------------------------------

struct MomentRow {
  int k = 0;
  double mean = 0.0;  ///< (1/N) E Tr H^k
  double standard_error = 0.0;
  double catalan = 0.0;  ///< C_{k/2} for even k, 0 for odd k
};

/// Moments k = 1..2 kmax from eigenvalues.
std::vector<MomentRow> trace_moments(const std::vector<SpectralData>& samples, int kmax);

struct GfcOptions {
  int samples = 400;
  std::uint64_t seed = 1;
  std::vector<double> energies;  ///< empty selects 21 points on [-1.5, 1.5]
  double eta = 0.0;              ///< 0 selects 1/N
  double sigmas = 3.0;
  int workers = 1;
};

struct GfcRow {
  double energy = 0.0;
  double mean_a = 0.0, se_a = 0.0;
  double mean_b = 0.0, se_b = 0.0;
  double difference = 0.0, se = 0.0;
  double z() const { return se > 0.0 ? difference / se : 0.0; }
};

struct GfcReport {
  int n = 0;
  double eta = 0.0;
  double delta_m3 = 0.0;
  double delta_m4 = 0.0;
  bool refused = false;  ///< moment gate failed; no sampling was done
  bool passed = false;
  double max_abs_z = 0.0;
  std::vector<GfcRow> rows;
  std::string message;
};

/// Green-function comparison of E (1/N) Im Tr G(E + i eta) between two
/// ensembles of the same size. Refuses when |dm3| > N^{-1/2} or |dm4| > 0.1.
GfcReport gfc_compare(const EnsembleSpec& a, const EnsembleSpec& b, const GfcOptions& options);

}  // namespace rmt
