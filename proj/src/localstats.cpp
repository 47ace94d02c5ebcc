#include "rmtlab/localstats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rmtlab/errors.hpp"
#include "rmtlab/parallel.hpp"
#include "rmtlab/rng.hpp"

namespace rmt {

std::vector<double> geometric_grid(double lo, double hi, int points) {
  require(lo > 0.0 && hi >= lo, "geometric grid: need 0 < lo <= hi");
  require(points >= 1, "geometric grid: need at least one point");
  std::vector<double> g(static_cast<std::size_t>(points));
  if (points == 1) {
    g[0] = lo;
    return g;
  }
  const double r = std::log(hi / lo) / (points - 1);
  for (int i = 0; i < points; ++i) g[static_cast<std::size_t>(i)] = lo * std::exp(r * i);
  g.back() = hi;
  return g;
}

// ---------------------------------------------------------------------------

void LscScanConfig::validate() const {
  spec.validate();
  require(samples >= 1, "lsc-scan: samples must be at least 1");
  require(!energies.empty(), "lsc-scan: empty energy grid");
  require(!etas.empty(), "lsc-scan: empty eta grid");
  require(kappa > 0.0 && kappa < 2.0, "lsc-scan: kappa must lie in (0, 2)");
  for (double eta : etas) require(eta > 0.0, "lsc-scan: eta grid must be positive");
}

std::vector<ResolventSummary> lsc_sample(const LscScanConfig& config, const SpectralData& spec) {
  std::vector<ResolventSummary> out;
  out.reserve(config.energies.size() * config.etas.size());
  for (double e : config.energies)
    for (double eta : config.etas) out.push_back(resolvent_summary(spec, cplx(e, eta)));
  return out;
}

namespace {

LscScanResult empty_scan(const LscScanConfig& config) {
  LscScanResult r;
  r.n = config.spec.n;
  const double n = config.spec.n;
  for (double e : config.energies) {
    for (double eta : config.etas) {
      LscCell c;
      c.energy = e;
      c.eta = eta;
      c.envelope = 1.0 / (n * eta);
      c.offdiag_envelope = std::sqrt(stieltjes_semicircle(cplx(e, eta)).imag() / (n * eta)) + c.envelope;
      r.cells.push_back(c);
    }
  }
  return r;
}

}  // namespace

void accumulate_lsc(LscScanResult& result, const std::vector<ResolventSummary>& per_cell) {
  require(per_cell.size() == result.cells.size(), "lsc-scan: summary count does not match the grid");
  for (std::size_t i = 0; i < per_cell.size(); ++i) {
    auto& c = result.cells[i];
    const auto& s = per_cell[i];
    c.lambda.add(s.lambda);
    c.lambda_d.add(s.lambda_d);
    c.lambda_o.add(s.lambda_o);
    c.max_lambda = std::max(c.max_lambda, s.lambda);
    c.max_lambda_d = std::max(c.max_lambda_d, s.lambda_d);
    c.max_lambda_o = std::max(c.max_lambda_o, s.lambda_o);
  }
  ++result.samples;
}

void fit_lsc_slopes(LscScanResult& result, double kappa) {
  std::vector<double> x, yl, yo;
  for (const auto& c : result.cells) {
    if (std::abs(c.energy) > 2.0 - kappa) continue;
    if (c.lambda.mean() <= 0.0 || c.lambda_o.mean() <= 0.0) continue;
    x.push_back(std::log(result.n * c.eta));
    yl.push_back(std::log(c.lambda.mean()));
    yo.push_back(std::log(c.lambda_o.mean()));
  }
  if (x.size() < 3) return;
  result.lambda_fit = ols_fit(x, yl);
  result.lambda_o_fit = ols_fit(x, yo);
}

LscScanResult lsc_scan(const LscScanConfig& config) {
  config.validate();
  LscScanResult result = empty_scan(config);
  const auto per_sample = parallel_map(static_cast<std::size_t>(config.samples), config.workers, [&](std::size_t i) {
    const auto sample = sample_matrix(config.spec, mix_seed(config.seed, i));
    return lsc_sample(config, eigendecompose(sample, true));
  });
  for (const auto& s : per_sample) accumulate_lsc(result, s);
  fit_lsc_slopes(result, config.kappa);
  return result;
}

// ---------------------------------------------------------------------------

RigidityResult rigidity(const std::vector<SpectralData>& samples, double threshold) {
  require(!samples.empty(), "rigidity: need at least one sample");
  const int n = samples.front().size();
  for (const auto& s : samples) require(s.size() == n, "rigidity: samples of different sizes");
  const auto gamma = classical_locations(n);
  RigidityResult r;
  r.n = n;
  r.samples = static_cast<int>(samples.size());
  r.bulk_threshold = threshold > 0.0 ? threshold : 5.0 * std::log(static_cast<double>(n)) / n;
  const auto un = static_cast<std::size_t>(n);
  r.mean_deviation.assign(un, 0.0);
  r.median_deviation.assign(un, 0.0);
  r.q90_deviation.assign(un, 0.0);
  r.envelope.resize(un);
  for (int j = 1; j <= n; ++j)
    r.envelope[static_cast<std::size_t>(j - 1)] =
        std::pow(static_cast<double>(std::min(j, n - j + 1)), -1.0 / 3.0) * std::pow(static_cast<double>(n), -2.0 / 3.0);

  std::vector<double> column(samples.size());
  CompensatedSum q;
  std::uint64_t bulk_total = 0, bulk_ok = 0;
  for (const auto& s : samples) {
    CompensatedSum qs;
    for (std::size_t j = 0; j < un; ++j) {
      const double d = s.eigenvalues[j] - gamma[j];
      qs.add(d * d);
    }
    q.add(qs.value());
  }
  for (std::size_t j = 0; j < un; ++j) {
    const int idx = static_cast<int>(j) + 1;
    const bool bulk = idx >= 0.1 * n && idx <= 0.9 * n;
    for (std::size_t k = 0; k < samples.size(); ++k) {
      column[k] = std::abs(samples[k].eigenvalues[j] - gamma[j]);
      if (bulk) {
        ++bulk_total;
        if (column[k] <= r.bulk_threshold) ++bulk_ok;
      }
    }
    r.mean_deviation[j] = mean_of(column);
    r.median_deviation[j] = quantile(column, 0.5);
    r.q90_deviation[j] = quantile(column, 0.9);
  }
  r.q_estimate = q.value() / static_cast<double>(samples.size());
  r.bulk_fraction_within = bulk_total ? static_cast<double>(bulk_ok) / static_cast<double>(bulk_total) : 1.0;
  return r;
}

double empirical_counting(const SpectralData& spec, double e) {
  const auto& v = spec.eigenvalues;
  return static_cast<double>(std::upper_bound(v.begin(), v.end(), e) - v.begin()) / static_cast<double>(v.size());
}

int count_in(const std::vector<double>& sorted, double a, double b) {
  if (b < a) return 0;
  return static_cast<int>(std::upper_bound(sorted.begin(), sorted.end(), b) -
                          std::lower_bound(sorted.begin(), sorted.end(), a));
}

CountingResult counting_compare(const std::vector<SpectralData>& samples, const std::vector<double>& energies) {
  require(!samples.empty(), "counting: need at least one sample");
  require(!energies.empty(), "counting: empty energy grid");
  const auto [lo_it, hi_it] = std::minmax_element(energies.begin(), energies.end());
  const double lo = *lo_it, hi = *hi_it;
  CountingResult r;
  for (const auto& s : samples) {
    const double n = s.size();
    double sup = 0.0;
    for (double e : energies) sup = std::max(sup, std::abs(empirical_counting(s, e) - counting_semicircle(e)));
    for (std::size_t k = 0; k < s.eigenvalues.size(); ++k) {
      const double l = s.eigenvalues[k];
      if (l < lo || l > hi) continue;
      const double nsc = counting_semicircle(l);
      // Left limit k/N and value at the jump (k+1)/N; ties only widen the jump.
      sup = std::max({sup, std::abs(static_cast<double>(k) / n - nsc), std::abs(empirical_counting(s, l) - nsc)});
    }
    r.sup_deviation.push_back(sup);
    r.scaled.push_back(n * sup);
  }
  r.median_scaled = quantile(r.scaled, 0.5);
  return r;
}

// ---------------------------------------------------------------------------

double scaled_lp_norm(const std::vector<double>& abs_entries, double p) {
  require(!abs_entries.empty(), "lp norm: empty vector");
  require(p >= 1.0, "lp norm: p must be at least 1");
  const double n = static_cast<double>(abs_entries.size());
  if (std::isinf(p)) return std::sqrt(n) * *std::max_element(abs_entries.begin(), abs_entries.end());
  double s = 0.0;
  for (double a : abs_entries) s += std::pow(a, p);
  return std::pow(n, 0.5 - 1.0 / p) * std::pow(s, 1.0 / p);
}

DelocResult delocalization(const std::vector<SpectralData>& samples, const std::vector<double>& p_values,
                           double kappa) {
  require(!samples.empty(), "delocalization: need at least one sample");
  require(!p_values.empty(), "delocalization: need at least one p");
  require(kappa > 0.0 && kappa < 2.0, "delocalization: kappa must lie in (0, 2)");
  DelocResult r;
  r.p_values = p_values;
  r.max_scaled_norm.assign(p_values.size(), 0.0);
  r.min_scaled_norm = std::numeric_limits<double>::infinity();
  for (const auto& s : samples) {
    require(s.has_vectors(), "delocalization: eigenvectors missing (seed " + std::to_string(s.seed) + ")");
    const int n = s.size();
    std::vector<std::vector<double>> norms;
    std::vector<double> sups;
    std::vector<double> abs_entries(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
      if (std::abs(s.eigenvalues[static_cast<std::size_t>(k)]) > 2.0 - kappa) continue;
      for (int i = 0; i < n; ++i) abs_entries[static_cast<std::size_t>(i)] = std::sqrt(s.weight(i, k));
      std::vector<double> row;
      for (std::size_t pi = 0; pi < p_values.size(); ++pi) {
        const double v = scaled_lp_norm(abs_entries, p_values[pi]);
        row.push_back(v);
        r.max_scaled_norm[pi] = std::max(r.max_scaled_norm[pi], v);
        r.min_scaled_norm = std::min(r.min_scaled_norm, v);
      }
      const double sup = scaled_lp_norm(abs_entries, std::numeric_limits<double>::infinity());
      r.max_scaled_sup = std::max(r.max_scaled_sup, sup);
      norms.push_back(std::move(row));
      sups.push_back(sup);
      ++r.bulk_vectors;
    }
    r.scaled_norms.push_back(std::move(norms));
    r.scaled_sup.push_back(std::move(sups));
  }
  return r;
}

// ---------------------------------------------------------------------------

RepulsionResult make_repulsion_result(const RepulsionConfig& config) {
  require(config.matrix_size >= 2, "repulsion: matrix size must be at least 2");
  require(config.beta == 1 || config.beta == 2, "repulsion: beta must be 1 or 2");
  require(config.n >= 1, "repulsion: n must be positive");
  require(!config.epsilons.empty(), "repulsion: empty epsilon list");
  for (double e : config.epsilons) require(e > 0.0 && e <= 1.0, "repulsion: epsilon must lie in (0, 1]");
  require(config.half_width >= 0.0, "repulsion: negative half width");
  require(std::abs(config.energy) + config.half_width < 2.0, "repulsion: window leaves the spectrum");
  RepulsionResult r;
  r.n = config.n;
  r.beta = config.beta;
  r.target_exponent = config.beta == 2 ? config.n * config.n : config.n * (config.n + 1) / 2.0;
  for (double e : config.epsilons) {
    RepulsionPoint p;
    p.epsilon = e;
    r.points.push_back(p);
  }
  return r;
}

void accumulate_repulsion(RepulsionResult& result, const RepulsionConfig& config,
                          const std::vector<double>& eigenvalues) {
  const double n = config.matrix_size;
  for (auto& p : result.points) {
    const double w = p.epsilon / n;
    const int windows = config.half_width > 0.0 ? std::max(1, static_cast<int>(std::floor(2.0 * config.half_width / w))) : 1;
    const double start = config.energy - 0.5 * windows * w;
    for (int k = 0; k < windows; ++k) {
      const double a = start + k * w;
      // Half-open windows so that adjacent windows never share a point.
      const auto first = std::lower_bound(eigenvalues.begin(), eigenvalues.end(), a);
      const auto last = std::lower_bound(first, eigenvalues.end(), a + w);
      const auto count = last - first;
      ++p.trials;
      if (count >= config.n) ++p.at_least_n;
      if (count >= 1) ++p.at_least_one;
    }
  }
}

void finish_repulsion(RepulsionResult& result) {
  std::vector<double> x, y;
  result.fitted = true;
  result.wegner_ratio_max = 0.0;
  result.wegner_ratio_min = std::numeric_limits<double>::infinity();
  for (auto& p : result.points) {
    if (p.trials == 0) continue;
    p.p_n = clopper_pearson(p.at_least_n, p.trials);
    p.p_one = clopper_pearson(p.at_least_one, p.trials);
    const double ratio = p.p_one.estimate / p.epsilon;
    result.wegner_ratio_max = std::max(result.wegner_ratio_max, ratio);
    result.wegner_ratio_min = std::min(result.wegner_ratio_min, ratio);
    if (p.at_least_n == 0) {
      // Never extrapolate below 1 / trials.
      result.fitted = false;
      continue;
    }
    x.push_back(std::log(p.epsilon));
    y.push_back(std::log(p.p_n.estimate));
  }
  if (result.fitted && x.size() >= 3) result.fit = ols_fit(x, y);
  else result.fitted = false;
}

RepulsionResult level_repulsion(const std::vector<SpectralData>& samples, const RepulsionConfig& config) {
  RepulsionResult r = make_repulsion_result(config);
  for (const auto& s : samples) {
    require(s.size() == config.matrix_size, "repulsion: sample size differs from the configured N");
    accumulate_repulsion(r, config, s.eigenvalues);
  }
  finish_repulsion(r);
  return r;
}

// ---------------------------------------------------------------------------

std::vector<double> overlap_variables(const MatrixSample& sample, int k) {
  const int n = sample.size();
  require(n >= 3, "overlaps: N must be at least 3");
  require(k >= 0 && k < n, "overlaps: column index out of range");
  const Eigen::MatrixXcd h = sample.as_complex();
  Eigen::MatrixXcd minor(n - 1, n - 1);
  Eigen::VectorXcd a(n - 1);
  for (int i = 0, r = 0; i < n; ++i) {
    if (i == k) continue;
    a(r) = h(i, k);
    for (int j = 0, c = 0; j < n; ++j) {
      if (j == k) continue;
      minor(r, c++) = h(i, j);
    }
    ++r;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(minor);
  if (es.info() != Eigen::Success)
    throw RuntimeFailure("overlaps: eigensolver did not converge (seed " + std::to_string(sample.seed) + ")");
  const Eigen::VectorXcd proj = es.eigenvectors().adjoint() * a;
  std::vector<double> xi(static_cast<std::size_t>(n - 1));
  for (int i = 0; i < n - 1; ++i) xi[static_cast<std::size_t>(i)] = n * std::norm(proj(i));
  return xi;
}

OverlapResult overlap_stats(const std::vector<MatrixSample>& samples, int k) {
  require(!samples.empty(), "overlaps: need at least one sample");
  OverlapResult r;
  MeanAccumulator acc;
  for (const auto& s : samples) {
    for (double x : overlap_variables(s, k)) {
      r.xi.push_back(x);
      acc.add(x);
    }
  }
  r.mean = acc.mean();
  r.variance = acc.variance();
  const bool hermitian = samples.front().is_complex();
  r.ks_to_gaussian_law = ks_distance(r.xi, [hermitian](double x) {
    if (x <= 0.0) return 0.0;
    return hermitian ? -std::expm1(-x) : std::erf(std::sqrt(0.5 * x));
  });
  return r;
}

// ---------------------------------------------------------------------------

LdpReport ldp_check(const EntryDistribution& dist, const LdpConfig& config) {
  require(config.n >= 2, "ldp: N must be at least 2");
  require(config.trials >= 1, "ldp: trials must be positive");
  require(config.alpha > 0.0, "ldp: alpha must be positive");
  require(config.offdiag_band >= 0, "ldp: band must be nonnegative");
  const int n = config.n;
  const auto un = static_cast<std::size_t>(n);
  const int band = std::min(config.offdiag_band, n - 1);
  const CounterRng frozen(config.seed, 0xA11);
  std::vector<double> a_coef(un), b_diag(un), b_off(un * static_cast<std::size_t>(2 * band) + 1);
  double a_norm = 0.0, bd_norm = 0.0, bo_norm = 0.0;
  for (int i = 0; i < n; ++i) {
    a_coef[static_cast<std::size_t>(i)] = frozen.normal(0, static_cast<std::uint64_t>(i));
    b_diag[static_cast<std::size_t>(i)] = frozen.normal(1, static_cast<std::uint64_t>(i));
    a_norm += a_coef[static_cast<std::size_t>(i)] * a_coef[static_cast<std::size_t>(i)];
    bd_norm += b_diag[static_cast<std::size_t>(i)] * b_diag[static_cast<std::size_t>(i)];
  }
  // B_{i, i+d} for d in [-band, band] \ {0}, wrapped periodically.
  for (int i = 0; i < n; ++i) {
    for (int d = 0; d < 2 * band; ++d) {
      const double v = frozen.normal(2, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(d));
      b_off[static_cast<std::size_t>(i) * static_cast<std::size_t>(2 * band) + static_cast<std::size_t>(d)] = v;
      bo_norm += v * v;
    }
  }
  const double logn = std::log(static_cast<double>(n));
  const double t_lin = std::pow(logn, 1.5 + config.alpha) * std::sqrt(a_norm);
  const double t_diag = std::pow(logn, 1.5 + 2.0 * config.alpha) * std::sqrt(bd_norm);
  const double t_off = std::pow(logn, 3.0 + 2.0 * config.alpha) * std::sqrt(bo_norm);

  struct Ratios {
    double lin, diag, off;
  };
  const auto ratios = parallel_map(config.trials, config.workers, [&](std::size_t t) {
    const CounterRng rng(mix_seed(config.seed, t), 0xA12);
    std::vector<double> x(un);
    for (std::size_t i = 0; i < un; ++i) x[i] = dist.sample(rng, t, i, 0);
    double lin = 0.0, diag = 0.0, off = 0.0;
    for (std::size_t i = 0; i < un; ++i) {
      lin += x[i] * a_coef[i];
      diag += (x[i] * x[i] - 1.0) * b_diag[i];
      const double* row = &b_off[i * static_cast<std::size_t>(2 * band)];
      double acc = 0.0;
      for (int d = 0; d < 2 * band; ++d) {
        const int off_d = d < band ? d - band : d - band + 1;  // -band..-1, 1..band
        const auto j = static_cast<std::size_t>(((static_cast<int>(i) + off_d) % n + n) % n);
        acc += row[d] * x[j];
      }
      off += x[i] * acc;
    }
    return Ratios{std::abs(lin) / t_lin, std::abs(diag) / t_diag, t_off > 0.0 ? std::abs(off) / t_off : 0.0};
  });

  LdpReport r;
  r.n = n;
  r.alpha = config.alpha;
  for (const auto& q : ratios) {
    auto tally = [](LdpForm& f, double ratio) {
      ++f.trials;
      if (ratio > 1.0) ++f.exceed;
      f.max_ratio = std::max(f.max_ratio, ratio);
    };
    tally(r.linear, q.lin);
    tally(r.diagonal, q.diag);
    tally(r.offdiagonal, q.off);
  }
  for (LdpForm* f : {&r.linear, &r.diagonal, &r.offdiagonal}) f->frequency = clopper_pearson(f->exceed, f->trials);
  return r;
}

}  // namespace rmt
