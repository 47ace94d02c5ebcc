#include "rmtlab/spacing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rmtlab/errors.hpp"
#include "rmtlab/quadrature.hpp"

namespace rmt {

double default_gap_window(int n) { return std::pow(static_cast<double>(n), -0.2); }

GapSample make_gap_sample(int n, double energy, double window, double kappa) {
  require(n >= 2, "gaps: N must be at least 2");
  require(kappa > 0.0 && kappa < 2.0, "gaps: kappa must lie in (0, 2)");
  require(std::abs(energy) < 2.0 - kappa, "gaps: energy outside the bulk");
  GapSample g;
  g.n = n;
  g.energy = energy;
  g.window = window > 0.0 ? window : default_gap_window(n);
  return g;
}

void append_gaps(GapSample& gaps, const std::vector<double>& eigenvalues) {
  const double scale = gaps.n * density_semicircle(gaps.energy);
  const double lo = gaps.energy - gaps.window, hi = gaps.energy + gaps.window;
  auto it = std::lower_bound(eigenvalues.begin(), eigenvalues.end(), lo);
  for (; it != eigenvalues.end() && std::next(it) != eigenvalues.end() && *std::next(it) <= hi; ++it)
    gaps.gaps.push_back(scale * (*std::next(it) - *it));
}

GapSample unfold_gaps(const std::vector<SpectralData>& samples, double energy, double window, double kappa) {
  require(!samples.empty(), "gaps: need at least one sample");
  GapSample g = make_gap_sample(samples.front().size(), energy, window, kappa);
  for (const auto& s : samples) {
    require(s.size() == g.n, "gaps: samples of different sizes");
    append_gaps(g, s.eigenvalues);
  }
  require(!g.gaps.empty(), "gaps: window contains no eigenvalue pair");
  return g;
}

GapCdfResult gap_cdf(const std::vector<double>& gaps, const ReferenceCurve& reference_cdf,
                     const std::vector<double>& grid) {
  require(gaps.size() >= 1000, "gap cdf: need at least 1000 gaps");
  require(reference_cdf.size() >= 2, "gap cdf: reference curve too short");
  const double top = *std::max_element(gaps.begin(), gaps.end());
  const double bottom = *std::min_element(gaps.begin(), gaps.end());
  require(bottom >= 0.0, "gap cdf: negative gap");
  require(top <= reference_cdf.grid.back() && bottom >= std::min(0.0, reference_cdf.grid.front()),
          "gap cdf: reference grid does not cover the data range");
  GapCdfResult r;
  r.count = gaps.size();
  auto ref = [&](double s) { return s <= reference_cdf.grid.front() ? 0.0 : reference_cdf.interpolate(s); };
  r.ks = ks_distance(gaps, ref);
  r.grid = grid.empty() ? linear_grid(0.0, 4.0, 201) : grid;
  std::vector<double> sorted = gaps;
  std::sort(sorted.begin(), sorted.end());
  for (double s : r.grid) {
    const auto below = std::upper_bound(sorted.begin(), sorted.end(), s) - sorted.begin();
    r.empirical.push_back(static_cast<double>(below) / static_cast<double>(sorted.size()));
    r.reference.push_back(ref(s));
  }
  return r;
}

ReferenceCurve fredholm_gap_cdf_curve() {
  ReferenceCurve c = default_gap_law().cdf;
  c.kind = "gap-cdf";
  return c;
}

ReferenceCurve surmise_cdf_curve(int beta) {
  ReferenceCurve c;
  c.kind = "surmise-cdf-beta" + std::to_string(beta);
  c.grid = linear_grid(0.0, 8.0, 1601);
  for (double s : c.grid) c.values.push_back(wigner_surmise_cdf(s, beta));
  return c;
}

std::vector<HistogramRow> histogram(const std::vector<double>& values, double lo, double hi, int bins) {
  require(bins >= 1 && hi > lo, "histogram: need bins >= 1 and hi > lo");
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(bins), 0);
  const double w = (hi - lo) / bins;
  for (double v : values) {
    if (v < lo || v >= hi) continue;
    const auto b = std::min(bins - 1, static_cast<int>((v - lo) / w));
    ++counts[static_cast<std::size_t>(b)];
  }
  std::vector<HistogramRow> rows;
  const double total = values.empty() ? 1.0 : static_cast<double>(values.size());
  for (int b = 0; b < bins; ++b) {
    const auto c = counts[static_cast<std::size_t>(b)];
    rows.push_back({lo + (b + 0.5) * w, static_cast<double>(c) / (total * w), c});
  }
  return rows;
}

PowerLawFit small_gap_exponent(const std::vector<double>& gaps, double lo, double hi) {
  return truncated_power_law_mle(gaps, lo, hi);
}

// ---------------------------------------------------------------------------

int CorrelationConfig::bins_per_axis() const {
  return static_cast<int>(std::lround(2.0 * alpha_max / bin_width));
}

void CorrelationConfig::validate(int n) const {
  require(k >= 1 && k <= 3, "correlation: k must be 1, 2 or 3");
  require(n >= 2, "correlation: N must be at least 2");
  require(half_width >= 10.0 / n, "correlation: b must be at least 10/N");
  require(std::abs(energy) + half_width < 2.0, "correlation: averaging window leaves the spectrum");
  require(alpha_max > 0.0 && bin_width > 0.0, "correlation: bin grid must be positive");
  // A bin narrower than 1/(10N) in energy is below the resolution floor.
  require(bin_width >= density_semicircle(energy) / 10.0, "correlation: bin width below the resolution floor");
  require(std::abs(2.0 * alpha_max / bin_width - bins_per_axis()) < 1e-9,
          "correlation: 2 alpha_max must be a multiple of the bin width");
  require(!(k == 3 && kernel == CorrelationKernel::Lorentzian), "correlation: Lorentzian kernel supports k <= 2");
}

namespace {

double lorentz_cdf(double x, double eta) { return std::atan(x / eta) / std::numbers::pi + 0.5; }

}  // namespace

std::vector<double> correlation_sample(const std::vector<double>& ev, int n, const CorrelationConfig& cfg) {
  const int nb = cfg.bins_per_axis();
  const double w = cfg.bin_width;
  const double a = cfg.alpha_max;
  const double e_lo = cfg.energy - cfg.half_width, e_hi = cfg.energy + cfg.half_width;
  const double eta = 0.5 * w;
  const bool lorentz = cfg.kernel == CorrelationKernel::Lorentzian;
  auto bin_of = [&](double x) { return static_cast<int>(std::floor((x + a) / w)); };

  if (cfg.k == 1) {
    std::vector<double> out(static_cast<std::size_t>(nb), 0.0);
    // Every E' in [e_lo, e_hi] sees lambda at alpha = N rho (lambda - E'); the
    // local scale is frozen at rho(lambda) over the tiny E' range involved.
    const double reach = (a + (lorentz ? 50.0 * eta : 0.0)) / (n * density_semicircle(std::max(std::abs(e_lo), std::abs(e_hi)))) + 1e-12;
    auto first = std::lower_bound(ev.begin(), ev.end(), e_lo - reach);
    for (auto it = first; it != ev.end() && *it <= e_hi + reach; ++it) {
      const double l = *it;
      const double scale = n * density_semicircle(l);
      if (scale <= 0.0) continue;
      const double u_lo = scale * (l - e_hi), u_hi = scale * (l - e_lo);  // alpha range seen
      for (int m = 0; m < nb; ++m) {
        const double b_lo = -a + m * w, b_hi = b_lo + w;
        double weight;
        if (lorentz) {
          const double c = b_lo + 0.5 * w;
          weight = (lorentz_cdf(u_hi - c, eta) - lorentz_cdf(u_lo - c, eta)) * w;
        } else {
          weight = std::max(0.0, std::min(u_hi, b_hi) - std::max(u_lo, b_lo));
        }
        // d E' = d alpha / scale
        out[static_cast<std::size_t>(m)] += weight / scale / (2.0 * cfg.half_width * w);
      }
    }
    return out;
  }

  const double anchors = n * (counting_semicircle(e_hi) - counting_semicircle(e_lo));
  const auto first = std::lower_bound(ev.begin(), ev.end(), e_lo);
  const auto last = std::upper_bound(ev.begin(), ev.end(), e_hi);

  if (cfg.k == 2) {
    std::vector<double> counts(static_cast<std::size_t>(nb), 0.0);
    for (auto it = first; it != last; ++it) {
      const double scale = n * density_semicircle(*it);
      const double reach = (a + (lorentz ? 50.0 * eta : 0.0)) / scale;
      const auto j0 = std::lower_bound(ev.begin(), ev.end(), *it - reach);
      for (auto jt = j0; jt != ev.end() && *jt <= *it + reach; ++jt) {
        if (jt == it) continue;
        const double d = scale * (*jt - *it);
        if (lorentz) {
          for (int m = 0; m < nb; ++m) {
            const double c = -a + (m + 0.5) * w;
            const double v = 0.5 * eta / std::numbers::pi * (1.0 / ((d - c) * (d - c) + eta * eta) + 1.0 / ((d + c) * (d + c) + eta * eta));
            counts[static_cast<std::size_t>(m)] += v * w;
          }
          continue;
        }
        if (std::abs(d) >= a) continue;
        const int m = std::clamp(bin_of(d), 0, nb - 1);
        counts[static_cast<std::size_t>(m)] += 0.5;
        counts[static_cast<std::size_t>(nb - 1 - m)] += 0.5;
      }
    }
    for (auto& c : counts) c /= anchors * w;
    return counts;
  }

  std::vector<double> counts(static_cast<std::size_t>(nb) * static_cast<std::size_t>(nb), 0.0);
  for (auto it = first; it != last; ++it) {
    const double scale = n * density_semicircle(*it);
    const double reach = a / scale;
    const auto j0 = std::lower_bound(ev.begin(), ev.end(), *it - reach);
    const auto j1 = std::upper_bound(ev.begin(), ev.end(), *it + reach);
    for (auto jt = j0; jt != j1; ++jt) {
      if (jt == it) continue;
      const double d2 = scale * (*jt - *it);
      if (std::abs(d2) >= a) continue;
      const int m2 = std::clamp(bin_of(d2), 0, nb - 1);
      for (auto lt = j0; lt != j1; ++lt) {
        if (lt == it || lt == jt) continue;
        const double d3 = scale * (*lt - *it);
        if (std::abs(d3) >= a) continue;
        const int m3 = std::clamp(bin_of(d3), 0, nb - 1);
        counts[static_cast<std::size_t>(m2) * static_cast<std::size_t>(nb) + static_cast<std::size_t>(m3)] += 1.0;
      }
    }
  }
  for (auto& c : counts) c /= anchors * w * w;
  return counts;
}

CorrelationEstimate correlation_from_samples(const std::vector<std::vector<double>>& per_sample,
                                             const CorrelationConfig& config) {
  require(!per_sample.empty(), "correlation: no samples");
  CorrelationEstimate est;
  est.k = config.k;
  est.energy = config.energy;
  est.half_width = config.half_width;
  est.samples = static_cast<int>(per_sample.size());
  const int nb = config.bins_per_axis();
  for (int m = 0; m < nb; ++m) est.centers.push_back(-config.alpha_max + (m + 0.5) * config.bin_width);
  const std::size_t cells = per_sample.front().size();
  est.value.assign(cells, 0.0);
  est.standard_error.assign(cells, 0.0);
  std::vector<double> column(per_sample.size());
  for (std::size_t c = 0; c < cells; ++c) {
    for (std::size_t s = 0; s < per_sample.size(); ++s) column[s] = per_sample[s][c];
    est.value[c] = mean_of(column);
    est.standard_error[c] = stderr_of(column);
  }
  return est;
}

CorrelationEstimate correlation_estimate(const std::vector<SpectralData>& samples, const CorrelationConfig& config) {
  require(!samples.empty(), "correlation: need at least one sample");
  const int n = samples.front().size();
  config.validate(n);
  std::vector<std::vector<double>> per;
  per.reserve(samples.size());
  for (const auto& s : samples) {
    require(s.size() == n, "correlation: samples of different sizes");
    per.push_back(correlation_sample(s.eigenvalues, n, config));
  }
  return correlation_from_samples(per, config);
}

std::vector<double> expected_correlation_gue(int n, const CorrelationConfig& cfg) {
  cfg.validate(n);
  require(cfg.k == 2 && cfg.kernel == CorrelationKernel::Hard, "expected correlation: only hard-binned k = 2");
  const int nb = cfg.bins_per_axis();
  const double e_lo = cfg.energy - cfg.half_width, e_hi = cfg.energy + cfg.half_width;
  const double anchors = n * (counting_semicircle(e_hi) - counting_semicircle(e_lo));
  const double sn = std::sqrt(static_cast<double>(n));
  const auto xs = gauss_legendre(std::max(16, static_cast<int>(std::ceil(cfg.half_width * n / 4.0))), e_lo, e_hi);
  // f(alpha) = int dx rho_2(x, x + alpha / (N rho(x))) / (N rho(x))
  auto f = [&](double alpha) {
    double sum = 0.0;
    for (std::size_t i = 0; i < xs.nodes.size(); ++i) {
      const double x = xs.nodes[i];
      const double scale = n * density_semicircle(x);
      const double y = x + alpha / scale;
      const double kxx = hermite_kernel(n, sn * x, sn * x), kyy = hermite_kernel(n, sn * y, sn * y);
      const double kxy = hermite_kernel(n, sn * x, sn * y);
      sum += xs.weights[i] * n * (kxx * kyy - kxy * kxy) / scale;
    }
    return sum;
  };
  std::vector<double> raw(static_cast<std::size_t>(nb));
  for (int m = 0; m < nb; ++m) {
    const double lo = -cfg.alpha_max + m * cfg.bin_width;
    const auto rule = gauss_legendre(8, lo, lo + cfg.bin_width);
    raw[static_cast<std::size_t>(m)] = integrate(f, rule);
  }
  std::vector<double> out(static_cast<std::size_t>(nb));
  for (int m = 0; m < nb; ++m)
    out[static_cast<std::size_t>(m)] =
        0.5 * (raw[static_cast<std::size_t>(m)] + raw[static_cast<std::size_t>(nb - 1 - m)]) / (anchors * cfg.bin_width);
  return out;
}

std::vector<double> sine_correlation_bins(const CorrelationConfig& cfg) {
  const int nb = cfg.bins_per_axis();
  std::vector<double> out;
  for (int m = 0; m < nb; ++m) {
    const double lo = -cfg.alpha_max + m * cfg.bin_width;
    const auto rule = gauss_legendre(8, lo, lo + cfg.bin_width);
    out.push_back(integrate([](double a) { return 1.0 - std::pow(sine_kernel(a), 2); }, rule) / cfg.bin_width);
  }
  return out;
}

// ---------------------------------------------------------------------------

EdgeResult edge_statistics(const std::vector<double>& largest, const std::vector<double>& smallest, int n) {
  require(largest.size() >= 500, "edge statistics: need at least 500 samples");
  require(n >= 2, "edge statistics: N must be at least 2");
  EdgeResult r;
  r.n = n;
  const double scale = std::pow(static_cast<double>(n), 2.0 / 3.0);
  for (double l : largest) r.top.push_back(scale * (l - 2.0));
  for (double l : smallest) r.bottom.push_back(scale * (-l - 2.0));
  const ReferenceCurve& tw = default_tracy_widom();
  auto f2 = [&tw](double s) { return tw.interpolate(s); };
  r.ks_top = ks_distance(r.top, f2);
  if (!r.bottom.empty()) {
    r.ks_bottom = ks_distance(r.bottom, f2);
    r.ks_mirror = ks_two_sample(r.top, r.bottom);
  }
  r.tail_above_3 = static_cast<double>(std::count_if(r.top.begin(), r.top.end(), [](double x) { return x > 3.0; })) /
                   static_cast<double>(r.top.size());
  return r;
}

EdgeResult edge_statistics(const std::vector<SpectralData>& samples) {
  require(!samples.empty(), "edge statistics: need samples");
  std::vector<double> top, bottom;
  for (const auto& s : samples) {
    top.push_back(s.eigenvalues.back());
    bottom.push_back(s.eigenvalues.front());
  }
  return edge_statistics(top, bottom, samples.front().size());
}

}  // namespace rmt
