#include "rmtlab/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "rmtlab/errors.hpp"

namespace rmt {
namespace {

constexpr std::uint64_t kStreamEntries = 0x11;
constexpr std::uint64_t kStreamGaussianPart = 0x22;
constexpr std::uint64_t kStreamCovariance = 0x33;

double gaussian_moment(int k) {
  switch (k) {
    case 0: return 1.0;
    case 2: return 1.0;
    case 4: return 3.0;
    default: return 0.0;
  }
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

Symmetry symmetry_from_beta(int beta) {
  if (beta == 1) return Symmetry::Symmetric;
  if (beta == 2) return Symmetry::Hermitian;
  throw ValidationError("unsupported beta " + std::to_string(beta) + " (expected 1 or 2)");
}

std::string to_string(Symmetry s) { return s == Symmetry::Symmetric ? "symmetric" : "hermitian"; }

Symmetry parse_symmetry(const std::string& name) {
  if (name == "symmetric" || name == "real" || name == "goe" || name == "1") return Symmetry::Symmetric;
  if (name == "hermitian" || name == "complex" || name == "gue" || name == "2") return Symmetry::Hermitian;
  throw ValidationError("unknown symmetry class: " + name);
}

// ---------------------------------------------------------------------------
// EntryDistribution

EntryDistribution EntryDistribution::gaussian() { return EntryDistribution{}; }

EntryDistribution EntryDistribution::bernoulli() {
  EntryDistribution d;
  d.kind_ = Kind::Bernoulli;
  d.points_ = {-1.0, 1.0};
  d.probs_ = {0.5, 0.5};
  d.cdf_ = {0.5, 1.0};
  return d;
}

EntryDistribution EntryDistribution::discrete(std::vector<double> points, std::vector<double> probs) {
  require(!points.empty() && points.size() == probs.size(), "discrete law: points and probabilities must match");
  double total = 0.0;
  for (double p : probs) {
    require(p >= 0.0 && std::isfinite(p), "discrete law: probabilities must be nonnegative");
    total += p;
  }
  require(std::abs(total - 1.0) <= 1e-12, "discrete law: probabilities must sum to 1");
  EntryDistribution d;
  d.kind_ = Kind::Discrete;
  d.points_ = std::move(points);
  d.probs_ = std::move(probs);
  double acc = 0.0;
  for (double p : d.probs_) d.cdf_.push_back(acc += p);
  d.cdf_.back() = 1.0;
  const auto m = d.moments();
  require(std::abs(m[1]) <= 1e-12, "discrete law: mean must be 0");
  require(std::abs(m[2] - 1.0) <= 1e-12, "discrete law: variance must be 1");
  return d;
}

EntryDistribution EntryDistribution::gaussian_convolved(EntryDistribution base, double gamma) {
  require(gamma >= 0.0 && gamma <= 1.0, "gaussian-convolved law: gamma must lie in [0, 1]");
  EntryDistribution d;
  d.kind_ = Kind::GaussianConvolved;
  d.gamma_ = gamma;
  d.base_ = std::make_shared<const EntryDistribution>(std::move(base));
  return d;
}

const EntryDistribution& EntryDistribution::base() const {
  if (!base_) throw ValidationError("entry distribution has no base law");
  return *base_;
}

std::array<double, 5> EntryDistribution::moments() const {
  std::array<double, 5> m{};
  switch (kind_) {
    case Kind::Gaussian:
      for (int k = 0; k <= 4; ++k) m[k] = gaussian_moment(k);
      break;
    case Kind::Bernoulli:
    case Kind::Discrete:
      for (std::size_t i = 0; i < points_.size(); ++i) {
        double xp = 1.0;
        for (int k = 0; k <= 4; ++k) {
          m[k] += probs_[i] * xp;
          xp *= points_[i];
        }
      }
      break;
    case Kind::GaussianConvolved: {
      const auto b = base_->moments();
      const double a = std::sqrt(1.0 - gamma_);
      const double g = std::sqrt(gamma_);
      for (int k = 0; k <= 4; ++k) {
        double s = 0.0;
        for (int j = 0; j <= k; ++j)
          s += binomial(k, j) * std::pow(a, j) * b[j] * std::pow(g, k - j) * gaussian_moment(k - j);
        m[k] = s;
      }
      break;
    }
  }
  return m;
}

double EntryDistribution::sample(const CounterRng& rng, std::uint64_t a, std::uint64_t b, std::uint64_t lane) const {
  switch (kind_) {
    case Kind::Gaussian:
      return rng.normal(a, b, lane);
    case Kind::Bernoulli:
      return rng.uniform(a, b, 2 * lane) < 0.5 ? -1.0 : 1.0;
    case Kind::Discrete: {
      const double u = rng.uniform(a, b, 2 * lane);
      const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
      const auto idx = std::min<std::size_t>(static_cast<std::size_t>(it - cdf_.begin()), points_.size() - 1);
      return points_[idx];
    }
    case Kind::GaussianConvolved: {
      const double x = base_->sample(rng, a, b, 4 * lane + 2);
      const double g = rng.normal(a, b, 4 * lane + 3);
      return std::sqrt(1.0 - gamma_) * x + std::sqrt(gamma_) * g;
    }
  }
  return 0.0;
}

std::string EntryDistribution::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind_) {
    case Kind::Gaussian: os << "gaussian"; break;
    case Kind::Bernoulli: os << "bernoulli"; break;
    case Kind::Discrete:
      os << "discrete{";
      for (std::size_t i = 0; i < points_.size(); ++i) os << (i ? ";" : "") << points_[i] << ":" << probs_[i];
      os << "}";
      break;
    case Kind::GaussianConvolved: os << "convolved{" << base_->describe() << "," << gamma_ << "}"; break;
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Variance profiles

double BandFunction::operator()(double x) const {
  if (values.size() < 2 || x < x_min || x > x_max) return 0.0;
  const double h = (x_max - x_min) / static_cast<double>(values.size() - 1);
  const double pos = (x - x_min) / h;
  const auto i = std::min<std::size_t>(static_cast<std::size_t>(pos), values.size() - 2);
  const double frac = pos - static_cast<double>(i);
  return values[i] * (1.0 - frac) + values[i + 1] * frac;
}

double BandFunction::integral() const {
  if (values.size() < 2) return 0.0;
  const double h = (x_max - x_min) / static_cast<double>(values.size() - 1);
  double s = 0.5 * (values.front() + values.back());
  for (std::size_t i = 1; i + 1 < values.size(); ++i) s += values[i];
  return s * h;
}

VarianceProfile VarianceProfile::flat(int n) {
  require(n >= 2, "variance profile: N must be at least 2");
  VarianceProfile p;
  p.kind_ = Kind::Flat;
  p.n_ = n;
  p.spread_ = n;
  return p;
}

VarianceProfile VarianceProfile::band(int n, double width, const BandFunction& f) {
  require(n >= 2, "variance profile: N must be at least 2");
  require(width > 0.0, "band profile: width must be positive");
  require(width >= 1.0 && width <= n, "band profile: width must lie in [1, N]");
  require(f.x_max > f.x_min && f.values.size() >= 2, "band profile: bad function grid");
  for (double v : f.values) require(v >= 0.0 && std::isfinite(v), "band profile: profile values must be nonnegative");
  require(std::abs(f.integral() - 1.0) <= 1e-6, "band profile: profile must integrate to 1 on its grid");

  VarianceProfile p;
  p.kind_ = Kind::Band;
  p.n_ = n;
  p.width_ = width;
  p.sigma2_.resize(n, n);
  // Depends only on the periodic distance, so Sigma is circulant; equal row
  // sums then make the renormalized matrix symmetric and doubly stochastic.
  std::vector<double> by_offset(static_cast<std::size_t>(n));
  double row_sum = 0.0;
  for (int d = 0; d < n; ++d) {
    int periodic = d;
    if (2 * periodic > n) periodic -= n;  // [d]_N in (-N/2, N/2]
    const double v = f(periodic / (2.0 * width)) / (2.0 * width);
    by_offset[static_cast<std::size_t>(d)] = v;
    row_sum += v;
  }
  require(row_sum > 0.0, "band profile: profile vanishes on the lattice");
  for (auto& v : by_offset) v /= row_sum;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const int d = ((j - i) % n + n) % n;
      const int dsym = std::min(d, n - d);
      // Use the symmetric offset so sigma_ij == sigma_ji bitwise.
      p.sigma2_(i, j) = by_offset[static_cast<std::size_t>(dsym)];
    }
  p.spread_ = 1.0 / p.sigma2_.maxCoeff();
  return p;
}

VarianceProfile VarianceProfile::explicit_matrix(const Eigen::MatrixXd& sigma2) {
  const auto n = static_cast<int>(sigma2.rows());
  require(n >= 2 && sigma2.cols() == n, "explicit profile: matrix must be square with N >= 2");
  for (int i = 0; i < n; ++i) {
    double row = 0.0;
    for (int j = 0; j < n; ++j) {
      require(std::isfinite(sigma2(i, j)) && sigma2(i, j) >= 0.0, "explicit profile: entries must be nonnegative");
      require(sigma2(i, j) == sigma2(j, i), "explicit profile: matrix must be symmetric");
      row += sigma2(i, j);
    }
    if (std::abs(row - 1.0) > 1e-10)
      throw ValidationError("explicit profile: row " + std::to_string(i) + " sums to " + std::to_string(row) +
                            ", expected 1");
  }
  VarianceProfile p;
  p.kind_ = Kind::Explicit;
  p.n_ = n;
  p.sigma2_ = sigma2;
  p.spread_ = 1.0 / sigma2.maxCoeff();
  return p;
}

Eigen::MatrixXd VarianceProfile::matrix() const {
  if (kind_ == Kind::Flat) return Eigen::MatrixXd::Constant(n_, n_, 1.0 / n_);
  return sigma2_;
}

VarianceProfile build_variance_profile(const std::string& kind, int n, double band_width, const BandFunction& f) {
  if (kind == "flat") return VarianceProfile::flat(n);
  if (kind == "band") return VarianceProfile::band(n, band_width, f);
  throw ValidationError("unknown variance profile kind: " + kind);
}

// ---------------------------------------------------------------------------
// Specs

void EnsembleSpec::validate() const {
  require(n >= 2, "ensemble: N must be at least 2");
  require(profile.size() == n, "ensemble: profile dimension must equal N");
  require(diagonal_scale >= 0.0 && std::isfinite(diagonal_scale), "ensemble: diagonal_scale must be nonnegative");
}

std::string EnsembleSpec::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << "n=" << n << ";symmetry=" << to_string(symmetry) << ";dist=" << dist.describe()
     << ";diag=" << diagonal_dist.describe() << ";diag_scale=" << diagonal_scale << ";profile=";
  switch (profile.kind()) {
    case VarianceProfile::Kind::Flat: os << "flat"; break;
    case VarianceProfile::Kind::Band: os << "band(" << profile.band_width() << ")"; break;
    case VarianceProfile::Kind::Explicit: os << "explicit"; break;
  }
  return os.str();
}

std::uint64_t EnsembleSpec::hash() const { return fnv1a(describe()); }

EnsembleSpec make_wigner(int n, Symmetry symmetry, const EntryDistribution& dist) {
  EnsembleSpec s;
  s.n = n;
  s.symmetry = symmetry;
  s.dist = dist;
  s.diagonal_dist = dist;
  s.profile = VarianceProfile::flat(n);
  s.validate();
  return s;
}

EnsembleSpec make_gue(int n) { return make_wigner(n, Symmetry::Hermitian, EntryDistribution::gaussian()); }

EnsembleSpec make_goe(int n) {
  auto s = make_wigner(n, Symmetry::Symmetric, EntryDistribution::gaussian());
  s.diagonal_scale = 2.0;
  return s;
}

EnsembleSpec make_spec_from_config(const KeyValues& kv) {
  const int n = static_cast<int>(kv.get_int("n"));
  require(n >= 2, "config: n must be at least 2");
  const auto symmetry = parse_symmetry(kv.get_string("symmetry", "hermitian"));
  const auto dist_name = kv.get_string("dist", "gaussian");
  EntryDistribution dist;
  if (dist_name == "gaussian") {
    dist = EntryDistribution::gaussian();
  } else if (dist_name == "bernoulli") {
    dist = EntryDistribution::bernoulli();
  } else if (dist_name == "matched") {
    dist = match_four_moments(kv.get_double("m3", 0.0), kv.get_double("m4", 3.0), kv.get_double("gamma", 0.0));
  } else {
    throw ValidationError("config: unknown dist '" + dist_name + "'");
  }
  EnsembleSpec s;
  s.n = n;
  s.symmetry = symmetry;
  s.dist = dist;
  s.diagonal_dist = dist;
  s.profile = build_variance_profile(kv.get_string("profile", "flat"), n, kv.get_double("band_width", 0.0));
  s.diagonal_scale = kv.get_double("diag_scale", 1.0);
  s.validate();
  return s;
}

KeyValues spec_to_config(const EnsembleSpec& spec, std::uint64_t seed) {
  KeyValues kv;
  auto num = [](double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
  };
  kv.set("n", std::to_string(spec.n));
  kv.set("symmetry", to_string(spec.symmetry));
  switch (spec.dist.kind()) {
    case EntryDistribution::Kind::Gaussian: kv.set("dist", "gaussian"); break;
    case EntryDistribution::Kind::Bernoulli: kv.set("dist", "bernoulli"); break;
    case EntryDistribution::Kind::GaussianConvolved:
    case EntryDistribution::Kind::Discrete: {
      // Round-trips through the moment matcher; an arbitrary discrete law is
      // not expressible with the documented keys. Without recorded targets
      // they are recovered from the three-point base (exact up to rounding):
      // m3 = mu3 (1 - g)^{3/2} and m4 - m3^2 = mu4 - mu3^2.
      const bool conv = spec.dist.kind() == EntryDistribution::Kind::GaussianConvolved;
      const double g = conv ? spec.dist.gamma() : 0.0;
      const auto mu = (conv ? spec.dist.base() : spec.dist).moments();
      double m3 = mu[3] * std::pow(1.0 - g, 1.5);
      double m4 = m3 * m3 + mu[4] - mu[3] * mu[3];
      if (const auto& t = spec.dist.matched_targets()) std::tie(m3, m4) = *t;
      kv.set("dist", "matched");
      kv.set("m3", num(m3));
      kv.set("m4", num(m4));
      kv.set("gamma", num(g));
      break;
    }
  }
  switch (spec.profile.kind()) {
    case VarianceProfile::Kind::Flat: kv.set("profile", "flat"); break;
    case VarianceProfile::Kind::Band:
      kv.set("profile", "band");
      kv.set("band_width", num(spec.profile.band_width()));
      break;
    case VarianceProfile::Kind::Explicit:
      throw ValidationError("config: explicit variance profiles cannot be serialized to key-value form");
  }
  if (spec.diagonal_scale != 1.0) kv.set("diag_scale", num(spec.diagonal_scale));
  kv.set("seed", std::to_string(seed));
  return kv;
}

// ---------------------------------------------------------------------------
// Sampling

Eigen::MatrixXcd MatrixSample::as_complex() const {
  if (is_complex()) return complex;
  return real.cast<std::complex<double>>();
}

double MatrixSample::hermiticity_defect() const {
  const int n = size();
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) worst = std::max(worst, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
  return worst;
}

MatrixSample sample_matrix(const EnsembleSpec& spec, std::uint64_t seed) {
  spec.validate();
  const int n = spec.n;
  const CounterRng rng(seed, kStreamEntries);
  MatrixSample out;
  out.symmetry = spec.symmetry;
  out.seed = seed;
  out.spec = std::make_shared<const EnsembleSpec>(spec);
  const double inv_sqrt2 = std::numbers::sqrt2 / 2.0;
  if (spec.symmetry == Symmetry::Symmetric) {
    out.real.resize(n, n);
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < j; ++i) {
        const double h = std::sqrt(spec.profile.variance(i, j)) * spec.dist.sample(rng, i, j, 0);
        out.real(i, j) = h;
        out.real(j, i) = h;
      }
      out.real(j, j) = std::sqrt(spec.diagonal_scale * spec.profile.variance(j, j)) * spec.diagonal_dist.sample(rng, j, j, 0);
    }
  } else {
    out.complex.resize(n, n);
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < j; ++i) {
        const double s = std::sqrt(spec.profile.variance(i, j)) * inv_sqrt2;
        const std::complex<double> h(s * spec.dist.sample(rng, i, j, 0), s * spec.dist.sample(rng, i, j, 1));
        out.complex(i, j) = h;
        out.complex(j, i) = std::conj(h);
      }
      out.complex(j, j) = std::sqrt(spec.diagonal_scale * spec.profile.variance(j, j)) * spec.diagonal_dist.sample(rng, j, j, 0);
    }
  }
  return out;
}

MatrixSample sample_covariance_matrix(int m, int n, const EntryDistribution& dist, std::uint64_t seed, Symmetry symmetry) {
  require(m >= 1 && n >= 1, "covariance matrix: dimensions must be positive");
  const CounterRng rng(seed, kStreamCovariance);
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  MatrixSample out;
  out.symmetry = symmetry;
  out.seed = seed;
  if (symmetry == Symmetry::Symmetric) {
    Eigen::MatrixXd x(m, n);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < m; ++i) x(i, j) = scale * dist.sample(rng, i, j, 0);
    out.real = x.transpose() * x;
    out.real = 0.5 * (out.real + out.real.transpose()).eval();
  } else {
    Eigen::MatrixXcd x(m, n);
    const double s = scale * std::numbers::sqrt2 / 2.0;
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < m; ++i) x(i, j) = {s * dist.sample(rng, i, j, 0), s * dist.sample(rng, i, j, 1)};
    out.complex = x.adjoint() * x;
    out.complex = 0.5 * (out.complex + out.complex.adjoint()).eval();
  }
  return out;
}

double largest_matching_gamma(double m3, double m4) {
  const double slack = kMatchingFourthMomentCap - m4 + m3 * m3;
  if (m3 == 0.0) return 1.0;
  if (slack <= 0.0) return 0.0;
  return 1.0 - std::cbrt(m3 * m3 / slack);
}

EntryDistribution match_four_moments(double m3, double m4, double gamma) {
  require(std::isfinite(m3) && std::isfinite(m4) && std::isfinite(gamma), "moment matching: non-finite input");
  const double excess = m4 - m3 * m3 - 1.0;
  if (excess < 0.0) throw ValidationError("moment matching: m4 - m3^2 - 1 must be nonnegative");
  require(m4 <= kMatchingFourthMomentCap, "moment matching: m4 exceeds the cap 100");
  require(gamma >= 0.0, "moment matching: gamma must be nonnegative");
  if (gamma >= largest_matching_gamma(m3, m4))
    throw ValidationError("moment matching: gamma too large for a valid three-point law");

  // Target law xi_gamma: moments (0, 1, mu3, mu4) with mu4 - mu3^2 = m4 - m3^2.
  const double mu3 = m3 / std::pow(1.0 - gamma, 1.5);
  const double mu4 = mu3 * mu3 + (m4 - m3 * m3);
  // Support {u, 0, v}: u, v are the roots of x^2 - mu3 x - (mu4 - mu3^2),
  // which makes E[X (X - u)(X - v)] and E[X^2 (X - u)(X - v)] vanish.
  const double r = mu4 - mu3 * mu3;  // >= 1
  const double disc = std::sqrt(mu3 * mu3 + 4.0 * r);
  const double u = 0.5 * (mu3 - disc);
  const double v = 0.5 * (mu3 + disc);
  const double wu = 1.0 / (u * (u - v));
  const double wv = 1.0 / (v * (v - u));
  const double w0 = (r - 1.0) / r;

  std::vector<double> points;
  std::vector<double> probs;
  points.push_back(u);
  probs.push_back(wu);
  if (w0 > 0.0) {
    points.push_back(0.0);
    probs.push_back(w0);
  }
  points.push_back(v);
  probs.push_back(wv);
  // Absorb the last rounding ulp into the largest weight.
  double total = 0.0;
  for (double p : probs) total += p;
  *std::max_element(probs.begin(), probs.end()) += 1.0 - total;
  auto d = EntryDistribution::gaussian_convolved(EntryDistribution::discrete(std::move(points), std::move(probs)), gamma);
  d.targets_ = std::pair{m3, m4};
  return d;
}

MatrixSample sample_gaussian_invariant(int n, Symmetry symmetry, std::uint64_t seed, std::uint64_t stream) {
  auto spec = symmetry == Symmetry::Symmetric ? make_goe(n) : make_gue(n);
  const CounterRng rng(seed, kStreamGaussianPart + 0x100 * stream);
  MatrixSample out;
  out.symmetry = symmetry;
  out.seed = seed;
  out.spec = std::make_shared<const EnsembleSpec>(spec);
  const double s = 1.0 / std::sqrt(static_cast<double>(n));
  if (symmetry == Symmetry::Symmetric) {
    out.real.resize(n, n);
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < j; ++i) out.real(i, j) = out.real(j, i) = s * rng.normal(i, j, 0);
      out.real(j, j) = std::numbers::sqrt2 * s * rng.normal(j, j, 0);
    }
  } else {
    out.complex.resize(n, n);
    const double so = s * std::numbers::sqrt2 / 2.0;
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < j; ++i) {
        const std::complex<double> h(so * rng.normal(i, j, 0), so * rng.normal(i, j, 1));
        out.complex(i, j) = h;
        out.complex(j, i) = std::conj(h);
      }
      out.complex(j, j) = s * rng.normal(j, j, 0);
    }
  }
  return out;
}

MatrixSample gaussian_convolve_matrix(const MatrixSample& base, double t, std::uint64_t seed) {
  require(!(t < 0.0) && !std::isnan(t), "gaussian convolution: t must be nonnegative");
  if (t == 0.0) return base;
  auto v = sample_gaussian_invariant(base.size(), base.symmetry, seed, 1);
  if (std::isinf(t)) return v;
  const double a = std::exp(-0.5 * t);
  const double b = std::sqrt(-std::expm1(-t));
  MatrixSample out = base;
  out.seed = seed;
  if (base.is_complex()) {
    out.complex = a * base.complex + b * v.complex;
  } else {
    out.real = a * base.real + b * v.real;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Binary export

namespace {
template <typename T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <typename T>
T take(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw ValidationError("matrix binary: truncated input");
  return v;
}
}  // namespace

void write_matrix_binary(std::ostream& out, const MatrixSample& sample) {
  out.write("RMTM", 4);
  put<std::uint32_t>(out, 1);
  const auto n = static_cast<std::uint64_t>(sample.size());
  put<std::uint64_t>(out, n);
  put<std::uint64_t>(out, n);
  put<std::uint8_t>(out, static_cast<std::uint8_t>(beta_of(sample.symmetry)));
  for (std::uint64_t i = 0; i < n; ++i)
    for (std::uint64_t j = 0; j < n; ++j) {
      const auto ii = static_cast<Eigen::Index>(i), jj = static_cast<Eigen::Index>(j);
      if (sample.is_complex()) {
        put<double>(out, sample.complex(ii, jj).real());
        put<double>(out, sample.complex(ii, jj).imag());
      } else {
        put<double>(out, sample.real(ii, jj));
      }
    }
  if (!out) throw RuntimeFailure("matrix binary: write failed");
}

MatrixSample read_matrix_binary(std::istream& in) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "RMTM", 4) != 0) throw ValidationError("matrix binary: bad magic");
  if (take<std::uint32_t>(in) != 1) throw ValidationError("matrix binary: unsupported version");
  const auto rows = take<std::uint64_t>(in);
  const auto cols = take<std::uint64_t>(in);
  require(rows == cols && rows > 0 && rows < (1u << 20), "matrix binary: bad dimensions");
  MatrixSample s;
  s.symmetry = symmetry_from_beta(take<std::uint8_t>(in));
  const auto n = static_cast<Eigen::Index>(rows);
  if (s.is_complex()) {
    s.complex.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) {
        const double re = take<double>(in);
        const double im = take<double>(in);
        s.complex(i, j) = {re, im};
      }
  } else {
    s.real.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) s.real(i, j) = take<double>(in);
  }
  return s;
}

}  // namespace rmt
