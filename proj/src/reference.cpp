#include "rmtlab/reference.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <mutex>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>

#include "rmtlab/errors.hpp"
#include "rmtlab/quadrature.hpp"
#include "rmtlab/resolvent.hpp"
#include "rmtlab/rng.hpp"

namespace rmt {

namespace {

constexpr double kPi = std::numbers::pi;

// Sixth-order central stencils on 7 points, offsets -3..3.
constexpr double kSecond[7] = {1.0 / 90, -3.0 / 20, 3.0 / 2, -49.0 / 18, 3.0 / 2, -3.0 / 20, 1.0 / 90};
constexpr double kFirst[7] = {-1.0 / 60, 3.0 / 20, -3.0 / 4, 0.0, 3.0 / 4, -3.0 / 20, 1.0 / 60};
constexpr double kStencilStep = 0.02;

}  // namespace

// ---------------------------------------------------------------------------
// ReferenceCurve

double ReferenceCurve::interpolate(double x) const {
  require(!grid.empty(), "reference curve: empty grid");
  if (x <= grid.front()) return values.front();
  if (x >= grid.back()) return values.back();
  const auto it = std::upper_bound(grid.begin(), grid.end(), x);
  const auto i = static_cast<std::size_t>(it - grid.begin());
  const double t = (x - grid[i - 1]) / (grid[i] - grid[i - 1]);
  return (1.0 - t) * values[i - 1] + t * values[i];
}

void ReferenceCurve::validate() const {
  require(grid.size() == values.size(), "reference curve '" + kind + "': grid/value size mismatch");
  for (std::size_t i = 1; i < grid.size(); ++i)
    require(grid[i] > grid[i - 1], "reference curve '" + kind + "': grid not ascending");
  for (double v : values) require(std::isfinite(v), "reference curve '" + kind + "': non-finite value");
}

void ReferenceCurve::write_csv(std::ostream& out) const {
  out << "# schema: rmtlab.reference_curve v1\n";
  out << "# kind: " << kind << "\n";
  for (const auto& [k, v] : metadata) out << "# " << k << ": " << v << "\n";
  out << "x,value\n";
  out << std::setprecision(17);
  for (std::size_t i = 0; i < grid.size(); ++i) out << grid[i] << "," << values[i] << "\n";
}

ReferenceCurve ReferenceCurve::read_csv(std::istream& in) {
  ReferenceCurve c;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto colon = line.find(':');
      if (colon == std::string::npos) continue;
      std::string key = line.substr(1, colon - 1);
      std::string value = line.substr(colon + 1);
      auto trim = [](std::string& s) {
        s.erase(0, s.find_first_not_of(" \t"));
        s.erase(s.find_last_not_of(" \t\r") + 1);
      };
      trim(key);
      trim(value);
      if (key == "kind") c.kind = value;
      else if (key != "schema") c.metadata[key] = value;
      continue;
    }
    if (line.rfind("x,", 0) == 0) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ValidationError("reference curve csv: malformed row '" + line + "'");
    c.grid.push_back(std::stod(line.substr(0, comma)));
    c.values.push_back(std::stod(line.substr(comma + 1)));
  }
  c.validate();
  return c;
}

std::vector<double> linear_grid(double a, double b, int n) {
  require(n >= 2 && b > a, "linear grid: need n >= 2 and b > a");
  std::vector<double> g(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = a + (b - a) * i / (n - 1);
  g.back() = b;
  return g;
}

std::uint64_t grid_hash(const std::vector<double>& grid) {
  std::uint64_t h = 0x243F6A8885A308D3ULL;
  for (double x : grid) {
    std::uint64_t bits = 0;
    static_assert(sizeof bits == sizeof x);
    std::memcpy(&bits, &x, sizeof bits);
    h = splitmix64(h ^ bits);
  }
  return h;
}

ReferenceCurve cached_curve(const std::string& kind, const std::vector<double>& grid, int order,
                            const std::function<ReferenceCurve()>& compute) {
  const char* dir = std::getenv("RMTLAB_CACHE");
  if (dir == nullptr || *dir == '\0') return compute();
  std::ostringstream name;
  name << kind << "-" << std::hex << grid_hash(grid) << std::dec << "-m" << order << ".csv";
  const std::filesystem::path path = std::filesystem::path(dir) / name.str();
  if (std::ifstream in(path); in) {
    try {
      ReferenceCurve c = ReferenceCurve::read_csv(in);
      if (c.kind == kind && c.grid == grid) return c;
    } catch (const std::exception&) {
      // Unreadable entry: recompute and overwrite below.
    }
  }
  ReferenceCurve c = compute();
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) return c;
    c.write_csv(out);
  }
  std::filesystem::rename(tmp, path, ec);
  return c;
}

// ---------------------------------------------------------------------------
// Sine kernel and gap law

double sine_kernel(double x) {
  if (std::abs(x) < 1e-8) return 1.0 - (kPi * x) * (kPi * x) / 6.0;
  return std::sin(kPi * x) / (kPi * x);
}

double sine_det(const std::vector<double>& alphas) {
  require(!alphas.empty(), "sine_det: need at least one point");
  const auto k = static_cast<Eigen::Index>(alphas.size());
  Eigen::MatrixXd m(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j) m(i, j) = sine_kernel(alphas[i] - alphas[j]);
  if (k == 1) return 1.0;
  if (k == 2) return 1.0 - m(0, 1) * m(1, 0);
  return m.determinant();
}

double sine_gap_probability(double alpha, int order) {
  require(order >= 2, "gap probability: quadrature order too small");
  if (alpha == 0.0) return 1.0;
  const double len = std::abs(alpha);
  const auto rule = gauss_legendre(order, 0.0, len);
  Eigen::MatrixXd a(order, order);
  for (int i = 0; i < order; ++i) {
    const double wi = std::sqrt(rule.weights[static_cast<std::size_t>(i)]);
    for (int j = 0; j <= i; ++j) {
      const double wj = std::sqrt(rule.weights[static_cast<std::size_t>(j)]);
      const double v = wi * sine_kernel(rule.nodes[static_cast<std::size_t>(i)] - rule.nodes[static_cast<std::size_t>(j)]) * wj;
      a(i, j) = v;
      a(j, i) = v;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw RuntimeFailure("gap probability: eigensolver failed");
  const double sign = alpha > 0.0 ? -1.0 : 1.0;
  double det = 1.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) det *= 1.0 + sign * es.eigenvalues()(i);
  return det;
}

GapLaw gap_density_fredholm(const std::vector<double>& grid, int order) {
  require(order >= 40, "gap density: quadrature order must be at least 40");
  require(!grid.empty(), "gap density: empty grid");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    require(grid[i] > 0.0 && grid[i] <= 6.0, "gap density: grid must lie in (0, 6]");
    if (i > 0) require(grid[i] > grid[i - 1], "gap density: grid not ascending");
  }
  GapLaw law;
  law.gap_probability.kind = "gap-probability";
  law.density.kind = "gap-density";
  law.cdf.kind = "gap-cdf";
  for (auto* c : {&law.gap_probability, &law.density, &law.cdf}) {
    c->grid = grid;
    c->values.reserve(grid.size());
    c->metadata["order"] = std::to_string(order);
    c->metadata["stencil_step"] = "0.02";
  }
  const double h = kStencilStep;
  for (double alpha : grid) {
    double e[7];
    for (int k = 0; k < 7; ++k) e[k] = sine_gap_probability(alpha + (k - 3) * h, order);
    const double e2m = sine_gap_probability(alpha, 2 * order);
    if (std::abs(e2m - e[3]) > 1e-8) {
      std::ostringstream msg;
      msg << "gap density: Nystrom orders " << order << " and " << 2 * order << " disagree at alpha=" << alpha;
      throw RuntimeFailure(msg.str());
    }
    double d1 = 0.0, d2 = 0.0;
    for (int k = 0; k < 7; ++k) {
      d1 += kFirst[k] * e[k];
      d2 += kSecond[k] * e[k];
    }
    law.gap_probability.values.push_back(e[3]);
    law.density.values.push_back(d2 / (h * h));
    law.cdf.values.push_back(1.0 + d1 / h);
  }
  return law;
}

const GapLaw& default_gap_law() {
  static const GapLaw law = [] {
    std::vector<double> grid = linear_grid(0.01, 6.0, 600);
    GapLaw computed;
    bool have = false;
    auto get = [&](const std::string& kind, ReferenceCurve GapLaw::*member) {
      return cached_curve(kind, grid, 48, [&] {
        if (!have) {
          computed = gap_density_fredholm(grid, 48);
          have = true;
        }
        return computed.*member;
      });
    };
    GapLaw out;
    out.gap_probability = get("gap-probability", &GapLaw::gap_probability);
    out.density = get("gap-density", &GapLaw::density);
    out.cdf = get("gap-cdf", &GapLaw::cdf);
    // Prepend alpha = 0 so interpolation covers the whole half-line start.
    out.gap_probability.grid.insert(out.gap_probability.grid.begin(), 0.0);
    out.gap_probability.values.insert(out.gap_probability.values.begin(), 1.0);
    out.density.grid.insert(out.density.grid.begin(), 0.0);
    out.density.values.insert(out.density.values.begin(), 0.0);
    out.cdf.grid.insert(out.cdf.grid.begin(), 0.0);
    out.cdf.values.insert(out.cdf.values.begin(), 0.0);
    return out;
  }();
  return law;
}

double gap_density(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 6.0) return 0.0;
  return default_gap_law().density.interpolate(s);
}

double gap_cdf_reference(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 6.0) return 1.0;
  return default_gap_law().cdf.interpolate(s);
}

double wigner_surmise(double s, int beta) {
  require(beta == 1 || beta == 2, "wigner surmise: beta must be 1 or 2");
  if (s < 0.0) return 0.0;
  if (beta == 1) return 0.5 * kPi * s * std::exp(-0.25 * kPi * s * s);
  return 32.0 / (kPi * kPi) * s * s * std::exp(-4.0 * s * s / kPi);
}

double wigner_surmise_cdf(double s, int beta) {
  require(beta == 1 || beta == 2, "wigner surmise: beta must be 1 or 2");
  if (s <= 0.0) return 0.0;
  if (beta == 1) return -std::expm1(-0.25 * kPi * s * s);
  const double a = 4.0 / kPi;
  const double integral =
      std::sqrt(kPi) * std::erf(std::sqrt(a) * s) / (4.0 * a * std::sqrt(a)) - s * std::exp(-a * s * s) / (2.0 * a);
  return 32.0 / (kPi * kPi) * integral;
}

// ---------------------------------------------------------------------------
// Hermite functions

namespace {

// psi_{n-1}(x) and psi_n(x) (or all of psi_0..psi_{n-1} if `all` is given),
// carrying a running power-of-ten scale so that neither the Gaussian factor
// nor the polynomial growth leaves the double range.
void hermite_recurrence(int n, double x, double& last, double& prev, std::vector<double>* all) {
  double log_scale = -0.25 * x * x - 0.25 * std::log(2.0 * kPi);
  double p0 = 0.0;  // psi_{k-1}
  double p1 = 1.0;  // psi_k (mantissa)
  if (all) all->assign(static_cast<std::size_t>(n), 0.0);
  for (int k = 0; k < n; ++k) {
    if (all) (*all)[static_cast<std::size_t>(k)] = p1 * std::exp(log_scale);
    const double p2 = (x * p1 - std::sqrt(static_cast<double>(k)) * p0) / std::sqrt(k + 1.0);
    p0 = p1;
    p1 = p2;
    if (std::abs(p1) > 1e150) {
      p0 *= 1e-150;
      p1 *= 1e-150;
      log_scale += 150.0 * std::numbers::ln10;
    }
  }
  prev = p0 * std::exp(log_scale);
  last = p1 * std::exp(log_scale);
}

}  // namespace

std::vector<double> hermite_functions(int n, double x) {
  require(n >= 1, "hermite functions: n must be positive");
  std::vector<double> out;
  double last = 0.0, prev = 0.0;
  hermite_recurrence(n, x, last, prev, &out);
  return out;
}

double hermite_kernel(int n, double x, double y) {
  require(n >= 1 && n <= 500, "hermite kernel: N must lie in [1, 500]");
  if (x > y) std::swap(x, y);  // exact symmetry
  if (std::abs(x - y) < 1e-3) {
    const auto px = hermite_functions(n, x);
    const auto py = hermite_functions(n, y);
    double s = 0.0;
    for (int k = n - 1; k >= 0; --k) s += px[static_cast<std::size_t>(k)] * py[static_cast<std::size_t>(k)];
    return s;
  }
  double nx = 0.0, nmx = 0.0, ny = 0.0, nmy = 0.0;
  hermite_recurrence(n, x, nx, nmx, nullptr);
  hermite_recurrence(n, y, ny, nmy, nullptr);
  return std::sqrt(static_cast<double>(n)) * (nx * nmy - nmx * ny) / (x - y);
}

double hermite_kernel_rescaled(int n, double energy, double a, double b) {
  const double rho = density_semicircle(energy);
  require(rho > 0.0, "rescaled hermite kernel: energy outside the bulk");
  const double sn = std::sqrt(static_cast<double>(n));
  const double xa = sn * (energy + a / (n * rho));
  const double xb = sn * (energy + b / (n * rho));
  return hermite_kernel(n, xa, xb) / (rho * sn);
}

// ---------------------------------------------------------------------------
// Airy

namespace {

constexpr long double kAi0 = 0.355028053887817239260063186004183176L;
constexpr long double kAip0 = 0.258819403792806798405183560189203963L;  // -Ai'(0)
constexpr double kSeriesLo = -8.0;
constexpr double kSeriesHi = 6.5;

AiryPair airy_maclaurin(double xd) {
  const long double x = xd;
  const long double x3 = x * x * x;
  long double f = 1.0L, g = x, fp = 0.0L, gp = 1.0L;
  long double tf = 1.0L, tg = x, tfp = x * x / 2.0L, tgp = 1.0L;
  fp = tfp;
  for (int k = 1; k < 200; ++k) {
    tf *= x3 / ((3.0L * k - 1.0L) * (3.0L * k));
    tg *= x3 / ((3.0L * k) * (3.0L * k + 1.0L));
    if (k > 1) tfp *= x3 / ((3.0L * k - 3.0L) * (3.0L * k - 1.0L));
    tgp *= x3 / ((3.0L * k - 2.0L) * (3.0L * k));
    f += tf;
    g += tg;
    if (k > 1) fp += tfp;
    gp += tgp;
    const long double scale = std::abs(f) + std::abs(g) + std::abs(fp) + std::abs(gp);
    if (std::abs(tf) + std::abs(tg) + std::abs(tfp) + std::abs(tgp) < 1e-22L * scale && k > 3) break;
  }
  return {static_cast<double>(kAi0 * f - kAip0 * g), static_cast<double>(kAi0 * fp - kAip0 * gp)};
}

// Sums of the u_k / v_k asymptotic series in powers of 1/zeta, truncated at
// the smallest term. parity: -1 all terms with alternating sign, 0 even k,
// 1 odd k (each with (-1)^{k/2} or (-1)^{(k-1)/2}).
struct AsymptoticSums {
  long double u_even, u_odd, v_even, v_odd, u_alt, v_alt;
};

AsymptoticSums airy_asymptotic_sums(long double zeta) {
  AsymptoticSums s{1.0L, 0.0L, 1.0L, 0.0L, 1.0L, 1.0L};
  long double u = 1.0L;
  long double zp = 1.0L;
  long double last = std::numeric_limits<long double>::infinity();
  for (int k = 1; k < 60; ++k) {
    u *= (6.0L * k - 5.0L) * (6.0L * k - 3.0L) * (6.0L * k - 1.0L) / ((2.0L * k - 1.0L) * 216.0L * k);
    const long double v = -(6.0L * k + 1.0L) / (6.0L * k - 1.0L) * u;
    zp *= zeta;
    const long double tu = u / zp;
    const long double tv = v / zp;
    const long double size = std::abs(tu) + std::abs(tv);
    if (size > last || size < 1e-21L) break;
    last = size;
    const long double alt = (k % 2 == 0) ? 1.0L : -1.0L;
    s.u_alt += alt * tu;
    s.v_alt += alt * tv;
    const long double sgn = ((k / 2) % 2 == 0) ? 1.0L : -1.0L;
    if (k % 2 == 0) {
      s.u_even += sgn * tu;
      s.v_even += sgn * tv;
    } else {
      s.u_odd += sgn * tu;
      s.v_odd += sgn * tv;
    }
  }
  return s;
}

AiryPair airy_asymptotic(double xd) {
  const long double sqrt_pi = std::sqrt(static_cast<long double>(kPi));
  if (xd > 0.0) {
    const long double x = xd;
    const long double zeta = 2.0L / 3.0L * x * std::sqrt(x);
    const auto s = airy_asymptotic_sums(zeta);
    const long double e = std::exp(-zeta);
    const long double q = std::pow(x, 0.25L);
    return {static_cast<double>(e / (2.0L * sqrt_pi * q) * s.u_alt),
            static_cast<double>(-q * e / (2.0L * sqrt_pi) * s.v_alt)};
  }
  const long double y = -xd;
  const long double zeta = 2.0L / 3.0L * y * std::sqrt(y);
  const auto s = airy_asymptotic_sums(zeta);
  const long double phase = zeta - static_cast<long double>(kPi) / 4.0L;
  const long double c = std::cos(phase), sn = std::sin(phase);
  const long double q = std::pow(y, 0.25L);
  return {static_cast<double>((c * s.u_even + sn * s.u_odd) / (sqrt_pi * q)),
          static_cast<double>(q * (sn * s.v_even - c * s.v_odd) / sqrt_pi)};
}

}  // namespace

AiryPair airy_pair(double x) {
  require(x >= -15.0, "airy: argument below -15");
  if (x >= kSeriesLo && x <= kSeriesHi) return airy_maclaurin(x);
  return airy_asymptotic(x);
}

double airy_function(double x) {
  require(x >= -15.0 && x <= 15.0, "airy: argument outside [-15, 15]");
  return airy_pair(x).ai;
}

double airy_derivative(double x) {
  require(x >= -15.0 && x <= 15.0, "airy: argument outside [-15, 15]");
  return airy_pair(x).aip;
}

namespace {

double airy_kernel_from(double x, const AiryPair& ax, double y, const AiryPair& ay) {
  if (std::abs(x - y) < 1e-6) {
    // Diagonal limit at the midpoint.
    const double m = 0.5 * (x + y);
    const AiryPair am = airy_pair(m);
    return am.aip * am.aip - m * am.ai * am.ai;
  }
  return (ax.ai * ay.aip - ax.aip * ay.ai) / (x - y);
}

}  // namespace

double airy_kernel(double x, double y) {
  if (x > y) std::swap(x, y);
  return airy_kernel_from(x, airy_pair(x), y, airy_pair(y));
}

double tracy_widom_cdf(double s, int beta, int order) {
  require(beta == 2, "tracy-widom: only beta = 2 is supported");
  require(s >= -8.0 && s <= 6.0, "tracy-widom: s outside [-8, 6]");
  require(order >= 20, "tracy-widom: quadrature order too small");
  constexpr double c = 5.0;
  const auto rule = gauss_legendre(order, -1.0, 1.0);
  std::vector<double> x(static_cast<std::size_t>(order)), w(x.size());
  std::vector<AiryPair> ai(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double t = rule.nodes[i];
    x[i] = s + c * (1.0 + t) / (1.0 - t);
    w[i] = std::sqrt(rule.weights[i] * 2.0 * c / ((1.0 - t) * (1.0 - t)));
    ai[i] = airy_pair(x[i]);
  }
  Eigen::MatrixXd a(order, order);
  for (int i = 0; i < order; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    for (int j = 0; j <= i; ++j) {
      const auto uj = static_cast<std::size_t>(j);
      const double v = w[ui] * airy_kernel_from(x[ui], ai[ui], x[uj], ai[uj]) * w[uj];
      a(i, j) = v;
      a(j, i) = v;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw RuntimeFailure("tracy-widom: eigensolver failed");
  double det = 1.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) det *= 1.0 - es.eigenvalues()(i);
  return std::clamp(det, 0.0, 1.0);
}

ReferenceCurve tracy_widom_painleve(const std::vector<double>& grid, double s0) {
  require(!grid.empty(), "painleve: empty grid");
  for (std::size_t i = 1; i < grid.size(); ++i) require(grid[i] > grid[i - 1], "painleve: grid not ascending");
  require(grid.front() >= -10.0, "painleve: grid starts below -10");

  // I(s) = int_s^inf (x - s) Ai(x)^2 dx on the Airy side of s0.
  auto airy_tail = [](double s) {
    return integrate_composite(
        [s](double x) {
          const double a = airy_pair(x).ai;
          return (x - s) * a * a;
        },
        s, s + 24.0, 48, 20);
  };

  ReferenceCurve out;
  out.kind = "tracy-widom-painleve";
  out.grid = grid;
  out.values.assign(grid.size(), 0.0);
  out.metadata["s0"] = std::to_string(s0);

  using State = std::array<long double, 4>;  // q, q', J, I
  auto rhs = [](long double s, const State& y) {
    return State{y[1], s * y[0] + 2.0L * y[0] * y[0] * y[0], -y[0] * y[0], -y[2]};
  };
  const AiryPair a0 = airy_pair(s0);
  State y{a0.ai, a0.aip, static_cast<long double>(a0.aip) * a0.aip - static_cast<long double>(s0) * a0.ai * a0.ai,
          airy_tail(s0)};
  long double s = s0;
  constexpr long double kStep = 1.0L / 2048.0L;
  for (std::size_t idx = grid.size(); idx-- > 0;) {
    const double target = grid[idx];
    if (target >= s0) {
      out.values[idx] = std::exp(-airy_tail(target));
      continue;
    }
    while (s > target) {
      const long double h = -std::min<long double>(kStep, s - target);
      const State k1 = rhs(s, y);
      State t;
      for (int i = 0; i < 4; ++i) t[i] = y[i] + 0.5L * h * k1[i];
      const State k2 = rhs(s + 0.5L * h, t);
      for (int i = 0; i < 4; ++i) t[i] = y[i] + 0.5L * h * k2[i];
      const State k3 = rhs(s + 0.5L * h, t);
      for (int i = 0; i < 4; ++i) t[i] = y[i] + h * k3[i];
      const State k4 = rhs(s + h, t);
      for (int i = 0; i < 4; ++i) y[i] += h / 6.0L * (k1[i] + 2.0L * k2[i] + 2.0L * k3[i] + k4[i]);
      s += h;
      if (!std::isfinite(static_cast<double>(y[0]))) throw RuntimeFailure("painleve: integration blew up");
    }
    s = target;
    out.values[idx] = static_cast<double>(std::exp(-y[3]));
  }
  return out;
}

const ReferenceCurve& default_tracy_widom() {
  static const ReferenceCurve curve = [] {
    const auto grid = linear_grid(-8.0, 6.0, 2801);
    return cached_curve("tracy-widom", grid, 80, [&] {
      ReferenceCurve c;
      c.kind = "tracy-widom";
      c.grid = grid;
      c.metadata["order"] = "80";
      c.values.reserve(grid.size());
      for (double s : grid) c.values.push_back(tracy_widom_cdf(s, 2, 80));
      return c;
    });
  }();
  return curve;
}

// ---------------------------------------------------------------------------

std::uint64_t catalan_moment(int k) {
  require(k >= 0, "catalan: k must be nonnegative");
  require(k <= 36, "catalan: C_k exceeds 64 bits beyond k = 36");
  unsigned __int128 c = 1;
  for (int j = 0; j < k; ++j) c = c * static_cast<unsigned>(2 * (2 * j + 1)) / static_cast<unsigned>(j + 2);
  return static_cast<std::uint64_t>(c);
}

}  // namespace rmt
