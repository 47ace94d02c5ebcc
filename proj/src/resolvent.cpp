#include "rmtlab/resolvent.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>

#include "rmtlab/errors.hpp"

extern "C" void dsterf_(const int* n, double* d, double* e, int* info);

namespace rmt {

SpectralData SpectralData::from_eigenvalues(std::vector<double> values, std::uint64_t seed) {
  SpectralData s;
  std::sort(values.begin(), values.end());
  s.eigenvalues = std::move(values);
  s.seed = seed;
  return s;
}

SpectralData eigendecompose(const MatrixSample& sample, bool with_vectors) {
  const auto options = with_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly;
  SpectralData out;
  out.seed = sample.seed;
  auto fail = [&] {
    throw RuntimeFailure("eigensolver did not converge (seed " + std::to_string(sample.seed) + ")");
  };
  if (sample.is_complex()) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sample.complex, options);
    if (es.info() != Eigen::Success) fail();
    out.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    if (with_vectors) out.complex_vectors = es.eigenvectors();
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sample.real, options);
    if (es.info() != Eigen::Success) fail();
    out.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    if (with_vectors) out.real_vectors = es.eigenvectors();
  }
  return out;
}

cplx stieltjes_empirical(const SpectralData& spec, cplx z) {
  require(z.imag() > 0.0, "stieltjes transform: eta must be positive");
  require(spec.size() > 0, "stieltjes transform: empty spectrum");
  cplx sum = 0.0;
  for (double l : spec.eigenvalues) sum += 1.0 / (l - z);
  return sum / static_cast<double>(spec.size());
}

cplx stieltjes_semicircle(cplx z) {
  // Product of principal roots is the branch analytic off [-2, 2] with
  // sqrt(z^2 - 4) ~ z; m = (-z + s)/2 = -2/(z + s) avoids cancellation.
  const cplx s = std::sqrt(z - 2.0) * std::sqrt(z + 2.0);
  return -2.0 / (z + s);
}

double density_semicircle(double e) {
  const double a = 4.0 - e * e;
  return a > 0.0 ? std::sqrt(a) / (2.0 * std::numbers::pi) : 0.0;
}

double density_mp(double e, double d) {
  require(d > 0.0 && d <= 1.0, "Marchenko-Pastur density: d must lie in (0, 1]");
  const double lo = (1.0 - std::sqrt(d)) * (1.0 - std::sqrt(d));
  const double hi = (1.0 + std::sqrt(d)) * (1.0 + std::sqrt(d));
  if (e <= lo || e >= hi) return 0.0;
  return std::sqrt((hi - e) * (e - lo)) / (2.0 * std::numbers::pi * d * e);
}

double counting_semicircle(double e) {
  if (e <= -2.0) return 0.0;
  if (e >= 2.0) return 1.0;
  return 0.5 + e * std::sqrt(4.0 - e * e) / (4.0 * std::numbers::pi) + std::asin(0.5 * e) / std::numbers::pi;
}

std::vector<double> classical_locations(int n) {
  require(n >= 1, "classical locations: N must be positive");
  std::vector<double> gamma(static_cast<std::size_t>(n));
  auto solve = [n](int j) {
    const double target = static_cast<double>(j) / n;
    double lo = -2.0, hi = 2.0;
    while (hi - lo > 1e-13) {
      const double mid = 0.5 * (lo + hi);
      (counting_semicircle(mid) < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };
  // n_sc(-x) = 1 - n_sc(x), so gamma_{N-j} = -gamma_j.
  for (int j = 1; 2 * j < n; ++j) {
    const double g = solve(j);
    gamma[static_cast<std::size_t>(j - 1)] = g;
    gamma[static_cast<std::size_t>(n - j - 1)] = -g;
  }
  if (n % 2 == 0) gamma[static_cast<std::size_t>(n / 2 - 1)] = 0.0;
  gamma[static_cast<std::size_t>(n - 1)] = 2.0;
  return gamma;
}

Eigen::MatrixXcd resolvent_matrix(const MatrixSample& sample, cplx z) {
  require(z.imag() > 0.0, "resolvent: eta must be positive");
  Eigen::MatrixXcd a = sample.as_complex();
  a.diagonal().array() -= z;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a);
  Eigen::MatrixXcd g = lu.inverse();
  if (!g.allFinite()) throw RuntimeFailure("resolvent: singular solve (seed " + std::to_string(sample.seed) + ")");
  return g;
}

Eigen::MatrixXcd resolvent_matrix(const SpectralData& spec, cplx z) {
  require(z.imag() > 0.0, "resolvent: eta must be positive");
  require(spec.has_vectors(), "resolvent: eigenvectors required");
  const int n = spec.size();
  Eigen::VectorXcd d(n);
  for (int a = 0; a < n; ++a) d(a) = 1.0 / (spec.eigenvalues[static_cast<std::size_t>(a)] - z);
  if (spec.complex_valued()) {
    const Eigen::MatrixXcd& u = spec.complex_vectors;
    return (u * d.asDiagonal()) * u.adjoint();
  }
  // Real vectors: G = U Re(d) U^T + i U Im(d) U^T, two real products.
  const Eigen::MatrixXd& u = spec.real_vectors;
  const Eigen::MatrixXd re = (u * d.real().asDiagonal()) * u.transpose();
  const Eigen::MatrixXd im = (u * d.imag().asDiagonal()) * u.transpose();
  Eigen::MatrixXcd g(n, n);
  g.real() = re;
  g.imag() = im;
  return g;
}

ResolventSummary summarize_resolvent(const Eigen::MatrixXcd& g, cplx z) {
  const auto n = g.rows();
  const cplx msc = stieltjes_semicircle(z);
  ResolventSummary s{};
  cplx trace = 0.0;
  double lambda_d = 0.0, lambda_o = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (i == j) continue;
      lambda_o = std::max(lambda_o, std::norm(g(i, j)));
    }
    trace += g(j, j);
    lambda_d = std::max(lambda_d, std::abs(g(j, j) - msc));
  }
  s.m = trace / static_cast<double>(n);
  s.lambda = std::abs(s.m - msc);
  s.lambda_d = lambda_d;
  s.lambda_o = std::sqrt(lambda_o);
  return s;
}

ResolventSummary resolvent_summary(const MatrixSample& sample, cplx z) {
  return summarize_resolvent(resolvent_matrix(sample, z), z);
}

ResolventSummary resolvent_summary(const SpectralData& spec, cplx z) {
  return summarize_resolvent(resolvent_matrix(spec, z), z);
}

double default_identity_tolerance(int n, double norm) {
  if (n <= 64) return 1e-9;
  return 1e-9 * (n / 64.0) * std::max(1.0, norm);
}

namespace {

Eigen::MatrixXcd remove_index(const Eigen::MatrixXcd& h, int k) {
  const auto n = h.rows();
  Eigen::MatrixXcd m(n - 1, n - 1);
  for (Eigen::Index i = 0, r = 0; i < n; ++i) {
    if (i == k) continue;
    for (Eigen::Index j = 0, c = 0; j < n; ++j) {
      if (j == k) continue;
      m(r, c++) = h(i, j);
    }
    ++r;
  }
  return m;
}

Eigen::MatrixXcd invert_shifted(const Eigen::MatrixXcd& h, cplx z) {
  Eigen::MatrixXcd a = h;
  a.diagonal().array() -= z;
  return Eigen::PartialPivLU<Eigen::MatrixXcd>(a).inverse();
}

// Index in the minor of the original index i (i != k).
inline Eigen::Index minor_index(int i, int k) { return i < k ? i : i - 1; }

}  // namespace

IdentityReport verify_resolvent_identities(const MatrixSample& sample, cplx z, double tol) {
  const int n = sample.size();
  require(n >= 3, "resolvent identities: N must be at least 3");
  require(z.imag() > 0.0, "resolvent identities: eta must be positive");
  const Eigen::MatrixXcd h = sample.as_complex();
  const Eigen::MatrixXcd g = invert_shifted(h, z);
  std::vector<Eigen::MatrixXcd> minors;
  minors.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) minors.push_back(invert_shifted(remove_index(h, k), z));

  IdentityReport rep;
  auto check = [&](const char* name, double& worst, cplx lhs, cplx rhs, int i, int j, int k) {
    const double err = std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs));
    worst = std::max(worst, err);
    if (!(err <= tol)) {
      rep.passed = false;
      if (rep.failures.size() < 32) rep.failures.push_back({name, i, j, k, err});
    }
  };

  for (int i = 0; i < n; ++i) {
    // G_ii = 1 / (h_ii - z - sum_{k,l != i} h_ik G^(i)_kl h_li)
    const auto& gi = minors[static_cast<std::size_t>(i)];
    cplx quad = 0.0;
    for (int k = 0; k < n; ++k) {
      if (k == i) continue;
      for (int l = 0; l < n; ++l) {
        if (l == i) continue;
        quad += h(i, k) * gi(minor_index(k, i), minor_index(l, i)) * h(l, i);
      }
    }
    check("one-row", rep.max_schur, g(i, i), 1.0 / (h(i, i) - z - quad), i, -1, -1);

    double ward = 0.0;
    for (int l = 0; l < n; ++l) ward += std::norm(g(i, l));
    check("ward", rep.max_ward, ward, g(i, i).imag() / z.imag(), i, -1, -1);
  }

  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const auto& gj = minors[static_cast<std::size_t>(j)];
      check("diagonal-removal", rep.max_diag_removal, g(i, i),
            gj(minor_index(i, j), minor_index(i, j)) + g(i, j) * g(j, i) / g(j, j), i, j, -1);
      for (int k = 0; k < n; ++k) {
        if (k == i || k == j) continue;
        const auto& gk = minors[static_cast<std::size_t>(k)];
        check("offdiagonal-removal", rep.max_offdiag_removal, g(i, j),
              gk(minor_index(i, k), minor_index(j, k)) + g(i, k) * g(k, j) / g(k, k), i, j, k);
      }
    }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> full(h, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd lam = full.eigenvalues();
  const double slack = tol * std::max(1.0, lam.cwiseAbs().maxCoeff());
  for (int k = 0; k < n; ++k) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> part(remove_index(h, k), Eigen::EigenvaluesOnly);
    const Eigen::VectorXd mu = part.eigenvalues();
    for (int a = 0; a + 1 < n; ++a) {
      const double v = std::max(lam(a) - mu(a), mu(a) - lam(a + 1));
      rep.max_interlacing_violation = std::max(rep.max_interlacing_violation, std::max(0.0, v));
      if (v > slack) {
        rep.passed = false;
        if (rep.failures.size() < 32) rep.failures.push_back({"interlacing", a, a + 1, k, v});
      }
    }
  }
  return rep;
}

void write_resolvent_grid_csv(std::ostream& out, const std::vector<GridRow>& rows) {
  out << "# schema: rmtlab.resolvent_grid v1\n";
  out << "E,eta,re_m,im_m,re_msc,im_msc,lambda,lambda_d,lambda_o\n";
  out << std::setprecision(17);
  for (const auto& r : rows)
    out << r.energy << ',' << r.eta << ',' << r.m.real() << ',' << r.m.imag() << ',' << r.msc.real() << ','
        << r.msc.imag() << ',' << r.lambda << ',' << r.lambda_d << ',' << r.lambda_o << '\n';
}

// ---------------------------------------------------------------------------

Tridiagonal sample_gaussian_tridiagonal(int n, Symmetry symmetry, std::uint64_t seed) {
  require(n >= 1, "tridiagonal model: N must be positive");
  const int beta = beta_of(symmetry);
  std::mt19937_64 gen(mix_seed(seed, 0x7d1a9));
  std::normal_distribution<double> normal(0.0, std::numbers::sqrt2);
  const double scale = 1.0 / std::sqrt(static_cast<double>(beta) * n);
  Tridiagonal t;
  t.diag.resize(static_cast<std::size_t>(n));
  t.off.resize(static_cast<std::size_t>(std::max(0, n - 1)));
  for (int i = 0; i < n; ++i) t.diag[static_cast<std::size_t>(i)] = scale * normal(gen);
  for (int k = 1; k < n; ++k) {
    // chi with beta (n - k) degrees of freedom: sqrt of Gamma(df/2, scale 2).
    std::gamma_distribution<double> chi2(0.5 * beta * (n - k), 2.0);
    t.off[static_cast<std::size_t>(k - 1)] = scale * std::sqrt(chi2(gen));
  }
  return t;
}

int sturm_count(const Tridiagonal& t, double x) {
  const int n = t.size();
  int count = 0;
  double q = 1.0;
  constexpr double tiny = 1e-300;
  for (int i = 0; i < n; ++i) {
    const double e2 = i > 0 ? t.off[static_cast<std::size_t>(i - 1)] * t.off[static_cast<std::size_t>(i - 1)] : 0.0;
    q = t.diag[static_cast<std::size_t>(i)] - x - (i > 0 ? e2 / q : 0.0);
    if (q == 0.0) q = -tiny;
    if (q < 0.0) ++count;
  }
  return count;
}

namespace {

double gershgorin_radius(const Tridiagonal& t) {
  double r = 0.0;
  const int n = t.size();
  for (int i = 0; i < n; ++i) {
    double s = std::abs(t.diag[static_cast<std::size_t>(i)]);
    if (i > 0) s += std::abs(t.off[static_cast<std::size_t>(i - 1)]);
    if (i + 1 < n) s += std::abs(t.off[static_cast<std::size_t>(i)]);
    r = std::max(r, s);
  }
  return r;
}

// k-th smallest eigenvalue (0-based) inside [lo, hi] where the count bounds are known.
double bisect_index(const Tridiagonal& t, int k, double lo, double hi, double tol) {
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (sturm_count(t, mid) > k ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

std::vector<double> tridiagonal_eigenvalues_in(const Tridiagonal& t, double lo, double hi, double tol) {
  require(hi >= lo, "tridiagonal eigenvalues: empty interval");
  const int below_lo = sturm_count(t, lo);
  const int below_hi = sturm_count(t, std::nextafter(hi, std::numeric_limits<double>::infinity()));
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(std::max(0, below_hi - below_lo)));
  double left = lo;
  for (int k = below_lo; k < below_hi; ++k) {
    out.push_back(bisect_index(t, k, left, hi, tol));
    left = std::max(left, out.back() - 2 * tol);
  }
  return out;
}

double tridiagonal_largest_eigenvalue(const Tridiagonal& t, double tol) {
  const double r = gershgorin_radius(t);
  return bisect_index(t, t.size() - 1, -r - 1.0, r + 1.0, tol);
}

double tridiagonal_smallest_eigenvalue(const Tridiagonal& t, double tol) {
  const double r = gershgorin_radius(t);
  return bisect_index(t, 0, -r - 1.0, r + 1.0, tol);
}

std::vector<double> tridiagonal_eigenvalues(const Tridiagonal& t) {
  // LAPACK's root-free QR is several times faster than bisection for the
  // whole spectrum.
  int n = t.size();
  if (n == 0) return {};
  std::vector<double> d = t.diag, e = t.off;
  e.resize(static_cast<std::size_t>(n));
  int info = 0;
  dsterf_(&n, d.data(), e.data(), &info);
  if (info != 0) throw RuntimeFailure("tridiagonal eigensolver did not converge (dsterf info " + std::to_string(info) + ")");
  return d;
}

}  // namespace rmt
