#include "spincorr/correlations.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

namespace spincorr {

namespace {

constexpr double kLn2 = std::numbers::ln2;
constexpr double kPi = std::numbers::pi;

// (1+u) ln(1+u) - u, accurate for small |u|. Defined on [-1, inf).
double xlogx_shifted(double u) {
  if (u <= -1.0) return 1.0;
  if (std::abs(u) < 1e-3) {
    // sum_{n>=2} (-1)^n u^n / (n (n-1))
    double term = u * u;
    double sum = 0.0;
    for (int n = 2; n <= 9; ++n) {
      sum += ((n % 2 == 0) ? 1.0 : -1.0) * term / (n * (n - 1.0));
      term *= u;
    }
    return sum;
  }
  return (1.0 + u) * std::log1p(u) - u;
}

// Entropy (bits) of the two-level operator m / tr(m), weighted by tr(m):
// p S(m/p) = -sum mu log2 mu + p log2 p.
double weighted_conditional_entropy(const Matrix2c& m) {
  const Eigen::Vector2d mu = hermitian_eigenvalues(m);
  const double p = m(0, 0).real() + m(1, 1).real();
  if (p <= 0.0) return 0.0;
  double s = p * std::log2(p);
  for (int k = 0; k < 2; ++k) {
    const double x = std::max(mu(k), 0.0);
    if (x > 0.0) s -= x * std::log2(x);
  }
  return s;
}

struct BasisVectors {
  std::array<cplx, 2> par;
  std::array<cplx, 2> perp;
};

BasisVectors basis_vectors(double theta, double phi) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const cplx e = std::polar(1.0, phi);
  return {{cplx(c, 0.0), e * s}, {std::conj(e) * s, cplx(-c, 0.0)}};
}

// <v|_B rho |v>_B as a 2x2 operator on A (unnormalized).
Matrix2c project_b(const Matrix4c& m, const std::array<cplx, 2>& v) {
  Matrix2c out = Matrix2c::Zero();
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      cplx acc = 0.0;
      for (int j = 0; j < 2; ++j)
        for (int l = 0; l < 2; ++l) acc += std::conj(v[j]) * m(2 * a + j, 2 * b + l) * v[l];
      out(a, b) = acc;
    }
  return out;
}

// Measured information with measurement on B, given S(rho_A).
double measured_information_b(const Matrix4c& m, double entropy_a, double theta, double phi) {
  const BasisVectors v = basis_vectors(theta, phi);
  return entropy_a - weighted_conditional_entropy(project_b(m, v.par)) -
         weighted_conditional_entropy(project_b(m, v.perp));
}

// Two-dimensional Nelder-Mead maximization of f starting at x0 with step sizes h.
template <class F>
std::pair<std::array<double, 2>, double> nelder_mead_max(F&& f, std::array<double, 2> x0,
                                                         std::array<double, 2> h, double tol,
                                                         int max_iters) {
  struct Vertex {
    std::array<double, 2> x;
    double v;  // objective to minimize (-f)
  };
  auto eval = [&](std::array<double, 2> x) { return Vertex{x, -f(x[0], x[1])}; };
  std::array<Vertex, 3> s = {eval(x0), eval({x0[0] + h[0], x0[1]}), eval({x0[0], x0[1] + h[1]})};
  auto affine = [](const std::array<double, 2>& a, const std::array<double, 2>& b, double t) {
    return std::array<double, 2>{a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])};
  };
  for (int it = 0; it < max_iters; ++it) {
    std::ranges::sort(s, {}, &Vertex::v);
    double size = 0.0;
    for (int k = 1; k < 3; ++k)
      size = std::max(size, std::max(std::abs(s[k].x[0] - s[0].x[0]), std::abs(s[k].x[1] - s[0].x[1])));
    if (size < tol) break;
    const std::array<double, 2> centroid = {0.5 * (s[0].x[0] + s[1].x[0]), 0.5 * (s[0].x[1] + s[1].x[1])};
    const Vertex reflected = eval(affine(centroid, s[2].x, -1.0));
    if (reflected.v < s[0].v) {
      const Vertex expanded = eval(affine(centroid, s[2].x, -2.0));
      s[2] = expanded.v < reflected.v ? expanded : reflected;
    } else if (reflected.v < s[1].v) {
      s[2] = reflected;
    } else {
      const bool outside = reflected.v < s[2].v;
      const Vertex contracted = eval(affine(centroid, outside ? reflected.x : s[2].x, 0.5));
      if (contracted.v < std::min(reflected.v, s[2].v)) {
        s[2] = contracted;
      } else {
        for (int k = 1; k < 3; ++k) s[k] = eval(affine(s[0].x, s[k].x, 0.5));
      }
    }
  }
  const Vertex& best = *std::ranges::min_element(s, {}, &Vertex::v);
  return {best.x, -best.v};
}

}  // namespace

MeasurementBasis MeasurementBasis::canonical(double theta, double phi) {
  // Bloch vector of |par>; the basis is invariant under n -> -n.
  const double nx = std::sin(2.0 * theta) * std::cos(phi);
  const double ny = std::sin(2.0 * theta) * std::sin(phi);
  const double nz = std::cos(2.0 * theta);
  MeasurementBasis b;
  b.theta = 0.5 * std::acos(std::clamp(nz, -1.0, 1.0));
  b.phi = std::atan2(ny, nx);
  if (b.phi < 0.0) b.phi += 2.0 * kPi;
  if (b.phi >= 2.0 * kPi) b.phi = 0.0;
  return b;
}

void OptimizerConfig::validate() const {
  if (grid_theta < 8 || grid_phi < 8) throw std::invalid_argument("optimizer grid counts must be >= 8");
  if (!(refine_tol > 0.0)) throw std::invalid_argument("optimizer refine_tol must be positive");
  if (max_refine_iters < 0) throw std::invalid_argument("optimizer max_refine_iters must be >= 0");
}

void ElementErrors::validate() const {
  if ((re.array() < 0.0).any() || (im.array() < 0.0).any() || !re.allFinite() || !im.allFinite()) {
    throw std::invalid_argument("element errors must be finite and non-negative");
  }
  if (re != re.transpose() || im != im.transpose()) {
    throw std::invalid_argument("element errors must be symmetric under transpose");
  }
}

double mutual_information(const DensityMatrix& rho) {
  return von_neumann_entropy(partial_trace(rho, Subsystem::A)) +
         von_neumann_entropy(partial_trace(rho, Subsystem::B)) - von_neumann_entropy(rho);
}

double measured_information(const DensityMatrix& rho, const MeasurementBasis& basis, Subsystem measured) {
  const DensityMatrix oriented = measured == Subsystem::B ? rho : swap_subsystems(rho);
  const double s_a = von_neumann_entropy(partial_trace(oriented, Subsystem::A));
  return measured_information_b(oriented.matrix(), s_a, basis.theta, basis.phi);
}

ClassicalCorrelation classical_correlation(const DensityMatrix& rho, const OptimizerConfig& cfg) {
  cfg.validate();
  const DensityMatrix oriented = cfg.measured == Subsystem::B ? rho : swap_subsystems(rho);
  const Matrix4c& m = oriented.matrix();
  const double s_a = von_neumann_entropy(partial_trace(oriented, Subsystem::A));
  auto objective = [&](double theta, double phi) { return measured_information_b(m, s_a, theta, phi); };

  const double d_theta = (kPi / 2.0) / (cfg.grid_theta - 1);
  const double d_phi = 2.0 * kPi / cfg.grid_phi;
  double best = -1.0;
  std::array<double, 2> arg = {0.0, 0.0};
  for (int i = 0; i < cfg.grid_theta; ++i) {
    const double theta = i * d_theta;
    for (int j = 0; j < cfg.grid_phi; ++j) {
      const double phi = j * d_phi;
      const double v = objective(theta, phi);
      if (v > best) {
        best = v;
        arg = {theta, phi};
      }
    }
  }
  const auto [x, value] = nelder_mead_max(objective, arg, {0.5 * d_theta, 0.5 * d_phi}, cfg.refine_tol,
                                          cfg.max_refine_iters);
  if (value > best) {
    best = value;
    arg = x;
  }
  return {std::max(best, 0.0), MeasurementBasis::canonical(arg[0], arg[1])};
}

double quantum_discord(const DensityMatrix& rho, const OptimizerConfig& cfg) {
  // C <= I holds exactly; round-off can leave a few ulp of negative discord.
  return std::max(0.0, mutual_information(rho) - classical_correlation(rho, cfg).bits);
}

double geometric_discord(const DensityMatrix& rho, Subsystem measured) {
  const PauliVector p = pauli_expansion(rho);
  Eigen::Vector3d local;  // Bloch vector of the measured qubit
  Eigen::Matrix3d t;      // rows indexed by the measured qubit's Pauli axis
  for (int i = 0; i < 3; ++i) {
    local(i) = measured == Subsystem::B ? p(0, i + 1) : p(i + 1, 0);
    for (int j = 0; j < 3; ++j) t(i, j) = measured == Subsystem::B ? p(j + 1, i + 1) : p(i + 1, j + 1);
  }
  const Eigen::Matrix3d k = local * local.transpose() + t * t.transpose();
  const double k_max = Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(k, Eigen::EigenvaluesOnly).eigenvalues()(2);
  return std::max(0.0, 0.5 * (local.squaredNorm() + t.squaredNorm() - k_max));
}

double mutual_information_analytic_bell(const BellCoeffs& c) {
  require_physical(c);
  // Bell-basis eigenvalues are (1 + u_k)/4 with sum u_k = 0, so
  // I = 2 + sum l log2 l = sum_k [(1+u_k) ln(1+u_k) - u_k] / (4 ln 2).
  const std::array<double, 4> u = {-c.c1 - c.c2 - c.c3, -c.c1 + c.c2 + c.c3, c.c1 - c.c2 + c.c3,
                                   c.c1 + c.c2 - c.c3};
  double sum = 0.0;
  for (double x : u) sum += xlogx_shifted(std::max(x, -1.0));
  return std::max(0.0, sum / (4.0 * kLn2));
}

double classical_correlation_analytic_bell(const BellCoeffs& c) {
  require_physical(c);
  const double chi = std::min(1.0, std::max({std::abs(c.c1), std::abs(c.c2), std::abs(c.c3)}));
  return (xlogx_shifted(chi) + xlogx_shifted(-chi)) / (2.0 * kLn2);
}

double discord_analytic_bell(const BellCoeffs& c) {
  return std::max(0.0, mutual_information_analytic_bell(c) - classical_correlation_analytic_bell(c));
}

double geometric_discord_analytic(const BellCoeffs& c) {
  require_physical(c);
  const double a = c.c1 * c.c1;
  const double b = c.c2 * c.c2;
  const double d = c.c3 * c.c3;
  return 0.5 * (a + b + d - std::max({a, b, d}));
}

double geometric_discord_restricted_numeric(const BellCoeffs& c) {
  const Matrix4c rho = bell_diagonal_to_density(c).matrix();
  double best = std::numeric_limits<double>::infinity();
  for (int axis = 1; axis <= 3; ++axis) {
    const Matrix4c corr = kron(pauli(axis), pauli(axis));
    const double t = std::clamp((rho * corr).trace().real(), -1.0, 1.0);
    const Matrix4c chi = (Matrix4c::Identity() + t * corr) / 4.0;
    const Matrix4c diff = rho - chi;
    best = std::min(best, 2.0 * (diff * diff).trace().real());
  }
  return best;
}

TaylorCorrelations taylor_correlations(double c2, double c3) {
  if (!(std::abs(c2) <= kTaylorHardLimit && std::abs(c3) <= kTaylorHardLimit)) {
    throw DomainError("taylor_correlations: coefficients must satisfy |c| <= 0.1");
  }
  const double scale = 1.0 / (2.0 * kLn2);
  const double a = c2 * c2;
  const double b = c3 * c3;
  TaylorCorrelations t;
  t.mutual = scale * (b + a);
  t.classical = scale * std::max(a, b);
  t.discord = scale * std::min(a, b);
  t.outside_small_regime = std::abs(c2) > kTaylorWarnLimit || std::abs(c3) > kTaylorWarnLimit;
  return t;
}

CriticalTime critical_time(double c2_0, double c3, double t_dephase_ns) {
  if (!(c3 > 0.0)) throw DomainError("critical_time: c3 must be positive");
  if (!(t_dephase_ns > 0.0)) throw DomainError("critical_time: dephasing time must be positive");
  if (c3 >= c2_0) return {0.0, true};
  return {std::sqrt(-std::log(c3 / c2_0)) * t_dephase_ns, false};
}

DensityMatrix repair_positivity(const Matrix4c& m) {
  Matrix4c h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix4c> solver(h);
  if (solver.eigenvalues()(0) < 0.0) {
    const Eigen::Vector4d clipped = solver.eigenvalues().cwiseMax(0.0);
    h = solver.eigenvectors() * clipped.cast<cplx>().asDiagonal() * solver.eigenvectors().adjoint();
    h = 0.5 * (h + h.adjoint());
  }
  const double tr = h.trace().real();
  if (!(tr > 0.0)) throw InvalidState("repair_positivity: no positive spectral weight");
  return DensityMatrix(h / tr);
}

ErrorBars correlation_error_bars(const DensityMatrix& rho, const ElementErrors& errs, int n_samples,
                                 std::uint64_t seed, const OptimizerConfig& cfg) {
  if (n_samples < 100) throw std::invalid_argument("correlation_error_bars: n_samples must be >= 100");
  errs.validate();
  const double base_i = mutual_information(rho);
  const double base_c = classical_correlation(rho, cfg).bits;
  const double base_d = base_i - base_c;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  ErrorBars out;
  for (int s = 0; s < n_samples; ++s) {
    Matrix4c m = rho.matrix();
    for (int i = 0; i < 4; ++i) {
      for (int j = i; j < 4; ++j) {
        const double dre = errs.re(i, j) * unit(rng);
        const double dim = i == j ? 0.0 : errs.im(i, j) * unit(rng);
        m(i, j) += cplx(dre, dim);
        if (i != j) m(j, i) = std::conj(m(i, j));
      }
    }
    const DensityMatrix sample = repair_positivity(m);
    const double i_s = mutual_information(sample);
    const double c_s = classical_correlation(sample, cfg).bits;
    out.mutual = std::max(out.mutual, std::abs(i_s - base_i));
    out.classical = std::max(out.classical, std::abs(c_s - base_c));
    out.discord = std::max(out.discord, std::abs((i_s - c_s) - base_d));
  }
  return out;
}

CorrelationReport analyze(const DensityMatrix& rho, const OptimizerConfig& cfg) {
  CorrelationReport r;
  r.mutual_info = mutual_information(rho);
  const ClassicalCorrelation cc = classical_correlation(rho, cfg);
  r.classical_corr = cc.bits;
  r.optimum = cc.optimum;
  r.discord = std::max(0.0, r.mutual_info - r.classical_corr);
  r.geo_discord = geometric_discord(rho, cfg.measured);
  return r;
}

}  // namespace spincorr
