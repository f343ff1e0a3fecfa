#include "spincorr/qmat.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace spincorr {

namespace {

constexpr cplx kI{0.0, 1.0};

// Level-index pairs (0-based) addressed by each selective transition.
std::array<int, 2> transition_levels(Channel c) {
  switch (c) {
    case Channel::MW1: return {1, 3};
    case Channel::MW2: return {0, 2};
    case Channel::RF1: return {0, 1};
    case Channel::RF2: return {2, 3};
    case Channel::EFlip: break;
  }
  throw std::invalid_argument("transition_levels: EFlip addresses two transitions");
}

Matrix2c rotation2(double theta, double phi) {
  const double c = std::cos(theta / 2.0);
  const double s = std::sin(theta / 2.0);
  Matrix2c r;
  r << c, -kI * s * std::exp(-kI * phi),
       -kI * s * std::exp(kI * phi), c;
  return r;
}

}  // namespace

template <int N>
DensityOperator<N>::DensityOperator(const Matrix& m) : m_(m) {
  if (!m.allFinite()) throw InvalidState("density matrix has non-finite entries");
  if (!is_hermitian(m)) throw InvalidState("density matrix is not Hermitian");
  const cplx tr = m.trace();
  if (std::abs(tr.real() - 1.0) > tolerance::kTrace || std::abs(tr.imag()) > tolerance::kTrace) {
    throw InvalidState("density matrix trace differs from 1 by " + std::to_string(std::abs(tr - 1.0)));
  }
  const double lowest = eigenvalues()(0);
  if (lowest < -tolerance::kPositivity) {
    throw InvalidState("density matrix has negative eigenvalue " + std::to_string(lowest));
  }
}

template <int N>
DensityOperator<N> DensityOperator<N>::maximally_mixed() {
  return DensityOperator(Matrix::Identity() / static_cast<double>(N));
}

template <int N>
typename DensityOperator<N>::Spectrum DensityOperator<N>::eigenvalues() const {
  return hermitian_eigenvalues(m_);
}

template class DensityOperator<2>;
template class DensityOperator<4>;

Channel parse_channel(std::string_view tag) {
  if (tag == "MW1") return Channel::MW1;
  if (tag == "MW2") return Channel::MW2;
  if (tag == "RF1") return Channel::RF1;
  if (tag == "RF2") return Channel::RF2;
  if (tag == "E-FLIP" || tag == "EFLIP") return Channel::EFlip;
  throw std::invalid_argument("unknown channel tag '" + std::string(tag) + "'");
}

std::string_view to_string(Channel c) {
  switch (c) {
    case Channel::MW1: return "MW1";
    case Channel::MW2: return "MW2";
    case Channel::RF1: return "RF1";
    case Channel::RF2: return "RF2";
    case Channel::EFlip: return "E-FLIP";
  }
  return "?";
}

const Matrix2c& pauli(int index) {
  static const std::array<Matrix2c, 4> table = [] {
    std::array<Matrix2c, 4> s;
    s[0] << 1, 0, 0, 1;
    s[1] << 0, 1, 1, 0;
    s[2] << 0, -kI, kI, 0;
    s[3] << 1, 0, 0, -1;
    return s;
  }();
  if (index < 0 || index > 3) throw std::out_of_range("pauli index must be 0..3");
  return table[static_cast<std::size_t>(index)];
}

Matrix4c kron(const Matrix2c& a, const Matrix2c& b) {
  Matrix4c out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return out;
}

bool is_hermitian(const Eigen::Ref<const Eigen::MatrixXcd>& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

bool is_unitary(const Matrix4c& u, double tol) {
  return (u * u.adjoint() - Matrix4c::Identity()).cwiseAbs().maxCoeff() <= tol;
}

Eigen::Vector2d hermitian_eigenvalues(const Matrix2c& m) {
  const double a = m(0, 0).real();
  const double d = m(1, 1).real();
  const cplx b = 0.5 * (m(0, 1) + std::conj(m(1, 0)));
  const double mean = 0.5 * (a + d);
  const double radius = std::hypot(0.5 * (a - d), std::abs(b));
  return {mean - radius, mean + radius};
}

Eigen::Vector4d hermitian_eigenvalues(const Matrix4c& m) {
  const Matrix4c h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix4c> solver(h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

double entropy_of_spectrum(std::span<const double> spectrum) {
  double s = 0.0;
  for (double p : spectrum) {
    p = std::clamp(p, 0.0, 1.0);
    if (p > 0.0) s -= p * std::log2(p);
  }
  return s;
}

template <int N>
double von_neumann_entropy(const DensityOperator<N>& rho) {
  const auto ev = rho.eigenvalues();
  return entropy_of_spectrum(std::span<const double>(ev.data(), N));
}

template double von_neumann_entropy<2>(const DensityOperator<2>&);
template double von_neumann_entropy<4>(const DensityOperator<4>&);

ReducedDensityMatrix partial_trace(const DensityMatrix& rho, Subsystem keep) {
  const Matrix4c& m = rho.matrix();
  Matrix2c r = Matrix2c::Zero();
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int k = 0; k < 2; ++k) {
        r(a, b) += keep == Subsystem::A ? m(2 * a + k, 2 * b + k) : m(2 * k + a, 2 * k + b);
      }
  return ReducedDensityMatrix(r);
}

DensityMatrix swap_subsystems(const DensityMatrix& rho) {
  Eigen::PermutationMatrix<4> swap;
  swap.indices() << 0, 2, 1, 3;
  return DensityMatrix(swap * rho.matrix() * swap.transpose());
}

PauliVector pauli_expansion(const DensityMatrix& rho) {
  PauliVector p;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      p.r(i, j) = (rho.matrix() * kron(pauli(i), pauli(j))).trace().real();
    }
  return p;
}

Matrix4c reconstruct(const PauliVector& p) {
  Matrix4c m = Matrix4c::Zero();
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m += p.r(i, j) * kron(pauli(i), pauli(j));
  return m / 4.0;
}

Matrix4c embed_rotation(Channel channel, double theta, double phi) {
  const Matrix2c r = rotation2(theta, phi);
  if (channel == Channel::EFlip) return kron(r, Matrix2c::Identity());
  const auto [p, q] = transition_levels(channel);
  Matrix4c u = Matrix4c::Identity();
  u(p, p) = r(0, 0);
  u(p, q) = r(0, 1);
  u(q, p) = r(1, 0);
  u(q, q) = r(1, 1);
  return u;
}

DensityMatrix conjugate(const DensityMatrix& rho, const Matrix4c& u) {
  if (!is_unitary(u)) throw std::invalid_argument("conjugate: matrix is not unitary");
  const Matrix4c out = u * rho.matrix() * u.adjoint();
  return DensityMatrix(0.5 * (out + out.adjoint()));
}

}  // namespace spincorr
