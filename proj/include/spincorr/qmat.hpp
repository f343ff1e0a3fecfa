// Dense two-qubit linear algebra: density operators, entropies, partial
// traces, Pauli expansion and transition-selective rotations.
//
// Basis order for every 4x4 matrix is the level order 1..4 of the
// electron-nuclear system (0-based indices 0..3 in code):
//
//   level 1 = |e up, n up>    level 2 = |e up, n down>
//   level 3 = |e dn, n up>    level 4 = |e dn, n down>
//
// i.e. the tensor order is electron (A) x nucleus (B), with |0> = spin up.
#pragma once

#include "spincorr/errors.hpp"

#include <Eigen/Dense>

#include <complex>
#include <span>
#include <string_view>

namespace spincorr {

using cplx = std::complex<double>;
using Matrix2c = Eigen::Matrix2cd;
using Matrix4c = Eigen::Matrix4cd;

namespace tolerance {
inline constexpr double kHermitian = 1e-12;
inline constexpr double kTrace = 1e-12;
inline constexpr double kPositivity = 1e-10;
inline constexpr double kUnitary = 1e-10;
}  // namespace tolerance

/// An N-level density operator. Construction validates Hermiticity, unit
/// trace and positivity (see `tolerance`), so every instance is a valid state.
template <int N>
class DensityOperator {
 public:
  using Matrix = Eigen::Matrix<cplx, N, N>;
  using Spectrum = Eigen::Matrix<double, N, 1>;

  explicit DensityOperator(const Matrix& m);

  static DensityOperator maximally_mixed();

  const Matrix& matrix() const noexcept { return m_; }
  cplx operator()(int row, int col) const { return m_(row, col); }

  /// Ascending eigenvalues.
  Spectrum eigenvalues() const;

 private:
  Matrix m_;
};

using DensityMatrix = DensityOperator<4>;
using ReducedDensityMatrix = DensityOperator<2>;

/// Pauli coefficients r(i, j) = Tr[rho (sigma_i x sigma_j)], sigma_0 = identity.
struct PauliVector {
  Eigen::Matrix4d r = Eigen::Matrix4d::Zero();

  double operator()(int i, int j) const { return r(i, j); }
};

enum class Subsystem { A, B };

/// Selective transitions of the four-level system. MW2 couples levels 1-3,
/// MW1 couples 2-4, RF1 couples 1-2, RF2 couples 3-4. EFlip rotates the
/// electron on both EPR transitions at once (sigma_x on A).
enum class Channel { MW1, MW2, RF1, RF2, EFlip };

Channel parse_channel(std::string_view tag);
std::string_view to_string(Channel c);

/// sigma_0 .. sigma_3 (identity, x, y, z).
const Matrix2c& pauli(int index);

Matrix4c kron(const Matrix2c& a, const Matrix2c& b);

bool is_hermitian(const Eigen::Ref<const Eigen::MatrixXcd>& m, double tol = tolerance::kHermitian);
bool is_unitary(const Matrix4c& u, double tol = tolerance::kUnitary);

/// Ascending eigenvalues of a Hermitian matrix (the anti-Hermitian part is ignored).
Eigen::Vector2d hermitian_eigenvalues(const Matrix2c& m);
Eigen::Vector4d hermitian_eigenvalues(const Matrix4c& m);

/// -sum p log2 p over a probability spectrum; slightly negative entries
/// (numerical noise) are clipped to zero and 0 log 0 = 0.
double entropy_of_spectrum(std::span<const double> spectrum);

template <int N>
double von_neumann_entropy(const DensityOperator<N>& rho);

ReducedDensityMatrix partial_trace(const DensityMatrix& rho, Subsystem keep);

/// Exchanges the roles of A and B (electron and nucleus).
DensityMatrix swap_subsystems(const DensityMatrix& rho);

PauliVector pauli_expansion(const DensityMatrix& rho);

/// (1/4) sum r(i,j) sigma_i x sigma_j. Not validated: callers wrap the
/// result in a DensityMatrix when they need a state.
Matrix4c reconstruct(const PauliVector& p);

/// exp[-i (theta/2)(cos(phi) sigma_x + sin(phi) sigma_y)] on the channel's
/// two-level subspace, identity elsewhere.
Matrix4c embed_rotation(Channel channel, double theta, double phi = 0.0);

/// U rho U^dagger. Throws std::invalid_argument if `u` is not unitary.
DensityMatrix conjugate(const DensityMatrix& rho, const Matrix4c& u);

}  // namespace spincorr
