// Bell-diagonal and thermal states of the electron-nuclear pair.
#pragma once

#include "spincorr/qmat.hpp"

#include <array>

namespace spincorr {

/// rho = (1/4)(1 + c1 xx + c2 yy + c3 zz).
struct BellCoeffs {
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;

  double operator[](int i) const { return i == 0 ? c1 : (i == 1 ? c2 : c3); }
  friend bool operator==(const BellCoeffs&, const BellCoeffs&) = default;
};

/// Thermal polarization, 0 < epsilon < 1/4.
struct ThermalParams {
  double epsilon = 7.35e-3;
};

inline constexpr double kPhysicalitySlack = 1e-12;

/// The four Bell-basis eigenvalues of the state built from `c`, in the order
/// (1-c1-c2-c3, 1-c1+c2+c3, 1+c1-c2+c3, 1+c1+c2-c3)/4.
std::array<double, 4> physicality_check(const BellCoeffs& c);

bool is_physical(const BellCoeffs& c);

/// Throws DomainError naming the most negative eigenvalue if `c` is unphysical.
void require_physical(const BellCoeffs& c);

DensityMatrix bell_diagonal_to_density(const BellCoeffs& c);

struct BellFit {
  BellCoeffs c;
  double residual = 0.0;  // Frobenius norm of rho - bell_diagonal_to_density(c)
};

/// Reads c_i = Tr[rho sigma_i x sigma_i] and reports how far rho is from the
/// corresponding Bell-diagonal state.
BellFit coeffs_from_density(const DensityMatrix& rho);

/// Default Bell-diagonal recognition tolerance, as a multiple of epsilon.
inline constexpr double kBellToleranceFactor = 0.05;

inline double bell_tolerance(double epsilon) { return kBellToleranceFactor * epsilon; }

/// rho_0 = 1/4 - epsilon (sigma_z x 1).
DensityMatrix thermal_state(const ThermalParams& p);

/// (rho - 1/4) / epsilon, the deviation matrix in units of epsilon.
Matrix4c deviation(const DensityMatrix& rho, double epsilon);

/// 1/4 + epsilon * dev, validated.
DensityMatrix from_deviation(const Matrix4c& dev, double epsilon);

}  // namespace spincorr
