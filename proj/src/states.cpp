#include "spincorr/states.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace spincorr {

std::array<double, 4> physicality_check(const BellCoeffs& c) {
  return {(1.0 - c.c1 - c.c2 - c.c3) / 4.0, (1.0 - c.c1 + c.c2 + c.c3) / 4.0,
          (1.0 + c.c1 - c.c2 + c.c3) / 4.0, (1.0 + c.c1 + c.c2 - c.c3) / 4.0};
}

bool is_physical(const BellCoeffs& c) {
  const auto ev = physicality_check(c);
  return std::ranges::all_of(ev, [](double l) { return l >= -kPhysicalitySlack; }) &&
         std::isfinite(c.c1) && std::isfinite(c.c2) && std::isfinite(c.c3);
}

void require_physical(const BellCoeffs& c) {
  if (is_physical(c)) return;
  const auto ev = physicality_check(c);
  const double worst = *std::ranges::min_element(ev);
  throw DomainError("unphysical Bell-diagonal coefficients: Bell-basis eigenvalue " +
                    std::to_string(worst));
}

DensityMatrix bell_diagonal_to_density(const BellCoeffs& c) {
  require_physical(c);
  Matrix4c m = Matrix4c::Zero();
  m(0, 0) = m(3, 3) = (1.0 + c.c3) / 4.0;
  m(1, 1) = m(2, 2) = (1.0 - c.c3) / 4.0;
  m(0, 3) = m(3, 0) = (c.c1 - c.c2) / 4.0;
  m(1, 2) = m(2, 1) = (c.c1 + c.c2) / 4.0;
  return DensityMatrix(m);
}

BellFit coeffs_from_density(const DensityMatrix& rho) {
  const PauliVector p = pauli_expansion(rho);
  BellFit fit;
  fit.c = {p(1, 1), p(2, 2), p(3, 3)};
  Matrix4c model = Matrix4c::Zero();
  model(0, 0) = model(3, 3) = (1.0 + fit.c.c3) / 4.0;
  model(1, 1) = model(2, 2) = (1.0 - fit.c.c3) / 4.0;
  model(0, 3) = model(3, 0) = (fit.c.c1 - fit.c.c2) / 4.0;
  model(1, 2) = model(2, 1) = (fit.c.c1 + fit.c.c2) / 4.0;
  fit.residual = (rho.matrix() - model).norm();
  return fit;
}

DensityMatrix thermal_state(const ThermalParams& p) {
  if (!(p.epsilon >= 0.0 && p.epsilon < 0.25)) {
    throw DomainError("thermal polarization must lie in [0, 1/4)");
  }
  Matrix4c m = Matrix4c::Zero();
  m(0, 0) = m(1, 1) = 0.25 - p.epsilon;
  m(2, 2) = m(3, 3) = 0.25 + p.epsilon;
  return DensityMatrix(m);
}

Matrix4c deviation(const DensityMatrix& rho, double epsilon) {
  return (rho.matrix() - Matrix4c::Identity() / 4.0) / epsilon;
}

DensityMatrix from_deviation(const Matrix4c& dev, double epsilon) {
  return DensityMatrix(Matrix4c::Identity() / 4.0 + epsilon * dev);
}

}  // namespace spincorr
