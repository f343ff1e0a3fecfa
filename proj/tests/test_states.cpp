#include "doctest.h"
#include "spincorr/states.hpp"

#include <algorithm>
#include <random>

using namespace spincorr;

TEST_CASE("physicality matches the spectrum of the built matrix") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-0.6, 0.6);
  for (int trial = 0; trial < 200; ++trial) {
    const BellCoeffs c{u(rng), u(rng), u(rng)};
    std::array<double, 4> ev = physicality_check(c);
    std::sort(ev.begin(), ev.end());
    // oracle: build (1 + sum c_i s_i s_i)/4 directly and diagonalize
    Matrix4c m = Matrix4c::Identity();
    for (int i = 1; i <= 3; ++i) m += c[i - 1] * kron(pauli(i), pauli(i));
    m /= 4.0;
    const Eigen::Vector4d ref = hermitian_eigenvalues(m);
    for (int k = 0; k < 4; ++k) CHECK(ev[static_cast<std::size_t>(k)] == doctest::Approx(ref(k)).epsilon(1e-12));
    CHECK(is_physical(c) == (ref(0) >= -kPhysicalitySlack));
  }
}

TEST_CASE("Bell-diagonal construction and recovery") {
  const BellCoeffs c{0.1, -0.3, 0.2};
  const DensityMatrix rho = bell_diagonal_to_density(c);
  CHECK(rho(0, 0).real() == doctest::Approx((1.0 + c.c3) / 4.0));
  CHECK(rho(0, 3).real() == doctest::Approx((c.c1 - c.c2) / 4.0));
  CHECK(rho(1, 2).real() == doctest::Approx((c.c1 + c.c2) / 4.0));
  const BellFit fit = coeffs_from_density(rho);
  CHECK(fit.c.c1 == doctest::Approx(c.c1));
  CHECK(fit.c.c2 == doctest::Approx(c.c2));
  CHECK(fit.c.c3 == doctest::Approx(c.c3));
  CHECK(fit.residual < 1e-15);

  CHECK_THROWS_AS(bell_diagonal_to_density({1.0, 1.0, 1.0}), DomainError);
  CHECK_NOTHROW(bell_diagonal_to_density({1.0, -1.0, 1.0}));  // |Phi+>
}

TEST_CASE("non-Bell states leave a residual") {
  Matrix4c m = Matrix4c::Identity() / 4.0;
  m(0, 1) = m(1, 0) = 0.05;
  const BellFit fit = coeffs_from_density(DensityMatrix(m));
  CHECK(fit.residual == doctest::Approx(0.05 * std::sqrt(2.0)));
}

TEST_CASE("thermal state and deviations") {
  const double eps = 7.35e-3;
  const DensityMatrix rho = thermal_state({eps});
  CHECK(rho(0, 0).real() == doctest::Approx(0.25 - eps));
  CHECK(rho(1, 1).real() == doctest::Approx(0.25 - eps));
  CHECK(rho(2, 2).real() == doctest::Approx(0.25 + eps));
  CHECK(rho(3, 3).real() == doctest::Approx(0.25 + eps));
  const Matrix4c dev = deviation(rho, eps);
  CHECK(dev(0, 0).real() == doctest::Approx(-1.0));
  CHECK((from_deviation(dev, eps).matrix() - rho.matrix()).norm() < 1e-15);
  CHECK_THROWS_AS(thermal_state({0.3}), DomainError);
  CHECK(bell_tolerance(eps) == doctest::Approx(0.05 * eps));
}
