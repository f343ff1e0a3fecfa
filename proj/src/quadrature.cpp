#include "spincorr/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace spincorr {

QuadratureRule gauss_hermite(int order) {
  if (order < 1) throw std::invalid_argument("gauss_hermite: order must be >= 1");
  const int n = order;
  // Golub-Welsch: nodes are the eigenvalues of the Jacobi matrix. They are
  // then polished by Newton steps on the orthonormal recurrence, which also
  // gives accurate weights 2 / p'^2.
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd sub(std::max(n - 1, 0));
  for (int k = 0; k + 1 < n; ++k) sub(k) = std::sqrt((k + 1) / 2.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> jacobi;
  jacobi.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (jacobi.info() != Eigen::Success) throw std::runtime_error("gauss_hermite: eigenvalue solver failed");

  const double pim4 = std::pow(std::numbers::pi, -0.25);
  QuadratureRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double z = jacobi.eigenvalues()(i);
    double pp = 0.0;
    for (int it = 0; it < 8; ++it) {
      double p1 = pim4;
      double p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      const double step = p1 / pp;
      z -= step;
      if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(z))) break;
    }
    rule.nodes[static_cast<std::size_t>(i)] = z;
    rule.weights[static_cast<std::size_t>(i)] = 2.0 / (pp * pp);
  }
  // exact mirror symmetry
  for (int i = 0; i < n / 2; ++i) {
    const auto lo = static_cast<std::size_t>(i), hi = static_cast<std::size_t>(n - 1 - i);
    const double x = 0.5 * (rule.nodes[hi] - rule.nodes[lo]);
    const double w = 0.5 * (rule.weights[hi] + rule.weights[lo]);
    rule.nodes[lo] = -x;
    rule.nodes[hi] = x;
    rule.weights[lo] = rule.weights[hi] = w;
  }
  if (n % 2 == 1) rule.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
  return rule;
}

QuadratureRule normal_rule(int order, double sigma) {
  if (order == 1) return {{0.0}, {1.0}};
  if (!(sigma > 0.0)) throw std::invalid_argument("normal_rule: sigma must be positive");
  QuadratureRule rule = gauss_hermite(order);
  const double scale = std::sqrt(2.0) * sigma;
  for (auto& x : rule.nodes) x *= scale;
  for (auto& w : rule.weights) w /= std::sqrt(std::numbers::pi);
  return rule;
}

int normal_rule_order_for(double phase_sd) {
  const double w = std::numbers::sqrt2 * std::abs(phase_sd);
  return std::max(8, static_cast<int>(std::ceil(0.15 * w * w + 3.3 * w)) + 8);
}

}  // namespace spincorr
