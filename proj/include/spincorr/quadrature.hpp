// Gauss-Hermite quadrature for averages over Gaussian-distributed detunings.
#pragma once

#include <vector>

namespace spincorr {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Nodes and weights for integral f(x) exp(-x^2) dx, ascending nodes.
QuadratureRule gauss_hermite(int order);

/// Rule for E[f(X)], X ~ Normal(0, sigma): weights sum to one. Order 1 is
/// the single node X = 0.
QuadratureRule normal_rule(int order, double sigma);

inline constexpr int kMaxQuadratureOrder = 512;

/// Smallest order (at least 8) whose normal rule reproduces E[cos(phi)] =
/// exp(-s^2/2) for phi ~ Normal(0, s') to about 1e-10 for every s' <= s.
/// Empirical bound n = 0.15 w^2 + 3.3 w + 8 with w = sqrt(2) s.
int normal_rule_order_for(double phase_sd);

}  // namespace spincorr
