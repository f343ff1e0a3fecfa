// Correlation quantifiers for two-qubit states: mutual information,
// classical correlation and quantum discord (entropic, optimized over
// projective measurements), geometric discord, their closed forms on
// Bell-diagonal states, small-coefficient expansions and error bars.
//
// All entropic quantities are in bits.
#pragma once

#include "spincorr/qmat.hpp"
#include "spincorr/states.hpp"

#include <cstdint>
#include <optional>

namespace spincorr {

/// Projective basis on the measured qubit:
///   |par>  = cos(theta)|0> + e^{i phi} sin(theta)|1>
///   |perp> = e^{-i phi} sin(theta)|0> - cos(theta)|1>
/// with theta in [0, pi/2] and phi in [0, 2 pi).
struct MeasurementBasis {
  double theta = 0.0;
  double phi = 0.0;

  /// Maps any (theta, phi) to the canonical ranges, preserving the basis.
  static MeasurementBasis canonical(double theta, double phi);
};

struct OptimizerConfig {
  int grid_theta = 64;
  int grid_phi = 128;
  double refine_tol = 1e-10;  // radians
  int max_refine_iters = 200;
  Subsystem measured = Subsystem::B;

  /// Throws std::invalid_argument on grid counts below 8 or non-positive tolerance.
  void validate() const;
};

struct ClassicalCorrelation {
  double bits = 0.0;
  MeasurementBasis optimum;
};

/// Per-element absolute half-widths for the real and imaginary parts.
struct ElementErrors {
  Eigen::Matrix4d re = Eigen::Matrix4d::Zero();
  Eigen::Matrix4d im = Eigen::Matrix4d::Zero();

  void validate() const;
  ElementErrors scaled(double factor) const { return {re * factor, im * factor}; }
};

struct ErrorBars {
  double mutual = 0.0;
  double classical = 0.0;
  double discord = 0.0;
};

struct CorrelationReport {
  double mutual_info = 0.0;
  double classical_corr = 0.0;
  double discord = 0.0;
  double geo_discord = 0.0;
  MeasurementBasis optimum;
  std::optional<ErrorBars> errors;
};

double mutual_information(const DensityMatrix& rho);

/// S(rho_A) - sum_k p_k S(rho_A^k) for the given basis on the measured qubit.
double measured_information(const DensityMatrix& rho, const MeasurementBasis& basis,
                            Subsystem measured = Subsystem::B);

/// Maximizes `measured_information` with a (theta, phi) grid scan followed by
/// Nelder-Mead refinement from the best grid point.
ClassicalCorrelation classical_correlation(const DensityMatrix& rho, const OptimizerConfig& cfg = {});

double quantum_discord(const DensityMatrix& rho, const OptimizerConfig& cfg = {});

/// Squared geometric discord 2 min ||rho - chi||^2 over states classical on
/// the measured qubit, via the closed two-qubit expression in terms of the
/// Pauli coefficients.
double geometric_discord(const DensityMatrix& rho, Subsystem measured = Subsystem::B);

// Closed forms on Bell-diagonal states. All throw DomainError for unphysical c.
double mutual_information_analytic_bell(const BellCoeffs& c);
double classical_correlation_analytic_bell(const BellCoeffs& c);
double discord_analytic_bell(const BellCoeffs& c);
double geometric_discord_analytic(const BellCoeffs& c);

/// Independent check of `geometric_discord_analytic`: minimizes 2 Tr(rho - chi)^2
/// with explicit 4x4 matrices over chi = (1 + t sigma_i sigma_i)/4, t in [-1, 1].
double geometric_discord_restricted_numeric(const BellCoeffs& c);

struct TaylorCorrelations {
  double mutual = 0.0;
  double classical = 0.0;
  double discord = 0.0;
  bool outside_small_regime = false;  // some |c| above 0.05
};

inline constexpr double kTaylorWarnLimit = 0.05;
inline constexpr double kTaylorHardLimit = 0.1;

/// Second-order expansions for c1 = 0: I = (c2^2 + c3^2)/(2 ln 2),
/// C = max(c2^2, c3^2)/(2 ln 2), D = min(c2^2, c3^2)/(2 ln 2).
TaylorCorrelations taylor_correlations(double c2, double c3);

struct CriticalTime {
  double t_ns = 0.0;
  bool degenerate = false;  // c3 >= c2(0): no classical-decoherence interval
};

/// sqrt(-ln(c3 / c2_0)) * t_dephase.
CriticalTime critical_time(double c2_0, double c3, double t_dephase_ns);

/// Samples `n_samples` perturbed states (upper-triangle entries uniform within
/// +-errs, Hermitian by construction, trace renormalized, negative eigenvalues
/// clipped) and returns the largest absolute change of I, C and D.
ErrorBars correlation_error_bars(const DensityMatrix& rho, const ElementErrors& errs, int n_samples,
                                 std::uint64_t seed, const OptimizerConfig& cfg = {});

/// Clips negative eigenvalues to zero and renormalizes the trace.
DensityMatrix repair_positivity(const Matrix4c& m);

CorrelationReport analyze(const DensityMatrix& rho, const OptimizerConfig& cfg = {});

}  // namespace spincorr
