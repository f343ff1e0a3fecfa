// Time evolution of the electron-nuclear pair under static Gaussian
// detunings, pulse sequences (state preparation, two-flip decoupling,
// repeated decoupling blocks), decay fitting and transition detection.
//
// Times are in ns and detunings in rad/ns.
#pragma once

#include "spincorr/qmat.hpp"
#include "spincorr/states.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace spincorr {

struct PhysicsParams {
  double t2e_star_ns = 175.0;    // Gaussian dephasing of electron-flip coherences
  double t2e_ns = 120'000.0;     // homogeneous electron coherence time (may be +inf)
  double t2n_star_ns = 24'000.0; // Gaussian dephasing of nuclear coherences
  double epsilon = 7.35e-3;      // thermal polarization

  /// Throws ConfigError for non-positive times or epsilon outside [0, 1/4).
  void validate() const;

  /// Human-readable notes when t2e_star < t2n_star < t2e does not hold.
  std::vector<std::string> regime_warnings() const;
};

/// Closed-form flow: c1, c2 scaled by exp[-(t/t2e_star)^2], c3 unchanged.
BellCoeffs evolve_coeffs_analytic(const BellCoeffs& c0, double t_ns, const PhysicsParams& p);

/// Element-wise multiplier for free evolution over dt with detunings
/// (delta_e, delta_n): coherence (j, k) picks up exp(-i (w_j - w_k) dt) with
/// w = (delta_e/2) s_e + (delta_n/2) s_n, and electron-flip coherences decay
/// by exp(-dt/t2e). Populations are untouched.
Matrix4c free_phase_factors(double dt_ns, double delta_e, double delta_n, const PhysicsParams& p);

/// A rotation applied instantaneously at `at_ns`, followed by free evolution
/// for `duration_ns`. At the end of the duration every element (j, k) is
/// multiplied by damping(j, k); the default all-ones mask does nothing.
struct PulseEvent {
  double at_ns = 0.0;
  Channel channel = Channel::EFlip;
  double theta = 0.0;
  double phi = 0.0;
  double duration_ns = 0.0;
  Eigen::Matrix4d damping = Eigen::Matrix4d::Ones();
};

struct PulseSequence {
  std::vector<PulseEvent> events;
  std::vector<double> readout_times_ns;  // a readout at t sees every pulse with at <= t

  /// Throws std::invalid_argument on unsorted/overlapping events, negative
  /// times, unsorted readouts or an asymmetric damping mask.
  void validate() const;
};

/// Quadrature orders of the independent electron and nuclear detuning grids.
/// Order 1 disables a grid (detuning pinned to zero).
struct EnsembleModel {
  int electron_order = 64;
  int nuclear_order = 64;

  static EnsembleModel with(int order, bool electron_grid, bool nuclear_grid);
  static EnsembleModel disabled() { return {1, 1}; }

  void validate() const;

  /// Standard deviations sqrt(2)/T*, which make the ensemble average of
  /// exp(-i delta t) equal exp[-(t/T*)^2].
  static double sigma_e(const PhysicsParams& p) { return std::numbers::sqrt2 / p.t2e_star_ns; }
  static double sigma_n(const PhysicsParams& p) { return std::numbers::sqrt2 / p.t2n_star_ns; }
};

struct TrajectorySample {
  double t_ns;
  DensityMatrix rho;
  BellCoeffs c;
  double residual;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
};

/// Evolves every quadrature node through the sequence and averages the
/// node states at each readout. Node blocks are reduced in a fixed order, so
/// the result does not depend on `workers`.
Trajectory run_sequence(const PulseSequence& seq, const DensityMatrix& rho0, const EnsembleModel& model,
                        const PhysicsParams& p, int workers = 1);

/// Trajectory of the closed-form coefficient flow at the given times.
Trajectory analytic_trajectory(const BellCoeffs& c0, std::span<const double> times_ns, const PhysicsParams& p);

struct PrepParams {
  double theta1 = 0.70 * std::numbers::pi;
  double theta2 = 0.28 * std::numbers::pi;
  double f = std::cos(0.28 * std::numbers::pi);
  double tau1_ns = 1'000.0;
  double tau2_ns = 200'000.0;
  double pulse_pi2_rf_ns = 5'000.0;

  void validate() const;
};

/// Five-pulse preparation from the thermal state:
///   MW2(theta1), wait tau1 -> RF1(theta2), wait tau2 -> RF2(pi/2)
///   -> RF1(pi/2) with the (3,4) coherence damped by f -> MW2(pi).
/// Both waits are far longer than the relevant dephasing times, so they are
/// encoded as masks that remove all coherences. Single readout at the end.
PulseSequence prep_sequence(const PrepParams& prep);

/// Applies each event of `seq` in turn with detunings disabled and returns
/// the state after each event (including its duration and damping).
std::vector<DensityMatrix> run_stages(const PulseSequence& seq, const DensityMatrix& rho0, const PhysicsParams& p);

/// Closed-form deviation matrices (units of epsilon) after the RF1(theta2)
/// wait, the RF2 pi/2, the damped RF1 pi/2 and the final MW2 pi.
std::array<Matrix4c, 4> prep_stage_predictions(double theta1, double theta2, double f);

/// Thermal state driven through `prep_sequence`.
DensityMatrix prepare_state(const PrepParams& prep, const PhysicsParams& p);

/// Electron flips (pi about x on both EPR transitions) at tau and 3 tau; readout at 4 tau.
PulseSequence dd_two_flip(double tau_ns);

/// n_blocks consecutive two-flip blocks of length 4 tau4. Readouts at t = 0
/// and at samples_per_block uniform points per block, the last one on the
/// block's echo.
PulseSequence dd_revival(double tau4_ns, int n_blocks, int samples_per_block);

/// Least-squares fit of y = A exp[-(t/T)^2] through ln y = ln A - t^2/T^2
/// weighted by y^2. Returns T. Throws DomainError for non-positive y and
/// NumericalFailure for a degenerate fit.
double fit_gaussian_decay(std::span<const double> ts_ns, std::span<const double> ys);

/// Linearly interpolated time where |c2| falls to |c3|; 0 if it starts there
/// or below, nullopt if it never does within the trajectory.
std::optional<double> detect_transition_time(const Trajectory& traj);

}  // namespace spincorr
