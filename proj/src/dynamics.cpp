#include "spincorr/dynamics.hpp"

#include "spincorr/quadrature.hpp"

#include <algorithm>
#include <atomic>
#include <climits>
#include <cmath>
#include <limits>
#include <thread>

namespace spincorr {

namespace {

constexpr double kPi = std::numbers::pi;

// Spin projections (+1 up, -1 down) of each level.
constexpr std::array<double, 4> kElectronSign = {1.0, 1.0, -1.0, -1.0};
constexpr std::array<double, 4> kNuclearSign = {1.0, -1.0, 1.0, -1.0};

bool electron_flip(int j, int k) { return kElectronSign[static_cast<std::size_t>(j)] != kElectronSign[static_cast<std::size_t>(k)]; }

Eigen::Matrix4d kill_coherences() { return Eigen::Matrix4d::Identity(); }

enum class ActionKind { Pulse, Damp, Readout };

struct Action {
  double t;
  long order;
  ActionKind kind;
  std::size_t index;
};

std::vector<Action> build_timeline(const PulseSequence& seq) {
  std::vector<Action> actions;
  for (std::size_t i = 0; i < seq.events.size(); ++i) {
    const PulseEvent& e = seq.events[i];
    actions.push_back({e.at_ns, static_cast<long>(2 * i), ActionKind::Pulse, i});
    actions.push_back({e.at_ns + e.duration_ns, static_cast<long>(2 * i + 1), ActionKind::Damp, i});
  }
  for (std::size_t r = 0; r < seq.readout_times_ns.size(); ++r) {
    actions.push_back({seq.readout_times_ns[r], LONG_MAX, ActionKind::Readout, r});
  }
  std::ranges::stable_sort(actions, [](const Action& a, const Action& b) {
    return a.t != b.t ? a.t < b.t : a.order < b.order;
  });
  return actions;
}

struct CompiledEvent {
  Matrix4c u;
  Matrix4c u_dag;
  Eigen::Matrix4d damping;
};

std::vector<CompiledEvent> compile(const PulseSequence& seq) {
  std::vector<CompiledEvent> out;
  out.reserve(seq.events.size());
  for (const PulseEvent& e : seq.events) {
    const Matrix4c u = embed_rotation(e.channel, e.theta, e.phi);
    out.push_back({u, u.adjoint(), e.damping});
  }
  return out;
}

// Runs one detuning node through the timeline; `sink(r, state)` receives the
// state at readout r.
template <class Sink>
void evolve_node(const std::vector<Action>& timeline, const std::vector<CompiledEvent>& events,
                 const Matrix4c& rho0, double delta_e, double delta_n, const PhysicsParams& p, Sink&& sink) {
  Matrix4c m = rho0;
  double now = 0.0;
  for (const Action& a : timeline) {
    const double dt = a.t - now;
    if (dt > 0.0) {
      m = m.cwiseProduct(free_phase_factors(dt, delta_e, delta_n, p));
      now = a.t;
    }
    switch (a.kind) {
      case ActionKind::Pulse: {
        const CompiledEvent& ev = events[a.index];
        m = ev.u * m * ev.u_dag;
        break;
      }
      case ActionKind::Damp:
        m = m.cwiseProduct(events[a.index].damping.cast<cplx>());
        break;
      case ActionKind::Readout:
        sink(a.index, m);
        break;
    }
  }
}

TrajectorySample make_sample(double t, const Matrix4c& m) {
  DensityMatrix rho(0.5 * (m + m.adjoint()));
  const BellFit fit = coeffs_from_density(rho);
  return {t, std::move(rho), fit.c, fit.residual};
}

}  // namespace

void PhysicsParams::validate() const {
  if (!(t2e_star_ns > 0.0) || !(t2e_ns > 0.0) || !(t2n_star_ns > 0.0)) {
    throw ConfigError("physics: all coherence times must be positive");
  }
  if (!(epsilon >= 0.0 && epsilon < 0.25)) throw ConfigError("physics: epsilon must lie in [0, 1/4)");
}

std::vector<std::string> PhysicsParams::regime_warnings() const {
  std::vector<std::string> w;
  if (!(t2e_star_ns < t2n_star_ns)) w.emplace_back("t2e_star is not shorter than t2n_star");
  if (!(t2n_star_ns < t2e_ns)) w.emplace_back("t2n_star is not shorter than t2e");
  return w;
}

BellCoeffs evolve_coeffs_analytic(const BellCoeffs& c0, double t_ns, const PhysicsParams& p) {
  const double x = t_ns / p.t2e_star_ns;
  const double g = std::exp(-x * x);
  return {c0.c1 * g, c0.c2 * g, c0.c3};
}

Matrix4c free_phase_factors(double dt_ns, double delta_e, double delta_n, const PhysicsParams& p) {
  std::array<cplx, 4> u;
  for (std::size_t k = 0; k < 4; ++k) {
    const double w = 0.5 * (delta_e * kElectronSign[k] + delta_n * kNuclearSign[k]);
    u[k] = std::polar(1.0, -w * dt_ns);
  }
  const double homogeneous = std::exp(-dt_ns / p.t2e_ns);
  Matrix4c f;
  for (int j = 0; j < 4; ++j)
    for (int k = 0; k < 4; ++k) {
      if (j == k) {
        f(j, k) = 1.0;
        continue;
      }
      f(j, k) = u[static_cast<std::size_t>(j)] * std::conj(u[static_cast<std::size_t>(k)]);
      if (electron_flip(j, k)) f(j, k) *= homogeneous;
    }
  return f;
}

void PulseSequence::validate() const {
  for (std::size_t i = 0; i < events.size(); ++i) {
    const PulseEvent& e = events[i];
    if (!(e.at_ns >= 0.0) || !(e.duration_ns >= 0.0) || !std::isfinite(e.at_ns + e.duration_ns)) {
      throw std::invalid_argument("pulse sequence: event times and durations must be finite and >= 0");
    }
    if (!e.damping.allFinite() || e.damping != e.damping.transpose()) {
      throw std::invalid_argument("pulse sequence: damping mask must be finite and symmetric");
    }
    if (i > 0) {
      const PulseEvent& prev = events[i - 1];
      if (e.at_ns < prev.at_ns) throw std::invalid_argument("pulse sequence: events are not time-ordered");
      if (e.at_ns < prev.at_ns + prev.duration_ns) throw std::invalid_argument("pulse sequence: overlapping events");
    }
  }
  for (std::size_t r = 0; r < readout_times_ns.size(); ++r) {
    if (!(readout_times_ns[r] >= 0.0) || !std::isfinite(readout_times_ns[r])) {
      throw std::invalid_argument("pulse sequence: readout before t = 0");
    }
    if (r > 0 && readout_times_ns[r] < readout_times_ns[r - 1]) {
      throw std::invalid_argument("pulse sequence: readout times are not sorted");
    }
  }
}

EnsembleModel EnsembleModel::with(int order, bool electron_grid, bool nuclear_grid) {
  return {electron_grid ? order : 1, nuclear_grid ? order : 1};
}

void EnsembleModel::validate() const {
  for (int order : {electron_order, nuclear_order}) {
    if (order != 1 && order < 8) throw ConfigError("ensemble: quadrature order must be 1 (disabled) or >= 8");
    if (order > kMaxQuadratureOrder) {
      throw ConfigError("ensemble: quadrature order must not exceed " + std::to_string(kMaxQuadratureOrder));
    }
  }
}

Trajectory run_sequence(const PulseSequence& seq, const DensityMatrix& rho0, const EnsembleModel& model,
                        const PhysicsParams& p, int workers) {
  seq.validate();
  model.validate();
  p.validate();
  const QuadratureRule e_rule = normal_rule(model.electron_order, EnsembleModel::sigma_e(p));
  const QuadratureRule n_rule = normal_rule(model.nuclear_order, EnsembleModel::sigma_n(p));
  const std::vector<Action> timeline = build_timeline(seq);
  const std::vector<CompiledEvent> events = compile(seq);
  const std::size_t n_readouts = seq.readout_times_ns.size();

  // One block per electron node; each block is summed sequentially over the
  // nuclear nodes and blocks are combined in index order.
  const std::size_t n_blocks = e_rule.nodes.size();
  std::vector<std::vector<Matrix4c>> partial(n_blocks, std::vector<Matrix4c>(n_readouts, Matrix4c::Zero()));
  auto run_block = [&](std::size_t b) {
    std::vector<Matrix4c>& acc = partial[b];
    for (std::size_t k = 0; k < n_rule.nodes.size(); ++k) {
      const double w = e_rule.weights[b] * n_rule.weights[k];
      evolve_node(timeline, events, rho0.matrix(), e_rule.nodes[b], n_rule.nodes[k], p,
                  [&](std::size_t r, const Matrix4c& m) { acc[r] += w * m; });
    }
  };

  const int n_workers = std::clamp(workers, 1, static_cast<int>(n_blocks));
  if (n_workers == 1) {
    for (std::size_t b = 0; b < n_blocks; ++b) run_block(b);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (int w = 0; w < n_workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t b = next++; b < n_blocks; b = next++) run_block(b);
      });
    }
  }

  Trajectory traj;
  traj.samples.reserve(n_readouts);
  for (std::size_t r = 0; r < n_readouts; ++r) {
    Matrix4c sum = Matrix4c::Zero();
    for (std::size_t b = 0; b < n_blocks; ++b) sum += partial[b][r];
    traj.samples.push_back(make_sample(seq.readout_times_ns[r], sum));
  }
  return traj;
}

Trajectory analytic_trajectory(const BellCoeffs& c0, std::span<const double> times_ns, const PhysicsParams& p) {
  Trajectory traj;
  traj.samples.reserve(times_ns.size());
  for (double t : times_ns) {
    const BellCoeffs c = evolve_coeffs_analytic(c0, t, p);
    traj.samples.push_back({t, bell_diagonal_to_density(c), c, 0.0});
  }
  return traj;
}

void PrepParams::validate() const {
  if (!(f >= 0.0 && f <= 1.0)) throw ConfigError("prep: damping factor f must lie in [0, 1]");
  if (!(tau1_ns >= 0.0) || !(tau2_ns >= 0.0) || !(pulse_pi2_rf_ns >= 0.0)) {
    throw ConfigError("prep: delays and pulse lengths must be >= 0");
  }
  if (!std::isfinite(theta1) || !std::isfinite(theta2)) throw ConfigError("prep: angles must be finite");
}

PulseSequence prep_sequence(const PrepParams& prep) {
  prep.validate();
  Eigen::Matrix4d damp34 = Eigen::Matrix4d::Ones();
  damp34(2, 3) = damp34(3, 2) = prep.f;
  const double t_rf2 = prep.tau1_ns + prep.tau2_ns;
  const double t_rf1 = t_rf2 + prep.pulse_pi2_rf_ns;
  const double t_mw2 = t_rf1 + prep.pulse_pi2_rf_ns;
  PulseSequence seq;
  seq.events = {
      {0.0, Channel::MW2, prep.theta1, 0.0, prep.tau1_ns, kill_coherences()},
      {prep.tau1_ns, Channel::RF1, prep.theta2, 0.0, prep.tau2_ns, kill_coherences()},
      {t_rf2, Channel::RF2, kPi / 2.0, 0.0, prep.pulse_pi2_rf_ns, Eigen::Matrix4d::Ones()},
      {t_rf1, Channel::RF1, kPi / 2.0, 0.0, prep.pulse_pi2_rf_ns, damp34},
      {t_mw2, Channel::MW2, kPi, 0.0, 0.0, Eigen::Matrix4d::Ones()},
  };
  seq.readout_times_ns = {t_mw2};
  return seq;
}

std::vector<DensityMatrix> run_stages(const PulseSequence& seq, const DensityMatrix& rho0, const PhysicsParams& p) {
  seq.validate();
  std::vector<DensityMatrix> stages;
  stages.reserve(seq.events.size());
  Matrix4c m = rho0.matrix();
  double now = 0.0;
  for (const PulseEvent& e : seq.events) {
    if (e.at_ns > now) m = m.cwiseProduct(free_phase_factors(e.at_ns - now, 0.0, 0.0, p));
    const Matrix4c u = embed_rotation(e.channel, e.theta, e.phi);
    m = u * m * u.adjoint();
    if (e.duration_ns > 0.0) m = m.cwiseProduct(free_phase_factors(e.duration_ns, 0.0, 0.0, p));
    m = m.cwiseProduct(e.damping.cast<cplx>());
    now = e.at_ns + e.duration_ns;
    stages.emplace_back(0.5 * (m + m.adjoint()));
  }
  return stages;
}

std::array<Matrix4c, 4> prep_stage_predictions(double theta1, double theta2, double f) {
  const cplx i1(0.0, 1.0);
  const double c_t1 = std::cos(theta1);
  const double half_c2 = std::pow(std::cos(theta1 / 2.0), 2);  // cos^2(theta1/2)
  const double half_s2 = std::pow(std::sin(theta1 / 2.0), 2);  // sin^2(theta1/2)
  const double t2c2 = std::pow(std::cos(theta2 / 2.0), 2);
  const double t2s2 = std::pow(std::sin(theta2 / 2.0), 2);
  const double d1 = -t2s2 - c_t1 * t2c2;
  const double d2 = -t2c2 - c_t1 * t2s2;

  std::array<Matrix4c, 4> s;
  for (auto& m : s) m.setZero();

  s[0].diagonal() << d1, d2, c_t1, 1.0;

  s[1].diagonal() << d1, d2, half_c2, half_c2;
  s[1](2, 3) = -i1 * half_s2;
  s[1](3, 2) = i1 * half_s2;

  s[2].diagonal() << -half_c2, -half_c2, half_c2, half_c2;
  s[2](0, 1) = i1 * std::cos(theta2) * half_s2;
  s[2](1, 0) = -i1 * std::cos(theta2) * half_s2;
  s[2](2, 3) = -i1 * half_s2 * f;
  s[2](3, 2) = i1 * half_s2 * f;

  s[3].diagonal() << half_c2, -half_c2, -half_c2, half_c2;
  s[3](0, 3) = s[3](3, 0) = -half_s2 * f;
  s[3](1, 2) = s[3](2, 1) = std::cos(theta2) * half_s2;
  return s;
}

DensityMatrix prepare_state(const PrepParams& prep, const PhysicsParams& p) {
  const Trajectory t = run_sequence(prep_sequence(prep), thermal_state({p.epsilon}), EnsembleModel::disabled(), p);
  return t.samples.back().rho;
}

PulseSequence dd_two_flip(double tau_ns) {
  if (!(tau_ns > 0.0)) throw std::invalid_argument("dd_two_flip: tau must be positive");
  PulseSequence seq;
  seq.events = {{tau_ns, Channel::EFlip, kPi, 0.0, 0.0, Eigen::Matrix4d::Ones()},
                {3.0 * tau_ns, Channel::EFlip, kPi, 0.0, 0.0, Eigen::Matrix4d::Ones()}};
  seq.readout_times_ns = {4.0 * tau_ns};
  return seq;
}

PulseSequence dd_revival(double tau4_ns, int n_blocks, int samples_per_block) {
  if (!(tau4_ns > 0.0)) throw std::invalid_argument("dd_revival: tau4 must be positive");
  if (n_blocks < 1 || samples_per_block < 1) {
    throw std::invalid_argument("dd_revival: n_blocks and samples_per_block must be >= 1");
  }
  PulseSequence seq;
  for (int b = 0; b < n_blocks; ++b) {
    const double start = 4.0 * tau4_ns * b;
    seq.events.push_back({start + tau4_ns, Channel::EFlip, kPi, 0.0, 0.0, Eigen::Matrix4d::Ones()});
    seq.events.push_back({start + 3.0 * tau4_ns, Channel::EFlip, kPi, 0.0, 0.0, Eigen::Matrix4d::Ones()});
  }
  const double step = 4.0 * tau4_ns / samples_per_block;
  seq.readout_times_ns.push_back(0.0);
  for (int k = 1; k <= n_blocks * samples_per_block; ++k) seq.readout_times_ns.push_back(k * step);
  return seq;
}

double fit_gaussian_decay(std::span<const double> ts_ns, std::span<const double> ys) {
  if (ts_ns.size() != ys.size()) throw std::invalid_argument("fit_gaussian_decay: size mismatch");
  if (ys.size() < 2) throw NumericalFailure("fit_gaussian_decay: need at least 2 points");
  if (std::ranges::any_of(ys, [](double y) { return !(y > 0.0); })) {
    throw DomainError("fit_gaussian_decay: samples must be positive");
  }
  const auto [lo, hi] = std::ranges::minmax(ys);
  if (hi - lo <= 1e-14 * hi) throw NumericalFailure("fit_gaussian_decay: degenerate fit (constant samples)");

  // Weighted least squares of ln y = a + b s, s = t^2, weights y^2.
  double sw = 0, ss = 0, sl = 0, sss = 0, ssl = 0;
  for (std::size_t i = 0; i < ys.size(); ++i) {
    const double w = ys[i] * ys[i];
    const double s = ts_ns[i] * ts_ns[i];
    const double l = std::log(ys[i]);
    sw += w;
    ss += w * s;
    sl += w * l;
    sss += w * s * s;
    ssl += w * s * l;
  }
  const double det = sw * sss - ss * ss;
  if (!(std::abs(det) > 0.0)) throw NumericalFailure("fit_gaussian_decay: degenerate fit (no spread in t)");
  const double b = (sw * ssl - ss * sl) / det;
  if (!(b < 0.0)) throw NumericalFailure("fit_gaussian_decay: degenerate fit (samples do not decay)");
  return std::sqrt(-1.0 / b);
}

std::optional<double> detect_transition_time(const Trajectory& traj) {
  const auto& s = traj.samples;
  if (s.empty()) return std::nullopt;
  auto gap = [](const TrajectorySample& x) { return std::abs(x.c.c2) - std::abs(x.c.c3); };
  if (gap(s.front()) <= 0.0) return 0.0;
  for (std::size_t k = 1; k < s.size(); ++k) {
    const double g1 = gap(s[k]);
    if (g1 <= 0.0) {
      const double g0 = gap(s[k - 1]);
      return s[k - 1].t_ns + g0 / (g0 - g1) * (s[k].t_ns - s[k - 1].t_ns);
    }
  }
  return std::nullopt;
}

}  // namespace spincorr
