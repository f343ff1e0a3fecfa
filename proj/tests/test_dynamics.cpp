#include "doctest.h"
#include "spincorr/correlations.hpp"
#include "spincorr/dynamics.hpp"
#include "spincorr/quadrature.hpp"

#include <cmath>
#include <limits>
#include <numbers>

using namespace spincorr;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

double c2_at(const Trajectory& t, std::size_t k) { return t.samples[k].c.c2; }

}  // namespace

TEST_CASE("Gauss-Hermite moments") {
  for (int order : {8, 20, 64, 300}) {
    const QuadratureRule r = gauss_hermite(order);
    REQUIRE(r.nodes.size() == static_cast<std::size_t>(order));
    for (int k = 0; k < 8 && 2 * k < 2 * order; ++k) {
      double m = 0.0;
      for (std::size_t i = 0; i < r.nodes.size(); ++i) m += r.weights[i] * std::pow(r.nodes[i], 2 * k);
      CHECK(m == doctest::Approx(std::tgamma(k + 0.5)).epsilon(1e-12));
    }
    for (std::size_t i = 1; i < r.nodes.size(); ++i) CHECK(r.nodes[i] > r.nodes[i - 1]);
  }
  const QuadratureRule one = normal_rule(1, 3.0);
  CHECK(one.nodes.size() == 1);
  CHECK(one.nodes[0] == 0.0);
  CHECK(one.weights[0] == 1.0);
}

TEST_CASE("normal rule reproduces the Gaussian characteristic function") {
  const double sigma = std::numbers::sqrt2 / 175.0;
  const QuadratureRule r = normal_rule(64, sigma);
  for (double t : {0.0, 50.0, 166.0, 300.0, 500.0}) {
    double avg = 0.0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) avg += r.weights[i] * std::cos(r.nodes[i] * t);
    CHECK(std::abs(avg - std::exp(-std::pow(t / 175.0, 2))) < 1e-10);
  }
}

TEST_CASE("order selection keeps long windows accurate") {
  for (double t : {500.0, 1000.0, 2000.0, 3500.0}) {
    const double sigma = std::numbers::sqrt2 / 175.0;
    const int order = normal_rule_order_for(sigma * t);
    const QuadratureRule r = normal_rule(order, sigma);
    for (double tt = 0.0; tt <= t; tt += t / 50) {
      double avg = 0.0;
      for (std::size_t i = 0; i < r.nodes.size(); ++i) avg += r.weights[i] * std::cos(r.nodes[i] * tt);
      CHECK(std::abs(avg - std::exp(-std::pow(tt / 175.0, 2))) < 1e-10);
    }
  }
  CHECK(normal_rule_order_for(0.0) == 8);
}

TEST_CASE("physics parameter validation") {
  PhysicsParams p;
  CHECK_NOTHROW(p.validate());
  CHECK(p.regime_warnings().empty());
  p.t2e_star_ns = -1.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  PhysicsParams q;
  q.t2e_ns = kInf;
  CHECK_NOTHROW(q.validate());
  q.t2n_star_ns = 100.0;
  CHECK_FALSE(q.regime_warnings().empty());
}

TEST_CASE("closed-form coefficient flow") {
  const PhysicsParams p;
  const BellCoeffs c = evolve_coeffs_analytic({0.001, 0.02, 0.01}, 175.0, p);
  CHECK(c.c1 == doctest::Approx(0.001 * std::exp(-1.0)));
  CHECK(c.c2 == doctest::Approx(0.02 * std::exp(-1.0)));
  CHECK(c.c3 == 0.01);
}

TEST_CASE("free decay of the ensemble average") {
  const PhysicsParams p;
  const DensityMatrix rho0 = bell_diagonal_to_density({0.0, 0.015, 0.006});
  PulseSequence seq;
  seq.readout_times_ns = {0.0, 100.0, 166.0, 250.0, 500.0};
  const Trajectory t = run_sequence(seq, rho0, EnsembleModel{}, p);
  REQUIRE(t.samples.size() == 5);
  for (std::size_t k = 0; k < t.samples.size(); ++k) {
    const double tt = seq.readout_times_ns[k];
    // rho23 dephases with delta_e - delta_n, so both Gaussian envelopes and
    // the homogeneous electron decay apply
    const double env = std::exp(-std::pow(tt / p.t2e_star_ns, 2) - std::pow(tt / p.t2n_star_ns, 2) - tt / p.t2e_ns);
    CHECK(std::abs(c2_at(t, k) / 0.015 - env) < 1e-9);
    CHECK(t.samples[k].c.c3 == doctest::Approx(0.006).epsilon(1e-14));
    CHECK(std::abs(t.samples[k].c.c1) < 1e-12);
  }
}

TEST_CASE("worker count does not change the result") {
  const PhysicsParams p;
  const DensityMatrix rho0 = bell_diagonal_to_density({0.0, 0.015, 0.006});
  const PulseSequence seq = dd_revival(1000.0, 1, 4);
  const Trajectory a = run_sequence(seq, rho0, EnsembleModel::with(16, true, true), p, 1);
  const Trajectory b = run_sequence(seq, rho0, EnsembleModel::with(16, true, true), p, 3);
  REQUIRE(a.samples.size() == b.samples.size());
  for (std::size_t k = 0; k < a.samples.size(); ++k) CHECK(a.samples[k].rho.matrix() == b.samples[k].rho.matrix());
}

TEST_CASE("electron echo is exact without homogeneous decay") {
  PhysicsParams p;
  p.t2e_ns = kInf;
  const DensityMatrix rho0 = bell_diagonal_to_density({0.0, 0.015, 0.006});
  for (double tau : {500.0, 2000.0}) {
    const Trajectory t = run_sequence(dd_two_flip(tau), rho0, EnsembleModel::with(64, true, false), p);
    CHECK((t.samples.back().rho.matrix() - rho0.matrix()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("nuclear dephasing survives the echo") {
  PhysicsParams p;
  p.t2e_ns = kInf;
  const DensityMatrix rho0 = bell_diagonal_to_density({0.0, 0.015, 0.006});
  const double tau = 3000.0;
  const Trajectory t = run_sequence(dd_two_flip(tau), rho0, EnsembleModel::with(64, false, true), p);
  CHECK(std::abs(std::abs(t.samples.back().c.c2) / 0.015 - std::exp(-std::pow(4 * tau / p.t2n_star_ns, 2))) < 1e-9);
}

TEST_CASE("sequence validation") {
  PulseSequence seq;
  seq.events.push_back({10.0, Channel::EFlip, kPi, 0.0, 20.0});
  seq.events.push_back({20.0, Channel::EFlip, kPi, 0.0, 0.0});  // overlaps the first duration
  CHECK_THROWS_AS(seq.validate(), std::invalid_argument);
  PulseSequence readouts;
  readouts.readout_times_ns = {5.0, 1.0};
  CHECK_THROWS_AS(readouts.validate(), std::invalid_argument);
  PulseSequence mask;
  mask.events.push_back({0.0, Channel::RF1, kPi, 0.0, 0.0});
  mask.events.back().damping(0, 1) = 0.5;
  CHECK_THROWS_AS(mask.validate(), std::invalid_argument);
  CHECK_THROWS(EnsembleModel::with(4, true, true).validate());
}

TEST_CASE("readout coinciding with a pulse sees the pulse") {
  const DensityMatrix rho0 = bell_diagonal_to_density({0.0, 0.015, 0.006});
  PulseSequence seq;
  seq.events.push_back({100.0, Channel::EFlip, kPi, 0.0, 0.0});
  seq.readout_times_ns = {100.0};
  const Trajectory t = run_sequence(seq, rho0, EnsembleModel::disabled(), PhysicsParams{});
  CHECK(t.samples[0].c.c2 == doctest::Approx(-0.015 * std::exp(-100.0 / 120000.0)));
}

TEST_CASE("revival readout grid") {
  const PulseSequence seq = dd_revival(1000.0, 3, 8);
  REQUIRE(seq.readout_times_ns.size() == 25);
  CHECK(seq.readout_times_ns.front() == 0.0);
  CHECK(seq.readout_times_ns[4] == doctest::Approx(2000.0));
  CHECK(seq.readout_times_ns.back() == doctest::Approx(12000.0));
  CHECK(seq.events.size() == 6);
}

TEST_CASE("preparation stages follow the closed-form matrices") {
  const PrepParams prep;
  const double eps = 7.35e-3;
  const std::vector<DensityMatrix> stages = run_stages(prep_sequence(prep), thermal_state({eps}), PhysicsParams{});
  REQUIRE(stages.size() == 5);
  const double s1 = std::pow(std::sin(prep.theta1 / 2), 2);
  const double c1 = std::pow(std::cos(prep.theta1 / 2), 2);
  const double ct2 = std::cos(prep.theta2);
  const cplx i1{0.0, 1.0};

  // after RF2 pi/2
  Matrix4c after_rf2 = Matrix4c::Zero();
  after_rf2(0, 0) = -std::pow(std::sin(prep.theta2 / 2), 2) - std::cos(prep.theta1) * std::pow(std::cos(prep.theta2 / 2), 2);
  after_rf2(1, 1) = -std::pow(std::cos(prep.theta2 / 2), 2) - std::cos(prep.theta1) * std::pow(std::sin(prep.theta2 / 2), 2);
  after_rf2(2, 2) = after_rf2(3, 3) = c1;
  after_rf2(2, 3) = -i1 * s1;
  after_rf2(3, 2) = i1 * s1;
  CHECK((deviation(stages[2], eps) - after_rf2).cwiseAbs().maxCoeff() < 1e-12);

  // after the damped RF1 pi/2
  Matrix4c after_rf1 = Matrix4c::Zero();
  after_rf1(0, 0) = after_rf1(1, 1) = -c1;
  after_rf1(2, 2) = after_rf1(3, 3) = c1;
  after_rf1(0, 1) = i1 * ct2 * s1;
  after_rf1(1, 0) = -i1 * ct2 * s1;
  after_rf1(2, 3) = -i1 * s1 * prep.f;
  after_rf1(3, 2) = i1 * s1 * prep.f;
  CHECK((deviation(stages[3], eps) - after_rf1).cwiseAbs().maxCoeff() < 1e-12);

  // after MW2 pi
  Matrix4c final_dev = Matrix4c::Zero();
  final_dev(0, 0) = final_dev(3, 3) = c1;
  final_dev(1, 1) = final_dev(2, 2) = -c1;
  final_dev(0, 3) = final_dev(3, 0) = -s1 * prep.f;
  final_dev(1, 2) = final_dev(2, 1) = ct2 * s1;
  CHECK((deviation(stages[4], eps) - final_dev).cwiseAbs().maxCoeff() < 1e-12);

  const std::array<Matrix4c, 4> predicted = prep_stage_predictions(prep.theta1, prep.theta2, prep.f);
  for (std::size_t k = 0; k < 4; ++k) CHECK((deviation(stages[k + 1], eps) - predicted[k]).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("symmetric preparation gives c1 = 0") {
  PrepParams prep;
  prep.theta2 = 0.0;
  prep.f = 1.0;
  const BellFit fit = coeffs_from_density(prepare_state(prep, PhysicsParams{}));
  CHECK(std::abs(fit.c.c1) < 1e-15);
  CHECK(fit.residual < 1e-15);
}

TEST_CASE("Gaussian decay fit") {
  std::vector<double> ts, ys;
  for (int k = 0; k < 50; ++k) {
    ts.push_back(10.0 * k);
    ys.push_back(0.3 * std::exp(-std::pow(10.0 * k / 175.0, 2)));
  }
  CHECK(fit_gaussian_decay(ts, ys) == doctest::Approx(175.0).epsilon(1e-10));
  ys[3] = -1.0;
  CHECK_THROWS_AS(fit_gaussian_decay(ts, ys), DomainError);
  const std::vector<double> flat_t = {1.0, 2.0, 3.0}, flat_y = {0.1, 0.1, 0.1};
  CHECK_THROWS_AS(fit_gaussian_decay(flat_t, flat_y), NumericalFailure);
}

TEST_CASE("transition detection interpolates the crossing") {
  const PhysicsParams p;
  const BellCoeffs c0{0.0, 0.0148777584, 0.00605955679};
  std::vector<double> times;
  for (int k = 0; k < 200; ++k) times.push_back(k * 500.0 / 199);
  const Trajectory t = analytic_trajectory(c0, times, p);
  const auto tc = detect_transition_time(t);
  REQUIRE(tc.has_value());
  CHECK(*tc == doctest::Approx(critical_time(c0.c2, c0.c3, p.t2e_star_ns).t_ns).epsilon(1e-3));

  const Trajectory below = analytic_trajectory({0.0, 0.001, 0.002}, times, p);
  CHECK(*detect_transition_time(below) == 0.0);
  const std::vector<double> early = {0.0, 10.0};
  CHECK_FALSE(detect_transition_time(analytic_trajectory(c0, early, p)).has_value());
}
