#include "spincorr/experiments.hpp"
#include "spincorr/quadrature.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace spincorr {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt9(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

ElementErrors uniform_errors(const RunConfig& cfg) {
  const double h = cfg.experiment.element_error_epsilon * cfg.physics.epsilon;
  return {Eigen::Matrix4d::Constant(h), Eigen::Matrix4d::Constant(h)};
}

ComparisonColumns comparison(const BellCoeffs& c) {
  ComparisonColumns col{};
  col.analytic_mutual = mutual_information_analytic_bell(c);
  col.analytic_classical = classical_correlation_analytic_bell(c);
  col.analytic_discord = discord_analytic_bell(c);
  if (std::abs(c.c2) <= kTaylorHardLimit && std::abs(c.c3) <= kTaylorHardLimit) {
    const TaylorCorrelations t = taylor_correlations(c.c2, c.c3);
    col.taylor_mutual = t.mutual;
    col.taylor_classical = t.classical;
    col.taylor_discord = t.discord;
  } else {
    col.taylor_mutual = col.taylor_classical = col.taylor_discord = kNaN;
  }
  return col;
}

CurveRow make_row(const TrajectorySample& s, const RunConfig& cfg, std::size_t index) {
  CurveRow row;
  row.t_ns = s.t_ns;
  row.c = s.c;
  const CorrelationReport r = analyze(s.rho, cfg.optimizer);
  row.mutual_bits = r.mutual_info;
  row.classical_bits = r.classical_corr;
  row.discord_bits = r.discord;
  row.geo_discord = r.geo_discord;
  if (cfg.experiment.error_samples > 0) {
    row.errors = correlation_error_bars(s.rho, uniform_errors(cfg), cfg.experiment.error_samples,
                                        cfg.experiment.seed + index, cfg.optimizer);
  }
  if (cfg.experiment.compare) row.compare = comparison(s.c);
  return row;
}

std::vector<CurveRow> make_rows(const Trajectory& traj, const RunConfig& cfg) {
  std::vector<CurveRow> rows;
  rows.reserve(traj.samples.size());
  for (std::size_t k = 0; k < traj.samples.size(); ++k) rows.push_back(make_row(traj.samples[k], cfg, k));
  label_regimes(rows);
  return rows;
}

json optional_number(const std::optional<double>& x) { return x ? json(*x) : json(nullptr); }

json coeffs_json(const BellCoeffs& c) { return {{"c1", c.c1}, {"c2", c.c2}, {"c3", c.c3}}; }

std::optional<double> closed_form_tc(const BellCoeffs& c0, const PhysicsParams& p) {
  const double c3 = std::abs(c0.c3);
  if (!(c3 > 0.0)) return std::nullopt;
  return critical_time(std::abs(c0.c2), c3, p.t2e_star_ns).t_ns;
}

// Gauss-Hermite averages of exp(-i delta t) are only accurate while the
// phase spread sigma * t stays moderate, so the configured order is raised
// to cover the longest unrefocused evolution time on each axis.
EnsembleModel model_for(const RunConfig& cfg, double electron_span_ns, double nuclear_span_ns) {
  EnsembleModel m = cfg.ensemble.model();
  const auto raise = [](int& order, double phase_sd) {
    if (order == 1) return;
    const int needed = normal_rule_order_for(phase_sd);
    if (needed > kMaxQuadratureOrder) {
      throw NumericalFailure("time window too long for the ensemble quadrature (needs order " +
                             std::to_string(needed) + ", limit " + std::to_string(kMaxQuadratureOrder) +
                             "); use the analytic model or a shorter window");
    }
    order = std::max(order, needed);
  };
  raise(m.electron_order, EnsembleModel::sigma_e(cfg.physics) * electron_span_ns);
  raise(m.nuclear_order, EnsembleModel::sigma_n(cfg.physics) * nuclear_span_ns);
  return m;
}

json orders_json(const EnsembleModel& m) {
  return {{"electron", m.electron_order}, {"nuclear", m.nuclear_order}};
}

void require_ensemble(const RunConfig& cfg, std::string_view command) {
  if (cfg.experiment.model != ModelKind::Ensemble) {
    throw ConfigError(std::string(command) + " requires the ensemble model");
  }
}

json matrix_json(const Eigen::Matrix4d& m) {
  json rows = json::array();
  for (int i = 0; i < 4; ++i) {
    json row = json::array();
    for (int j = 0; j < 4; ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

void print_matrix(std::ostringstream& out, const char* label, const Eigen::Matrix4d& m) {
  out << "  " << label << "\n";
  for (int i = 0; i < 4; ++i) {
    out << "   ";
    for (int j = 0; j < 4; ++j) {
      char buf[24];
      std::snprintf(buf, sizeof buf, " %9.4f", m(i, j));
      out << buf;
    }
    out << "\n";
  }
}

}  // namespace

std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::I: return "I";
    case Regime::II: return "II";
    case Regime::III: return "III";
    case Regime::IV: return "IV";
  }
  return "?";
}

void label_regimes(std::vector<CurveRow>& rows) {
  const std::size_t n = rows.size();
  for (std::size_t k = 0; k < n; ++k) {
    const double a = std::abs(rows[k].c.c2);
    bool rising = false;
    if (n > 1) {
      const double prev = k == 0 ? a : std::abs(rows[k - 1].c.c2);
      const double cur = k == 0 ? std::abs(rows[1].c.c2) : a;
      // relative threshold plus a floor far below any physical |c| so that
      // round-off around zero is not read as a revival
      rising = cur - prev > 1e-9 * std::max(cur, prev) + 1e-12 * std::abs(rows[k].c.c3);
    }
    const bool above = a > std::abs(rows[k].c.c3);
    rows[k].regime = above ? (rising ? Regime::IV : Regime::I) : (rising ? Regime::III : Regime::II);
  }
}

std::string to_csv(const std::vector<CurveRow>& rows) {
  const bool with_err = !rows.empty() && std::ranges::all_of(rows, [](const CurveRow& r) { return r.errors.has_value(); });
  const bool with_cmp = !rows.empty() && std::ranges::all_of(rows, [](const CurveRow& r) { return r.compare.has_value(); });
  std::string out = "t_ns,c1,c2,c3,mutual_bits,classical_bits,discord_bits,geo_discord,regime";
  if (with_err) out += ",err_mutual,err_classical,err_discord";
  if (with_cmp) {
    out += ",analytic_mutual_bits,analytic_classical_bits,analytic_discord_bits"
           ",taylor_mutual_bits,taylor_classical_bits,taylor_discord_bits";
  }
  out += "\n";
  for (const CurveRow& r : rows) {
    for (double x : {r.t_ns, r.c.c1, r.c.c2, r.c.c3, r.mutual_bits, r.classical_bits, r.discord_bits, r.geo_discord}) {
      out += fmt9(x);
      out += ',';
    }
    out += to_string(r.regime);
    if (with_err) {
      for (double x : {r.errors->mutual, r.errors->classical, r.errors->discord}) out += "," + fmt9(x);
    }
    if (with_cmp) {
      const ComparisonColumns& c = *r.compare;
      for (double x : {c.analytic_mutual, c.analytic_classical, c.analytic_discord, c.taylor_mutual,
                       c.taylor_classical, c.taylor_discord}) {
        out += "," + fmt9(x);
      }
    }
    out += "\n";
  }
  return out;
}

ExperimentResult run_free_decay(const RunConfig& cfg) {
  cfg.validate();
  const ExperimentSettings& x = cfg.experiment;
  const DensityMatrix rho0 = prepare_state(cfg.prep.params(), cfg.physics);
  const BellCoeffs c0 = coeffs_from_density(rho0).c;

  std::vector<double> times(static_cast<std::size_t>(x.points));
  for (int k = 0; k < x.points; ++k) times[static_cast<std::size_t>(k)] = x.points == 1 ? 0.0 : k * x.t_max_ns / (x.points - 1);

  Trajectory traj;
  std::optional<EnsembleModel> model;
  if (x.model == ModelKind::Ensemble) {
    model = model_for(cfg, x.t_max_ns, x.t_max_ns);
    PulseSequence seq;
    seq.readout_times_ns = times;
    traj = run_sequence(seq, rho0, *model, cfg.physics, x.workers);
  } else {
    traj = analytic_trajectory(c0, times, cfg.physics);
  }

  ExperimentResult result;
  result.rows = make_rows(traj, cfg);

  // Samples that have decayed below 1e-12 of the start carry no weight in the
  // fit and may have underflowed to zero, so they are left out.
  std::vector<double> fit_t, fit_y;
  const double y0 = std::abs(traj.samples.front().rho(1, 2));
  for (std::size_t k = 0; k < traj.samples.size(); ++k) {
    const double y = std::abs(traj.samples[k].rho(1, 2));
    if (y > 1e-12 * y0) {
      fit_t.push_back(times[k]);
      fit_y.push_back(y);
    }
  }
  std::optional<double> t_decay;
  if (fit_t.size() >= 2) t_decay = fit_gaussian_decay(fit_t, fit_y);

  result.summary = {
      {"command", "free-decay"},
      {"model", std::string(to_string(x.model))},
      {"initial_coeffs", coeffs_json(c0)},
      {"t_c_ns", optional_number(detect_transition_time(traj))},
      {"t_c_closed_form_ns", optional_number(closed_form_tc(c0, cfg.physics))},
      {"t_decay_ns", optional_number(t_decay)},
  };
  if (model) result.summary["quadrature_orders"] = orders_json(*model);
  return result;
}

ExperimentResult run_dd_preserve(const RunConfig& cfg) {
  cfg.validate();
  require_ensemble(cfg, "dd-preserve");
  const ExperimentSettings& x = cfg.experiment;
  const DensityMatrix rho0 = prepare_state(cfg.prep.params(), cfg.physics);
  const BellFit fit0 = coeffs_from_density(rho0);

  // The electron phase is refocused exactly at every readout.
  const EnsembleModel model = model_for(cfg, 0.0, 4.0 * x.points * x.tau_ns);
  Trajectory echoes;
  echoes.samples.push_back({0.0, rho0, fit0.c, fit0.residual});
  for (int k = 1; k <= x.points; ++k) {
    const double tau = k * x.tau_ns;
    Trajectory t = run_sequence(dd_two_flip(tau), rho0, model, cfg.physics, x.workers);
    echoes.samples.push_back(std::move(t.samples.back()));
  }

  ExperimentResult result;
  result.rows = make_rows(echoes, cfg);
  const std::optional<double> t_dd = detect_transition_time(echoes);
  const std::optional<double> t_c = closed_form_tc(fit0.c, cfg.physics);
  std::optional<double> factor;
  if (t_dd && t_c && *t_c > 0.0) factor = *t_dd / *t_c;
  result.summary = {
      {"command", "dd-preserve"},
      {"initial_coeffs", coeffs_json(fit0.c)},
      {"t_dd_ns", optional_number(t_dd)},
      {"t_c_ns", optional_number(t_c)},
      {"prolongation_factor", optional_number(factor)},
      {"quadrature_orders", orders_json(model)},
  };
  return result;
}

ExperimentResult run_revival(const RunConfig& cfg) {
  cfg.validate();
  require_ensemble(cfg, "revival");
  const ExperimentSettings& x = cfg.experiment;
  const DensityMatrix rho0 = prepare_state(cfg.prep.params(), cfg.physics);
  const PulseSequence seq = dd_revival(x.tau4_ns, x.n_blocks, x.samples_per_block);
  // Between flips the electron phase never spans more than tau4.
  const EnsembleModel model = model_for(cfg, x.tau4_ns, 4.0 * x.tau4_ns * x.n_blocks);
  const Trajectory traj = run_sequence(seq, rho0, model, cfg.physics, x.workers);

  ExperimentResult result;
  result.rows = make_rows(traj, cfg);

  // Echoes sit at every even multiple of tau4.
  PulseSequence echo_seq = seq;
  echo_seq.readout_times_ns.clear();
  for (int m = 0; m <= 2 * x.n_blocks; ++m) echo_seq.readout_times_ns.push_back(2.0 * m * x.tau4_ns);
  const Trajectory echo = run_sequence(echo_seq, rho0, model, cfg.physics, x.workers);
  const double c2_0 = std::abs(echo.samples.front().c.c2);
  json ratios = json::array();
  for (std::size_t m = 1; m < echo.samples.size(); ++m) {
    ratios.push_back({{"t_ns", echo.samples[m].t_ns}, {"ratio", std::abs(echo.samples[m].c.c2) / c2_0}});
  }
  json regimes = json::array();
  for (const CurveRow& r : result.rows) regimes.push_back(std::string(to_string(r.regime)));
  result.summary = {
      {"command", "revival"},
      {"initial_coeffs", coeffs_json(echo.samples.front().c)},
      {"revival_ratios", ratios},
      {"regimes", regimes},
      {"quadrature_orders", orders_json(model)},
  };
  return result;
}

StatePrepResult run_state_prep(const RunConfig& cfg) {
  cfg.validate();
  const PrepParams prep = cfg.prep.params();
  const double eps = cfg.physics.epsilon;
  const PulseSequence seq = prep_sequence(prep);
  const std::vector<DensityMatrix> stages = run_stages(seq, thermal_state({eps}), cfg.physics);
  const std::array<Matrix4c, 4> predicted = prep_stage_predictions(prep.theta1, prep.theta2, prep.f);
  static constexpr std::array<const char*, 5> names = {"MW2(theta1), wait tau1", "RF1(theta2), wait tau2",
                                                       "RF2(pi/2)", "RF1(pi/2), (3,4) damped by f", "MW2(pi)"};

  std::ostringstream text;
  json stage_list = json::array();
  for (std::size_t k = 0; k < stages.size(); ++k) {
    const Matrix4c dev = deviation(stages[k], eps);
    text << "stage " << k + 1 << ": " << names[k] << "\n";
    print_matrix(text, "deviation, real (units of epsilon)", dev.real());
    print_matrix(text, "deviation, imag (units of epsilon)", dev.imag());
    json entry = {{"name", names[k]}, {"deviation_re", matrix_json(dev.real())}, {"deviation_im", matrix_json(dev.imag())}};
    if (k >= 1) {
      const Matrix4c& p = predicted[k - 1];
      const double max_dev = (dev - p).cwiseAbs().maxCoeff();
      print_matrix(text, "closed form, real", p.real());
      print_matrix(text, "closed form, imag", p.imag());
      char buf[64];
      std::snprintf(buf, sizeof buf, "  max |simulated - closed form| = %.3e\n", max_dev);
      text << buf;
      entry["predicted_re"] = matrix_json(p.real());
      entry["predicted_im"] = matrix_json(p.imag());
      entry["max_deviation"] = max_dev;
    }
    text << "\n";
    stage_list.push_back(entry);
  }

  const DensityMatrix& final_state = stages.back();
  const BellFit fit = coeffs_from_density(final_state);
  CorrelationReport report = analyze(final_state, cfg.optimizer);
  if (cfg.experiment.error_samples > 0) {
    report.errors = correlation_error_bars(final_state, uniform_errors(cfg), cfg.experiment.error_samples,
                                           cfg.experiment.seed, cfg.optimizer);
  }
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "final: c1 = %.6e, c2 = %.6e (%.4f eps), c3 = %.6e (%.4f eps), residual = %.3e\n", fit.c.c1,
                fit.c.c2, fit.c.c2 / eps, fit.c.c3, fit.c.c3 / eps, fit.residual);
  text << buf;
  std::snprintf(buf, sizeof buf, "correlations (bits): I = %.4e, C = %.4e, D = %.4e, geometric = %.4e\n",
                report.mutual_info, report.classical_corr, report.discord, report.geo_discord);
  text << buf;
  if (report.errors) {
    std::snprintf(buf, sizeof buf, "error bars (bits):   I +- %.1e, C +- %.1e, D +- %.1e\n", report.errors->mutual,
                  report.errors->classical, report.errors->discord);
    text << buf;
  }

  StatePrepResult result;
  result.text = text.str();
  result.summary = {
      {"command", "state-prep"},
      {"stages", stage_list},
      {"final_coeffs", coeffs_json(fit.c)},
      {"bell_residual", fit.residual},
      {"correlations", report_to_json(report)},
  };
  return result;
}

json report_to_json(const CorrelationReport& r) {
  json j = {
      {"mutual_info", r.mutual_info},
      {"classical_corr", r.classical_corr},
      {"discord", r.discord},
      {"geo_discord", r.geo_discord},
      {"optimum", {{"theta", r.optimum.theta}, {"phi", r.optimum.phi}}},
  };
  if (r.errors) {
    j["err_mutual"] = r.errors->mutual;
    j["err_classical"] = r.errors->classical;
    j["err_discord"] = r.errors->discord;
  }
  return j;
}

json run_correlations(const DensityMatrixFile& input, const RunConfig& cfg) {
  cfg.validate();
  CorrelationReport report = analyze(input.rho, cfg.optimizer);
  if (input.errors) {
    const int n = cfg.experiment.error_samples > 0 ? cfg.experiment.error_samples : 1000;
    report.errors = correlation_error_bars(input.rho, *input.errors, n, cfg.experiment.seed, cfg.optimizer);
  }
  json j = report_to_json(report);
  const BellFit fit = coeffs_from_density(input.rho);
  const bool bell = fit.residual <= bell_tolerance(input.epsilon);
  json b = coeffs_json(fit.c);
  b["residual"] = fit.residual;
  b["bell_diagonal"] = bell;
  if (bell && is_physical(fit.c)) {
    b["mutual_info"] = mutual_information_analytic_bell(fit.c);
    b["classical_corr"] = classical_correlation_analytic_bell(fit.c);
    b["discord"] = discord_analytic_bell(fit.c);
    b["geo_discord"] = geometric_discord_analytic(fit.c);
  }
  j["bell"] = b;
  return j;
}

}  // namespace spincorr
