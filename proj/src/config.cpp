#include "spincorr/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>

namespace spincorr {

using nlohmann::json;

namespace {

using FieldSetter = std::function<void(const json&)>;

void apply_fields(const json& obj, std::string_view section, const std::map<std::string, FieldSetter>& fields) {
  if (!obj.is_object()) throw ConfigError(std::string(section) + ": expected a JSON object");
  for (const auto& [key, value] : obj.items()) {
    const auto it = fields.find(key);
    if (it == fields.end()) throw ConfigError(std::string(section) + ": unknown key '" + key + "'");
    try {
      it->second(value);
    } catch (const json::exception& e) {
      throw ConfigError(std::string(section) + "." + key + ": " + e.what());
    }
  }
}

double number_or_inf(const json& v) {
  if (v.is_string() && (v.get<std::string>() == "inf" || v.get<std::string>() == "infinity")) {
    return std::numeric_limits<double>::infinity();
  }
  if (!v.is_number()) throw ConfigError("expected a number or \"inf\"");
  return v.get<double>();
}

json inf_or_number(double x) { return std::isinf(x) ? json("inf") : json(x); }

Eigen::Matrix4d matrix4(const json& v, std::string_view what) {
  if (!v.is_array() || v.size() != 4) throw ConfigError(std::string(what) + ": expected a 4x4 array");
  Eigen::Matrix4d m;
  for (int i = 0; i < 4; ++i) {
    const json& row = v[static_cast<std::size_t>(i)];
    if (!row.is_array() || row.size() != 4) throw ConfigError(std::string(what) + ": expected a 4x4 array");
    for (int j = 0; j < 4; ++j) {
      const json& x = row[static_cast<std::size_t>(j)];
      if (!x.is_number()) throw ConfigError(std::string(what) + ": non-numeric entry");
      m(i, j) = x.get<double>();
    }
  }
  return m;
}

}  // namespace

ModelKind parse_model(std::string_view s) {
  if (s == "analytic") return ModelKind::Analytic;
  if (s == "ensemble") return ModelKind::Ensemble;
  throw ConfigError("model must be 'analytic' or 'ensemble'");
}

std::string_view to_string(ModelKind m) { return m == ModelKind::Analytic ? "analytic" : "ensemble"; }

PrepParams PrepSettings::params() const {
  PrepParams p;
  p.theta1 = theta1_pi * std::numbers::pi;
  p.theta2 = theta2_pi * std::numbers::pi;
  p.f = f;
  p.tau1_ns = tau1_ns;
  p.tau2_ns = tau2_ns;
  p.pulse_pi2_rf_ns = pulse_pi2_rf_ns;
  return p;
}

void RunConfig::validate() const {
  physics.validate();
  prep.params().validate();
  try {
    optimizer.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  ensemble.model().validate();
  if (ensemble.quadrature_order < 8) throw ConfigError("ensemble.quadrature_order must be >= 8");
  const ExperimentSettings& x = experiment;
  if (!(x.t_max_ns > 0.0) || !(x.tau_ns > 0.0) || !(x.tau4_ns > 0.0)) {
    throw ConfigError("experiment: times must be positive");
  }
  if (x.points < 1 || x.n_blocks < 1 || x.samples_per_block < 1 || x.workers < 1) {
    throw ConfigError("experiment: counts must be >= 1");
  }
  if (x.error_samples != 0 && x.error_samples < 100) {
    throw ConfigError("experiment.error_samples must be 0 (off) or >= 100");
  }
  if (!(x.element_error_epsilon >= 0.0)) throw ConfigError("experiment.element_error_epsilon must be >= 0");
}

RunConfig parse_run_config(const json& j) {
  RunConfig cfg;
  apply_fields(j, "config", {
      {"physics", [&](const json& v) {
         apply_fields(v, "physics", {
             {"t2e_star_ns", [&](const json& x) { cfg.physics.t2e_star_ns = x.get<double>(); }},
             {"t2e_ns", [&](const json& x) { cfg.physics.t2e_ns = number_or_inf(x); }},
             {"t2n_star_ns", [&](const json& x) { cfg.physics.t2n_star_ns = x.get<double>(); }},
             {"epsilon", [&](const json& x) { cfg.physics.epsilon = x.get<double>(); }},
         });
       }},
      {"prep", [&](const json& v) {
         apply_fields(v, "prep", {
             {"theta1_pi", [&](const json& x) { cfg.prep.theta1_pi = x.get<double>(); }},
             {"theta2_pi", [&](const json& x) { cfg.prep.theta2_pi = x.get<double>(); }},
             {"f", [&](const json& x) { cfg.prep.f = x.get<double>(); }},
             {"tau1_ns", [&](const json& x) { cfg.prep.tau1_ns = x.get<double>(); }},
             {"tau2_ns", [&](const json& x) { cfg.prep.tau2_ns = x.get<double>(); }},
             {"pulse_pi2_rf_ns", [&](const json& x) { cfg.prep.pulse_pi2_rf_ns = x.get<double>(); }},
         });
       }},
      {"optimizer", [&](const json& v) {
         apply_fields(v, "optimizer", {
             {"grid_theta", [&](const json& x) { cfg.optimizer.grid_theta = x.get<int>(); }},
             {"grid_phi", [&](const json& x) { cfg.optimizer.grid_phi = x.get<int>(); }},
             {"refine_tol", [&](const json& x) { cfg.optimizer.refine_tol = x.get<double>(); }},
             {"max_refine_iters", [&](const json& x) { cfg.optimizer.max_refine_iters = x.get<int>(); }},
             {"measured", [&](const json& x) {
                const auto s = x.get<std::string>();
                if (s != "A" && s != "B") throw ConfigError("optimizer.measured must be 'A' or 'B'");
                cfg.optimizer.measured = s == "A" ? Subsystem::A : Subsystem::B;
              }},
         });
       }},
      {"ensemble", [&](const json& v) {
         apply_fields(v, "ensemble", {
             {"quadrature_order", [&](const json& x) { cfg.ensemble.quadrature_order = x.get<int>(); }},
             {"electron_grid", [&](const json& x) { cfg.ensemble.electron_grid = x.get<bool>(); }},
             {"nuclear_grid", [&](const json& x) { cfg.ensemble.nuclear_grid = x.get<bool>(); }},
         });
       }},
      {"experiment", [&](const json& v) {
         ExperimentSettings& e = cfg.experiment;
         apply_fields(v, "experiment", {
             {"model", [&](const json& x) { e.model = parse_model(x.get<std::string>()); }},
             {"t_max_ns", [&](const json& x) { e.t_max_ns = x.get<double>(); }},
             {"points", [&](const json& x) { e.points = x.get<int>(); }},
             {"tau_ns", [&](const json& x) { e.tau_ns = x.get<double>(); }},
             {"tau4_ns", [&](const json& x) { e.tau4_ns = x.get<double>(); }},
             {"n_blocks", [&](const json& x) { e.n_blocks = x.get<int>(); }},
             {"samples_per_block", [&](const json& x) { e.samples_per_block = x.get<int>(); }},
             {"seed", [&](const json& x) { e.seed = x.get<std::uint64_t>(); }},
             {"error_samples", [&](const json& x) { e.error_samples = x.get<int>(); }},
             {"element_error_epsilon", [&](const json& x) { e.element_error_epsilon = x.get<double>(); }},
             {"workers", [&](const json& x) { e.workers = x.get<int>(); }},
             {"compare", [&](const json& x) { e.compare = x.get<bool>(); }},
         });
       }},
  });
  cfg.validate();
  return cfg;
}

json to_json(const RunConfig& cfg) {
  const ExperimentSettings& e = cfg.experiment;
  return {
      {"physics",
       {{"t2e_star_ns", cfg.physics.t2e_star_ns},
        {"t2e_ns", inf_or_number(cfg.physics.t2e_ns)},
        {"t2n_star_ns", cfg.physics.t2n_star_ns},
        {"epsilon", cfg.physics.epsilon}}},
      {"prep",
       {{"theta1_pi", cfg.prep.theta1_pi},
        {"theta2_pi", cfg.prep.theta2_pi},
        {"f", cfg.prep.f},
        {"tau1_ns", cfg.prep.tau1_ns},
        {"tau2_ns", cfg.prep.tau2_ns},
        {"pulse_pi2_rf_ns", cfg.prep.pulse_pi2_rf_ns}}},
      {"optimizer",
       {{"grid_theta", cfg.optimizer.grid_theta},
        {"grid_phi", cfg.optimizer.grid_phi},
        {"refine_tol", cfg.optimizer.refine_tol},
        {"max_refine_iters", cfg.optimizer.max_refine_iters},
        {"measured", cfg.optimizer.measured == Subsystem::A ? "A" : "B"}}},
      {"ensemble",
       {{"quadrature_order", cfg.ensemble.quadrature_order},
        {"electron_grid", cfg.ensemble.electron_grid},
        {"nuclear_grid", cfg.ensemble.nuclear_grid}}},
      {"experiment",
       {{"model", std::string(to_string(e.model))},
        {"t_max_ns", e.t_max_ns},
        {"points", e.points},
        {"tau_ns", e.tau_ns},
        {"tau4_ns", e.tau4_ns},
        {"n_blocks", e.n_blocks},
        {"samples_per_block", e.samples_per_block},
        {"seed", e.seed},
        {"error_samples", e.error_samples},
        {"element_error_epsilon", e.element_error_epsilon},
        {"workers", e.workers},
        {"compare", e.compare}}},
  };
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

RunConfig load_run_config(const std::filesystem::path& path) { return parse_run_config(read_json_file(path)); }

DensityMatrixFile parse_density_file(const json& j, double default_epsilon) {
  if (!j.is_object()) throw ConfigError("density file: expected a JSON object");
  Eigen::Matrix4d re;
  Eigen::Matrix4d im = Eigen::Matrix4d::Zero();
  std::string scale = "absolute";
  double epsilon = default_epsilon;
  std::optional<ElementErrors> errors;
  bool have_re = false;
  apply_fields(j, "density file", {
      {"re", [&](const json& v) { re = matrix4(v, "re"); have_re = true; }},
      {"im", [&](const json& v) { im = matrix4(v, "im"); }},
      {"scale", [&](const json& v) { scale = v.get<std::string>(); }},
      {"epsilon", [&](const json& v) { epsilon = v.get<double>(); }},
      {"errors", [&](const json& v) {
         ElementErrors e;
         if (v.is_object()) {
           apply_fields(v, "errors", {
               {"re", [&](const json& x) { e.re = matrix4(x, "errors.re"); }},
               {"im", [&](const json& x) { e.im = matrix4(x, "errors.im"); }},
           });
         } else {
           e.re = e.im = matrix4(v, "errors");
         }
         errors = e;
       }},
      {"comment", [](const json&) {}},
  });
  if (!have_re) throw ConfigError("density file: missing 're'");
  if (scale != "absolute" && scale != "deviation_epsilon") {
    throw ConfigError("density file: scale must be 'absolute' or 'deviation_epsilon'");
  }
  if (!(epsilon > 0.0)) throw ConfigError("density file: epsilon must be positive");
  Matrix4c m;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) m(a, b) = cplx(re(a, b), im(a, b));
  const bool deviation_scale = scale == "deviation_epsilon";
  if (deviation_scale) m = Matrix4c::Identity() / 4.0 + epsilon * m;
  if (errors) {
    try {
      errors->validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("density file: ") + e.what());
    }
    if (deviation_scale) *errors = errors->scaled(epsilon);
  }
  return {DensityMatrix(m), epsilon, errors};
}

DensityMatrixFile load_density_file(const std::filesystem::path& path, double default_epsilon) {
  return parse_density_file(read_json_file(path), default_epsilon);
}

}  // namespace spincorr
