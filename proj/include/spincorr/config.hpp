// Run configuration and density-matrix file formats (JSON).
#pragma once

#include "spincorr/correlations.hpp"
#include "spincorr/dynamics.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace spincorr {

enum class ModelKind { Analytic, Ensemble };

ModelKind parse_model(std::string_view s);
std::string_view to_string(ModelKind m);

struct PrepSettings {
  double theta1_pi = 0.70;
  double theta2_pi = 0.28;
  double f = std::cos(0.28 * std::numbers::pi);
  double tau1_ns = 1'000.0;
  double tau2_ns = 200'000.0;
  double pulse_pi2_rf_ns = 5'000.0;

  PrepParams params() const;
};

struct EnsembleSettings {
  int quadrature_order = 64;
  bool electron_grid = true;
  bool nuclear_grid = true;

  EnsembleModel model() const { return EnsembleModel::with(quadrature_order, electron_grid, nuclear_grid); }
};

struct ExperimentSettings {
  ModelKind model = ModelKind::Ensemble;
  double t_max_ns = 500.0;            // free-decay window
  int points = 200;                   // free-decay samples / dd-preserve tau steps
  double tau_ns = 100.0;              // dd-preserve tau step
  double tau4_ns = 1'000.0;           // revival block quarter-length
  int n_blocks = 3;
  int samples_per_block = 8;
  std::uint64_t seed = 1;
  int error_samples = 0;              // 0 disables error bars
  double element_error_epsilon = 0.02; // uniform element half-width, units of epsilon
  int workers = 1;
  bool compare = false;               // append closed-form and expansion columns
};

struct RunConfig {
  PhysicsParams physics;
  PrepSettings prep;
  OptimizerConfig optimizer;
  EnsembleSettings ensemble;
  ExperimentSettings experiment;

  /// Throws ConfigError on any invalid field.
  void validate() const;
};

/// Parses a JSON object mirroring RunConfig; absent keys keep their defaults
/// and unknown keys are rejected with ConfigError.
RunConfig parse_run_config(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);
nlohmann::json to_json(const RunConfig& cfg);

/// Density-matrix file:
///   {"re": 4x4, "im": 4x4, "scale": "absolute" | "deviation_epsilon",
///    "epsilon": number, "errors": optional 4x4 | {"re": 4x4, "im": 4x4}}
/// With the deviation scale rho = 1/4 + epsilon (re + i im) and the errors
/// are in units of epsilon as well.
struct DensityMatrixFile {
  DensityMatrix rho;
  double epsilon;
  std::optional<ElementErrors> errors;  // absolute units
};

DensityMatrixFile parse_density_file(const nlohmann::json& j, double default_epsilon);
DensityMatrixFile load_density_file(const std::filesystem::path& path, double default_epsilon);

nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace spincorr
