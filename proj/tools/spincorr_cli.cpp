// spincorr: command-line runners for the correlation-dynamics experiments.
#include "spincorr/errors.hpp"
#include "spincorr/experiments.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace {

using namespace spincorr;

constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

struct Overrides {
  std::string config;
  std::string output;
  std::string summary;
  std::string model;
  std::optional<std::uint64_t> seed;
  std::optional<double> t_max_ns;
  std::optional<int> points;
  std::optional<double> tau_ns;
  std::optional<double> tau4_ns;
  std::optional<int> blocks;
  std::optional<int> samples_per_block;
  std::optional<int> error_samples;
  std::optional<int> workers;
  std::optional<int> order;
  bool compare = false;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "JSON run configuration");
  cmd->add_option("--output", o.output, "output file (default: stdout)");
  cmd->add_option("--summary", o.summary, "summary JSON file (default: stderr)");
  cmd->add_option("--seed", o.seed, "RNG seed for error bars");
  cmd->add_option("--error-samples", o.error_samples, "perturbation samples for error bars (0 = off)");
  cmd->add_option("--workers", o.workers, "worker threads for ensemble averaging");
}

void add_dynamics(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--model", o.model, "analytic | ensemble")->check(CLI::IsMember({"analytic", "ensemble"}));
  cmd->add_option("--order", o.order, "Gauss-Hermite order per detuning axis");
  cmd->add_flag("--compare", o.compare, "append closed-form and expansion columns");
}

RunConfig build_config(const Overrides& o) {
  RunConfig cfg = o.config.empty() ? RunConfig{} : load_run_config(o.config);
  ExperimentSettings& x = cfg.experiment;
  if (!o.model.empty()) x.model = parse_model(o.model);
  if (o.seed) x.seed = *o.seed;
  if (o.t_max_ns) x.t_max_ns = *o.t_max_ns;
  if (o.points) x.points = *o.points;
  if (o.tau_ns) x.tau_ns = *o.tau_ns;
  if (o.tau4_ns) x.tau4_ns = *o.tau4_ns;
  if (o.blocks) x.n_blocks = *o.blocks;
  if (o.samples_per_block) x.samples_per_block = *o.samples_per_block;
  if (o.error_samples) x.error_samples = *o.error_samples;
  if (o.workers) x.workers = *o.workers;
  if (o.order) cfg.ensemble.quadrature_order = *o.order;
  if (o.compare) x.compare = true;
  cfg.validate();
  return cfg;
}

void write_text(const std::string& path, const std::string& text, std::ostream& fallback) {
  if (path.empty()) {
    fallback << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  out << text;
}

void emit(const Overrides& o, const ExperimentResult& r) {
  write_text(o.output, to_csv(r.rows), std::cout);
  write_text(o.summary, r.summary.dump(2) + "\n", std::cerr);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-qubit correlation dynamics: experiment runners"};
  app.require_subcommand(1);
  Overrides o;
  std::string input;

  auto* free_decay = app.add_subcommand("free-decay", "free evolution of the prepared state");
  add_common(free_decay, o);
  add_dynamics(free_decay, o);
  free_decay->add_option("--tmax-ns", o.t_max_ns, "end of the time window");
  free_decay->add_option("--points", o.points, "number of samples");

  auto* dd = app.add_subcommand("dd-preserve", "two-flip decoupling, readout at 4 tau");
  add_common(dd, o);
  add_dynamics(dd, o);
  dd->add_option("--tau-ns", o.tau_ns, "tau step");
  dd->add_option("--points", o.points, "number of tau values");

  auto* revival = app.add_subcommand("revival", "repeated decoupling blocks with echo revivals");
  add_common(revival, o);
  add_dynamics(revival, o);
  revival->add_option("--tau4-ns", o.tau4_ns, "block quarter-length");
  revival->add_option("--blocks", o.blocks, "number of blocks");
  revival->add_option("--samples-per-block", o.samples_per_block, "readouts per block");

  auto* prep = app.add_subcommand("state-prep", "stage-by-stage preparation dump");
  add_common(prep, o);

  auto* corr = app.add_subcommand("correlations", "correlation report for a density-matrix file");
  add_common(corr, o);
  corr->add_option("input", input, "density-matrix JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    const RunConfig cfg = build_config(o);
    if (free_decay->parsed()) {
      emit(o, run_free_decay(cfg));
    } else if (dd->parsed()) {
      emit(o, run_dd_preserve(cfg));
    } else if (revival->parsed()) {
      emit(o, run_revival(cfg));
    } else if (prep->parsed()) {
      const StatePrepResult r = run_state_prep(cfg);
      write_text(o.output, r.text, std::cout);
      if (!o.summary.empty()) write_text(o.summary, r.summary.dump(2) + "\n", std::cerr);
    } else if (corr->parsed()) {
      const DensityMatrixFile file = load_density_file(input, cfg.physics.epsilon);
      write_text(o.output, run_correlations(file, cfg).dump(2) + "\n", std::cout);
    }
  } catch (const NumericalFailure& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {  // ConfigError, InvalidState
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInput;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInput;
  } catch (const nlohmann::json::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInput;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kExitNumerical;
  }
  return 0;
}
