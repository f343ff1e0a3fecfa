// Experiment runners behind the CLI: free decay, decoupling sweep, revival,
// state preparation and single-matrix correlation reports.
#pragma once

#include "spincorr/config.hpp"

#include <optional>
#include <string>
#include <vector>

namespace spincorr {

/// Classical decoherence (I), quantum decoherence (II), quantum revival
/// (III), classical revival (IV).
enum class Regime { I, II, III, IV };

std::string_view to_string(Regime r);

struct ComparisonColumns {
  double analytic_mutual;
  double analytic_classical;
  double analytic_discord;
  double taylor_mutual;     // NaN when |c| > 0.1
  double taylor_classical;
  double taylor_discord;
};

struct CurveRow {
  double t_ns = 0.0;
  BellCoeffs c;
  double mutual_bits = 0.0;
  double classical_bits = 0.0;
  double discord_bits = 0.0;
  double geo_discord = 0.0;
  Regime regime = Regime::I;
  std::optional<ErrorBars> errors;
  std::optional<ComparisonColumns> compare;
};

struct ExperimentResult {
  std::vector<CurveRow> rows;
  nlohmann::json summary;
};

/// Labels each row from |c2| vs |c3| and the trend of |c2| against the
/// previous row (the first row uses the next one): above and falling -> I,
/// below and falling -> II, below and rising -> III, above and rising -> IV.
void label_regimes(std::vector<CurveRow>& rows);

/// CSV with header t_ns,c1,c2,c3,mutual_bits,classical_bits,discord_bits,geo_discord,regime
/// plus err_* columns when every row has error bars and comparison columns
/// when every row has them. Values use 9 significant digits.
std::string to_csv(const std::vector<CurveRow>& rows);

ExperimentResult run_free_decay(const RunConfig& cfg);
ExperimentResult run_dd_preserve(const RunConfig& cfg);
ExperimentResult run_revival(const RunConfig& cfg);

struct StatePrepResult {
  std::string text;      // human-readable stage dump
  nlohmann::json summary;
};

StatePrepResult run_state_prep(const RunConfig& cfg);

/// Full correlation report for one state; error bars are added when the
/// file carries element errors.
nlohmann::json run_correlations(const DensityMatrixFile& input, const RunConfig& cfg);

nlohmann::json report_to_json(const CorrelationReport& r);

}  // namespace spincorr
