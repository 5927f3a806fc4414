#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "congestion/diagnostics.hpp"
#include "congestion/errors.hpp"
#include "congestion/scenarios.hpp"
#include "congestion/solver.hpp"

namespace congestion {

/// One problem found while reading a configuration. `line` is 0 for keys
/// that came from an override or were never written.
struct ConfigIssue {
  std::string key;
  int line = 0;
  std::string reason;

  bool operator==(const ConfigIssue&) const = default;
};

class ConfigError : public Error {
public:
  ConfigError(const std::string& what, std::vector<ConfigIssue> issues)
      : Error(what), issues_(std::move(issues)) {}
  const std::vector<ConfigIssue>& issues() const { return issues_; }

private:
  std::vector<ConfigIssue> issues_;
};

/// Malformed text: bad syntax, unknown section or key, unparsable value.
class ParseError : public ConfigError {
public:
  using ConfigError::ConfigError;
};

/// Well-formed text whose values break a parameter constraint.
class ValidationError : public ConfigError {
public:
  using ConfigError::ConfigError;
};

struct OutputConfig {
  std::string dir = "out";
  int diagnostics_every = 1;  // record every n-th accepted step (plus snapshot times)
  bool snapshots = true;
  double delta_c = kDefaultDeltaC;

  bool operator==(const OutputConfig&) const = default;
};

enum class SweepParam { None, Eps, KappaDelta };

struct SweepPlan {
  SweepParam param = SweepParam::None;
  std::vector<double> eps;
  std::vector<std::pair<double, double>> kappa_delta;
  std::vector<double> delta_c{0.02, 0.05, 0.1};  // LMP sensitivity thresholds
  int workers = 1;

  std::size_t size() const;
  bool operator==(const SweepPlan&) const = default;
};

/// Fully resolved run description: a named scenario with every field
/// overridable from the config file.
struct RunConfig {
  std::string scenario = "traffic_1d";
  long seed = 0;
  Scenario setup;
  SolverConfig solver;
  OutputConfig output;
  SweepPlan sweep;

  bool operator==(const RunConfig&) const = default;
};

/// Parses the INI-style schema. Overrides use `section.key=value` (or
/// `scenario=...`, `seed=...`) and are applied after the file. Throws
/// ParseError or ValidationError carrying every issue found.
RunConfig parse_config(const std::string& text, const std::vector<std::string>& overrides = {});

RunConfig load_config(const std::filesystem::path& path,
                      const std::vector<std::string>& overrides = {});

/// Canonical text listing every resolved key; parse_config reproduces the
/// same RunConfig from it.
std::string serialize_config(const RunConfig& cfg);

/// Throws ValidationError naming the offending key.
void validate_config(const RunConfig& cfg);

struct CheckReport {
  bool ok = true;
  std::vector<std::string> warnings;
  ValidationReport initial;
  std::string error;  // barrier or grid construction failure
};

/// Builds the barrier and initial data and runs the initial-data gate.
CheckReport check_config(const RunConfig& cfg);

struct RunResult {
  bool ok = true;
  std::string error_kind;  // empty, or StepFailure / NonFinite / ...
  std::string error;
  std::vector<DiagnosticsRecord> records;
  AdvanceStats stats;
  double wall_time = 0.0;
  double max_pi = 0.0;           // largest cell value of pi over recorded states
  bool truncation_ordering = true;
  std::vector<double> lmp_by_delta_c;  // mean LMP ratio per SweepPlan::delta_c entry
  /// L1 distance to the exact manufactured fields at the final time.
  std::optional<double> manufactured_l1_rho;
  std::optional<double> manufactured_l1_m;
  FlowState final_state;
};

struct RunOptions {
  bool write_files = true;
  /// Smaller truncation widths checked against every recorded state.
  std::vector<double> ordering_deltas;
};

/// Runs one configuration into cfg.output.dir: diagnostics.csv, snapshots/
/// and meta.json. Solver failures are recorded, not thrown. Throws IoError
/// before any computation if the directory cannot be written.
RunResult run_once(const RunConfig& cfg, const RunOptions& options = {});

struct SweepRow {
  std::string label;
  double eps = 0.0;
  double kappa = 0.0;
  double delta = 0.0;
  bool ok = true;
  std::string error;
  double final_max_ratio = 0.0;
  double complementarity_integral = 0.0;
  double pi_integral = 0.0;
  double mean_divu_congested = 0.0;
  double lmp_mean = 0.0;
  int congested_snapshots = 0;
  double max_pi = 0.0;
  bool truncation_ordering = true;
  std::vector<double> lmp_by_delta_c;
  double budget_relative = 0.0;
  double mass_drift = 0.0;
  double wall_time = 0.0;
};

struct TrendCheck {
  std::string name;
  bool applicable = false;
  bool holds = false;
  std::string detail;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // decreasing eps, or decreasing delta
  std::vector<double> delta_c;
  std::vector<TrendCheck> checks;

  const TrendCheck* check(const std::string& name) const;
};

/// Independent member runs (optionally on cfg.sweep.workers threads), each
/// in its own subdirectory, then sweep.csv and sweep.json.
SweepResult run_sweep(const RunConfig& cfg);

/// Per-member configs in row order.
std::vector<RunConfig> sweep_members(const RunConfig& cfg);

}  // namespace congestion
