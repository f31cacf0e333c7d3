#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "uavsched/report.hpp"
#include "uavsched/scenario.hpp"
#include "uavsched/schedulers.hpp"

namespace uavsched {

enum class SweepAxis { cores, subcarriers, sinr_threshold, payload_config, branch_config };

std::string_view axis_name(SweepAxis a);
SweepAxis parse_axis(std::string_view name);

// Sets one axis of `cfg` from its textual value. payload_config accepts the
// presets x5, x1, half, uniform4 and subset3 or an explicit dash-separated kB
// list; branch_config takes a dash-separated list of branch lengths.
// Throws ConfigError for values that do not parse or fit the config.
void apply_axis(ScenarioConfig& cfg, SweepAxis axis, const std::string& value);

// Values used when a sweep does not list its own.
std::vector<std::string> default_axis_values(SweepAxis axis);

// Instance and GA seeds of one cell. Both depend only on the seed, never on
// the axis value, so all points of a sweep see paired draws.
struct CellSeeds {
  std::uint64_t instance = 0;
  std::uint64_t ga = 0;
};
CellSeeds cell_seeds(std::uint64_t seed, Scheme scheme);

struct ExperimentPlan {
  std::string name = "sweep";
  ScenarioConfig base;
  SweepAxis axis = SweepAxis::cores;
  std::vector<std::string> values;
  std::vector<Scheme> schemes;
  std::vector<std::uint64_t> seeds;
  GaParams ga;                    // seed is replaced per cell
  std::filesystem::path out_dir;  // empty: keep results in memory only
  int workers = 1;                // concurrent (value, seed) cells
};

// Throws std::invalid_argument for an empty axis, seed or scheme list.
void validate_plan(const ExperimentPlan& plan);

struct CellResult {
  std::string value;
  std::uint64_t seed = 0;
  Scheme scheme = Scheme::decoupled_greedy;
  std::optional<SchemeResult> result;
  std::string error;  // set when the cell threw
};

struct SummaryRow {
  std::string value;
  Scheme scheme = Scheme::decoupled_greedy;
  int n = 0;             // successful runs
  double mean_j_s = 0.0;
  double std_j_s = 0.0;  // sample standard deviation, 0 for n < 2
  double min_j_s = 0.0;
  int infeasible = 0;
  int errors = 0;
};

struct PlanResult {
  std::vector<CellResult> cells;  // ordered by (value, seed, scheme) as listed in the plan
  std::vector<SummaryRow> summary;
};

std::vector<SummaryRow> summarize(const ExperimentPlan& plan, const std::vector<CellResult>& cells);

// Runs every (value, seed, scheme) cell and, if plan.out_dir is set, writes
//   <out>/<plan>/<axis>-<value>/<seed>/<scheme>.{json,csv}
//   <out>/<plan>/{results,summary,table,timing}.csv
// Failing cells are recorded and do not stop the rest.
PlanResult run_plan(const ExperimentPlan& plan);

std::string results_csv(const ExperimentPlan& plan, const std::vector<CellResult>& cells);
std::string summary_csv(const ExperimentPlan& plan, const std::vector<SummaryRow>& rows);
// Mean J per axis value (rows) and scheme (columns).
std::string table_csv(const ExperimentPlan& plan, const std::vector<SummaryRow>& rows);

// Runs the three GA schemes for a fixed number of generations (no early stop).
std::vector<ConvergenceSeries> run_convergence(const Instance& inst, GaParams ga);

// Reads the optional "ga" section of a config document over `defaults`.
// Unknown keys and mistyped values raise ConfigError.
GaParams ga_params_from_json(const nlohmann::json& doc, GaParams defaults = {});

// Worker budget from UAVSCHED_WORKERS, or `fallback` when unset.
int workers_from_env(int fallback = 1);

}  // namespace uavsched
