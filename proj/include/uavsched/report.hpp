#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "uavsched/schedulers.hpp"

namespace uavsched {

// CSV tables. Times are written in ms with six decimals; t and f are 0-based
// slot and subcarrier indices, tau_slots is the 1-based completion slot.
std::string grants_csv(const CommSchedule& comm);               // k,t,f,rate_bps
std::string completion_csv(const CommSchedule& comm, double slot_s);  // k,tau_slots,tau_ms
std::string exec_csv(const std::vector<NodeClass>& node_class, const ExecutionSchedule& exec);
std::string exec_csv(const Instance& inst, const ExecutionSchedule& exec);
std::string trace_csv(const GaTrace& trace);                   // generation,best_J_ms,mean_J_ms

inline constexpr const char* kResultCsvHeader = "scheme,seed,e2e_ms,psync_ms,J_ms,feasible";
std::string result_csv_row(const SchemeResult& r, std::uint64_t seed);

// Shape of the instance a result belongs to; enough to draw it.
struct ResultContext {
  int num_streams = 0;
  int num_cores = 0;
  double slot_s = 0.0;
  std::vector<NodeClass> node_class;

  static ResultContext of(const Instance& inst);
  bool operator==(const ResultContext&) const = default;
};

// Canonical JSON for a result. Wall-clock runtime is left out so equal
// inputs serialize to identical bytes.
nlohmann::json result_to_json(const SchemeResult& r, const ResultContext& ctx);
std::pair<SchemeResult, ResultContext> result_from_json(const nlohmann::json& doc);
std::string serialize_result(const SchemeResult& r, const ResultContext& ctx);

// Timeline with one lane per stream (RB grants) and one per core (nodes by
// class) plus a marker at the last upload completion. Throws
// std::invalid_argument for infeasible results.
std::string gantt_svg(const SchemeResult& r, const ResultContext& ctx);

struct ConvergenceSeries {
  std::string label;
  GaTrace trace;
};

// Long-format CSV: scheme,generation,best_J_ms,mean_J_ms.
std::string convergence_csv(const std::vector<ConvergenceSeries>& series);
// Best-so-far J against generation, one line per series.
std::string convergence_svg(const std::vector<ConvergenceSeries>& series);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace uavsched
