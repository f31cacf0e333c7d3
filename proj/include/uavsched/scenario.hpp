#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

namespace uavsched {

// Raised for malformed configuration files and instances that break a
// structural invariant. what() always names the offending field or constraint.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RadioParams {
  int num_subcarriers = 4;          // F
  double rb_bandwidth_hz = 180e3;   // B_RB
  double slot_s = 1e-3;             // slot duration
  int horizon_slots = 1000;         // T_max
  double sinr_threshold_db = 6.0;   // gamma_th
  double shannon_gap = 1.0;         // linear factor, >= 1
  double eta_max = 8.0;             // bit/s/Hz cap

  bool operator==(const RadioParams&) const = default;
};

// Dense SINR values in dB indexed (stream, slot, subcarrier); slots are
// 0-based here, i.e. slot index t-1 for the t-th scheduling slot.
class SinrTrace {
 public:
  SinrTrace() = default;
  SinrTrace(int streams, int slots, int subcarriers, std::vector<double> db);

  int streams() const { return streams_; }
  int slots() const { return slots_; }
  int subcarriers() const { return subcarriers_; }
  double db(int k, int slot, int sc) const { return db_[index(k, slot, sc)]; }
  const std::vector<double>& values() const { return db_; }
  std::size_t index(int k, int slot, int sc) const {
    return (static_cast<std::size_t>(k) * slots_ + slot) * subcarriers_ + sc;
  }

  bool operator==(const SinrTrace&) const = default;

 private:
  int streams_ = 0;
  int slots_ = 0;
  int subcarriers_ = 0;
  std::vector<double> db_;
};

struct StreamSpec {
  double payload_bits = 0.0;
  int group = 0;  // 0-based group index
  int branch_length = 1;

  bool operator==(const StreamSpec&) const = default;
};

enum class NodeClass { branch, alignment, head };

std::string_view node_class_name(NodeClass cls);
NodeClass parse_node_class(std::string_view name);

struct NodeSpec {
  NodeClass cls = NodeClass::branch;
  int owner = -1;  // stream for branch nodes, group for alignment nodes, -1 for head
  double compute_s = 0.0;
  double read_on_s = 0.0;
  double write_on_s = 0.0;
  double read_off_s = 0.0;
  double write_off_s = 0.0;

  bool operator==(const NodeSpec&) const = default;
};

using Edge = std::pair<int, int>;

// Precedence graph with cached adjacency, topological order and bottom
// levels. Construction rejects out-of-range endpoints, self loops, duplicate
// edges and cycles ("acyclicity violated").
class DagGraph {
 public:
  DagGraph() = default;
  DagGraph(std::vector<NodeSpec> nodes, std::vector<Edge> edges, std::vector<int> entries);

  int size() const { return static_cast<int>(nodes_.size()); }
  const NodeSpec& node(int v) const { return nodes_[v]; }
  const std::vector<NodeSpec>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<int>& preds(int v) const { return preds_[v]; }
  const std::vector<int>& succs(int v) const { return succs_[v]; }
  const std::vector<int>& entries() const { return entries_; }
  int entry(int k) const { return entries_[k]; }
  // Stream whose branch starts at v, or -1.
  int entry_stream(int v) const { return entry_stream_[v]; }
  const std::vector<int>& topo_order() const { return topo_; }
  // Longest compute-only path from v (inclusive) to a sink.
  double bottom_level(int v) const { return bottom_level_[v]; }
  // Alignment and head nodes.
  bool on_fusion_path(int v) const { return nodes_[v].cls != NodeClass::branch; }
  // Nodes that merge two or more incoming dependencies.
  bool is_cross_branch(int v) const { return preds_[v].size() >= 2; }
  // Sum of compute times over the head chain.
  double head_compute_s() const;

  bool operator==(const DagGraph& o) const {
    return nodes_ == o.nodes_ && edges_ == o.edges_ && entries_ == o.entries_;
  }

 private:
  std::vector<NodeSpec> nodes_;
  std::vector<Edge> edges_;
  std::vector<int> entries_;
  std::vector<std::vector<int>> preds_;
  std::vector<std::vector<int>> succs_;
  std::vector<int> entry_stream_;
  std::vector<int> topo_;
  std::vector<double> bottom_level_;
};

// Immutable, fully validated scheduling problem. Construction checks every
// invariant and precomputes linear SINR and per-RB rates once.
class Instance {
 public:
  Instance(RadioParams radio, SinrTrace trace, std::vector<StreamSpec> streams, DagGraph dag,
           int num_cores, double sync_weight);

  const RadioParams& radio() const { return radio_; }
  const SinrTrace& trace() const { return trace_; }
  const std::vector<StreamSpec>& streams() const { return streams_; }
  const StreamSpec& stream(int k) const { return streams_[k]; }
  const DagGraph& dag() const { return dag_; }
  int num_streams() const { return static_cast<int>(streams_.size()); }
  int num_groups() const { return num_groups_; }
  int num_cores() const { return num_cores_; }
  double sync_weight() const { return sync_weight_; }
  int group_size(int m) const { return group_size_[m]; }

  double sinr_linear(int k, int slot, int sc) const { return linear_[trace_.index(k, slot, sc)]; }
  // 0 when below threshold.
  double rate_bps(int k, int slot, int sc) const { return rate_[trace_.index(k, slot, sc)]; }
  bool feasible(int k, int slot, int sc) const { return rate_bps(k, slot, sc) > 0.0; }

  bool operator==(const Instance& o) const {
    return radio_ == o.radio_ && trace_ == o.trace_ && streams_ == o.streams_ && dag_ == o.dag_ &&
           num_cores_ == o.num_cores_ && sync_weight_ == o.sync_weight_;
  }

 private:
  RadioParams radio_;
  SinrTrace trace_;
  std::vector<StreamSpec> streams_;
  DagGraph dag_;
  int num_cores_;
  double sync_weight_;
  int num_groups_ = 0;
  std::vector<int> group_size_;
  std::vector<double> linear_;
  std::vector<double> rate_;
};

struct Range {
  double lo = 0.0;
  double hi = 0.0;
  bool operator==(const Range&) const = default;
};

enum class SinrMode { per_rb, per_slot };

// Generator configuration. Group membership uses 1-based stream numbers, as
// written in config files.
struct ScenarioConfig {
  RadioParams radio;
  std::vector<double> payloads_kb{0.2, 1.5, 5.0, 2.0, 7.0, 10.0};
  std::vector<std::vector<int>> groups{{1, 2, 3}, {4, 5, 6}};
  std::vector<int> branch_lengths{5, 8, 5, 6, 5, 7};
  int head_len = 3;
  int cores = 4;
  Range compute_ms{1.0, 11.0};
  Range on_chip_ms{0.1, 0.6};
  Range off_chip_ms{2.0, 8.0};
  double lambda = 0.05;
  Range sinr_db{5.0, 20.0};
  SinrMode sinr_mode = SinrMode::per_rb;

  bool operator==(const ScenarioConfig&) const = default;
};

inline constexpr double kBitsPerKilobyte = 8000.0;

// Throws ConfigError naming the first offending field.
void validate_config(const ScenarioConfig& cfg);

Instance generate_instance(const ScenarioConfig& cfg, std::uint64_t seed);

// Fusion-group DAG for the given streams: per-stream chains, one alignment
// node per group, then a head chain. Node order: branches (stream-major),
// alignment nodes, head nodes.
struct DagLayout {
  std::vector<NodeSpec> nodes;
  std::vector<Edge> edges;
  std::vector<int> entries;
};
DagLayout build_fusion_dag(const std::vector<StreamSpec>& streams, int num_groups, int head_len);

// Config files (JSON). See configs/default.json.
ScenarioConfig config_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const ScenarioConfig& cfg);
ScenarioConfig load_config(const std::filesystem::path& path);

// Canonical instance serialization.
nlohmann::json instance_to_json(const Instance& inst);
Instance instance_from_json(const nlohmann::json& doc);
std::string serialize_instance(const Instance& inst);

// Loads either a serialized instance (format tag present) or a scenario
// config, which is generated with its "seed" field (default 0) unless
// seed_override is given.
Instance load_instance(const std::filesystem::path& path,
                       std::optional<std::uint64_t> seed_override = std::nullopt);

// Parses text as JSON; parse failures become ConfigError with line/column.
nlohmann::json parse_json_text(const std::string& text, const std::string& source);

}  // namespace uavsched
