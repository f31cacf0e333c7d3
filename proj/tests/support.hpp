#pragma once

// Hand-built instances for unit tests. Everything not set explicitly is zero:
// node costs, transfer delays, lambda.

#include <functional>
#include <vector>

#include "uavsched/scenario.hpp"

namespace support {

using namespace uavsched;

struct Spec {
  RadioParams radio;
  std::vector<double> payload_bits{1000.0};
  std::vector<int> group{0};   // 0-based, per stream
  std::vector<int> branch{1};  // per stream
  int head_len = 1;
  int cores = 1;
  double lambda = 0.0;
  std::function<double(int, int, int)> sinr_db = [](int, int, int) { return 30.0; };
  std::function<void(std::vector<NodeSpec>&)> costs;
};

inline Instance build(const Spec& s) {
  const int K = static_cast<int>(s.payload_bits.size());
  std::vector<StreamSpec> streams(K);
  int groups = 0;
  for (int k = 0; k < K; ++k) {
    streams[k] = {s.payload_bits[k], s.group[k], s.branch[k]};
    groups = std::max(groups, s.group[k] + 1);
  }
  DagLayout layout = build_fusion_dag(streams, groups, s.head_len);
  if (s.costs) s.costs(layout.nodes);
  const int T = s.radio.horizon_slots;
  const int F = s.radio.num_subcarriers;
  std::vector<double> db;
  for (int k = 0; k < K; ++k) {
    for (int t = 0; t < T; ++t) {
      for (int f = 0; f < F; ++f) db.push_back(s.sinr_db(k, t, f));
    }
  }
  return Instance(s.radio, SinrTrace(K, T, F, std::move(db)), std::move(streams),
                  DagGraph(layout.nodes, layout.edges, layout.entries), s.cores, s.lambda);
}

inline RadioParams radio(int F, int T) {
  RadioParams r;
  r.num_subcarriers = F;
  r.horizon_slots = T;
  return r;
}

// Node costs in ms for a layout, all transfers zero.
inline std::function<void(std::vector<NodeSpec>&)> compute_ms(std::vector<double> ms) {
  return [ms](std::vector<NodeSpec>& nodes) {
    for (std::size_t v = 0; v < nodes.size(); ++v) nodes[v].compute_s = ms.at(v) / 1000.0;
  };
}

inline ScenarioConfig small_config() {
  ScenarioConfig cfg;
  cfg.payloads_kb = {0.4, 1.0, 0.6};
  cfg.groups = {{1, 2}, {3}};
  cfg.branch_lengths = {2, 3, 2};
  cfg.head_len = 2;
  cfg.cores = 2;
  cfg.radio.num_subcarriers = 2;
  cfg.radio.horizon_slots = 60;
  return cfg;
}

}  // namespace support
