#pragma once

#include <array>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "uavsched/comm.hpp"
#include "uavsched/scenario.hpp"

namespace uavsched {

// Raised when a schedule needs every upload complete but one is not.
class InfeasibleUpload : public std::runtime_error {
 public:
  explicit InfeasibleUpload(int stream);
  int stream() const { return stream_; }

 private:
  int stream_;
};

// Release bound per node; nullopt means unconstrained.
struct ReleaseMap {
  std::vector<std::optional<double>> release_s;

  // Lower bound for arithmetic: the release, or 0 when unconstrained.
  double effective(int v) const { return release_s[v].value_or(0.0); }
  bool operator==(const ReleaseMap&) const = default;
};

// Entry node of stream k released at tau_k * slot; throws InfeasibleUpload.
ReleaseMap propagate_releases(const CommSchedule& comm, const Instance& inst);
// Every entry released at max_k tau_k * slot.
ReleaseMap barrier_releases(const CommSchedule& comm, const Instance& inst);

struct NodeTiming {
  int core = -1;  // -1 until scheduled
  double start_s = 0.0;
  double finish_s = 0.0;

  bool operator==(const NodeTiming&) const = default;
};

struct ExecutionSchedule {
  std::vector<NodeTiming> nodes;               // indexed by node id
  std::vector<std::vector<int>> core_order;    // node ids per core, in start order
  std::vector<double> core_available_s;        // chi_c
  std::vector<int> dispatch_order;             // order in which nodes were committed

  ExecutionSchedule() = default;
  ExecutionSchedule(int num_nodes, int num_cores);

  bool scheduled(int v) const { return nodes[v].core >= 0; }
  void commit(int v, int core, double start_s, double finish_s);
  double makespan() const;

  bool operator==(const ExecutionSchedule&) const = default;
};

// Time at which u's output is usable by v on `core` (u already scheduled):
// on-chip handoff when u ran on the same core, off-chip otherwise.
double data_ready_time(const Instance& inst, int u, int v, int core,
                       const ExecutionSchedule& partial);

struct CandidateTimes {
  double start_s = 0.0;
  double finish_s = 0.0;
};

// s = max{chi_c, rho_v, max_u data_ready_time(u, v, c)}, f = s + p_v.
// The predecessor term is 0 for nodes without predecessors.
CandidateTimes candidate_start_finish(const Instance& inst, int v, int core,
                                      const ReleaseMap& releases,
                                      const ExecutionSchedule& partial);

using DagFeatures = std::array<double, 8>;

// Raw features of a ready node: bottom level, compute time, successor count,
// negated predecessor count, fusion-path indicator, cross-branch indicator,
// negated release time and negated mean core availability.
DagFeatures raw_dag_features(const Instance& inst, int v, const ReleaseMap& releases,
                             const ExecutionSchedule& partial);

// Min-max normalized features for each node of the ready set.
std::vector<DagFeatures> dag_features(const Instance& inst, std::span<const int> ready,
                                      const ReleaseMap& releases,
                                      const ExecutionSchedule& partial);

struct MappingFeatures {
  int cross = 0;            // predecessors on other cores
  double off_chip_s = 0.0;  // sum over those of (w_off(u) + r_off(v))
  int same = 0;             // predecessors on the candidate core
  double core_available_s = 0.0;
};

MappingFeatures mapping_features(const Instance& inst, int v, int core,
                                 const ExecutionSchedule& partial);

// Release-aware list scheduler. Each step picks the ready node with the
// largest beta-weighted normalized feature score (ties to the lowest id),
// then the core minimizing
//   f_hat + mu1*cross + mu2*off_chip - mu3*same + mu4*chi_c
// (ties to the lowest core). Nodes are appended after chi_c.
ExecutionSchedule schedule_dag_policy(const Instance& inst, const ReleaseMap& releases,
                                      std::span<const double> beta, std::span<const double> mu);

// Fixed rule: largest bottom level first (ties to the lowest id), earliest
// finish time core (ties to the lowest core).
ExecutionSchedule schedule_dag_greedy(const Instance& inst, const ReleaseMap& releases);

// Weights under which schedule_dag_policy reproduces schedule_dag_greedy.
inline constexpr std::array<double, 8> kGreedyBeta{1, 0, 0, 0, 0, 0, 0, 0};
inline constexpr std::array<double, 4> kGreedyMu{0, 0, 0, 0};

}  // namespace uavsched
