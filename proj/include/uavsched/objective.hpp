#pragma once

#include <vector>

#include "uavsched/comm.hpp"
#include "uavsched/dag.hpp"

namespace uavsched {

inline constexpr double kDefaultInvalidPenaltyS = 1e6;

struct SyncPenalty {
  std::vector<double> group_mismatch_s;  // max - min of tau_k * slot per group
  double total_s = 0.0;
};

// Throws InfeasibleUpload for unfinished streams.
SyncPenalty sync_penalty(const CommSchedule& comm, const Instance& inst);

// Finish time of the last DAG node.
double end_to_end(const ExecutionSchedule& exec);

struct FitnessReport {
  double e2e_s = 0.0;
  std::vector<double> group_mismatch_s;
  double sync_penalty_s = 0.0;
  double objective_s = 0.0;  // J
  bool feasible = false;
  bool penalty_applied = false;

  bool operator==(const FitnessReport&) const = default;
};

// J = T_e2e + lambda * P_sync when every upload finished; otherwise J is the
// invalid-policy penalty and `exec` is ignored (it may be null).
FitnessReport fitness(const CommSchedule& comm, const ExecutionSchedule* exec,
                      const Instance& inst, double invalid_penalty_s = kDefaultInvalidPenaltyS);

}  // namespace uavsched
