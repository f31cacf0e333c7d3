#include "uavsched/objective.hpp"

#include <algorithm>
#include <limits>

namespace uavsched {

SyncPenalty sync_penalty(const CommSchedule& comm, const Instance& inst) {
  const int M = inst.num_groups();
  std::vector<int> lo(M, std::numeric_limits<int>::max());
  std::vector<int> hi(M, std::numeric_limits<int>::min());
  for (int k = 0; k < inst.num_streams(); ++k) {
    if (!comm.completion_slot[k]) throw InfeasibleUpload(k);
    const int m = inst.stream(k).group;
    lo[m] = std::min(lo[m], *comm.completion_slot[k]);
    hi[m] = std::max(hi[m], *comm.completion_slot[k]);
  }
  SyncPenalty out;
  out.group_mismatch_s.resize(M);
  const double slot_s = inst.radio().slot_s;
  for (int m = 0; m < M; ++m) {
    out.group_mismatch_s[m] = (hi[m] - lo[m]) * slot_s;
    out.total_s += out.group_mismatch_s[m];
  }
  return out;
}

double end_to_end(const ExecutionSchedule& exec) { return exec.makespan(); }

FitnessReport fitness(const CommSchedule& comm, const ExecutionSchedule* exec,
                      const Instance& inst, double invalid_penalty_s) {
  FitnessReport r;
  if (!comm.all_finished() || exec == nullptr) {
    r.objective_s = invalid_penalty_s;
    r.penalty_applied = true;
    return r;
  }
  const SyncPenalty sync = sync_penalty(comm, inst);
  r.e2e_s = end_to_end(*exec);
  r.group_mismatch_s = sync.group_mismatch_s;
  r.sync_penalty_s = sync.total_s;
  r.objective_s = r.e2e_s + inst.sync_weight() * r.sync_penalty_s;
  r.feasible = true;
  return r;
}

}  // namespace uavsched
