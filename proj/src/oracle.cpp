#include "uavsched/oracle.hpp"

#include <limits>
#include <map>
#include <string>

namespace uavsched {

namespace {

void check_limits(const Instance& inst, const OracleLimits& lim) {
  auto refuse = [](const std::string& what, int got, int max) {
    throw OracleRefusal("oracle: " + what + " = " + std::to_string(got) + " exceeds the limit " +
                        std::to_string(max));
  };
  if (inst.num_streams() > lim.max_streams) refuse("streams", inst.num_streams(), lim.max_streams);
  if (inst.radio().horizon_slots > lim.max_slots)
    refuse("slots", inst.radio().horizon_slots, lim.max_slots);
  if (inst.radio().num_subcarriers > lim.max_subcarriers)
    refuse("subcarriers", inst.radio().num_subcarriers, lim.max_subcarriers);
  if (inst.dag().size() > lim.max_nodes) refuse("nodes", inst.dag().size(), lim.max_nodes);
  if (inst.num_cores() > lim.max_cores) refuse("cores", inst.num_cores(), lim.max_cores);
}

class Search {
 public:
  Search(const Instance& inst, const OracleLimits& lim) : inst_(inst), lim_(lim) {}

  // Distinct completion vectors of finished uploads, each with the first
  // schedule reaching it in enumeration order.
  std::map<std::vector<int>, CommSchedule> finished;

  void uplink(const UplinkScan& scan) {
    tick();
    if (scan.done()) {
      if (!scan.schedule().all_finished()) return;
      std::vector<int> tau;
      for (const auto& t : scan.schedule().completion_slot) tau.push_back(*t);
      finished.try_emplace(std::move(tau), scan.schedule());
      return;
    }
    for (int k : scan.eligible()) {
      UplinkScan next = scan;
      next.grant(k);
      uplink(next);
    }
    UplinkScan idle = scan;
    idle.skip();
    uplink(idle);
  }

  // Minimum makespan over dispatch sequences for fixed releases.
  ExecutionSchedule best_dag(const ReleaseMap& rel) {
    rel_ = &rel;
    best_makespan_ = std::numeric_limits<double>::infinity();
    best_exec_ = {};
    ExecutionSchedule start(inst_.dag().size(), inst_.num_cores());
    dispatch(start, 0);
    return best_exec_;
  }

  std::int64_t states() const { return states_; }

 private:
  void tick() {
    if (++states_ > lim_.max_states) {
      throw OracleRefusal("oracle: search exceeded " + std::to_string(lim_.max_states) + " states");
    }
  }

  void dispatch(const ExecutionSchedule& s, int placed) {
    tick();
    const auto& dag = inst_.dag();
    if (placed == dag.size()) {
      if (s.makespan() < best_makespan_) {
        best_makespan_ = s.makespan();
        best_exec_ = s;
      }
      return;
    }
    for (int v = 0; v < dag.size(); ++v) {
      if (s.scheduled(v)) continue;
      bool ready = true;
      for (int u : dag.preds(v)) ready = ready && s.scheduled(u);
      if (!ready) continue;
      bool tried_empty = false;
      for (int c = 0; c < inst_.num_cores(); ++c) {
        if (s.core_order[c].empty()) {
          if (tried_empty) continue;
          tried_empty = true;
        }
        const CandidateTimes t = candidate_start_finish(inst_, v, c, *rel_, s);
        if (t.finish_s >= best_makespan_) continue;
        ExecutionSchedule next = s;
        next.commit(v, c, t.start_s, t.finish_s);
        dispatch(next, placed + 1);
      }
    }
  }

  const Instance& inst_;
  const OracleLimits& lim_;
  std::int64_t states_ = 0;
  const ReleaseMap* rel_ = nullptr;
  double best_makespan_ = 0.0;
  ExecutionSchedule best_exec_;
};

}  // namespace

OracleResult brute_force_optimum(const Instance& inst, const OracleLimits& limits,
                                 double invalid_penalty_s) {
  check_limits(inst, limits);
  Search search(inst, limits);
  search.uplink(UplinkScan(inst));

  OracleResult out;
  out.objective_s = invalid_penalty_s;
  for (const auto& [tau, comm] : search.finished) {
    ExecutionSchedule exec = search.best_dag(propagate_releases(comm, inst));
    FitnessReport f = fitness(comm, &exec, inst, invalid_penalty_s);
    if (!out.feasible || f.objective_s < out.objective_s) {
      out.feasible = true;
      out.objective_s = f.objective_s;
      out.comm = comm;
      out.exec = std::move(exec);
      out.fitness = std::move(f);
    }
  }
  if (!out.feasible) {
    out.comm = decode_comm_greedy_payload(inst);
    out.fitness = fitness(out.comm, nullptr, inst, invalid_penalty_s);
  }
  out.states = search.states();
  return out;
}

ScenarioConfig oracle_tiny_config() {
  ScenarioConfig cfg;
  cfg.radio.num_subcarriers = 1;
  cfg.radio.horizon_slots = 6;
  cfg.payloads_kb = {0.1, 0.15};
  cfg.groups = {{1, 2}};
  cfg.branch_lengths = {2, 1};
  cfg.head_len = 2;
  cfg.cores = 2;
  return cfg;
}

}  // namespace uavsched
