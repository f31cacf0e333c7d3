#include "uavsched/dag.hpp"

#include <algorithm>
#include <string>

namespace uavsched {

InfeasibleUpload::InfeasibleUpload(int stream)
    : std::runtime_error("infeasible upload: stream " + std::to_string(stream) +
                         " did not finish within the horizon"),
      stream_(stream) {}

ReleaseMap propagate_releases(const CommSchedule& comm, const Instance& inst) {
  ReleaseMap out;
  out.release_s.assign(inst.dag().size(), std::nullopt);
  const double slot_s = inst.radio().slot_s;
  for (int k = 0; k < inst.num_streams(); ++k) {
    if (!comm.completion_slot[k]) throw InfeasibleUpload(k);
    out.release_s[inst.dag().entry(k)] = *comm.completion_slot[k] * slot_s;
  }
  return out;
}

ReleaseMap barrier_releases(const CommSchedule& comm, const Instance& inst) {
  ReleaseMap out;
  out.release_s.assign(inst.dag().size(), std::nullopt);
  int last = 0;
  for (int k = 0; k < inst.num_streams(); ++k) {
    if (!comm.completion_slot[k]) throw InfeasibleUpload(k);
    last = std::max(last, *comm.completion_slot[k]);
  }
  const double barrier = last * inst.radio().slot_s;
  for (int r : inst.dag().entries()) out.release_s[r] = barrier;
  return out;
}

ExecutionSchedule::ExecutionSchedule(int num_nodes, int num_cores)
    : nodes(num_nodes), core_order(num_cores), core_available_s(num_cores, 0.0) {
  dispatch_order.reserve(num_nodes);
}

void ExecutionSchedule::commit(int v, int core, double start_s, double finish_s) {
  nodes[v] = {core, start_s, finish_s};
  core_order[core].push_back(v);
  core_available_s[core] = finish_s;
  dispatch_order.push_back(v);
}

double ExecutionSchedule::makespan() const {
  double out = 0.0;
  for (const auto& n : nodes) out = std::max(out, n.finish_s);
  return out;
}

double data_ready_time(const Instance& inst, int u, int v, int core,
                       const ExecutionSchedule& partial) {
  const auto& pu = inst.dag().node(u);
  const auto& pv = inst.dag().node(v);
  const auto& tu = partial.nodes[u];
  if (tu.core == core) return tu.finish_s + pu.write_on_s + pv.read_on_s;
  return tu.finish_s + pu.write_off_s + pv.read_off_s;
}

CandidateTimes candidate_start_finish(const Instance& inst, int v, int core,
                                      const ReleaseMap& releases,
                                      const ExecutionSchedule& partial) {
  double start = partial.core_available_s[core];
  if (releases.release_s[v]) start = std::max(start, *releases.release_s[v]);
  double data = 0.0;
  for (int u : inst.dag().preds(v)) data = std::max(data, data_ready_time(inst, u, v, core, partial));
  start = std::max(start, data);
  return {start, start + inst.dag().node(v).compute_s};
}

namespace {

double mean_core_availability(const ExecutionSchedule& partial) {
  double sum = 0.0;
  for (double x : partial.core_available_s) sum += x;
  return sum / static_cast<double>(partial.core_available_s.size());
}

DagFeatures features_with_mean(const Instance& inst, int v, const ReleaseMap& releases,
                               double mean_avail) {
  const auto& dag = inst.dag();
  return {dag.bottom_level(v),
          dag.node(v).compute_s,
          static_cast<double>(dag.succs(v).size()),
          -static_cast<double>(dag.preds(v).size()),
          dag.on_fusion_path(v) ? 1.0 : 0.0,
          dag.is_cross_branch(v) ? 1.0 : 0.0,
          -releases.effective(v),
          -mean_avail};
}

// Ready list kept sorted by node id.
class ReadySet {
 public:
  explicit ReadySet(const DagGraph& dag) : dag_(&dag), waiting_(dag.size()) {
    for (int v = 0; v < dag.size(); ++v) {
      waiting_[v] = static_cast<int>(dag.preds(v).size());
      if (waiting_[v] == 0) ready_.push_back(v);
    }
  }

  bool empty() const { return ready_.empty(); }
  const std::vector<int>& nodes() const { return ready_; }

  void remove(int v) {
    ready_.erase(std::find(ready_.begin(), ready_.end(), v));
    for (int s : dag_->succs(v)) {
      if (--waiting_[s] == 0) ready_.insert(std::upper_bound(ready_.begin(), ready_.end(), s), s);
    }
  }

 private:
  const DagGraph* dag_;
  std::vector<int> waiting_;
  std::vector<int> ready_;
};

}  // namespace

DagFeatures raw_dag_features(const Instance& inst, int v, const ReleaseMap& releases,
                             const ExecutionSchedule& partial) {
  return features_with_mean(inst, v, releases, mean_core_availability(partial));
}

std::vector<DagFeatures> dag_features(const Instance& inst, std::span<const int> ready,
                                      const ReleaseMap& releases,
                                      const ExecutionSchedule& partial) {
  const double mean_avail = mean_core_availability(partial);
  std::vector<DagFeatures> rows;
  rows.reserve(ready.size());
  for (int v : ready) rows.push_back(features_with_mean(inst, v, releases, mean_avail));
  minmax_normalize(std::span<DagFeatures>(rows));
  return rows;
}

MappingFeatures mapping_features(const Instance& inst, int v, int core,
                                 const ExecutionSchedule& partial) {
  MappingFeatures m;
  m.core_available_s = partial.core_available_s[core];
  const double read_off = inst.dag().node(v).read_off_s;
  for (int u : inst.dag().preds(v)) {
    if (partial.nodes[u].core == core) {
      ++m.same;
    } else {
      ++m.cross;
      m.off_chip_s += inst.dag().node(u).write_off_s + read_off;
    }
  }
  return m;
}

ExecutionSchedule schedule_dag_policy(const Instance& inst, const ReleaseMap& releases,
                                      std::span<const double> beta, std::span<const double> mu) {
  if (beta.size() != 8 || mu.size() != 4)
    throw std::invalid_argument("schedule_dag_policy: need 8 beta and 4 mu weights");
  const auto& dag = inst.dag();
  const int C = inst.num_cores();
  ExecutionSchedule sched(dag.size(), C);
  ReadySet ready(dag);
  std::vector<DagFeatures> rows;
  rows.reserve(dag.size());

  while (!ready.empty()) {
    const auto& cand = ready.nodes();
    int pick = cand[0];
    if (cand.size() > 1) {
      const double mean_avail = mean_core_availability(sched);
      rows.clear();
      for (int v : cand) rows.push_back(features_with_mean(inst, v, releases, mean_avail));
      minmax_normalize(std::span<DagFeatures>(rows));
      double best = 0.0;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        double score = 0.0;
        for (std::size_t j = 0; j < 8; ++j) score += beta[j] * rows[i][j];
        if (i == 0 || score > best) {
          best = score;
          pick = cand[i];
        }
      }
    }

    int core = 0;
    CandidateTimes chosen;
    double best_cost = 0.0;
    for (int c = 0; c < C; ++c) {
      const CandidateTimes t = candidate_start_finish(inst, pick, c, releases, sched);
      const MappingFeatures m = mapping_features(inst, pick, c, sched);
      const double cost = t.finish_s + mu[0] * m.cross + mu[1] * m.off_chip_s - mu[2] * m.same +
                          mu[3] * m.core_available_s;
      if (c == 0 || cost < best_cost) {
        best_cost = cost;
        core = c;
        chosen = t;
      }
    }
    sched.commit(pick, core, chosen.start_s, chosen.finish_s);
    ready.remove(pick);
  }
  return sched;
}

ExecutionSchedule schedule_dag_greedy(const Instance& inst, const ReleaseMap& releases) {
  const auto& dag = inst.dag();
  const int C = inst.num_cores();
  ExecutionSchedule sched(dag.size(), C);
  ReadySet ready(dag);
  while (!ready.empty()) {
    int pick = ready.nodes()[0];
    for (int v : ready.nodes()) {
      if (dag.bottom_level(v) > dag.bottom_level(pick)) pick = v;
    }
    int core = 0;
    CandidateTimes chosen = candidate_start_finish(inst, pick, 0, releases, sched);
    for (int c = 1; c < C; ++c) {
      const CandidateTimes t = candidate_start_finish(inst, pick, c, releases, sched);
      if (t.finish_s < chosen.finish_s) {
        chosen = t;
        core = c;
      }
    }
    sched.commit(pick, core, chosen.start_s, chosen.finish_s);
    ready.remove(pick);
  }
  return sched;
}

}  // namespace uavsched
