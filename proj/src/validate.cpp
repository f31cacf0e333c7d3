#include "uavsched/validate.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace uavsched {

namespace {

constexpr double kTimeTol = 1e-12;

std::string at_rb(int k, int slot, int sc) {
  return "stream " + std::to_string(k) + " at (slot " + std::to_string(slot) + ", subcarrier " +
         std::to_string(sc) + ")";
}

// Rate recomputed from the dB trace without the instance's cached table.
double reference_rate(const Instance& inst, int k, int slot, int sc) {
  const auto& r = inst.radio();
  const double db = inst.trace().db(k, slot, sc);
  if (db < r.sinr_threshold_db) return 0.0;
  const double snr = std::pow(10.0, db / 10.0);
  return r.rb_bandwidth_hz * std::min(std::log2(1.0 + snr / r.shannon_gap), r.eta_max);
}

}  // namespace

std::vector<Violation> validate_comm(const Instance& inst, const CommSchedule& comm) {
  std::vector<Violation> out;
  auto report = [&](const char* what, std::string detail) {
    out.push_back({what, std::move(detail)});
  };
  const int K = inst.num_streams();
  const auto& radio = inst.radio();
  if (static_cast<int>(comm.completion_slot.size()) != K) {
    report("shape", "completion_slot has wrong length");
    return out;
  }

  std::set<std::pair<int, int>> used;
  std::vector<double> residual(K);
  std::vector<double> delivered(K, 0.0);
  std::vector<double> before_last(K, 0.0);
  std::vector<std::optional<int>> drained(K);
  for (int k = 0; k < K; ++k) residual[k] = inst.stream(k).payload_bits;

  std::pair<int, int> prev{-1, -1};
  for (const auto& g : comm.grants) {
    if (g.stream < 0 || g.stream >= K || g.slot < 0 || g.slot >= radio.horizon_slots ||
        g.subcarrier < 0 || g.subcarrier >= radio.num_subcarriers) {
      report("range", "grant outside the instance dimensions");
      continue;
    }
    const std::pair<int, int> rb{g.slot, g.subcarrier};
    if (!used.insert(rb).second) {
      report("rb-exclusivity", "RB (" + std::to_string(g.slot) + ", " +
                                   std::to_string(g.subcarrier) + ") granted twice");
    }
    if (rb <= prev) report("scan-order", "grants are not in RB scan order");
    prev = rb;
    if (inst.trace().db(g.stream, g.slot, g.subcarrier) < radio.sinr_threshold_db) {
      report("sinr-threshold", at_rb(g.stream, g.slot, g.subcarrier) + " is below threshold");
    }
    const double ref = reference_rate(inst, g.stream, g.slot, g.subcarrier);
    if (std::abs(ref - g.rate_bps) > 1e-12 * std::max(1.0, ref)) {
      report("rate", at_rb(g.stream, g.slot, g.subcarrier) + " records a wrong rate");
    }
    double& q = residual[g.stream];
    if (!(q > 0.0)) {
      report("eligibility", at_rb(g.stream, g.slot, g.subcarrier) + " granted after draining");
      continue;
    }
    before_last[g.stream] = delivered[g.stream];
    delivered[g.stream] += g.rate_bps * radio.slot_s;
    q = std::max(0.0, q - g.rate_bps * radio.slot_s);
    if (q == 0.0 && !drained[g.stream]) drained[g.stream] = g.slot + 1;
  }

  for (int k = 0; k < K; ++k) {
    if (drained[k] != comm.completion_slot[k]) {
      report("completion-slot", "stream " + std::to_string(k) +
                                    " completion slot disagrees with the replayed queue");
    }
    if (drained[k]) {
      const double payload = inst.stream(k).payload_bits;
      if (delivered[k] < payload * (1.0 - 1e-12)) {
        report("conservation", "stream " + std::to_string(k) + " delivered less than its payload");
      }
      if (before_last[k] >= payload) {
        report("minimality", "stream " + std::to_string(k) + " was drained before its last grant");
      }
    }
  }
  return out;
}

std::vector<Violation> validate_exec(const Instance& inst, const CommSchedule& comm,
                                     const ExecutionSchedule& exec) {
  std::vector<Violation> out;
  auto report = [&](const char* what, std::string detail) {
    out.push_back({what, std::move(detail)});
  };
  const auto& dag = inst.dag();
  const int N = dag.size();
  const int C = inst.num_cores();
  if (static_cast<int>(exec.nodes.size()) != N) {
    report("shape", "schedule does not cover every node");
    return out;
  }
  for (int v = 0; v < N; ++v) {
    const auto& t = exec.nodes[v];
    const std::string node = "node " + std::to_string(v);
    if (t.core < 0 || t.core >= C) {
      report("core-range", node + " has no valid core");
      return out;
    }
    if (!std::isfinite(t.start_s) || t.start_s < 0.0) report("start", node + " starts before 0");
    if (std::abs(t.finish_s - (t.start_s + dag.node(v).compute_s)) > kTimeTol) {
      report("finish", node + ": finish != start + compute time");
    }
  }
  for (int k = 0; k < inst.num_streams(); ++k) {
    if (!comm.completion_slot[k]) {
      report("release", "stream " + std::to_string(k) + " unfinished but a DAG schedule exists");
      continue;
    }
    const double release = *comm.completion_slot[k] * inst.radio().slot_s;
    const int r = dag.entry(k);
    if (exec.nodes[r].start_s < release - kTimeTol) {
      report("release", "entry node " + std::to_string(r) + " starts before its upload completes");
    }
  }
  for (const auto& [u, v] : dag.edges()) {
    const auto& tu = exec.nodes[u];
    const auto& tv = exec.nodes[v];
    const auto& nu = dag.node(u);
    const auto& nv = dag.node(v);
    const double handoff = tu.core == tv.core ? nu.write_on_s + nv.read_on_s
                                              : nu.write_off_s + nv.read_off_s;
    if (tv.start_s < tu.finish_s + handoff - kTimeTol) {
      report("precedence", "edge (" + std::to_string(u) + ", " + std::to_string(v) +
                               ") starts before the predecessor's data is ready");
    }
  }
  std::vector<std::vector<std::pair<double, double>>> lanes(C);
  for (const auto& t : exec.nodes) lanes[t.core].emplace_back(t.start_s, t.finish_s);
  for (int c = 0; c < C; ++c) {
    auto& lane = lanes[c];
    std::sort(lane.begin(), lane.end());
    for (std::size_t i = 1; i < lane.size(); ++i) {
      if (lane[i].first < lane[i - 1].second - kTimeTol) {
        report("core-overlap", "core " + std::to_string(c) + " runs two nodes at once");
      }
    }
  }
  return out;
}

std::vector<Violation> validate_schedule(const Instance& inst, const CommSchedule& comm,
                                         const ExecutionSchedule* exec,
                                         const FitnessReport& report, double invalid_penalty_s) {
  auto out = validate_comm(inst, comm);
  const bool finished = std::all_of(comm.completion_slot.begin(), comm.completion_slot.end(),
                                    [](const auto& t) { return t.has_value(); });
  if (!finished) {
    if (report.feasible || report.objective_s != invalid_penalty_s) {
      out.push_back({"fitness", "unfinished upload must score the invalid penalty"});
    }
    return out;
  }
  if (exec == nullptr) {
    out.push_back({"exec", "feasible uploads but no DAG schedule"});
    return out;
  }
  auto more = validate_exec(inst, comm, *exec);
  out.insert(out.end(), more.begin(), more.end());

  double e2e = 0.0;
  for (const auto& t : exec->nodes) e2e = std::max(e2e, t.finish_s);
  double psync = 0.0;
  for (int m = 0; m < inst.num_groups(); ++m) {
    int lo = 0;
    int hi = 0;
    bool first = true;
    for (int k = 0; k < inst.num_streams(); ++k) {
      if (inst.stream(k).group != m) continue;
      const int tau = *comm.completion_slot[k];
      lo = first ? tau : std::min(lo, tau);
      hi = first ? tau : std::max(hi, tau);
      first = false;
    }
    psync += (hi - lo) * inst.radio().slot_s;
  }
  const double j = e2e + inst.sync_weight() * psync;
  auto close = [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); };
  if (!report.feasible || !close(report.e2e_s, e2e) || !close(report.sync_penalty_s, psync) ||
      !close(report.objective_s, j)) {
    out.push_back({"fitness", "stored report disagrees with re-evaluation"});
  }
  return out;
}

std::string describe(const std::vector<Violation>& violations) {
  std::ostringstream ss;
  for (const auto& v : violations) ss << v.constraint << ": " << v.detail << "\n";
  return ss.str();
}

}  // namespace uavsched
