#include "uavsched/comm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace uavsched {

double spectral_efficiency(double sinr_db, const RadioParams& radio) {
  if (sinr_db < radio.sinr_threshold_db) return 0.0;
  const double linear = std::pow(10.0, sinr_db / 10.0);
  return std::min(std::log2(1.0 + linear / radio.shannon_gap), radio.eta_max);
}

double rb_rate(double sinr_db, const RadioParams& radio) {
  return radio.rb_bandwidth_hz * spectral_efficiency(sinr_db, radio);
}

bool CommSchedule::all_finished() const {
  return std::all_of(completion_slot.begin(), completion_slot.end(),
                     [](const auto& t) { return t.has_value(); });
}

std::optional<double> CommSchedule::completion_time_s(int k, double slot_s) const {
  if (!completion_slot[k]) return std::nullopt;
  return *completion_slot[k] * slot_s;
}

double CommSchedule::last_completion_s(double slot_s) const {
  int last = 0;
  for (const auto& t : completion_slot) {
    if (!t) throw std::logic_error("last_completion_s: unfinished stream");
    last = std::max(last, *t);
  }
  return last * slot_s;
}

std::vector<int> eligible_set(const Instance& inst, int slot, int sc, const QueueState& q) {
  std::vector<int> out;
  for (int k = 0; k < inst.num_streams(); ++k) {
    if (q.residual_bits[k] > 0.0 && inst.feasible(k, slot, sc)) out.push_back(k);
  }
  return out;
}

CommFeatures raw_comm_features(const Instance& inst, int k, int slot, int sc, const QueueState& q) {
  const int group = inst.stream(k).group;
  int unfinished = 0;
  int finished = 0;
  for (int j = 0; j < inst.num_streams(); ++j) {
    if (inst.stream(j).group != group) continue;
    if (q.residual_bits[j] > 0.0) {
      ++unfinished;
    } else {
      ++finished;
    }
  }
  const auto& radio = inst.radio();
  const double rate = inst.rate_bps(k, slot, sc);
  return {q.residual_bits[k],
          inst.sinr_linear(k, slot, sc),
          rate,
          static_cast<double>(inst.stream(k).branch_length),
          static_cast<double>(unfinished),
          static_cast<double>(finished),
          static_cast<double>(slot + 1),
          radio.rb_bandwidth_hz * radio.eta_max / rate};
}

std::vector<CommFeatures> comm_features(const Instance& inst, std::span<const int> eligible,
                                        int slot, int sc, const QueueState& q) {
  std::vector<CommFeatures> rows;
  rows.reserve(eligible.size());
  for (int k : eligible) rows.push_back(raw_comm_features(inst, k, slot, sc, q));
  minmax_normalize(std::span<CommFeatures>(rows));
  return rows;
}

// ---------------------------------------------------------------------------

UplinkScan::UplinkScan(const Instance& inst) : inst_(&inst) {
  const int K = inst.num_streams();
  queue_.residual_bits.resize(K);
  for (int k = 0; k < K; ++k) queue_.residual_bits[k] = inst.stream(k).payload_bits;
  sched_.completion_slot.assign(K, std::nullopt);
  remaining_ = K;
  eligible_.reserve(K);
  refresh_eligible();
}

void UplinkScan::refresh_eligible() {
  eligible_.clear();
  for (int k = 0; k < inst_->num_streams(); ++k) {
    if (queue_.residual_bits[k] > 0.0 && inst_->feasible(k, slot_, sc_)) eligible_.push_back(k);
  }
}

void UplinkScan::advance() {
  if (++sc_ == inst_->radio().num_subcarriers) {
    sc_ = 0;
    if (remaining_ == 0 || ++slot_ == inst_->radio().horizon_slots) {
      done_ = true;
      eligible_.clear();
      return;
    }
  }
  refresh_eligible();
}

void UplinkScan::grant(int k) {
  if (done_) throw std::logic_error("UplinkScan::grant after end of horizon");
  if (std::find(eligible_.begin(), eligible_.end(), k) == eligible_.end())
    throw std::logic_error("UplinkScan::grant: stream not eligible");
  const double rate = inst_->rate_bps(k, slot_, sc_);
  double& q = queue_.residual_bits[k];
  q = std::max(0.0, q - rate * inst_->radio().slot_s);
  sched_.grants.push_back({k, slot_, sc_, rate});
  if (q == 0.0 && !sched_.completion_slot[k]) {
    sched_.completion_slot[k] = slot_ + 1;
    --remaining_;
  }
  advance();
}

void UplinkScan::skip() {
  if (done_) throw std::logic_error("UplinkScan::skip after end of horizon");
  advance();
}

// ---------------------------------------------------------------------------

CommSchedule decode_comm_policy(const Instance& inst, std::span<const double> alpha) {
  if (alpha.size() != 8) throw std::invalid_argument("decode_comm_policy: alpha needs 8 weights");
  UplinkScan scan(inst);
  std::vector<CommFeatures> rows;
  rows.reserve(inst.num_streams());
  while (!scan.done()) {
    const auto& eligible = scan.eligible();
    if (eligible.empty()) {
      scan.skip();
      continue;
    }
    if (eligible.size() == 1) {
      scan.grant(eligible[0]);
      continue;
    }
    rows.clear();
    for (int k : eligible)
      rows.push_back(raw_comm_features(inst, k, scan.slot(), scan.subcarrier(), scan.queue()));
    minmax_normalize(std::span<CommFeatures>(rows));
    std::size_t best = 0;
    double best_score = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      double score = 0.0;
      for (std::size_t j = 0; j < 8; ++j) score += alpha[j] * rows[i][j];
      if (i == 0 || score > best_score) {
        best = i;
        best_score = score;
      }
    }
    scan.grant(eligible[best]);
  }
  return std::move(scan).take();
}

int pick_largest_payload(std::span<const int> eligible, const QueueState& q) {
  int best = eligible[0];
  for (int k : eligible) {
    if (q.residual_bits[k] > q.residual_bits[best]) best = k;
  }
  return best;
}

CommSchedule finish_greedy_payload(UplinkScan scan) {
  while (!scan.done()) {
    if (scan.eligible().empty()) {
      scan.skip();
    } else {
      scan.grant(pick_largest_payload(scan.eligible(), scan.queue()));
    }
  }
  return std::move(scan).take();
}

CommSchedule decode_comm_greedy_payload(const Instance& inst) {
  return finish_greedy_payload(UplinkScan(inst));
}

}  // namespace uavsched
