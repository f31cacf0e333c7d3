#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "uavsched/scenario.hpp"

namespace uavsched {

// Clipped Shannon spectral efficiency in bit/s/Hz; 0 below the SINR threshold.
double spectral_efficiency(double sinr_db, const RadioParams& radio);

// Per-RB achievable rate in bit/s; 0 below the SINR threshold.
double rb_rate(double sinr_db, const RadioParams& radio);

struct Grant {
  int stream = 0;
  int slot = 0;        // 0-based
  int subcarrier = 0;  // 0-based
  double rate_bps = 0.0;

  bool operator==(const Grant&) const = default;
};

struct CommSchedule {
  std::vector<Grant> grants;  // in RB scan order
  // tau_k: number of the slot (1-based) in which stream k's residual first
  // reached zero, nullopt if unfinished within the horizon.
  std::vector<std::optional<int>> completion_slot;

  bool all_finished() const;
  std::optional<double> completion_time_s(int k, double slot_s) const;
  // max_k tau_k * slot; requires all_finished().
  double last_completion_s(double slot_s) const;

  bool operator==(const CommSchedule&) const = default;
};

struct QueueState {
  std::vector<double> residual_bits;
};

// A = { k : Q_k > 0 and gamma_k(t,f) >= gamma_th }, ascending stream order.
std::vector<int> eligible_set(const Instance& inst, int slot, int sc, const QueueState& q);

using CommFeatures = std::array<double, 8>;

// Raw features of stream k at RB (slot, sc): remaining payload, linear SINR,
// rate, branch length, unfinished and finished counts in k's group, slot
// number, inverse rate (B_RB * eta_max / R).
CommFeatures raw_comm_features(const Instance& inst, int k, int slot, int sc, const QueueState& q);

// Min-max normalizes each feature column over the rows; degenerate columns
// (min == max) become 0.
template <std::size_t N>
void minmax_normalize(std::span<std::array<double, N>> rows) {
  if (rows.empty()) return;
  for (std::size_t i = 0; i < N; ++i) {
    double lo = rows[0][i];
    double hi = rows[0][i];
    for (const auto& r : rows) {
      lo = r[i] < lo ? r[i] : lo;
      hi = r[i] > hi ? r[i] : hi;
    }
    const double width = hi - lo;
    for (auto& r : rows) r[i] = width > 0.0 ? (r[i] - lo) / width : 0.0;
  }
}

// Normalized feature vectors for every stream in `eligible` at (slot, sc).
std::vector<CommFeatures> comm_features(const Instance& inst, std::span<const int> eligible,
                                        int slot, int sc, const QueueState& q);

// RB-by-RB uplink scan: subcarriers ascending within a slot, slots ascending,
// stopping at the end of the first slot in which every residual is zero or at
// the horizon. Callers pick a stream (or idle) for each RB in turn.
class UplinkScan {
 public:
  explicit UplinkScan(const Instance& inst);

  bool done() const { return done_; }
  int slot() const { return slot_; }
  int subcarrier() const { return sc_; }
  const QueueState& queue() const { return queue_; }
  const CommSchedule& schedule() const { return sched_; }
  // Eligible streams at the current RB.
  const std::vector<int>& eligible() const { return eligible_; }

  // Grants the current RB to k (must be eligible) and advances.
  void grant(int k);
  // Leaves the current RB idle and advances.
  void skip();

  CommSchedule take() && { return std::move(sched_); }

 private:
  void advance();
  void refresh_eligible();

  const Instance* inst_;
  int slot_ = 0;
  int sc_ = 0;
  int remaining_ = 0;
  bool done_ = false;
  QueueState queue_;
  CommSchedule sched_;
  std::vector<int> eligible_;
};

// Policy decoder: per RB, argmax_k sum_i alpha_i z_{k,i} over the eligible set,
// ties to the lowest stream index.
CommSchedule decode_comm_policy(const Instance& inst, std::span<const double> alpha);

// Largest-remaining-payload rule, ties to the lowest stream index.
int pick_largest_payload(std::span<const int> eligible, const QueueState& q);
CommSchedule decode_comm_greedy_payload(const Instance& inst);

// Continues a partially decoded scan with the payload-greedy rule.
CommSchedule finish_greedy_payload(UplinkScan scan);

}  // namespace uavsched
