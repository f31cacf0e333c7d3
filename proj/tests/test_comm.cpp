#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"
#include "uavsched/comm.hpp"
#include "uavsched/rng.hpp"
#include "uavsched/validate.hpp"

using namespace uavsched;

namespace {

// Straight-line re-implementation of the payload-greedy uplink used as a
// reference: rates from the closed-form Shannon expression, no shared code.
std::vector<std::optional<int>> reference_greedy_tau(const Instance& inst) {
  const auto& r = inst.radio();
  const int K = inst.num_streams();
  std::vector<double> q(K);
  for (int k = 0; k < K; ++k) q[k] = inst.stream(k).payload_bits;
  std::vector<std::optional<int>> tau(K);
  for (int t = 0; t < r.horizon_slots; ++t) {
    for (int f = 0; f < r.num_subcarriers; ++f) {
      int best = -1;
      for (int k = 0; k < K; ++k) {
        const double db = inst.trace().db(k, t, f);
        if (q[k] <= 0.0 || db < r.sinr_threshold_db) continue;
        if (best < 0 || q[k] > q[best]) best = k;
      }
      if (best < 0) continue;
      const double db = inst.trace().db(best, t, f);
      const double eta = std::min(std::log2(1.0 + std::pow(10.0, db / 10.0) / r.shannon_gap), r.eta_max);
      q[best] = std::max(0.0, q[best] - r.rb_bandwidth_hz * eta * r.slot_s);
      if (q[best] == 0.0 && !tau[best]) tau[best] = t + 1;
    }
    bool all = true;
    for (double x : q) all = all && x == 0.0;
    if (all) break;
  }
  return tau;
}

}  // namespace

TEST(SpectralEfficiency, BelowThresholdIsZero) {
  RadioParams r;
  EXPECT_EQ(spectral_efficiency(5.9, r), 0.0);
  EXPECT_EQ(rb_rate(5.9, r), 0.0);
}

TEST(SpectralEfficiency, AtThreshold) {
  RadioParams r;
  const double expected = std::log2(1.0 + std::pow(10.0, 0.6));
  EXPECT_NEAR(expected, 2.3165, 1e-4);
  EXPECT_NEAR(spectral_efficiency(6.0, r), expected, 1e-9 * expected);
  EXPECT_NEAR(rb_rate(6.0, r), 180e3 * expected, 1e-9 * 180e3 * expected);
  EXPECT_NEAR(rb_rate(6.0, r), 416.97e3, 0.01e3);
}

TEST(SpectralEfficiency, CapApplies) {
  RadioParams r;
  EXPECT_NEAR(std::log2(1001.0), 9.967, 1e-3);
  EXPECT_EQ(spectral_efficiency(30.0, r), 8.0);
  EXPECT_EQ(rb_rate(30.0, r), 1.44e6);
}

TEST(SpectralEfficiency, GapReducesRate) {
  RadioParams r;
  r.shannon_gap = 2.0;
  EXPECT_NEAR(spectral_efficiency(10.0, r), std::log2(1.0 + 10.0 / 2.0), 1e-12);
}

TEST(EligibleSet, ThresholdAndResidual) {
  support::Spec s;
  s.radio = support::radio(1, 2);
  s.payload_bits = {1, 1, 1};
  s.group = {0, 0, 0};
  s.branch = {1, 1, 1};
  s.sinr_db = [](int k, int, int) { return k == 2 ? 5.0 : 7.0; };
  const Instance inst = support::build(s);
  EXPECT_EQ(eligible_set(inst, 0, 0, {{1, 0, 1}}), std::vector<int>{0});
  EXPECT_TRUE(eligible_set(inst, 0, 0, {{0, 0, 0}}).empty());
  EXPECT_EQ(eligible_set(inst, 0, 0, {{0, 1, 0}}), std::vector<int>{1});
}

TEST(CommFeatures, SingleEligibleIsDegenerate) {
  const Instance inst = generate_instance(support::small_config(), 1);
  QueueState q{{3200, 8000, 4800}};
  const std::vector<int> one{1};
  const auto rows = comm_features(inst, one, 0, 0, q);
  for (double z : rows[0]) EXPECT_EQ(z, 0.0);
}

TEST(CommFeatures, PayloadEndpoints) {
  support::Spec s;
  s.payload_bits = {8000, 80000};
  s.group = {0, 0};
  s.branch = {1, 1};
  const Instance inst = support::build(s);
  QueueState q{{8000, 80000}};
  const std::vector<int> both{0, 1};
  const auto z = comm_features(inst, both, 0, 0, q);
  EXPECT_EQ(z[0][0], 0.0);
  EXPECT_EQ(z[1][0], 1.0);
}

TEST(CommFeatures, RawValues) {
  support::Spec s;
  s.radio = support::radio(2, 5);
  s.payload_bits = {100, 200, 300, 400};
  s.group = {0, 0, 0, 1};
  s.branch = {2, 3, 4, 1};
  s.sinr_db = [](int k, int t, int f) { return 10.0 + k + t + 0.5 * f; };
  const Instance inst = support::build(s);
  QueueState q{{0, 50, 0, 400}};
  const auto z = raw_comm_features(inst, 1, 3, 1, q);
  const double db = 10.0 + 1 + 3 + 0.5;
  const double lin = std::pow(10.0, db / 10.0);
  const double rate = 180e3 * std::log2(1.0 + lin);
  EXPECT_EQ(z[0], 50.0);
  EXPECT_NEAR(z[1], lin, 1e-12 * lin);
  EXPECT_NEAR(z[2], rate, 1e-9 * rate);
  EXPECT_EQ(z[3], 3.0);
  EXPECT_EQ(z[4], 1.0);  // only stream 1 unfinished in group 0
  EXPECT_EQ(z[5], 2.0);  // two finished
  EXPECT_EQ(z[6], 4.0);  // slot number
  EXPECT_NEAR(z[7], 180e3 * 8.0 / rate, 1e-12);
}

TEST(CommDecode, HandSimulatedTwoStreams) {
  support::Spec s;
  s.radio = support::radio(1, 10);
  s.payload_bits = {2880, 1440};
  s.group = {0, 0};
  s.branch = {1, 1};
  const Instance inst = support::build(s);
  const std::array<double, 8> alpha{1, 0, 0, 0, 0, 0, 0, 0};
  const CommSchedule c = decode_comm_policy(inst, alpha);
  ASSERT_EQ(c.grants.size(), 3u);
  EXPECT_EQ(c.grants[0].stream, 0);
  EXPECT_EQ(c.grants[1].stream, 0);
  EXPECT_EQ(c.grants[2].stream, 1);
  EXPECT_EQ(c.completion_slot[0], 2);
  EXPECT_EQ(c.completion_slot[1], 3);
}

TEST(CommDecode, ZeroWeightsPickLowestIndex) {
  const Instance inst = generate_instance(support::small_config(), 3);
  const std::array<double, 8> alpha{};
  const CommSchedule c = decode_comm_policy(inst, alpha);
  // Replay: each grant must go to the lowest eligible stream at that RB.
  UplinkScan scan(inst);
  for (const auto& g : c.grants) {
    while (scan.slot() != g.slot || scan.subcarrier() != g.subcarrier) scan.skip();
    ASSERT_EQ(g.stream, scan.eligible().front());
    scan.grant(g.stream);
  }
}

TEST(CommDecode, GreedyServesLargestResidual) {
  support::Spec s;
  s.radio = support::radio(1, 200);
  s.payload_bits = {80000, 1600};
  s.group = {0, 0};
  s.branch = {1, 1};
  s.sinr_db = [](int, int, int) { return 12.0; };
  const Instance inst = support::build(s);
  const CommSchedule c = decode_comm_greedy_payload(inst);
  const double per_rb = rb_rate(12.0, inst.radio()) * 1e-3;
  double q0 = 80000;
  std::size_t i = 0;
  while (q0 >= 1600) {
    ASSERT_EQ(c.grants.at(i).stream, 0) << "grant " << i;
    q0 -= per_rb;
    ++i;
  }
  EXPECT_EQ(c.grants.at(i).stream, 1);
}

TEST(CommDecode, SingleStreamIgnoresPolicy) {
  ScenarioConfig cfg;
  cfg.payloads_kb = {3.0};
  cfg.groups = {{1}};
  cfg.branch_lengths = {2};
  const Instance inst = generate_instance(cfg, 8);
  const CommSchedule greedy = decode_comm_greedy_payload(inst);
  Rng rng(1);
  for (int trial = 0; trial < 10; ++trial) {
    std::array<double, 8> alpha;
    for (auto& a : alpha) a = rng.uniform(-10, 10);
    EXPECT_EQ(decode_comm_policy(inst, alpha), greedy);
  }
}

TEST(CommDecode, NeverFeasibleLeavesAllUnfinished) {
  support::Spec s;
  s.radio = support::radio(2, 5);
  s.payload_bits = {100, 100};
  s.group = {0, 0};
  s.branch = {1, 1};
  s.sinr_db = [](int, int, int) { return 0.0; };
  const Instance inst = support::build(s);
  const CommSchedule c = decode_comm_greedy_payload(inst);
  EXPECT_TRUE(c.grants.empty());
  EXPECT_FALSE(c.completion_slot[0]);
  EXPECT_FALSE(c.completion_slot[1]);
}

TEST(CommDecode, QueueUpdateClampsAtZero) {
  support::Spec s;
  s.radio = support::radio(1, 3);
  s.payload_bits = {1000};
  const Instance inst = support::build(s);
  UplinkScan scan(inst);
  scan.grant(0);
  EXPECT_EQ(scan.queue().residual_bits[0], 0.0);  // 1440 bits offered
  EXPECT_TRUE(scan.done());                       // stops at the end of the draining slot
  EXPECT_EQ(scan.schedule().completion_slot[0], 1);
}

TEST(CommDecode, QueueUpdatePartial) {
  support::Spec s;
  s.radio = support::radio(1, 3);
  s.payload_bits = {2000};
  s.sinr_db = [](int, int, int) { return 6.0; };
  const Instance inst = support::build(s);
  UplinkScan scan(inst);
  scan.grant(0);
  const double expected = 2000 - 180e3 * std::log2(1.0 + std::pow(10.0, 0.6)) * 1e-3;
  EXPECT_NEAR(scan.queue().residual_bits[0], expected, 1e-9 * expected);
}

TEST(CommDecode, StopsAtEndOfDrainingSlot) {
  support::Spec s;
  s.radio = support::radio(3, 50);
  s.payload_bits = {1000, 1000};
  s.group = {0, 0};
  s.branch = {1, 1};
  const Instance inst = support::build(s);
  const CommSchedule c = decode_comm_greedy_payload(inst);
  ASSERT_EQ(c.grants.size(), 2u);
  EXPECT_EQ(c.completion_slot[0], 1);
  EXPECT_EQ(c.completion_slot[1], 1);
}

// Property: greedy decoder matches the reference simulator and the validator
// on random small instances.
TEST(CommProperty, GreedyMatchesReference) {
  Rng rng(77);
  for (int trial = 0; trial < 60; ++trial) {
    ScenarioConfig cfg;
    const int K = 1 + static_cast<int>(rng.below(5));
    cfg.payloads_kb.clear();
    cfg.branch_lengths.clear();
    cfg.groups = {{}};
    for (int k = 0; k < K; ++k) {
      cfg.payloads_kb.push_back(rng.uniform(0.1, 4.0));
      cfg.branch_lengths.push_back(1 + static_cast<int>(rng.below(3)));
      cfg.groups[0].push_back(k + 1);
    }
    cfg.radio.num_subcarriers = 1 + static_cast<int>(rng.below(4));
    cfg.radio.horizon_slots = 20 + static_cast<int>(rng.below(60));
    cfg.radio.sinr_threshold_db = rng.uniform(4.0, 12.0);
    const Instance inst = generate_instance(cfg, trial);
    const CommSchedule c = decode_comm_greedy_payload(inst);
    EXPECT_EQ(c.completion_slot, reference_greedy_tau(inst)) << "trial " << trial;
    EXPECT_TRUE(validate_comm(inst, c).empty()) << describe(validate_comm(inst, c));
  }
}

TEST(CommProperty, RandomPoliciesAreValid) {
  Rng rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    const Instance inst = generate_instance(support::small_config(), 100 + trial);
    std::array<double, 8> alpha;
    for (auto& a : alpha) a = rng.uniform(-10, 10);
    const CommSchedule c = decode_comm_policy(inst, alpha);
    const auto v = validate_comm(inst, c);
    EXPECT_TRUE(v.empty()) << describe(v);
    // Work conservation: no RB is idle while an eligible stream exists.
    UplinkScan scan(inst);
    for (const auto& g : c.grants) {
      while (scan.slot() != g.slot || scan.subcarrier() != g.subcarrier) {
        ASSERT_TRUE(scan.eligible().empty());
        scan.skip();
      }
      scan.grant(g.stream);
    }
  }
}
