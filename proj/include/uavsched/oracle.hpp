#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>

#include "uavsched/comm.hpp"
#include "uavsched/dag.hpp"
#include "uavsched/objective.hpp"

namespace uavsched {

struct OracleLimits {
  int max_streams = 2;
  int max_slots = 6;
  int max_subcarriers = 1;
  int max_nodes = 6;
  int max_cores = 2;
  std::int64_t max_states = 50'000'000;
};

// Raised when an instance exceeds OracleLimits or the search outgrows
// max_states. The oracle never returns a truncated answer.
class OracleRefusal : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OracleResult {
  bool feasible = false;  // some RB assignment finishes every upload
  double objective_s = 0.0;
  CommSchedule comm;
  std::optional<ExecutionSchedule> exec;
  FitnessReport fitness;
  std::int64_t states = 0;
};

// Exhaustive minimum of J. Every RB is given to one eligible stream or left
// idle; every dispatch sequence of (ready node, core) pairs is tried with
// append-only core timelines and release-aware start times. This is the same
// schedule class the list schedulers produce, so the optimum is exact within
// that class (no backfilling into idle core gaps). Empty cores are
// interchangeable, so only the lowest-numbered empty core is tried.
OracleResult brute_force_optimum(const Instance& inst, const OracleLimits& limits = {},
                                 double invalid_penalty_s = kDefaultInvalidPenaltyS);

// Scenario small enough for the default limits: two streams in one group,
// one subcarrier, six slots, six DAG nodes on two cores.
ScenarioConfig oracle_tiny_config();

}  // namespace uavsched
