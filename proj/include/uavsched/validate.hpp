#pragma once

#include <string>
#include <vector>

#include "uavsched/comm.hpp"
#include "uavsched/dag.hpp"
#include "uavsched/objective.hpp"

namespace uavsched {

struct Violation {
  std::string constraint;  // e.g. "rb-exclusivity", "precedence"
  std::string detail;
};

// Replays the uplink from the raw trace: RB exclusivity, SINR threshold,
// grant rates, queue drain, completion slots and their minimality.
std::vector<Violation> validate_comm(const Instance& inst, const CommSchedule& comm);

// Checks f = s + p, release times derived from `comm`, precedence with the
// realized on/off-chip handoffs, and per-core non-overlap.
std::vector<Violation> validate_exec(const Instance& inst, const CommSchedule& comm,
                                     const ExecutionSchedule& exec);

// Both of the above plus consistency of a stored report with a fresh
// re-evaluation of the objective.
std::vector<Violation> validate_schedule(const Instance& inst, const CommSchedule& comm,
                                         const ExecutionSchedule* exec,
                                         const FitnessReport& report, double invalid_penalty_s);

std::string describe(const std::vector<Violation>& violations);

}  // namespace uavsched
