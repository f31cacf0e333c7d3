#pragma once

#include <array>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "uavsched/comm.hpp"
#include "uavsched/dag.hpp"
#include "uavsched/ga.hpp"
#include "uavsched/objective.hpp"

namespace uavsched {

enum class Scheme { decoupled_greedy, joint_greedy, ga_dag, ga_dacs, ga_joint };

inline constexpr std::array<Scheme, 5> kAllSchemes{Scheme::decoupled_greedy, Scheme::joint_greedy,
                                                   Scheme::ga_dag, Scheme::ga_dacs,
                                                   Scheme::ga_joint};

std::string_view scheme_id(Scheme s);
// Throws std::invalid_argument listing the valid ids.
Scheme parse_scheme(std::string_view id);
bool is_ga_scheme(Scheme s);
// Chromosome length: 20 (joint), 8 (dacs), 12 (dag), 0 for greedy schemes.
int policy_dim(Scheme s);

struct SchemeResult {
  Scheme scheme = Scheme::decoupled_greedy;
  CommSchedule comm;
  std::optional<ExecutionSchedule> exec;  // absent when some upload never finished
  FitnessReport fitness;
  std::optional<GaTrace> trace;           // GA schemes only
  std::vector<double> policy;             // best chromosome, empty for greedy schemes
  double runtime_s = 0.0;                 // wall clock, not part of any determinism check
};

// One decoded schedule for a fixed chromosome.
struct Decoded {
  CommSchedule comm;
  std::optional<ExecutionSchedule> exec;
  FitnessReport fitness;
};

// chromosome layouts: joint [alpha(8) beta(8) mu(4)], dacs [alpha], dag [beta mu].
Decoded decode_ga_joint(const Instance& inst, std::span<const double> chromosome,
                        double invalid_penalty_s = kDefaultInvalidPenaltyS);
Decoded decode_ga_dacs(const Instance& inst, std::span<const double> alpha,
                       double invalid_penalty_s = kDefaultInvalidPenaltyS);
Decoded decode_ga_dag(const Instance& inst, const CommSchedule& greedy_comm,
                      std::span<const double> chromosome,
                      double invalid_penalty_s = kDefaultInvalidPenaltyS);

SchemeResult run_ga_joint(const Instance& inst, const GaParams& ga);
SchemeResult run_ga_dacs(const Instance& inst, const GaParams& ga);
SchemeResult run_ga_dag(const Instance& inst, const GaParams& ga);
SchemeResult run_decoupled_greedy(const Instance& inst,
                                  double invalid_penalty_s = kDefaultInvalidPenaltyS);

// What the joint-greedy rollout minimizes for each tentative grant.
enum class RolloutTarget { objective, e2e_only };

SchemeResult run_joint_greedy(const Instance& inst, RolloutTarget target = RolloutTarget::objective,
                              double invalid_penalty_s = kDefaultInvalidPenaltyS);

// Dispatch by scheme; `ga` is ignored by the greedy schemes except for its
// invalid-policy penalty.
SchemeResult run_scheme(Scheme s, const Instance& inst, const GaParams& ga);

}  // namespace uavsched
