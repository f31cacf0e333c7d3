#include "uavsched/schedulers.hpp"

#include <chrono>
#include <stdexcept>
#include <string>

namespace uavsched {

namespace {

constexpr std::array<std::string_view, 5> kIds{"decoupled-greedy", "joint-greedy", "ga-dag",
                                               "ga-dacs", "ga-joint"};

Decoded finish(const Instance& inst, CommSchedule comm, std::optional<ExecutionSchedule> exec,
               double penalty) {
  Decoded d{std::move(comm), std::move(exec), {}};
  d.fitness = fitness(d.comm, d.exec ? &*d.exec : nullptr, inst, penalty);
  return d;
}

Decoded release_aware(const Instance& inst, CommSchedule comm, std::span<const double> beta,
                      std::span<const double> mu, double penalty) {
  if (!comm.all_finished()) return finish(inst, std::move(comm), std::nullopt, penalty);
  const ReleaseMap rel = propagate_releases(comm, inst);
  auto exec = beta.empty() ? schedule_dag_greedy(inst, rel)
                           : schedule_dag_policy(inst, rel, beta, mu);
  return finish(inst, std::move(comm), std::move(exec), penalty);
}

void check_dim(Scheme s, std::size_t got) {
  if (static_cast<int>(got) != policy_dim(s)) {
    throw std::invalid_argument(std::string(scheme_id(s)) + ": chromosome has " +
                                std::to_string(got) + " genes, expected " +
                                std::to_string(policy_dim(s)));
  }
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

template <class DecodeFn>
SchemeResult run_ga(Scheme s, const GaParams& ga, DecodeFn decode) {
  Stopwatch clock;
  GaResult best = evolve(ga, policy_dim(s), [&](std::span<const double> c) {
    return decode(c).fitness.objective_s;
  });
  Decoded d = decode(best.best);
  SchemeResult r;
  r.scheme = s;
  r.comm = std::move(d.comm);
  r.exec = std::move(d.exec);
  r.fitness = std::move(d.fitness);
  r.trace = std::move(best.trace);
  r.policy = std::move(best.best);
  r.runtime_s = clock.seconds();
  return r;
}

SchemeResult from_decoded(Scheme s, Decoded d, const Stopwatch& clock) {
  SchemeResult r;
  r.scheme = s;
  r.comm = std::move(d.comm);
  r.exec = std::move(d.exec);
  r.fitness = std::move(d.fitness);
  r.runtime_s = clock.seconds();
  return r;
}

}  // namespace

std::string_view scheme_id(Scheme s) { return kIds[static_cast<std::size_t>(s)]; }

Scheme parse_scheme(std::string_view id) {
  for (std::size_t i = 0; i < kIds.size(); ++i) {
    if (kIds[i] == id) return static_cast<Scheme>(i);
  }
  std::string known;
  for (auto k : kIds) known += (known.empty() ? "" : ", ") + std::string(k);
  throw std::invalid_argument("unknown scheme '" + std::string(id) + "' (known: " + known + ")");
}

bool is_ga_scheme(Scheme s) { return policy_dim(s) > 0; }

int policy_dim(Scheme s) {
  switch (s) {
    case Scheme::ga_joint: return 20;
    case Scheme::ga_dacs: return 8;
    case Scheme::ga_dag: return 12;
    default: return 0;
  }
}

Decoded decode_ga_joint(const Instance& inst, std::span<const double> c, double penalty) {
  check_dim(Scheme::ga_joint, c.size());
  return release_aware(inst, decode_comm_policy(inst, c.subspan(0, 8)), c.subspan(8, 8),
                       c.subspan(16, 4), penalty);
}

Decoded decode_ga_dacs(const Instance& inst, std::span<const double> alpha, double penalty) {
  check_dim(Scheme::ga_dacs, alpha.size());
  return release_aware(inst, decode_comm_policy(inst, alpha), {}, {}, penalty);
}

Decoded decode_ga_dag(const Instance& inst, const CommSchedule& greedy_comm,
                      std::span<const double> c, double penalty) {
  check_dim(Scheme::ga_dag, c.size());
  return release_aware(inst, greedy_comm, c.subspan(0, 8), c.subspan(8, 4), penalty);
}

SchemeResult run_ga_joint(const Instance& inst, const GaParams& ga) {
  return run_ga(Scheme::ga_joint, ga, [&](std::span<const double> c) {
    return decode_ga_joint(inst, c, ga.invalid_penalty_s);
  });
}

SchemeResult run_ga_dacs(const Instance& inst, const GaParams& ga) {
  return run_ga(Scheme::ga_dacs, ga, [&](std::span<const double> c) {
    return decode_ga_dacs(inst, c, ga.invalid_penalty_s);
  });
}

SchemeResult run_ga_dag(const Instance& inst, const GaParams& ga) {
  const CommSchedule comm = decode_comm_greedy_payload(inst);
  return run_ga(Scheme::ga_dag, ga, [&](std::span<const double> c) {
    return decode_ga_dag(inst, comm, c, ga.invalid_penalty_s);
  });
}

SchemeResult run_decoupled_greedy(const Instance& inst, double penalty) {
  Stopwatch clock;
  CommSchedule comm = decode_comm_greedy_payload(inst);
  std::optional<ExecutionSchedule> exec;
  if (comm.all_finished()) exec = schedule_dag_greedy(inst, barrier_releases(comm, inst));
  return from_decoded(Scheme::decoupled_greedy, finish(inst, std::move(comm), std::move(exec), penalty),
                      clock);
}

SchemeResult run_joint_greedy(const Instance& inst, RolloutTarget target, double penalty) {
  Stopwatch clock;
  auto projected = [&](const UplinkScan& scan, int k) {
    UplinkScan trial = scan;
    trial.grant(k);
    CommSchedule comm = finish_greedy_payload(std::move(trial));
    if (!comm.all_finished()) return penalty;
    const ExecutionSchedule exec = schedule_dag_greedy(inst, propagate_releases(comm, inst));
    const FitnessReport f = fitness(comm, &exec, inst, penalty);
    return target == RolloutTarget::objective ? f.objective_s : f.e2e_s;
  };

  UplinkScan scan(inst);
  while (!scan.done()) {
    const std::vector<int> eligible = scan.eligible();
    if (eligible.empty()) {
      scan.skip();
      continue;
    }
    int best = eligible.front();
    if (eligible.size() > 1) {
      double best_j = projected(scan, best);
      for (std::size_t i = 1; i < eligible.size(); ++i) {
        const double j = projected(scan, eligible[i]);
        if (j < best_j) {
          best_j = j;
          best = eligible[i];
        }
      }
    }
    scan.grant(best);
  }
  Decoded d = release_aware(inst, std::move(scan).take(), {}, {}, penalty);
  return from_decoded(Scheme::joint_greedy, std::move(d), clock);
}

SchemeResult run_scheme(Scheme s, const Instance& inst, const GaParams& ga) {
  switch (s) {
    case Scheme::decoupled_greedy: return run_decoupled_greedy(inst, ga.invalid_penalty_s);
    case Scheme::joint_greedy:
      return run_joint_greedy(inst, RolloutTarget::objective, ga.invalid_penalty_s);
    case Scheme::ga_dag: return run_ga_dag(inst, ga);
    case Scheme::ga_dacs: return run_ga_dacs(inst, ga);
    case Scheme::ga_joint: return run_ga_joint(inst, ga);
  }
  throw std::invalid_argument("unknown scheme");
}

}  // namespace uavsched
