#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "uavsched/objective.hpp"

namespace uavsched {

struct GaParams {
  int population = 40;
  int generations = 35;
  double lower = -10.0;
  double upper = 10.0;
  int elite = 2;
  int tournament = 3;
  double crossover_rate = 0.9;
  double blend_alpha = 0.5;      // BLX-alpha interval extension
  double mutation_rate = 0.1;    // per gene
  double mutation_scale = 0.1;   // sigma as a fraction of the box width
  int stall_limit = 10;          // 0 disables early stopping
  double invalid_penalty_s = kDefaultInvalidPenaltyS;
  std::uint64_t seed = 1;
  int workers = 1;               // concurrent fitness evaluations
};

// Throws std::invalid_argument on an inconsistent parameter set.
void validate_ga_params(const GaParams& params);

using Chromosome = std::vector<double>;
using FitnessFn = std::function<double(std::span<const double>)>;

struct GaGeneration {
  int generation = 0;
  double best_so_far = 0.0;  // lowest fitness seen up to and including this generation
  double mean = 0.0;         // mean fitness of this generation's population
  Chromosome best;           // chromosome achieving best_so_far

  bool operator==(const GaGeneration&) const = default;
};

struct GaTrace {
  std::vector<GaGeneration> generations;
  bool all_infeasible = false;  // best fitness never dropped below the penalty
  int evaluations = 0;          // distinct chromosomes decoded

  bool operator==(const GaTrace&) const = default;
};

struct GaResult {
  Chromosome best;
  double best_fitness = 0.0;
  GaTrace trace;
};

std::vector<Chromosome> init_population(const GaParams& params, int dim, std::uint64_t seed);

// Generation-synchronous real-coded GA minimizing `eval`. Generation 0 is the
// initial population; at most params.generations further generations follow.
// Elites carry over unchanged; the rest are produced by tournament selection,
// BLX-alpha crossover and clipped Gaussian mutation. Evaluations are memoized
// per exact chromosome and may run on params.workers threads; results do not
// depend on the worker count.
GaResult evolve(const GaParams& params, int dim, const FitnessFn& eval);

// Seed for evaluation `index` of `generation`; injective in (generation, index)
// for indices below 2^32.
std::uint64_t spawn_eval_seeds(std::uint64_t master_seed, std::uint64_t generation,
                               std::uint64_t index);

}  // namespace uavsched
