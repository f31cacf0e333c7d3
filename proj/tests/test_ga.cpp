#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <unordered_set>

#include "uavsched/ga.hpp"

using namespace uavsched;

namespace {

double sphere(std::span<const double> x, double centre) {
  double s = 0.0;
  for (double v : x) s += (v - centre) * (v - centre);
  return s;
}

}  // namespace

TEST(GaParams, Validation) {
  GaParams p;
  EXPECT_NO_THROW(validate_ga_params(p));
  p.population = 1;
  EXPECT_THROW(validate_ga_params(p), std::invalid_argument);
  p = {};
  p.elite = p.population;
  EXPECT_THROW(validate_ga_params(p), std::invalid_argument);
  p = {};
  p.mutation_rate = 1.5;
  EXPECT_THROW(validate_ga_params(p), std::invalid_argument);
  p = {};
  p.lower = p.upper;
  EXPECT_THROW(validate_ga_params(p), std::invalid_argument);
}

TEST(GaInit, ShapeBoxAndDeterminism) {
  GaParams p;
  const auto a = init_population(p, 20, 3);
  ASSERT_EQ(a.size(), 40u);
  for (const auto& c : a) {
    ASSERT_EQ(c.size(), 20u);
    for (double x : c) {
      EXPECT_GE(x, -10.0);
      EXPECT_LE(x, 10.0);
    }
  }
  EXPECT_EQ(a, init_population(p, 20, 3));
  EXPECT_NE(a, init_population(p, 20, 4));
  p.population = 2;
  const auto b = init_population(p, 8, 0);
  EXPECT_EQ(b.size(), 2u);
  EXPECT_EQ(b[0].size(), 8u);
}

TEST(GaEvolve, ConstantFitness) {
  GaParams p;
  p.stall_limit = 0;
  const GaResult r = evolve(p, 8, [](std::span<const double>) { return 7.5; });
  EXPECT_EQ(r.best_fitness, 7.5);
  ASSERT_EQ(r.trace.generations.size(), 36u);
  for (const auto& g : r.trace.generations) EXPECT_EQ(g.best_so_far, 7.5);
  EXPECT_FALSE(r.trace.all_infeasible);
}

TEST(GaEvolve, AllPenaltyIsFlagged) {
  GaParams p;
  p.generations = 3;
  const GaResult r = evolve(p, 8, [&](std::span<const double>) { return p.invalid_penalty_s; });
  EXPECT_EQ(r.best_fitness, p.invalid_penalty_s);
  EXPECT_TRUE(r.trace.all_infeasible);
}

TEST(GaEvolve, ConvexSurrogateConverges) {
  int good = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    GaParams p;
    p.seed = seed;
    p.stall_limit = 0;
    const GaResult r = evolve(p, 8, [](std::span<const double> x) { return sphere(x, 3.0); });
    const double initial = r.trace.generations.front().best_so_far;
    if (r.best_fitness < 0.01 * initial) ++good;
  }
  EXPECT_GE(good, 18);
}

TEST(GaEvolve, ElitismAndBox) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    GaParams p;
    p.seed = seed;
    p.stall_limit = 0;
    p.mutation_rate = 0.5;  // push hard against the box
    const GaResult r = evolve(p, 12, [](std::span<const double> x) {
      for (double v : x) {
        if (v < -10.0 || v > 10.0) ADD_FAILURE() << "gene outside the box: " << v;
      }
      return sphere(x, 9.9);
    });
    const auto& g = r.trace.generations;
    for (std::size_t i = 1; i < g.size(); ++i) EXPECT_LE(g[i].best_so_far, g[i - 1].best_so_far);
    EXPECT_EQ(g.back().best, r.best);
    EXPECT_EQ(sphere(r.best, 9.9), r.best_fitness);
  }
}

TEST(GaEvolve, StallStopsEarly) {
  GaParams p;
  p.stall_limit = 3;
  const GaResult r = evolve(p, 8, [](std::span<const double>) { return 1.0; });
  // Generation 0 sets the best; three more without improvement stop the run.
  EXPECT_EQ(r.trace.generations.size(), 4u);
}

TEST(GaEvolve, MemoizesRepeatedChromosomes) {
  GaParams p;
  p.stall_limit = 0;
  p.generations = 10;
  std::atomic<int> calls{0};
  const GaResult r = evolve(p, 8, [&](std::span<const double> x) {
    ++calls;
    return sphere(x, 0.0);
  });
  EXPECT_EQ(calls.load(), r.trace.evaluations);
  // Elites alone guarantee at least two cache hits per generation.
  EXPECT_LE(r.trace.evaluations, 40 + 10 * 38);
}

TEST(GaEvolve, WorkerCountDoesNotChangeTrace) {
  auto run = [](int workers) {
    GaParams p;
    p.seed = 17;
    p.workers = workers;
    return evolve(p, 20, [](std::span<const double> x) { return sphere(x, -2.0) + std::sin(x[0]); });
  };
  const GaResult serial = run(1);
  const GaResult parallel = run(4);
  EXPECT_EQ(serial.trace, parallel.trace);
  EXPECT_EQ(serial.best, parallel.best);
}

TEST(GaEvolve, SeedChangesTrace) {
  GaParams a;
  GaParams b;
  b.seed = a.seed + 1;
  auto f = [](std::span<const double> x) { return sphere(x, 1.0); };
  EXPECT_NE(evolve(a, 8, f).trace, evolve(b, 8, f).trace);
}

TEST(SpawnSeeds, DeterministicAndCollisionFree) {
  EXPECT_EQ(spawn_eval_seeds(5, 3, 7), spawn_eval_seeds(5, 3, 7));
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(101 * 101 * 2);
  for (std::uint64_t g = 0; g <= 100; ++g) {
    for (std::uint64_t p = 0; p <= 100; ++p) seen.insert(spawn_eval_seeds(5, g, p));
  }
  EXPECT_EQ(seen.size(), 101u * 101u);
  // Full 0..10^4 grid along each axis.
  std::unordered_set<std::uint64_t> axis;
  for (std::uint64_t i = 0; i <= 10000; ++i) {
    axis.insert(spawn_eval_seeds(5, i, 0));
    axis.insert(spawn_eval_seeds(5, 0, i));
  }
  EXPECT_EQ(axis.size(), 2u * 10001u - 1u);
}
