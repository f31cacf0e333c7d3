#include "uavsched/ga.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>
#include <unordered_map>

#include "uavsched/rng.hpp"

namespace uavsched {

void validate_ga_params(const GaParams& p) {
  auto bad = [](const char* msg) { throw std::invalid_argument(std::string("ga: ") + msg); };
  if (p.population < 2) bad("population must be >= 2");
  if (p.generations < 0) bad("generations must be >= 0");
  if (!(p.lower < p.upper)) bad("search box needs lower < upper");
  if (p.elite < 0 || p.elite >= p.population) bad("elite count must be in [0, population)");
  if (p.tournament < 1) bad("tournament size must be >= 1");
  auto rate = [](double r) { return r >= 0.0 && r <= 1.0; };
  if (!rate(p.crossover_rate) || !rate(p.mutation_rate)) bad("rates must lie in [0, 1]");
  if (p.blend_alpha < 0.0 || p.mutation_scale < 0.0) bad("blend and mutation scale must be >= 0");
  if (p.stall_limit < 0) bad("stall limit must be >= 0");
  if (p.workers < 1) bad("workers must be >= 1");
}

std::vector<Chromosome> init_population(const GaParams& params, int dim, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Chromosome> pop(params.population, Chromosome(dim));
  for (auto& c : pop) {
    for (auto& x : c) x = rng.uniform(params.lower, params.upper);
  }
  return pop;
}

std::uint64_t spawn_eval_seeds(std::uint64_t master_seed, std::uint64_t generation,
                               std::uint64_t index) {
  return splitmix64(derive_seed(master_seed, "eval") + ((generation << 32) | (index & 0xffffffffULL)));
}

namespace {

std::string key_of(const Chromosome& c) {
  std::string key(c.size() * sizeof(double), '\0');
  std::memcpy(key.data(), c.data(), key.size());
  return key;
}

class Evaluator {
 public:
  Evaluator(const FitnessFn& eval, int workers) : eval_(eval), workers_(workers) {}

  std::vector<double> operator()(const std::vector<Chromosome>& pop) {
    std::vector<double> fit(pop.size());
    std::vector<std::size_t> pending;
    std::unordered_map<std::string, std::size_t> first_seen;
    std::vector<std::string> keys(pop.size());
    for (std::size_t i = 0; i < pop.size(); ++i) {
      keys[i] = key_of(pop[i]);
      if (cache_.count(keys[i])) continue;
      if (first_seen.emplace(keys[i], i).second) pending.push_back(i);
    }

    std::vector<double> fresh(pending.size());
    auto work = [&](std::atomic<std::size_t>& next) {
      for (std::size_t j = next++; j < pending.size(); j = next++) {
        fresh[j] = eval_(pop[pending[j]]);
      }
    };
    std::atomic<std::size_t> next{0};
    const int threads = std::min<int>(workers_, static_cast<int>(pending.size()));
    if (threads <= 1) {
      work(next);
    } else {
      std::vector<std::jthread> pool;
      for (int t = 0; t < threads; ++t) pool.emplace_back([&] { work(next); });
    }
    for (std::size_t j = 0; j < pending.size(); ++j) cache_[keys[pending[j]]] = fresh[j];
    evaluations_ += static_cast<int>(pending.size());

    for (std::size_t i = 0; i < pop.size(); ++i) fit[i] = cache_.at(keys[i]);
    return fit;
  }

  int evaluations() const { return evaluations_; }

 private:
  const FitnessFn& eval_;
  int workers_;
  std::unordered_map<std::string, double> cache_;
  int evaluations_ = 0;
};

std::size_t tournament(const std::vector<double>& fit, int size, Rng& rng) {
  std::size_t best = rng.below(fit.size());
  for (int i = 1; i < size; ++i) {
    const std::size_t c = rng.below(fit.size());
    if (fit[c] < fit[best] || (fit[c] == fit[best] && c < best)) best = c;
  }
  return best;
}

}  // namespace

GaResult evolve(const GaParams& params, int dim, const FitnessFn& eval) {
  validate_ga_params(params);
  if (dim < 1) throw std::invalid_argument("ga: dimension must be >= 1");

  Evaluator evaluate(eval, params.workers);
  std::vector<Chromosome> pop = init_population(params, dim, derive_seed(params.seed, "init"));

  GaResult result;
  result.best_fitness = std::numeric_limits<double>::infinity();
  int stall = 0;
  const double width = params.upper - params.lower;

  for (int g = 0;; ++g) {
    const std::vector<double> fit = evaluate(pop);
    bool improved = false;
    for (std::size_t i = 0; i < pop.size(); ++i) {
      if (fit[i] < result.best_fitness) {
        result.best_fitness = fit[i];
        result.best = pop[i];
        improved = true;
      }
    }
    const double mean = std::accumulate(fit.begin(), fit.end(), 0.0) / static_cast<double>(fit.size());
    result.trace.generations.push_back({g, result.best_fitness, mean, result.best});

    stall = (improved || g == 0) ? 0 : stall + 1;
    if (g == params.generations) break;
    if (params.stall_limit > 0 && stall >= params.stall_limit) break;

    Rng rng(derive_seed(params.seed, "generation", static_cast<std::uint64_t>(g)));
    std::vector<std::size_t> order(pop.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return fit[a] < fit[b]; });

    std::vector<Chromosome> next;
    next.reserve(pop.size());
    for (int e = 0; e < params.elite; ++e) next.push_back(pop[order[e]]);

    while (static_cast<int>(next.size()) < params.population) {
      Chromosome a = pop[tournament(fit, params.tournament, rng)];
      Chromosome b = pop[tournament(fit, params.tournament, rng)];
      if (rng.uniform() < params.crossover_rate) {
        for (int i = 0; i < dim; ++i) {
          const double lo = std::min(a[i], b[i]);
          const double hi = std::max(a[i], b[i]);
          const double ext = params.blend_alpha * (hi - lo);
          const double x = rng.uniform(lo - ext, hi + ext);
          const double y = rng.uniform(lo - ext, hi + ext);
          a[i] = x;
          b[i] = y;
        }
      }
      for (Chromosome* child : {&a, &b}) {
        for (auto& x : *child) {
          if (rng.uniform() < params.mutation_rate) x += rng.normal() * params.mutation_scale * width;
          x = std::clamp(x, params.lower, params.upper);
        }
        if (static_cast<int>(next.size()) < params.population) next.push_back(std::move(*child));
      }
    }
    pop = std::move(next);
  }

  result.trace.all_infeasible = result.best_fitness >= params.invalid_penalty_s;
  result.trace.evaluations = evaluate.evaluations();
  return result;
}

}  // namespace uavsched
