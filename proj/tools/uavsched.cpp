// uavsched: run schemes, sweeps, the brute-force oracle and plot exports.

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "uavsched/harness.hpp"
#include "uavsched/oracle.hpp"
#include "uavsched/rng.hpp"
#include "uavsched/report.hpp"
#include "uavsched/validate.hpp"

namespace fs = std::filesystem;
using namespace uavsched;

namespace {

struct GaFlags {
  std::optional<int> population;
  std::optional<int> generations;
  bool no_stall = false;

  void add(CLI::App* app) {
    app->add_option("--population", population, "GA population size");
    app->add_option("--generations", generations, "GA generation budget");
    app->add_flag("--no-stall", no_stall, "disable the stall-based early stop");
  }

  GaParams resolve(const std::optional<fs::path>& config) const {
    GaParams ga;
    if (config) {
      const auto doc = parse_json_text(read_text(*config), config->string());
      if (!doc.contains("format")) ga = ga_params_from_json(doc);
    }
    if (population) ga.population = *population;
    if (generations) ga.generations = *generations;
    if (no_stall) ga.stall_limit = 0;
    ga.workers = workers_from_env();
    validate_ga_params(ga);
    return ga;
  }
};

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  auto number = [&](const std::string& t) {
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || p != t.data() + t.size() || t.empty()) {
      throw std::invalid_argument("--seeds: '" + t + "' is not a seed (use n..m or a,b,c)");
    }
    return v;
  };
  std::vector<std::uint64_t> out;
  if (auto dots = text.find(".."); dots != std::string::npos) {
    const auto lo = number(text.substr(0, dots));
    const auto hi = number(text.substr(dots + 2));
    if (hi < lo) throw std::invalid_argument("--seeds: empty range " + text);
    for (auto s = lo; s <= hi; ++s) out.push_back(s);
    return out;
  }
  std::istringstream in(text);
  for (std::string t; std::getline(in, t, ',');) out.push_back(number(t));
  return out;
}

std::vector<Scheme> parse_schemes(const std::vector<std::string>& ids) {
  std::vector<Scheme> out;
  if (ids.empty()) return {kAllSchemes.begin(), kAllSchemes.end()};
  for (const auto& id : ids) out.push_back(parse_scheme(id));
  return out;
}

ScenarioConfig config_or_default(const std::optional<fs::path>& path) {
  return path ? load_config(*path) : ScenarioConfig{};
}

int cmd_run(const fs::path& config, const std::vector<std::string>& ids, std::uint64_t seed,
            const fs::path& out, const GaFlags& flags) {
  const Instance inst = load_instance(config, seed);
  const GaParams base = flags.resolve(config);
  const auto ctx = ResultContext::of(inst);
  const fs::path dir = out / config.stem() / std::to_string(seed);
  write_text(dir / "instance.json", serialize_instance(inst) + "\n");

  std::cout << kResultCsvHeader << '\n';
  int status = 0;
  for (Scheme s : parse_schemes(ids)) {
    GaParams ga = base;
    ga.seed = cell_seeds(seed, s).ga;
    const SchemeResult r = run_scheme(s, inst, ga);
    const auto violations =
        validate_schedule(inst, r.comm, r.exec ? &*r.exec : nullptr, r.fitness, ga.invalid_penalty_s);
    if (!violations.empty()) {
      std::cerr << scheme_id(s) << ": schedule failed validation\n" << describe(violations);
      status = 1;
    }
    const std::string id(scheme_id(s));
    write_text(dir / (id + ".json"), serialize_result(r, ctx));
    write_text(dir / (id + ".csv"), r.exec ? exec_csv(inst, *r.exec) : grants_csv(r.comm));
    write_text(dir / (id + ".grants.csv"), grants_csv(r.comm));
    write_text(dir / (id + ".completion.csv"), completion_csv(r.comm, inst.radio().slot_s));
    if (r.trace) write_text(dir / (id + ".trace.csv"), trace_csv(*r.trace));
    std::cout << result_csv_row(r, seed) << '\n';
  }
  std::cerr << "wrote " << dir.string() << '\n';
  return status;
}

int cmd_sweep(const std::optional<fs::path>& config, const std::string& axis,
              const std::vector<std::string>& values, const std::string& seeds,
              const std::vector<std::string>& ids, const std::string& name, const fs::path& out,
              const GaFlags& flags) {
  ExperimentPlan plan;
  plan.name = name;
  plan.base = config_or_default(config);
  plan.axis = parse_axis(axis);
  plan.values = values.empty() ? default_axis_values(plan.axis) : values;
  plan.schemes = parse_schemes(ids);
  plan.seeds = parse_seeds(seeds);
  plan.ga = flags.resolve(config);
  plan.workers = plan.ga.workers;
  plan.ga.workers = 1;
  plan.out_dir = out;

  const PlanResult res = run_plan(plan);
  std::cout << summary_csv(plan, res.summary);
  int failed = 0;
  for (const auto& c : res.cells) {
    if (!c.result) {
      std::cerr << "cell " << c.value << "/" << c.seed << "/" << scheme_id(c.scheme)
                << " failed: " << c.error << '\n';
      ++failed;
    }
  }
  std::cerr << "wrote " << (out / plan.name).string() << '\n';
  return failed ? 1 : 0;
}

int cmd_gantt(const fs::path& input, const fs::path& out) {
  const auto doc = parse_json_text(read_text(input), input.string());
  const auto [result, ctx] = result_from_json(doc);
  write_text(out, gantt_svg(result, ctx));
  std::cerr << "wrote " << out.string() << '\n';
  return 0;
}

int cmd_oracle(const std::optional<fs::path>& config, std::uint64_t seed,
               const std::optional<fs::path>& out, const GaFlags& flags) {
  const Instance inst = config ? load_instance(*config, seed)
                               : generate_instance(oracle_tiny_config(), seed);
  const OracleResult best = brute_force_optimum(inst);
  if (!best.feasible) {
    std::cout << "no RB assignment finishes every upload within the horizon\n";
    return 1;
  }
  char line[160];
  std::snprintf(line, sizeof line, "J* = %.6f ms (states explored: %lld)\n",
                best.objective_s * 1e3, static_cast<long long>(best.states));
  std::cout << line;
  std::cout << "scheme,J_ms,gap_pct\n";
  const GaParams base = flags.resolve(config);
  for (Scheme s : kAllSchemes) {
    GaParams ga = base;
    ga.seed = cell_seeds(seed, s).ga;
    const SchemeResult r = run_scheme(s, inst, ga);
    std::snprintf(line, sizeof line, "%s,%.6f,%.3f\n", std::string(scheme_id(s)).c_str(),
                  r.fitness.objective_s * 1e3,
                  100.0 * (r.fitness.objective_s - best.objective_s) / best.objective_s);
    std::cout << line;
  }
  const std::string grants = grants_csv(best.comm);
  const std::string exec = exec_csv(inst, *best.exec);
  if (out) {
    write_text(*out / "witness_grants.csv", grants);
    write_text(*out / "witness_exec.csv", exec);
    std::cerr << "wrote " << out->string() << '\n';
  } else {
    std::cout << "\n" << grants << "\n" << exec;
  }
  return 0;
}

int cmd_convergence(const fs::path& config, std::uint64_t seed, const fs::path& out,
                    const GaFlags& flags) {
  const Instance inst = load_instance(config, seed);
  GaParams ga = flags.resolve(config);
  ga.seed = derive_seed(seed, "convergence");
  const auto series = run_convergence(inst, ga);
  write_text(out / "convergence.csv", convergence_csv(series));
  write_text(out / "convergence.svg", convergence_svg(series));
  for (const auto& s : series) {
    const auto& g = s.trace.generations;
    char line[160];
    std::snprintf(line, sizeof line, "%-8s gen0 %.3f ms -> gen%d %.3f ms\n", s.label.c_str(),
                  g.front().best_so_far * 1e3, g.back().generation, g.back().best_so_far * 1e3);
    std::cout << line;
  }
  std::cerr << "wrote " << out.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint uplink and DAG scheduling for multi-UAV collaborative inference"};
  app.require_subcommand(1);
  int status = 0;

  GaFlags run_ga;
  fs::path run_config;
  std::vector<std::string> run_schemes;
  std::uint64_t run_seed = 0;
  fs::path run_out = "out/run";
  auto* run = app.add_subcommand("run", "run schemes on one instance");
  run->add_option("--config", run_config, "scenario config or serialized instance")
      ->required()->check(CLI::ExistingFile);
  run->add_option("--scheme", run_schemes, "scheme id (repeatable; default: all five)");
  run->add_option("--seed", run_seed, "instance and GA seed");
  run->add_option("--out", run_out, "output directory");
  run_ga.add(run);
  run->callback([&] { status = cmd_run(run_config, run_schemes, run_seed, run_out, run_ga); });

  GaFlags sweep_ga;
  std::optional<fs::path> sweep_config;
  std::string sweep_axis;
  std::vector<std::string> sweep_values;
  std::string sweep_seeds = "0..9";
  std::vector<std::string> sweep_schemes;
  std::string sweep_name;
  fs::path sweep_out = "out";
  auto* sweep = app.add_subcommand("sweep", "seeded batch over one config axis");
  sweep->add_option("--config", sweep_config, "base scenario config (default: built-in defaults)")
      ->check(CLI::ExistingFile);
  sweep->add_option("--axis", sweep_axis,
                    "cores | subcarriers | sinr_threshold | payload_config | branch_config")
      ->required();
  sweep->add_option("--values", sweep_values, "axis values (comma separated)")->delimiter(',');
  sweep->add_option("--seeds", sweep_seeds, "seed range n..m or list a,b,c");
  sweep->add_option("--scheme", sweep_schemes, "scheme id (repeatable; default: all five)");
  sweep->add_option("--name", sweep_name, "plan name (default: the axis name)");
  sweep->add_option("--out", sweep_out, "output root");
  sweep_ga.add(sweep);
  sweep->callback([&] {
    status = cmd_sweep(sweep_config, sweep_axis, sweep_values, sweep_seeds, sweep_schemes,
                       sweep_name.empty() ? sweep_axis : sweep_name, sweep_out, sweep_ga);
  });

  fs::path gantt_in;
  fs::path gantt_out;
  auto* gantt = app.add_subcommand("gantt", "draw a result timeline as SVG");
  gantt->add_option("--input", gantt_in, "result JSON")->required()->check(CLI::ExistingFile);
  gantt->add_option("--out", gantt_out, "SVG path")->required();
  gantt->callback([&] { status = cmd_gantt(gantt_in, gantt_out); });

  GaFlags oracle_ga;
  std::optional<fs::path> oracle_config;
  std::optional<fs::path> oracle_out;
  std::uint64_t oracle_seed = 0;
  auto* oracle = app.add_subcommand("oracle", "exhaustive optimum of a tiny instance");
  oracle->add_option("--config", oracle_config, "tiny config or instance (default: built-in)")
      ->check(CLI::ExistingFile);
  oracle->add_option("--seed", oracle_seed, "instance and GA seed");
  oracle->add_option("--out", oracle_out, "directory for the witness CSVs");
  oracle_ga.add(oracle);
  oracle->callback([&] { status = cmd_oracle(oracle_config, oracle_seed, oracle_out, oracle_ga); });

  GaFlags conv_ga;
  fs::path conv_config;
  std::uint64_t conv_seed = 0;
  fs::path conv_out = "out/convergence";
  auto* conv = app.add_subcommand("convergence", "best-so-far J per generation of the GA schemes");
  conv->add_option("--config", conv_config, "scenario config")->required()->check(CLI::ExistingFile);
  conv->add_option("--seed", conv_seed, "instance and GA seed");
  conv->add_option("--out", conv_out, "output directory");
  conv_ga.add(conv);
  conv->callback([&] { status = cmd_convergence(conv_config, conv_seed, conv_out, conv_ga); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return status;
}
