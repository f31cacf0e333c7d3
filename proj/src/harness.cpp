#include "uavsched/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "uavsched/rng.hpp"

namespace uavsched {

namespace {

constexpr std::array<std::string_view, 5> kAxisNames{"cores", "subcarriers", "sinr_threshold",
                                                     "payload_config", "branch_config"};

[[noreturn]] void bad_value(SweepAxis axis, const std::string& value, const std::string& why) {
  throw ConfigError(std::string(axis_name(axis)) + ": bad value '" + value + "': " + why);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  return out;
}

template <class T>
T parse_number(SweepAxis axis, const std::string& text) {
  T v{};
  const char* end = text.data() + text.size();
  auto [p, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || p != end || text.empty()) bad_value(axis, text, "not a number");
  return v;
}

// Keeps the listed 1-based streams, renumbering them and their groups.
void keep_streams(ScenarioConfig& cfg, const std::vector<int>& keep) {
  std::vector<double> payloads;
  std::vector<int> branches;
  std::map<int, int> renumber;
  for (int k : keep) {
    payloads.push_back(cfg.payloads_kb.at(k - 1));
    branches.push_back(cfg.branch_lengths.at(k - 1));
    renumber[k] = static_cast<int>(renumber.size()) + 1;
  }
  std::vector<std::vector<int>> groups;
  for (const auto& g : cfg.groups) {
    std::vector<int> kept;
    for (int k : g) {
      if (auto it = renumber.find(k); it != renumber.end()) kept.push_back(it->second);
    }
    if (!kept.empty()) groups.push_back(kept);
  }
  cfg.payloads_kb = payloads;
  cfg.branch_lengths = branches;
  cfg.groups = groups;
}

double sample_std(const std::vector<double>& xs, double mean) {
  if (xs.size() < 2) return 0.0;
  double acc = 0.0;
  for (double x : xs) acc += (x - mean) * (x - mean);
  return std::sqrt(acc / static_cast<double>(xs.size() - 1));
}

std::string ms(double s) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", s * 1e3);
  return buf;
}

// Cell directories must not contain path separators.
std::string dir_token(const std::string& v) {
  std::string out = v;
  std::replace(out.begin(), out.end(), '/', '_');
  return out;
}

}  // namespace

std::string_view axis_name(SweepAxis a) { return kAxisNames[static_cast<std::size_t>(a)]; }

SweepAxis parse_axis(std::string_view name) {
  for (std::size_t i = 0; i < kAxisNames.size(); ++i) {
    if (kAxisNames[i] == name) return static_cast<SweepAxis>(i);
  }
  throw std::invalid_argument("unknown sweep axis '" + std::string(name) +
                              "' (cores, subcarriers, sinr_threshold, payload_config, branch_config)");
}

void apply_axis(ScenarioConfig& cfg, SweepAxis axis, const std::string& value) {
  switch (axis) {
    case SweepAxis::cores:
      cfg.cores = parse_number<int>(axis, value);
      break;
    case SweepAxis::subcarriers:
      cfg.radio.num_subcarriers = parse_number<int>(axis, value);
      break;
    case SweepAxis::sinr_threshold:
      cfg.radio.sinr_threshold_db = parse_number<double>(axis, value);
      break;
    case SweepAxis::payload_config: {
      const std::vector<double> base = cfg.payloads_kb;
      auto scaled = [&](double f) {
        for (auto& p : cfg.payloads_kb) p *= f;
      };
      if (value == "x5") scaled(5.0);
      else if (value == "x1") scaled(1.0);
      else if (value == "half") scaled(0.5);
      else if (value == "uniform4") std::fill(cfg.payloads_kb.begin(), cfg.payloads_kb.end(), 4.0);
      else if (value == "subset3") {
        if (cfg.payloads_kb.size() < 5) bad_value(axis, value, "needs at least five streams");
        keep_streams(cfg, {1, 3, 5});
      } else {
        std::vector<double> list;
        for (const auto& t : split(value, '-')) list.push_back(parse_number<double>(axis, t));
        if (list.size() != base.size()) {
          bad_value(axis, value, "expected " + std::to_string(base.size()) + " payloads");
        }
        cfg.payloads_kb = list;
      }
      break;
    }
    case SweepAxis::branch_config: {
      std::vector<int> list;
      for (const auto& t : split(value, '-')) list.push_back(parse_number<int>(axis, t));
      if (list.size() != cfg.branch_lengths.size()) {
        bad_value(axis, value,
                  "expected " + std::to_string(cfg.branch_lengths.size()) + " branch lengths");
      }
      cfg.branch_lengths = list;
      break;
    }
  }
  validate_config(cfg);
}

std::vector<std::string> default_axis_values(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::cores: return {"2", "4", "6"};
    case SweepAxis::subcarriers: return {"2", "4", "6"};
    case SweepAxis::sinr_threshold: return {"4", "6", "8", "10", "12"};
    case SweepAxis::payload_config: return {"x5", "x1", "half", "uniform4", "subset3"};
    case SweepAxis::branch_config:
      return {"5-5-5-5-5-5", "8-8-8-8-8-8", "2-8-4-8-6-5", "2-2-2-8-8-8", "2-8-2-8-2-8"};
  }
  return {};
}

CellSeeds cell_seeds(std::uint64_t seed, Scheme scheme) {
  return {seed, derive_seed(seed, "ga", static_cast<std::uint64_t>(scheme))};
}

void validate_plan(const ExperimentPlan& plan) {
  if (plan.values.empty()) throw std::invalid_argument("plan: no axis values");
  if (plan.seeds.empty()) throw std::invalid_argument("plan: no seeds");
  if (plan.schemes.empty()) throw std::invalid_argument("plan: no schemes");
  if (plan.workers < 1) throw std::invalid_argument("plan: workers must be >= 1");
  validate_ga_params(plan.ga);
}

std::vector<SummaryRow> summarize(const ExperimentPlan& plan, const std::vector<CellResult>& cells) {
  std::vector<SummaryRow> rows;
  for (const auto& value : plan.values) {
    for (Scheme s : plan.schemes) {
      SummaryRow row{value, s};
      std::vector<double> js;
      for (const auto& c : cells) {
        if (c.value != value || c.scheme != s) continue;
        if (!c.result) {
          ++row.errors;
          continue;
        }
        js.push_back(c.result->fitness.objective_s);
        if (!c.result->fitness.feasible) ++row.infeasible;
      }
      row.n = static_cast<int>(js.size());
      if (!js.empty()) {
        double sum = 0.0;
        for (double j : js) sum += j;
        row.mean_j_s = sum / static_cast<double>(js.size());
        row.std_j_s = sample_std(js, row.mean_j_s);
        row.min_j_s = *std::min_element(js.begin(), js.end());
      }
      rows.push_back(row);
    }
  }
  return rows;
}

std::string results_csv(const ExperimentPlan& plan, const std::vector<CellResult>& cells) {
  std::ostringstream os;
  os << "axis,value," << kResultCsvHeader << ",error\n";
  for (const auto& c : cells) {
    os << axis_name(plan.axis) << ',' << c.value << ',';
    if (c.result) {
      os << result_csv_row(*c.result, c.seed) << ",\n";
    } else {
      std::string msg = c.error;
      std::replace(msg.begin(), msg.end(), ',', ';');
      std::replace(msg.begin(), msg.end(), '\n', ' ');
      os << scheme_id(c.scheme) << ',' << c.seed << ",,,,0," << msg << '\n';
    }
  }
  return os.str();
}

std::string summary_csv(const ExperimentPlan& plan, const std::vector<SummaryRow>& rows) {
  std::ostringstream os;
  os << "axis,value,scheme,n,mean_J_ms,std_J_ms,min_J_ms,infeasible,errors\n";
  for (const auto& r : rows) {
    os << axis_name(plan.axis) << ',' << r.value << ',' << scheme_id(r.scheme) << ',' << r.n << ','
       << ms(r.mean_j_s) << ',' << ms(r.std_j_s) << ',' << ms(r.min_j_s) << ',' << r.infeasible
       << ',' << r.errors << '\n';
  }
  return os.str();
}

std::string table_csv(const ExperimentPlan& plan, const std::vector<SummaryRow>& rows) {
  std::ostringstream os;
  os << axis_name(plan.axis);
  for (Scheme s : plan.schemes) os << ',' << scheme_id(s);
  os << '\n';
  for (const auto& value : plan.values) {
    os << value;
    for (Scheme s : plan.schemes) {
      os << ',';
      for (const auto& r : rows) {
        if (r.value == value && r.scheme == s && r.n > 0) os << ms(r.mean_j_s);
      }
    }
    os << '\n';
  }
  return os.str();
}

PlanResult run_plan(const ExperimentPlan& plan) {
  validate_plan(plan);
  struct Task {
    std::string value;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (const auto& v : plan.values) {
    for (auto seed : plan.seeds) tasks.push_back({v, seed});
  }
  const std::size_t S = plan.schemes.size();
  std::vector<CellResult> cells(tasks.size() * S);
  std::vector<std::optional<ResultContext>> contexts(tasks.size());

  auto run_task = [&](std::size_t i) {
    const Task& t = tasks[i];
    for (std::size_t j = 0; j < S; ++j) {
      CellResult& c = cells[i * S + j];
      c.value = t.value;
      c.seed = t.seed;
      c.scheme = plan.schemes[j];
    }
    std::optional<Instance> inst;
    try {
      ScenarioConfig cfg = plan.base;
      apply_axis(cfg, plan.axis, t.value);
      inst.emplace(generate_instance(cfg, cell_seeds(t.seed, plan.schemes[0]).instance));
      contexts[i] = ResultContext::of(*inst);
    } catch (const std::exception& e) {
      for (std::size_t j = 0; j < S; ++j) cells[i * S + j].error = e.what();
      return;
    }
    for (std::size_t j = 0; j < S; ++j) {
      CellResult& c = cells[i * S + j];
      try {
        GaParams ga = plan.ga;
        ga.seed = cell_seeds(t.seed, c.scheme).ga;
        c.result = run_scheme(c.scheme, *inst, ga);
      } catch (const std::exception& e) {
        c.error = e.what();
      }
    }
  };

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) run_task(i);
  };
  const int threads = std::min<int>(plan.workers, static_cast<int>(tasks.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < threads; ++w) pool.emplace_back(worker);
  }

  PlanResult out;
  out.summary = summarize(plan, cells);
  if (!plan.out_dir.empty()) {
    const auto root = plan.out_dir / plan.name;
    std::ostringstream timing;
    timing << "axis,value,scheme,seed,runtime_s\n";
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      for (std::size_t j = 0; j < S; ++j) {
        const CellResult& c = cells[i * S + j];
        if (!c.result) continue;
        const auto dir = root / (std::string(axis_name(plan.axis)) + "-" + dir_token(c.value)) /
                         std::to_string(c.seed);
        const std::string id(scheme_id(c.scheme));
        write_text(dir / (id + ".json"), serialize_result(*c.result, *contexts[i]));
        if (c.result->exec) {
          write_text(dir / (id + ".csv"), exec_csv(contexts[i]->node_class, *c.result->exec));
        } else {
          write_text(dir / (id + ".csv"), grants_csv(c.result->comm));
        }
        timing << axis_name(plan.axis) << ',' << c.value << ',' << id << ',' << c.seed << ','
               << c.result->runtime_s << '\n';
      }
    }
    write_text(root / "results.csv", results_csv(plan, cells));
    write_text(root / "summary.csv", summary_csv(plan, out.summary));
    write_text(root / "table.csv", table_csv(plan, out.summary));
    write_text(root / "timing.csv", timing.str());
  }
  out.cells = std::move(cells);
  return out;
}

std::vector<ConvergenceSeries> run_convergence(const Instance& inst, GaParams ga) {
  ga.stall_limit = 0;
  std::vector<ConvergenceSeries> out;
  for (Scheme s : {Scheme::ga_dag, Scheme::ga_dacs, Scheme::ga_joint}) {
    out.push_back({std::string(scheme_id(s)), *run_scheme(s, inst, ga).trace});
  }
  return out;
}

GaParams ga_params_from_json(const nlohmann::json& doc, GaParams p) {
  auto it = doc.find("ga");
  if (it == doc.end()) return p;
  if (!it->is_object()) throw ConfigError("ga: must be an object");
  for (const auto& [key, v] : it->items()) {
    auto num = [&, &key = key, &v = v]() {
      if (!v.is_number()) throw ConfigError("ga." + key + ": must be a number");
      return v.get<double>();
    };
    auto integer = [&, &key = key, &v = v]() {
      if (!v.is_number_integer()) throw ConfigError("ga." + key + ": must be an integer");
      return v.get<int>();
    };
    if (key == "population") p.population = integer();
    else if (key == "generations") p.generations = integer();
    else if (key == "range") {
      if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        throw ConfigError("ga.range: must be a [low, high] pair");
      p.lower = v[0].get<double>();
      p.upper = v[1].get<double>();
    } else if (key == "elite") p.elite = integer();
    else if (key == "tournament") p.tournament = integer();
    else if (key == "crossover_rate") p.crossover_rate = num();
    else if (key == "blend_alpha") p.blend_alpha = num();
    else if (key == "mutation_rate") p.mutation_rate = num();
    else if (key == "mutation_scale") p.mutation_scale = num();
    else if (key == "stall_limit") p.stall_limit = integer();
    else if (key == "invalid_penalty_s") p.invalid_penalty_s = num();
    else throw ConfigError("ga." + key + ": unknown field");
  }
  try {
    validate_ga_params(p);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return p;
}

int workers_from_env(int fallback) {
  const char* raw = std::getenv("UAVSCHED_WORKERS");
  if (raw == nullptr || *raw == '\0') return fallback;
  int n = 0;
  const std::string text(raw);
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), n);
  if (ec != std::errc() || p != text.data() + text.size() || n < 1) {
    throw std::invalid_argument("UAVSCHED_WORKERS must be a positive integer, got '" + text + "'");
  }
  return n;
}

}  // namespace uavsched
