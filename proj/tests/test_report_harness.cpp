#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <map>
#include <sstream>

#include "support.hpp"
#include "uavsched/harness.hpp"
#include "uavsched/report.hpp"
#include "uavsched/validate.hpp"

using namespace uavsched;
namespace fs = std::filesystem;

namespace {

GaParams tiny_ga() {
  GaParams ga;
  ga.population = 8;
  ga.generations = 3;
  return ga;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::vector<std::string> fields(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  for (std::string f; std::getline(in, f, ',');) out.push_back(f);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("uavsched-test-" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST(ResultJson, RoundTripAndStableBytes) {
  const Instance inst = generate_instance(support::small_config(), 2);
  const auto ctx = ResultContext::of(inst);
  for (Scheme s : kAllSchemes) {
    GaParams ga = tiny_ga();
    SchemeResult r = run_scheme(s, inst, ga);
    const std::string text = serialize_result(r, ctx);
    const auto [back, back_ctx] = result_from_json(nlohmann::json::parse(text));
    EXPECT_EQ(back_ctx, ctx);
    EXPECT_EQ(back.comm, r.comm);
    EXPECT_EQ(back.exec, r.exec);
    EXPECT_EQ(back.fitness, r.fitness);
    EXPECT_EQ(back.trace, r.trace);
    EXPECT_EQ(back.policy, r.policy);
    EXPECT_EQ(serialize_result(back, back_ctx), text);
    r.runtime_s = 123.0;
    EXPECT_EQ(serialize_result(r, ctx), text) << "runtime must not leak into the JSON";
  }
}

TEST(ResultJson, RejectsForeignDocuments) {
  EXPECT_ANY_THROW(result_from_json(nlohmann::json::parse(R"({"format":"other"})")));
}

TEST(Csv, CompletionAndExecTables) {
  const Instance inst = generate_instance(support::small_config(), 1);
  const SchemeResult r = run_decoupled_greedy(inst);
  const auto comp = lines(completion_csv(r.comm, inst.radio().slot_s));
  ASSERT_EQ(comp.size(), 4u);
  EXPECT_EQ(comp[0], "k,tau_slots,tau_ms");
  for (int k = 0; k < 3; ++k) {
    const auto f = fields(comp[k + 1]);
    EXPECT_EQ(std::stoi(f[1]), *r.comm.completion_slot[k]);
    EXPECT_DOUBLE_EQ(std::stod(f[2]), *r.comm.completion_slot[k] * 1.0);
  }
  const auto ex = lines(exec_csv(inst, *r.exec));
  ASSERT_EQ(ex.size(), static_cast<std::size_t>(inst.dag().size()) + 1);
  EXPECT_EQ(ex[0], "node,class,core,start_ms,finish_ms");
  const auto g = lines(grants_csv(r.comm));
  EXPECT_EQ(g.size(), r.comm.grants.size() + 1);
}

TEST(Gantt, RefusesInfeasible) {
  ScenarioConfig cfg = support::small_config();
  cfg.radio.horizon_slots = 2;
  const Instance inst = generate_instance(cfg, 1);
  EXPECT_THROW(gantt_svg(run_decoupled_greedy(inst), ResultContext::of(inst)), std::invalid_argument);
}

TEST(Gantt, MarkerAtLastCompletion) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Instance inst = generate_instance(support::small_config(), seed);
    const SchemeResult r = run_joint_greedy(inst);
    const std::string svg = gantt_svg(r, ResultContext::of(inst));
    EXPECT_EQ(svg.rfind("<svg", 0), 0u);
    char label[64];
    std::snprintf(label, sizeof label, "last upload %.0f ms", r.comm.last_completion_s(inst.radio().slot_s) * 1e3);
    EXPECT_NE(svg.find(label), std::string::npos) << label;
  }
}

TEST(Convergence, SingleGenerationPoint) {
  const Instance inst = generate_instance(support::small_config(), 0);
  GaParams ga = tiny_ga();
  ga.generations = 0;
  const auto series = run_convergence(inst, ga);
  ASSERT_EQ(series.size(), 3u);
  for (const auto& s : series) EXPECT_EQ(s.trace.generations.size(), 1u);
  const auto csv = lines(convergence_csv(series));
  EXPECT_EQ(csv.size(), 4u);
  EXPECT_NE(convergence_svg(series).find("<svg"), std::string::npos);
}

TEST(Convergence, FullTraceWithoutEarlyStop) {
  const Instance inst = generate_instance(support::small_config(), 0);
  GaParams ga = tiny_ga();
  ga.generations = 12;
  ga.stall_limit = 1;
  for (const auto& s : run_convergence(inst, ga)) EXPECT_EQ(s.trace.generations.size(), 13u);
}

TEST(Axis, NamesAndDefaults) {
  for (auto a : {SweepAxis::cores, SweepAxis::subcarriers, SweepAxis::sinr_threshold,
                 SweepAxis::payload_config, SweepAxis::branch_config}) {
    EXPECT_EQ(parse_axis(axis_name(a)), a);
    for (const auto& v : default_axis_values(a)) {
      ScenarioConfig cfg;
      EXPECT_NO_THROW(apply_axis(cfg, a, v)) << axis_name(a) << "=" << v;
    }
  }
  EXPECT_THROW(parse_axis("bandwidth"), std::invalid_argument);
}

TEST(Axis, PayloadPresets) {
  const ScenarioConfig base;
  ScenarioConfig cfg = base;
  apply_axis(cfg, SweepAxis::payload_config, "x5");
  for (std::size_t k = 0; k < base.payloads_kb.size(); ++k) {
    EXPECT_DOUBLE_EQ(cfg.payloads_kb[k], 5 * base.payloads_kb[k]);
  }
  cfg = base;
  apply_axis(cfg, SweepAxis::payload_config, "uniform4");
  for (double p : cfg.payloads_kb) EXPECT_EQ(p, 4.0);
  cfg = base;
  apply_axis(cfg, SweepAxis::payload_config, "subset3");
  EXPECT_EQ(cfg.payloads_kb, (std::vector<double>{0.2, 5.0, 7.0}));
  EXPECT_EQ(cfg.branch_lengths, (std::vector<int>{5, 5, 5}));
  EXPECT_EQ(cfg.groups, (std::vector<std::vector<int>>{{1, 2}, {3}}));
  cfg = base;
  apply_axis(cfg, SweepAxis::payload_config, "1-2-3-4-5-6");
  EXPECT_EQ(cfg.payloads_kb, (std::vector<double>{1, 2, 3, 4, 5, 6}));
}

TEST(Axis, BadValues) {
  ScenarioConfig cfg;
  EXPECT_THROW(apply_axis(cfg, SweepAxis::cores, "four"), ConfigError);
  EXPECT_THROW(apply_axis(cfg, SweepAxis::cores, "0"), ConfigError);
  EXPECT_THROW(apply_axis(cfg, SweepAxis::branch_config, "5-5"), ConfigError);
  EXPECT_THROW(apply_axis(cfg, SweepAxis::payload_config, "x7"), ConfigError);
  ScenarioConfig two = support::small_config();
  EXPECT_THROW(apply_axis(two, SweepAxis::payload_config, "subset3"), ConfigError);
}

TEST(Seeds, PairedAcrossAxisValues) {
  for (Scheme s : kAllSchemes) {
    EXPECT_EQ(cell_seeds(9, s).instance, 9u);
    EXPECT_EQ(cell_seeds(9, s).ga, cell_seeds(9, s).ga);
  }
  EXPECT_NE(cell_seeds(9, Scheme::ga_dag).ga, cell_seeds(9, Scheme::ga_joint).ga);
  EXPECT_NE(cell_seeds(9, Scheme::ga_joint).ga, cell_seeds(10, Scheme::ga_joint).ga);
}

TEST(GaConfig, ReadsSection) {
  const auto doc = nlohmann::json::parse(
      R"({"ga": {"population": 12, "generations": 4, "range": [-2, 3], "stall_limit": 0}})");
  const GaParams p = ga_params_from_json(doc);
  EXPECT_EQ(p.population, 12);
  EXPECT_EQ(p.generations, 4);
  EXPECT_EQ(p.lower, -2.0);
  EXPECT_EQ(p.upper, 3.0);
  EXPECT_EQ(p.stall_limit, 0);
  EXPECT_EQ(ga_params_from_json(nlohmann::json::object()).population, 40);
  EXPECT_THROW(ga_params_from_json(nlohmann::json::parse(R"({"ga": {"pop": 3}})")), ConfigError);
  EXPECT_THROW(ga_params_from_json(nlohmann::json::parse(R"({"ga": {"population": 1.5}})")),
               ConfigError);
  EXPECT_THROW(ga_params_from_json(nlohmann::json::parse(R"({"ga": {"range": [1, 1]}})")),
               ConfigError);
}

TEST(Plan, BookkeepingAndSummary) {
  ExperimentPlan plan;
  plan.base = support::small_config();
  plan.axis = SweepAxis::cores;
  plan.values = {"1", "2", "3"};
  plan.schemes = {kAllSchemes.begin(), kAllSchemes.end()};
  for (std::uint64_t s = 0; s < 10; ++s) plan.seeds.push_back(s);
  plan.ga = tiny_ga();
  plan.out_dir = scratch("plan");
  const PlanResult res = run_plan(plan);
  ASSERT_EQ(res.cells.size(), 150u);
  ASSERT_EQ(res.summary.size(), 15u);

  const auto rows = lines(read_text(plan.out_dir / "sweep" / "results.csv"));
  ASSERT_EQ(rows.size(), 151u);
  std::map<std::pair<std::string, std::string>, std::vector<double>> js;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto f = fields(rows[i]);
    ASSERT_EQ(f.size(), 9u) << rows[i];
    EXPECT_TRUE(f[8].empty()) << rows[i];
    js[{f[1], f[2]}].push_back(std::stod(f[6]));
  }
  for (const auto& row : res.summary) {
    const auto& v = js[{row.value, std::string(scheme_id(row.scheme))}];
    ASSERT_EQ(v.size(), 10u);
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= 10.0;
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    EXPECT_NEAR(row.mean_j_s * 1e3, mean, 1e-5);
    EXPECT_NEAR(row.std_j_s * 1e3, std::sqrt(var / 9.0), 1e-5);
    EXPECT_EQ(row.n, 10);
    EXPECT_EQ(row.errors, 0);
  }
  const auto cell = plan.out_dir / "sweep" / "cores-2" / "3";
  for (Scheme s : kAllSchemes) {
    EXPECT_TRUE(fs::exists(cell / (std::string(scheme_id(s)) + ".json")));
    EXPECT_TRUE(fs::exists(cell / (std::string(scheme_id(s)) + ".csv")));
  }
  EXPECT_EQ(lines(read_text(plan.out_dir / "sweep" / "table.csv")).size(), 4u);
  fs::remove_all(plan.out_dir);
}

TEST(Plan, RerunIsByteIdentical) {
  ExperimentPlan plan;
  plan.base = support::small_config();
  plan.axis = SweepAxis::sinr_threshold;
  plan.values = {"6", "9"};
  plan.schemes = {Scheme::decoupled_greedy, Scheme::ga_joint};
  plan.seeds = {4, 5, 6};
  plan.ga = tiny_ga();
  const fs::path a = scratch("rerun-a");
  const fs::path b = scratch("rerun-b");
  plan.out_dir = a;
  run_plan(plan);
  plan.out_dir = b;
  plan.workers = 3;
  run_plan(plan);
  for (const auto& e : fs::recursive_directory_iterator(a / "sweep")) {
    if (!e.is_regular_file() || e.path().filename() == "timing.csv") continue;
    const auto rel = fs::relative(e.path(), a);
    EXPECT_EQ(read_text(e.path()), read_text(b / rel)) << rel;
  }
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Plan, FailingCellsAreRecorded) {
  ExperimentPlan plan;
  plan.base = support::small_config();
  plan.axis = SweepAxis::branch_config;
  plan.values = {"2-2-2", "2-2"};
  plan.schemes = {Scheme::decoupled_greedy};
  plan.seeds = {0};
  const PlanResult res = run_plan(plan);
  ASSERT_EQ(res.cells.size(), 2u);
  EXPECT_TRUE(res.cells[0].result);
  EXPECT_FALSE(res.cells[1].result);
  EXPECT_NE(res.cells[1].error.find("branch_config"), std::string::npos);
  EXPECT_EQ(res.summary[1].errors, 1);
  EXPECT_EQ(res.summary[1].n, 0);
  plan.seeds.clear();
  EXPECT_THROW(run_plan(plan), std::invalid_argument);
}
