#include "uavsched/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace uavsched {

using nlohmann::json;

namespace {

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

std::string ms(double seconds) { return fmt("%.6f", seconds * 1e3); }

// Axis step from {1, 2, 5} x 10^n giving at most ~10 ticks.
double tick_step(double span) {
  const double raw = span / 10.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0}) {
    if (m * mag >= raw) return m * mag;
  }
  return 10.0 * mag;
}

const char* class_color(NodeClass c) {
  switch (c) {
    case NodeClass::branch: return "#4e79a7";
    case NodeClass::alignment: return "#f28e2b";
    case NodeClass::head: return "#59a14f";
  }
  return "#999999";
}

constexpr std::array<const char*, 6> kSeriesColors{"#e15759", "#4e79a7", "#59a14f",
                                                   "#b07aa1", "#f28e2b", "#76b7b2"};

}  // namespace

std::string grants_csv(const CommSchedule& comm) {
  std::ostringstream os;
  os << "k,t,f,rate_bps\n";
  for (const auto& g : comm.grants) {
    os << g.stream << ',' << g.slot << ',' << g.subcarrier << ',' << fmt("%.6f", g.rate_bps) << '\n';
  }
  return os.str();
}

std::string completion_csv(const CommSchedule& comm, double slot_s) {
  std::ostringstream os;
  os << "k,tau_slots,tau_ms\n";
  for (std::size_t k = 0; k < comm.completion_slot.size(); ++k) {
    os << k << ',';
    if (const auto& t = comm.completion_slot[k]) os << *t << ',' << ms(*t * slot_s);
    else os << ',';
    os << '\n';
  }
  return os.str();
}

std::string exec_csv(const Instance& inst, const ExecutionSchedule& exec) {
  return exec_csv(ResultContext::of(inst).node_class, exec);
}

std::string exec_csv(const std::vector<NodeClass>& node_class, const ExecutionSchedule& exec) {
  std::ostringstream os;
  os << "node,class,core,start_ms,finish_ms\n";
  for (int v = 0; v < static_cast<int>(exec.nodes.size()); ++v) {
    const auto& t = exec.nodes[v];
    os << v << ',' << node_class_name(node_class.at(v)) << ',' << t.core << ','
       << ms(t.start_s) << ',' << ms(t.finish_s) << '\n';
  }
  return os.str();
}

std::string trace_csv(const GaTrace& trace) {
  std::ostringstream os;
  os << "generation,best_J_ms,mean_J_ms\n";
  for (const auto& g : trace.generations) {
    os << g.generation << ',' << ms(g.best_so_far) << ',' << ms(g.mean) << '\n';
  }
  return os.str();
}

std::string result_csv_row(const SchemeResult& r, std::uint64_t seed) {
  std::ostringstream os;
  os << scheme_id(r.scheme) << ',' << seed << ',';
  if (r.fitness.feasible) os << ms(r.fitness.e2e_s) << ',' << ms(r.fitness.sync_penalty_s) << ',';
  else os << ",,";
  os << ms(r.fitness.objective_s) << ',' << (r.fitness.feasible ? 1 : 0);
  return os.str();
}

ResultContext ResultContext::of(const Instance& inst) {
  ResultContext c;
  c.num_streams = inst.num_streams();
  c.num_cores = inst.num_cores();
  c.slot_s = inst.radio().slot_s;
  for (const auto& n : inst.dag().nodes()) c.node_class.push_back(n.cls);
  return c;
}

json result_to_json(const SchemeResult& r, const ResultContext& ctx) {
  json grants = json::array();
  for (const auto& g : r.comm.grants) grants.push_back({g.stream, g.slot, g.subcarrier, g.rate_bps});
  json tau = json::array();
  for (const auto& t : r.comm.completion_slot) tau.push_back(t ? json(*t) : json(nullptr));

  json exec = nullptr;
  if (r.exec) {
    json nodes = json::array();
    for (const auto& t : r.exec->nodes) nodes.push_back({t.core, t.start_s, t.finish_s});
    exec = {{"nodes", nodes}, {"dispatch_order", r.exec->dispatch_order}};
  }
  json trace = nullptr;
  if (r.trace) {
    json gens = json::array();
    for (const auto& g : r.trace->generations) {
      gens.push_back({{"generation", g.generation},
                      {"best_so_far", g.best_so_far},
                      {"mean", g.mean},
                      {"best", g.best}});
    }
    trace = {{"generations", gens},
             {"all_infeasible", r.trace->all_infeasible},
             {"evaluations", r.trace->evaluations}};
  }
  json classes = json::array();
  for (auto c : ctx.node_class) classes.push_back(node_class_name(c));

  return {{"format", "uavsched.result.v1"},
          {"scheme", scheme_id(r.scheme)},
          {"instance",
           {{"num_streams", ctx.num_streams},
            {"num_cores", ctx.num_cores},
            {"slot_s", ctx.slot_s},
            {"node_class", classes}}},
          {"fitness",
           {{"feasible", r.fitness.feasible},
            {"penalty_applied", r.fitness.penalty_applied},
            {"e2e_s", r.fitness.e2e_s},
            {"group_mismatch_s", r.fitness.group_mismatch_s},
            {"sync_penalty_s", r.fitness.sync_penalty_s},
            {"objective_s", r.fitness.objective_s}}},
          {"comm", {{"grants", grants}, {"completion_slot", tau}}},
          {"exec", exec},
          {"policy", r.policy},
          {"trace", trace}};
}

std::pair<SchemeResult, ResultContext> result_from_json(const json& doc) {
  try {
    if (doc.at("format") != "uavsched.result.v1") {
      throw std::invalid_argument("result: unsupported format tag");
    }
    ResultContext ctx;
    const auto& ij = doc.at("instance");
    ctx.num_streams = ij.at("num_streams").get<int>();
    ctx.num_cores = ij.at("num_cores").get<int>();
    ctx.slot_s = ij.at("slot_s").get<double>();
    for (const auto& c : ij.at("node_class")) ctx.node_class.push_back(parse_node_class(c.get<std::string>()));

    SchemeResult r;
    r.scheme = parse_scheme(doc.at("scheme").get<std::string>());
    const auto& fj = doc.at("fitness");
    r.fitness.feasible = fj.at("feasible").get<bool>();
    r.fitness.penalty_applied = fj.at("penalty_applied").get<bool>();
    r.fitness.e2e_s = fj.at("e2e_s").get<double>();
    r.fitness.group_mismatch_s = fj.at("group_mismatch_s").get<std::vector<double>>();
    r.fitness.sync_penalty_s = fj.at("sync_penalty_s").get<double>();
    r.fitness.objective_s = fj.at("objective_s").get<double>();

    for (const auto& g : doc.at("comm").at("grants")) {
      r.comm.grants.push_back({g.at(0).get<int>(), g.at(1).get<int>(), g.at(2).get<int>(),
                               g.at(3).get<double>()});
    }
    for (const auto& t : doc.at("comm").at("completion_slot")) {
      r.comm.completion_slot.push_back(t.is_null() ? std::nullopt : std::optional<int>(t.get<int>()));
    }
    if (const auto& ej = doc.at("exec"); !ej.is_null()) {
      const auto& nodes = ej.at("nodes");
      ExecutionSchedule exec(static_cast<int>(nodes.size()), ctx.num_cores);
      for (int v : ej.at("dispatch_order").get<std::vector<int>>()) {
        const auto& n = nodes.at(v);
        exec.commit(v, n.at(0).get<int>(), n.at(1).get<double>(), n.at(2).get<double>());
      }
      r.exec = std::move(exec);
    }
    r.policy = doc.at("policy").get<std::vector<double>>();
    if (const auto& tj = doc.at("trace"); !tj.is_null()) {
      GaTrace trace;
      for (const auto& g : tj.at("generations")) {
        trace.generations.push_back({g.at("generation").get<int>(), g.at("best_so_far").get<double>(),
                                     g.at("mean").get<double>(), g.at("best").get<Chromosome>()});
      }
      trace.all_infeasible = tj.at("all_infeasible").get<bool>();
      trace.evaluations = tj.at("evaluations").get<int>();
      r.trace = std::move(trace);
    }
    return {std::move(r), std::move(ctx)};
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("result: malformed document: ") + e.what());
  }
}

std::string serialize_result(const SchemeResult& r, const ResultContext& ctx) {
  return result_to_json(r, ctx).dump(1) + "\n";
}

std::string gantt_svg(const SchemeResult& r, const ResultContext& ctx) {
  if (!r.fitness.feasible || !r.exec) {
    throw std::invalid_argument("gantt: result of " + std::string(scheme_id(r.scheme)) +
                                " is infeasible (some upload never finished); nothing to draw");
  }
  const double slot = ctx.slot_s;
  const double tau_max = r.comm.last_completion_s(slot);
  double t_end = std::max(tau_max, r.exec->makespan());
  if (t_end <= 0.0) t_end = slot;

  const int lanes = ctx.num_streams + ctx.num_cores;
  const double left = 90, top = 40, lane_h = 26, plot_w = 900;
  const double height = top + lanes * lane_h + 50;
  const double width = left + plot_w + 30;
  auto x_of = [&](double s) { return left + s / t_end * plot_w; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  os << "<text x=\"" << left << "\" y=\"20\" font-size=\"13\">" << scheme_id(r.scheme)
     << ": J = " << fmt("%.3f", r.fitness.objective_s * 1e3) << " ms</text>\n";

  for (int l = 0; l < lanes; ++l) {
    const double y = top + l * lane_h;
    const std::string name = l < ctx.num_streams ? "UAV " + std::to_string(l + 1)
                                                 : "core " + std::to_string(l - ctx.num_streams);
    os << "<rect x=\"" << left << "\" y=\"" << y << "\" width=\"" << plot_w << "\" height=\""
       << lane_h - 4 << "\" fill=\"" << (l % 2 ? "#f4f4f4" : "#ebebeb") << "\"/>\n";
    os << "<text x=\"8\" y=\"" << y + lane_h / 2 + 2 << "\">" << name << "</text>\n";
  }

  // One bar per (stream, slot) holding at least one RB.
  std::vector<std::pair<int, int>> busy;
  for (const auto& g : r.comm.grants) busy.emplace_back(g.stream, g.slot);
  std::sort(busy.begin(), busy.end());
  busy.erase(std::unique(busy.begin(), busy.end()), busy.end());
  for (const auto& [k, t] : busy) {
    const double y = top + k * lane_h + 3;
    os << "<rect x=\"" << x_of(t * slot) << "\" y=\"" << y << "\" width=\""
       << std::max(0.5, x_of((t + 1) * slot) - x_of(t * slot)) << "\" height=\"" << lane_h - 10
       << "\" fill=\"#bab0ac\"/>\n";
  }

  for (int v = 0; v < static_cast<int>(r.exec->nodes.size()); ++v) {
    const auto& n = r.exec->nodes[v];
    const double y = top + (ctx.num_streams + n.core) * lane_h + 3;
    const double x0 = x_of(n.start_s);
    const double w = std::max(0.5, x_of(n.finish_s) - x0);
    os << "<rect x=\"" << x0 << "\" y=\"" << y << "\" width=\"" << w << "\" height=\""
       << lane_h - 10 << "\" fill=\"" << class_color(ctx.node_class.at(v))
       << "\" stroke=\"#ffffff\" stroke-width=\"0.5\"><title>node " << v << " ("
       << node_class_name(ctx.node_class.at(v)) << ") " << fmt("%.3f", n.start_s * 1e3) << "-"
       << fmt("%.3f", n.finish_s * 1e3) << " ms</title></rect>\n";
    if (w > 16) {
      os << "<text x=\"" << x0 + 2 << "\" y=\"" << y + lane_h / 2 + 1
         << "\" fill=\"#ffffff\" font-size=\"9\">" << v << "</text>\n";
    }
  }

  const double axis_y = top + lanes * lane_h;
  const double step = tick_step(t_end * 1e3);
  for (double t = 0.0; t <= t_end * 1e3 + 1e-9; t += step) {
    const double x = x_of(t * 1e-3);
    os << "<line x1=\"" << x << "\" y1=\"" << axis_y << "\" x2=\"" << x << "\" y2=\"" << axis_y + 4
       << "\" stroke=\"#333\"/>\n";
    os << "<text x=\"" << x << "\" y=\"" << axis_y + 16 << "\" text-anchor=\"middle\">"
       << fmt("%g", t) << "</text>\n";
  }
  os << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << axis_y + 34
     << "\" text-anchor=\"middle\">time (ms)</text>\n";

  const double xm = x_of(tau_max);
  os << "<line x1=\"" << xm << "\" y1=\"" << top - 6 << "\" x2=\"" << xm << "\" y2=\"" << axis_y
     << "\" stroke=\"#d62728\" stroke-dasharray=\"4 3\" stroke-width=\"1.5\"/>\n";
  os << "<text x=\"" << xm + 3 << "\" y=\"" << top - 8 << "\" fill=\"#d62728\">last upload "
     << fmt("%.0f", tau_max * 1e3) << " ms</text>\n";
  os << "</svg>\n";
  return os.str();
}

std::string convergence_csv(const std::vector<ConvergenceSeries>& series) {
  std::ostringstream os;
  os << "scheme,generation,best_J_ms,mean_J_ms\n";
  for (const auto& s : series) {
    for (const auto& g : s.trace.generations) {
      os << s.label << ',' << g.generation << ',' << ms(g.best_so_far) << ',' << ms(g.mean) << '\n';
    }
  }
  return os.str();
}

std::string convergence_svg(const std::vector<ConvergenceSeries>& series) {
  int g_max = 1;
  double lo = 0.0;
  double hi = 0.0;
  bool first = true;
  for (const auto& s : series) {
    for (const auto& g : s.trace.generations) {
      g_max = std::max(g_max, g.generation);
      const double v = g.best_so_far * 1e3;
      lo = first ? v : std::min(lo, v);
      hi = first ? v : std::max(hi, v);
      first = false;
    }
  }
  if (hi - lo < 1e-9) {
    lo -= 1.0;
    hi += 1.0;
  }
  const double pad = 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;

  const double left = 70, top = 20, plot_w = 600, plot_h = 360;
  auto x_of = [&](double g) { return left + g / g_max * plot_w; };
  auto y_of = [&](double v) { return top + (hi - v) / (hi - lo) * plot_h; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << left + plot_w + 150
     << "\" height=\"" << top + plot_h + 50 << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << plot_w << "\" height=\""
     << plot_h << "\" fill=\"none\" stroke=\"#333\"/>\n";
  const double ystep = tick_step(hi - lo);
  for (double v = std::ceil(lo / ystep) * ystep; v <= hi; v += ystep) {
    os << "<text x=\"" << left - 6 << "\" y=\"" << y_of(v) + 4 << "\" text-anchor=\"end\">"
       << fmt("%g", v) << "</text>\n";
  }
  const double gstep = std::max(1.0, tick_step(g_max));
  for (double g = 0; g <= g_max; g += gstep) {
    os << "<text x=\"" << x_of(g) << "\" y=\"" << top + plot_h + 16 << "\" text-anchor=\"middle\">"
       << fmt("%g", g) << "</text>\n";
  }
  os << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << top + plot_h + 36
     << "\" text-anchor=\"middle\">generation</text>\n";
  os << "<text x=\"14\" y=\"" << top + plot_h / 2
     << "\" transform=\"rotate(-90 14 " << top + plot_h / 2
     << ")\" text-anchor=\"middle\">best J (ms)</text>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = kSeriesColors[i % kSeriesColors.size()];
    const auto& gens = series[i].trace.generations;
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.8\" points=\"";
    for (const auto& g : gens) os << x_of(g.generation) << ',' << y_of(g.best_so_far * 1e3) << ' ';
    os << "\"/>\n";
    if (gens.size() == 1) {
      os << "<circle cx=\"" << x_of(gens[0].generation) << "\" cy=\""
         << y_of(gens[0].best_so_far * 1e3) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    }
    const double ly = top + 14 + 16 * static_cast<double>(i);
    os << "<line x1=\"" << left + plot_w + 10 << "\" y1=\"" << ly - 4 << "\" x2=\""
       << left + plot_w + 30 << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color
       << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << left + plot_w + 34 << "\" y=\"" << ly << "\">" << series[i].label
       << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  out << text;
  if (!out) throw std::runtime_error(path.string() + ": write failed");
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path.string() + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace uavsched
