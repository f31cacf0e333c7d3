#include "uavsched/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <queue>
#include <set>
#include <sstream>

#include "uavsched/rng.hpp"

namespace uavsched {

using nlohmann::json;

namespace {

constexpr std::string_view kInstanceFormat = "uavsched.instance.v1";

[[noreturn]] void fail(const std::string& msg) { throw ConfigError(msg); }

bool finite_nonneg(double x) { return std::isfinite(x) && x >= 0.0; }

}  // namespace

std::string_view node_class_name(NodeClass cls) {
  switch (cls) {
    case NodeClass::branch:
      return "branch";
    case NodeClass::alignment:
      return "alignment";
    case NodeClass::head:
      return "head";
  }
  return "branch";
}

NodeClass parse_node_class(std::string_view name) {
  if (name == "branch") return NodeClass::branch;
  if (name == "alignment") return NodeClass::alignment;
  if (name == "head") return NodeClass::head;
  fail("dag.nodes.class: unknown node class '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// SinrTrace

SinrTrace::SinrTrace(int streams, int slots, int subcarriers, std::vector<double> db)
    : streams_(streams), slots_(slots), subcarriers_(subcarriers), db_(std::move(db)) {
  if (streams < 1 || slots < 1 || subcarriers < 1) fail("sinr trace: empty shape");
  const auto expected = static_cast<std::size_t>(streams) * slots * subcarriers;
  if (db_.size() != expected) {
    fail("sinr trace: expected " + std::to_string(expected) + " values, got " +
         std::to_string(db_.size()));
  }
  for (double x : db_) {
    if (!std::isfinite(x)) fail("sinr trace: non-finite value");
  }
}

// ---------------------------------------------------------------------------
// DagGraph

DagGraph::DagGraph(std::vector<NodeSpec> nodes, std::vector<Edge> edges, std::vector<int> entries)
    : nodes_(std::move(nodes)), edges_(std::move(edges)), entries_(std::move(entries)) {
  const int n = size();
  if (n == 0) fail("dag: no nodes");
  preds_.assign(n, {});
  succs_.assign(n, {});
  std::set<Edge> seen;
  for (const auto& [u, v] : edges_) {
    if (u < 0 || u >= n || v < 0 || v >= n) {
      fail("dag.edges: endpoint out of range in (" + std::to_string(u) + ", " +
           std::to_string(v) + ")");
    }
    if (u == v) fail("acyclicity violated: self loop on node " + std::to_string(u));
    if (!seen.insert({u, v}).second) {
      fail("dag.edges: duplicate edge (" + std::to_string(u) + ", " + std::to_string(v) + ")");
    }
    succs_[u].push_back(v);
    preds_[v].push_back(u);
  }
  for (auto& p : preds_) std::sort(p.begin(), p.end());
  for (auto& s : succs_) std::sort(s.begin(), s.end());

  // Kahn's algorithm, smallest id first.
  std::vector<int> indeg(n);
  for (int v = 0; v < n; ++v) indeg[v] = static_cast<int>(preds_[v].size());
  std::priority_queue<int, std::vector<int>, std::greater<>> ready;
  for (int v = 0; v < n; ++v) {
    if (indeg[v] == 0) ready.push(v);
  }
  while (!ready.empty()) {
    const int u = ready.top();
    ready.pop();
    topo_.push_back(u);
    for (int v : succs_[u]) {
      if (--indeg[v] == 0) ready.push(v);
    }
  }
  if (static_cast<int>(topo_.size()) != n) fail("acyclicity violated: edge list contains a cycle");

  entry_stream_.assign(n, -1);
  for (std::size_t k = 0; k < entries_.size(); ++k) {
    const int r = entries_[k];
    if (r < 0 || r >= n) fail("dag.entries: node out of range");
    if (entry_stream_[r] != -1) fail("dag.entries: node " + std::to_string(r) + " is used twice");
    entry_stream_[r] = static_cast<int>(k);
  }

  bottom_level_.assign(n, 0.0);
  for (auto it = topo_.rbegin(); it != topo_.rend(); ++it) {
    const int v = *it;
    double tail = 0.0;
    for (int s : succs_[v]) tail = std::max(tail, bottom_level_[s]);
    bottom_level_[v] = nodes_[v].compute_s + tail;
  }
}

double DagGraph::head_compute_s() const {
  double total = 0.0;
  for (const auto& nd : nodes_) {
    if (nd.cls == NodeClass::head) total += nd.compute_s;
  }
  return total;
}

// ---------------------------------------------------------------------------
// Instance

namespace {

void check_radio(const RadioParams& r) {
  if (r.num_subcarriers < 1) fail("radio.F: must be >= 1");
  if (!(r.rb_bandwidth_hz > 0.0) || !std::isfinite(r.rb_bandwidth_hz))
    fail("radio.rb_bandwidth_hz: must be > 0");
  if (!(r.slot_s > 0.0) || !std::isfinite(r.slot_s)) fail("radio.slot_ms: must be > 0");
  if (r.horizon_slots < 1) fail("radio.horizon_slots: must be >= 1");
  if (!std::isfinite(r.sinr_threshold_db)) fail("radio.sinr_threshold_db: must be finite");
  if (!(r.shannon_gap >= 1.0) || !std::isfinite(r.shannon_gap))
    fail("radio.shannon_gap: must be >= 1");
  if (!(r.eta_max > 0.0) || !std::isfinite(r.eta_max)) fail("radio.eta_max: must be > 0");
}

// Enforces the fusion-DAG shape: per-stream chains feeding one alignment node
// per group, whose outputs feed a single head chain ending in the only sink.
void check_fusion_structure(const DagGraph& dag, const std::vector<StreamSpec>& streams,
                            int num_groups) {
  const int n = dag.size();
  const int K = static_cast<int>(streams.size());
  std::vector<int> alignment(num_groups, -1);
  std::vector<int> heads;
  for (int v = 0; v < n; ++v) {
    const auto& nd = dag.node(v);
    if (!finite_nonneg(nd.compute_s) || !finite_nonneg(nd.read_on_s) ||
        !finite_nonneg(nd.write_on_s) || !finite_nonneg(nd.read_off_s) ||
        !finite_nonneg(nd.write_off_s)) {
      fail("dag.nodes[" + std::to_string(v) + "]: times must be finite and >= 0");
    }
    if (nd.read_off_s < nd.read_on_s || nd.write_off_s < nd.write_on_s) {
      fail("dag.nodes[" + std::to_string(v) + "]: off-chip times must be >= on-chip times");
    }
    if (nd.cls == NodeClass::alignment) {
      if (nd.owner < 0 || nd.owner >= num_groups) {
        fail("dag.nodes[" + std::to_string(v) + "]: alignment node has no valid group");
      }
      if (alignment[nd.owner] != -1) {
        fail("dag: group " + std::to_string(nd.owner) + " has more than one alignment node");
      }
      alignment[nd.owner] = v;
    } else if (nd.cls == NodeClass::head) {
      heads.push_back(v);
    } else if (nd.owner < 0 || nd.owner >= K) {
      fail("dag.nodes[" + std::to_string(v) + "]: branch node has no valid stream");
    }
  }
  for (int m = 0; m < num_groups; ++m) {
    if (alignment[m] == -1) fail("dag: group " + std::to_string(m) + " has no alignment node");
  }
  if (heads.empty()) fail("dag: fusion head is empty");

  int counted = 0;
  std::vector<std::vector<int>> terminals(num_groups);
  for (int k = 0; k < K; ++k) {
    int v = dag.entry(k);
    const std::string where = "dag: branch of stream " + std::to_string(k);
    if (dag.node(v).cls != NodeClass::branch || dag.node(v).owner != k)
      fail(where + ": entry node is not a branch node of this stream");
    if (!dag.preds(v).empty()) fail(where + ": entry node has predecessors");
    for (int pos = 1; pos < streams[k].branch_length; ++pos) {
      if (dag.succs(v).size() != 1) fail(where + ": branch is not a chain");
      v = dag.succs(v)[0];
      if (dag.node(v).cls != NodeClass::branch || dag.node(v).owner != k ||
          dag.preds(v).size() != 1) {
        fail(where + ": chain shorter than branch_length");
      }
    }
    const int m = streams[k].group;
    if (dag.succs(v) != std::vector<int>{alignment[m]}) {
      fail(where + ": terminal node must feed exactly the alignment node of its group");
    }
    terminals[m].push_back(v);
    counted += streams[k].branch_length;
  }

  const int first_head = [&] {
    const auto& s = dag.succs(alignment[0]);
    if (s.size() != 1 || dag.node(s[0]).cls != NodeClass::head)
      fail("dag: alignment node must feed exactly the fusion node");
    return s[0];
  }();
  for (int m = 0; m < num_groups; ++m) {
    auto expect = terminals[m];
    std::sort(expect.begin(), expect.end());
    if (dag.preds(alignment[m]) != expect) {
      fail("dag: alignment node of group " + std::to_string(m) +
           " must have exactly the terminal nodes of its branches as predecessors");
    }
    if (dag.succs(alignment[m]) != std::vector<int>{first_head}) {
      fail("dag: alignment node must feed exactly the fusion node");
    }
  }
  auto all_alignment = alignment;
  std::sort(all_alignment.begin(), all_alignment.end());
  if (dag.preds(first_head) != all_alignment) {
    fail("dag: fusion node predecessors must be exactly the alignment nodes");
  }
  int v = first_head;
  int head_count = 1;
  while (!dag.succs(v).empty()) {
    if (dag.succs(v).size() != 1) fail("dag: fusion head is not a chain");
    v = dag.succs(v)[0];
    if (dag.node(v).cls != NodeClass::head || dag.preds(v).size() != 1)
      fail("dag: fusion head is not a chain");
    ++head_count;
  }
  if (head_count != static_cast<int>(heads.size())) fail("dag: stray head nodes");
  counted += num_groups + head_count;
  if (counted != n) fail("dag: node(s) not reachable from any entry node");
}

}  // namespace

Instance::Instance(RadioParams radio, SinrTrace trace, std::vector<StreamSpec> streams,
                   DagGraph dag, int num_cores, double sync_weight)
    : radio_(radio),
      trace_(std::move(trace)),
      streams_(std::move(streams)),
      dag_(std::move(dag)),
      num_cores_(num_cores),
      sync_weight_(sync_weight) {
  check_radio(radio_);
  const int K = num_streams();
  if (K < 1) fail("streams: at least one stream is required");
  if (num_cores_ < 1) fail("compute.cores: must be >= 1");
  if (!finite_nonneg(sync_weight_)) fail("objective.lambda: must be finite and >= 0");
  if (trace_.streams() != K || trace_.slots() != radio_.horizon_slots ||
      trace_.subcarriers() != radio_.num_subcarriers) {
    fail("sinr trace: shape does not match streams x horizon_slots x F");
  }
  for (int k = 0; k < K; ++k) {
    const auto& s = streams_[k];
    if (!(s.payload_bits > 0.0) || !std::isfinite(s.payload_bits))
      fail("streams.payloads: payload of stream " + std::to_string(k) + " must be > 0");
    if (s.branch_length < 1) fail("streams.branch_lengths: must be >= 1");
    if (s.group < 0) fail("streams.groups: negative group index");
    num_groups_ = std::max(num_groups_, s.group + 1);
  }
  group_size_.assign(num_groups_, 0);
  for (const auto& s : streams_) ++group_size_[s.group];
  for (int m = 0; m < num_groups_; ++m) {
    if (group_size_[m] == 0) fail("streams.groups: group " + std::to_string(m) + " is empty");
  }
  if (static_cast<int>(dag_.entries().size()) != K)
    fail("dag.entries: need exactly one entry node per stream");
  check_fusion_structure(dag_, streams_, num_groups_);

  const auto& db = trace_.values();
  linear_.resize(db.size());
  rate_.resize(db.size());
  for (std::size_t i = 0; i < db.size(); ++i) {
    linear_[i] = std::pow(10.0, db[i] / 10.0);
    if (db[i] < radio_.sinr_threshold_db) {
      rate_[i] = 0.0;
    } else {
      const double eta = std::min(std::log2(1.0 + linear_[i] / radio_.shannon_gap), radio_.eta_max);
      rate_[i] = radio_.rb_bandwidth_hz * eta;
    }
  }
}

// ---------------------------------------------------------------------------
// Generation

void validate_config(const ScenarioConfig& cfg) {
  check_radio(cfg.radio);
  const int K = static_cast<int>(cfg.payloads_kb.size());
  if (K < 1) fail("streams.payloads_kb: at least one stream is required");
  for (double p : cfg.payloads_kb) {
    if (!(p > 0.0) || !std::isfinite(p)) fail("streams.payloads_kb: payloads must be > 0");
  }
  if (static_cast<int>(cfg.branch_lengths.size()) != K)
    fail("streams.branch_lengths: length must equal the number of payloads");
  for (int b : cfg.branch_lengths) {
    if (b < 1) fail("streams.branch_lengths: lengths must be >= 1");
  }
  if (cfg.groups.empty()) fail("streams.groups: at least one group is required");
  std::vector<int> seen(K, 0);
  int members = 0;
  for (const auto& g : cfg.groups) {
    if (g.empty()) fail("streams.groups: every group needs at least one member");
    for (int id : g) {
      if (id < 1 || id > K) fail("streams.groups: stream number out of range 1..K");
      if (seen[id - 1]++) fail("streams.groups: stream listed in more than one group");
      ++members;
    }
  }
  if (members != K) fail("streams.groups: group sizes must sum to the number of streams");
  if (cfg.head_len < 1) fail("dag.head_len: must be >= 1");
  if (cfg.cores < 1) fail("compute.cores: must be >= 1");
  auto check_range = [](const Range& r, const std::string& name) {
    if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || r.lo > r.hi)
      fail(name + ": need finite low <= high");
    if (r.lo < 0.0) fail(name + ": must be >= 0");
  };
  check_range(cfg.compute_ms, "compute.p_range_ms");
  check_range(cfg.on_chip_ms, "compute.on_chip_range_ms");
  check_range(cfg.off_chip_ms, "compute.off_chip_range_ms");
  if (cfg.off_chip_ms.lo < cfg.on_chip_ms.hi)
    fail("compute.off_chip_range_ms: must lie above on_chip_range_ms");
  if (!finite_nonneg(cfg.lambda)) fail("objective.lambda: must be finite and >= 0");
  if (!std::isfinite(cfg.sinr_db.lo) || !std::isfinite(cfg.sinr_db.hi) ||
      cfg.sinr_db.lo > cfg.sinr_db.hi) {
    fail("sinr.range_db: need finite low <= high");
  }
}

DagLayout build_fusion_dag(const std::vector<StreamSpec>& streams, int num_groups, int head_len) {
  DagLayout out;
  const int K = static_cast<int>(streams.size());
  std::vector<int> terminal(K);
  for (int k = 0; k < K; ++k) {
    for (int pos = 0; pos < streams[k].branch_length; ++pos) {
      const int id = static_cast<int>(out.nodes.size());
      out.nodes.push_back({NodeClass::branch, k});
      if (pos == 0) {
        out.entries.push_back(id);
      } else {
        out.edges.emplace_back(id - 1, id);
      }
      terminal[k] = id;
    }
  }
  const int first_alignment = static_cast<int>(out.nodes.size());
  for (int m = 0; m < num_groups; ++m) out.nodes.push_back({NodeClass::alignment, m});
  for (int k = 0; k < K; ++k) out.edges.emplace_back(terminal[k], first_alignment + streams[k].group);
  const int first_head = static_cast<int>(out.nodes.size());
  for (int h = 0; h < head_len; ++h) {
    out.nodes.push_back({NodeClass::head, -1});
    if (h > 0) out.edges.emplace_back(first_head + h - 1, first_head + h);
  }
  for (int m = 0; m < num_groups; ++m) out.edges.emplace_back(first_alignment + m, first_head);
  std::sort(out.edges.begin(), out.edges.end());
  return out;
}

Instance generate_instance(const ScenarioConfig& cfg, std::uint64_t seed) {
  validate_config(cfg);
  const int K = static_cast<int>(cfg.payloads_kb.size());
  const int M = static_cast<int>(cfg.groups.size());

  std::vector<StreamSpec> streams(K);
  for (int k = 0; k < K; ++k) {
    streams[k].payload_bits = cfg.payloads_kb[k] * kBitsPerKilobyte;
    streams[k].branch_length = cfg.branch_lengths[k];
  }
  for (int m = 0; m < M; ++m) {
    for (int id : cfg.groups[m]) streams[id - 1].group = m;
  }

  const auto& radio = cfg.radio;
  const int T = radio.horizon_slots;
  const int F = radio.num_subcarriers;
  // Each (k, t, f) draw is keyed by its coordinates, so traces with fewer
  // subcarriers or a shorter horizon are sub-arrays of larger ones.
  std::vector<double> db(static_cast<std::size_t>(K) * T * F);
  for (int k = 0; k < K; ++k) {
    for (int t = 0; t < T; ++t) {
      for (int f = 0; f < F; ++f) {
        const int fkey = cfg.sinr_mode == SinrMode::per_rb ? f : 0;
        db[(static_cast<std::size_t>(k) * T + t) * F + f] =
            counter_uniform(seed, "sinr", k, t, fkey, cfg.sinr_db.lo, cfg.sinr_db.hi);
      }
    }
  }

  DagLayout layout = build_fusion_dag(streams, M, cfg.head_len);
  std::vector<int> position(K, 0);
  int head_pos = 0;
  for (auto& nd : layout.nodes) {
    std::string_view label;
    std::uint64_t a = 0;
    std::uint64_t b = 0;
    switch (nd.cls) {
      case NodeClass::branch:
        label = "node.branch";
        a = nd.owner;
        b = position[nd.owner]++;
        break;
      case NodeClass::alignment:
        label = "node.alignment";
        a = nd.owner;
        break;
      case NodeClass::head:
        label = "node.head";
        b = head_pos++;
        break;
    }
    auto draw = [&](std::uint64_t field, const Range& r) {
      return counter_uniform(seed, label, a, b, field, r.lo, r.hi) / 1000.0;
    };
    nd.compute_s = draw(0, cfg.compute_ms);
    nd.read_on_s = draw(1, cfg.on_chip_ms);
    nd.write_on_s = draw(2, cfg.on_chip_ms);
    nd.read_off_s = draw(3, cfg.off_chip_ms);
    nd.write_off_s = draw(4, cfg.off_chip_ms);
  }

  return Instance(radio, SinrTrace(K, T, F, std::move(db)), std::move(streams),
                  DagGraph(std::move(layout.nodes), std::move(layout.edges),
                           std::move(layout.entries)),
                  cfg.cores, cfg.lambda);
}

// ---------------------------------------------------------------------------
// JSON

json parse_json_text(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    std::size_t col = 1;
    const std::size_t stop = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError(source + ":" + std::to_string(line) + ":" + std::to_string(col) +
                      ": parse error: " + e.what());
  }
}

namespace {

class Section {
 public:
  Section(const json& doc, std::string name, bool required = true) : name_(std::move(name)) {
    auto it = doc.find(name_);
    if (it == doc.end()) {
      if (required) fail(name_ + ": missing required section");
      return;
    }
    if (!it->is_object()) fail(name_ + ": must be an object");
    obj_ = &*it;
  }

  bool present() const { return obj_ != nullptr; }
  bool has(const char* key) const { return obj_ && obj_->contains(key); }

  const json& at(const char* key) const {
    if (!has(key)) fail(name_ + "." + key + ": missing required field");
    return (*obj_)[key];
  }

  double number(const char* key) const {
    const json& v = at(key);
    if (!v.is_number()) fail(name_ + "." + key + ": must be a number");
    return v.get<double>();
  }

  int integer(const char* key) const {
    const json& v = at(key);
    if (!v.is_number_integer()) fail(name_ + "." + key + ": must be an integer");
    return v.get<int>();
  }

  Range range(const char* key) const {
    const json& v = at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
      fail(name_ + "." + key + ": must be a [low, high] pair");
    return {v[0].get<double>(), v[1].get<double>()};
  }

  template <typename T>
  std::vector<T> list(const char* key) const {
    const json& v = at(key);
    if (!v.is_array()) fail(name_ + "." + key + ": must be an array");
    try {
      return v.get<std::vector<T>>();
    } catch (const json::exception&) {
      fail(name_ + "." + key + ": has elements of the wrong type");
    }
  }

  void reject_unknown(std::initializer_list<std::string_view> known) const {
    if (!obj_) return;
    for (const auto& [key, value] : obj_->items()) {
      if (std::find(known.begin(), known.end(), key) == known.end())
        fail(name_ + "." + key + ": unknown field");
    }
  }

 private:
  std::string name_;
  const json* obj_ = nullptr;
};

RadioParams radio_from(const Section& s) {
  s.reject_unknown({"F", "rb_bandwidth_hz", "slot_ms", "horizon_slots", "sinr_threshold_db",
                    "shannon_gap", "eta_max"});
  RadioParams r;
  r.num_subcarriers = s.integer("F");
  r.rb_bandwidth_hz = s.number("rb_bandwidth_hz");
  r.slot_s = s.number("slot_ms") / 1000.0;
  r.horizon_slots = s.integer("horizon_slots");
  r.sinr_threshold_db = s.number("sinr_threshold_db");
  r.shannon_gap = s.number("shannon_gap");
  r.eta_max = s.number("eta_max");
  return r;
}

json radio_to(const RadioParams& r) {
  return json{{"F", r.num_subcarriers},
              {"rb_bandwidth_hz", r.rb_bandwidth_hz},
              {"slot_ms", r.slot_s * 1000.0},
              {"horizon_slots", r.horizon_slots},
              {"sinr_threshold_db", r.sinr_threshold_db},
              {"shannon_gap", r.shannon_gap},
              {"eta_max", r.eta_max}};
}

void reject_unknown_top(const json& doc, std::initializer_list<std::string_view> known) {
  for (const auto& [key, value] : doc.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) fail(key + ": unknown section");
  }
}

}  // namespace

ScenarioConfig config_from_json(const json& doc) {
  if (!doc.is_object()) fail("config: top level must be an object");
  reject_unknown_top(doc, {"name", "seed", "radio", "streams", "dag", "compute", "objective",
                           "sinr", "ga"});
  ScenarioConfig cfg;
  cfg.radio = radio_from(Section(doc, "radio"));

  Section streams(doc, "streams");
  streams.reject_unknown({"payloads_kb", "groups", "branch_lengths"});
  cfg.payloads_kb = streams.list<double>("payloads_kb");
  cfg.groups = streams.list<std::vector<int>>("groups");
  cfg.branch_lengths = streams.list<int>("branch_lengths");

  Section dag(doc, "dag", false);
  dag.reject_unknown({"head_len"});
  if (dag.has("head_len")) cfg.head_len = dag.integer("head_len");

  Section compute(doc, "compute");
  compute.reject_unknown({"cores", "p_range_ms", "on_chip_range_ms", "off_chip_range_ms"});
  cfg.cores = compute.integer("cores");
  cfg.compute_ms = compute.range("p_range_ms");
  cfg.on_chip_ms = compute.range("on_chip_range_ms");
  cfg.off_chip_ms = compute.range("off_chip_range_ms");

  Section objective(doc, "objective");
  objective.reject_unknown({"lambda"});
  cfg.lambda = objective.number("lambda");

  Section sinr(doc, "sinr");
  sinr.reject_unknown({"range_db", "mode"});
  cfg.sinr_db = sinr.range("range_db");
  if (sinr.has("mode")) {
    const json& m = sinr.at("mode");
    const std::string mode = m.is_string() ? m.get<std::string>() : "";
    if (mode == "per_rb") {
      cfg.sinr_mode = SinrMode::per_rb;
    } else if (mode == "per_slot") {
      cfg.sinr_mode = SinrMode::per_slot;
    } else {
      fail("sinr.mode: must be \"per_rb\" or \"per_slot\"");
    }
  }
  validate_config(cfg);
  return cfg;
}

json config_to_json(const ScenarioConfig& cfg) {
  auto range = [](const Range& r) { return json::array({r.lo, r.hi}); };
  return json{
      {"radio", radio_to(cfg.radio)},
      {"streams",
       {{"payloads_kb", cfg.payloads_kb},
        {"groups", cfg.groups},
        {"branch_lengths", cfg.branch_lengths}}},
      {"dag", {{"head_len", cfg.head_len}}},
      {"compute",
       {{"cores", cfg.cores},
        {"p_range_ms", range(cfg.compute_ms)},
        {"on_chip_range_ms", range(cfg.on_chip_ms)},
        {"off_chip_range_ms", range(cfg.off_chip_ms)}}},
      {"objective", {{"lambda", cfg.lambda}}},
      {"sinr",
       {{"range_db", range(cfg.sinr_db)},
        {"mode", cfg.sinr_mode == SinrMode::per_rb ? "per_rb" : "per_slot"}}},
  };
}

namespace {
std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string() + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}
}  // namespace

ScenarioConfig load_config(const std::filesystem::path& path) {
  return config_from_json(parse_json_text(read_text(path), path.string()));
}

json instance_to_json(const Instance& inst) {
  json streams = json::array();
  for (const auto& s : inst.streams()) {
    streams.push_back(
        {{"payload_bits", s.payload_bits}, {"group", s.group}, {"branch_length", s.branch_length}});
  }
  json nodes = json::array();
  for (const auto& nd : inst.dag().nodes()) {
    nodes.push_back({{"class", node_class_name(nd.cls)},
                     {"owner", nd.owner},
                     {"compute_s", nd.compute_s},
                     {"read_on_s", nd.read_on_s},
                     {"write_on_s", nd.write_on_s},
                     {"read_off_s", nd.read_off_s},
                     {"write_off_s", nd.write_off_s}});
  }
  json edges = json::array();
  for (const auto& [u, v] : inst.dag().edges()) edges.push_back({u, v});
  json radio = radio_to(inst.radio());
  radio.erase("slot_ms");
  radio["slot_s"] = inst.radio().slot_s;
  return json{{"format", kInstanceFormat},
              {"radio", radio},
              {"streams", streams},
              {"num_cores", inst.num_cores()},
              {"sync_weight", inst.sync_weight()},
              {"dag", {{"nodes", nodes}, {"edges", edges}, {"entries", inst.dag().entries()}}},
              {"sinr_db", inst.trace().values()}};
}

Instance instance_from_json(const json& doc) {
  if (!doc.is_object()) fail("instance: top level must be an object");
  if (!doc.contains("format") || doc["format"] != kInstanceFormat)
    fail("format: expected \"" + std::string(kInstanceFormat) + "\"");
  Section radio_sec(doc, "radio");
  radio_sec.reject_unknown({"F", "rb_bandwidth_hz", "slot_s", "horizon_slots",
                            "sinr_threshold_db", "shannon_gap", "eta_max"});
  RadioParams radio;
  radio.num_subcarriers = radio_sec.integer("F");
  radio.rb_bandwidth_hz = radio_sec.number("rb_bandwidth_hz");
  radio.slot_s = radio_sec.number("slot_s");
  radio.horizon_slots = radio_sec.integer("horizon_slots");
  radio.sinr_threshold_db = radio_sec.number("sinr_threshold_db");
  radio.shannon_gap = radio_sec.number("shannon_gap");
  radio.eta_max = radio_sec.number("eta_max");
  check_radio(radio);

  if (!doc.contains("streams") || !doc["streams"].is_array()) fail("streams: missing array");
  std::vector<StreamSpec> streams;
  for (const auto& s : doc["streams"]) {
    if (!s.is_object()) fail("streams: entries must be objects");
    try {
      streams.push_back({s.at("payload_bits").get<double>(), s.at("group").get<int>(),
                         s.at("branch_length").get<int>()});
    } catch (const json::exception&) {
      fail("streams: each entry needs payload_bits, group and branch_length");
    }
  }

  Section dag_sec(doc, "dag");
  std::vector<NodeSpec> nodes;
  for (const auto& n : dag_sec.at("nodes")) {
    try {
      NodeSpec nd;
      nd.cls = parse_node_class(n.at("class").get<std::string>());
      nd.owner = n.at("owner").get<int>();
      nd.compute_s = n.at("compute_s").get<double>();
      nd.read_on_s = n.at("read_on_s").get<double>();
      nd.write_on_s = n.at("write_on_s").get<double>();
      nd.read_off_s = n.at("read_off_s").get<double>();
      nd.write_off_s = n.at("write_off_s").get<double>();
      nodes.push_back(nd);
    } catch (const json::exception&) {
      fail("dag.nodes: each node needs class, owner and five timing fields");
    }
  }
  std::vector<Edge> edges;
  for (const auto& e : dag_sec.at("edges")) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer())
      fail("dag.edges: each edge must be a [u, v] pair of node ids");
    edges.emplace_back(e[0].get<int>(), e[1].get<int>());
  }
  const auto entries = dag_sec.list<int>("entries");

  if (!doc.contains("num_cores") || !doc["num_cores"].is_number_integer())
    fail("num_cores: missing required field");
  if (!doc.contains("sync_weight") || !doc["sync_weight"].is_number())
    fail("sync_weight: missing required field");
  if (!doc.contains("sinr_db") || !doc["sinr_db"].is_array()) fail("sinr_db: missing array");

  std::vector<double> db;
  try {
    db = doc["sinr_db"].get<std::vector<double>>();
  } catch (const json::exception&) {
    fail("sinr_db: values must be numbers");
  }
  const int K = static_cast<int>(streams.size());
  if (K < 1) fail("streams: at least one stream is required");
  return Instance(radio, SinrTrace(K, radio.horizon_slots, radio.num_subcarriers, std::move(db)),
                  std::move(streams), DagGraph(std::move(nodes), std::move(edges), entries),
                  doc["num_cores"].get<int>(), doc["sync_weight"].get<double>());
}

std::string serialize_instance(const Instance& inst) { return instance_to_json(inst).dump(1); }

Instance load_instance(const std::filesystem::path& path,
                       std::optional<std::uint64_t> seed_override) {
  const json doc = parse_json_text(read_text(path), path.string());
  if (doc.is_object() && doc.contains("format")) return instance_from_json(doc);
  const ScenarioConfig cfg = config_from_json(doc);
  std::uint64_t seed = 0;
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) fail("seed: must be a non-negative integer");
    seed = doc["seed"].get<std::uint64_t>();
  }
  return generate_instance(cfg, seed_override.value_or(seed));
}

}  // namespace uavsched
