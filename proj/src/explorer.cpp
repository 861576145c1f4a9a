#include "rover/explorer.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <thread>
#include <unordered_map>

#include "rover/monitor.hpp"

namespace rover {

std::string Successor::label() const {
  if (choices.empty()) return "step";
  std::string s;
  for (const auto& c : choices) {
    if (!s.empty()) s += ",";
    s += c.label + "=" + std::to_string(c.index);
  }
  return s;
}

std::vector<Successor> enumerate_successors(const System& s) {
  std::vector<Successor> out;
  std::vector<std::vector<std::size_t>> todo{{}};
  while (!todo.empty()) {
    auto script = std::move(todo.back());
    todo.pop_back();
    Successor succ{{}, {}, s, {}};
    ScriptedChooser chooser(script);
    succ.state.step(chooser);
    succ.events = succ.state.take_events();
    succ.state.take_explanations();
    for (const auto& c : chooser.taken()) {
      if (c.options > 1) succ.choices.push_back(c);
    }
    for (const auto& c : succ.choices) succ.script.push_back(c.index);
    // Branch on every point the script left at its default.
    for (std::size_t i = script.size(); i < succ.choices.size(); ++i) {
      for (std::size_t o = 1; o < succ.choices[i].options; ++o) {
        std::vector<std::size_t> alt(succ.script.begin(), succ.script.begin() + static_cast<std::ptrdiff_t>(i));
        alt.push_back(o);
        todo.push_back(std::move(alt));
      }
    }
    out.push_back(std::move(succ));
  }
  std::sort(out.begin(), out.end(), [](const Successor& a, const Successor& b) { return a.script < b.script; });
  return out;
}

namespace {

bool temporal_free(const Formula& f) {
  switch (f->op) {
    case Op::Always:
    case Op::Never:
    case Op::Eventually:
    case Op::Within:
    case Op::By:
    case Op::Until:
    case Op::Precedes: return false;
    default: break;
  }
  return std::all_of(f->kids.begin(), f->kids.end(), temporal_free);
}

bool response_parts(const Formula& f, Formula* p, Formula* q) {
  if (f->op != Op::Always) return false;
  const auto& imp = f->kids[0];
  if (imp->op != Op::Implies || imp->kids[1]->op != Op::Eventually) return false;
  const auto& trig = imp->kids[0];
  const auto& goal = imp->kids[1]->kids[0];
  if (!temporal_free(trig) || !temporal_free(goal)) return false;
  if (p) *p = trig;
  if (q) *q = goal;
  return true;
}

bool holds_now(const Formula& f, const Json& e, const EvalContext& ctx) {
  return progress(f, e, ctx)->op == Op::True;
}

struct Key {
  std::uint64_t a{0};
  std::uint64_t b{0};
  friend bool operator==(const Key&, const Key&) = default;
};

struct KeyHash {
  std::size_t operator()(const Key& k) const noexcept { return static_cast<std::size_t>(k.a ^ (k.b * 0x9e3779b97f4a7c15ULL)); }
};

// 128-bit fingerprint of a canonical state string.
Key fingerprint(const std::string& s) {
  std::uint64_t fnv = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    fnv ^= c;
    fnv *= 0x100000001b3ULL;
  }
  return {static_cast<std::uint64_t>(std::hash<std::string>{}(s)), fnv};
}

struct SysEdge {
  std::uint32_t to{0};
  std::uint32_t succ{0};
  std::uint64_t pmask{0};
  std::uint64_t qmask{0};
};

struct PNode {
  System sys;
  std::vector<Formula> residuals;
  EvalContext ctx;
  std::uint32_t id{0};
  std::uint32_t sys_id{0};
};

struct Expanded {
  std::uint32_t succ{0};
  System sys;
  std::vector<Formula> residuals;
  EvalContext ctx;
  std::string sys_text;
  Key sys_key;
  Key prod_key;
  std::uint64_t pmask{0};
  std::uint64_t qmask{0};
  std::vector<std::size_t> violated;  // safety indices falsified on this transition
};

struct ResponseProp {
  std::size_t index;
  Formula p;
  Formula q;
};

std::vector<Expanded> expand(const PNode& node, const std::vector<ResponseProp>& responses) {
  std::vector<Expanded> out;
  auto succs = enumerate_successors(node.sys);
  out.reserve(succs.size());
  for (std::uint32_t i = 0; i < succs.size(); ++i) {
    auto& s = succs[i];
    Expanded x{i, std::move(s.state), node.residuals, node.ctx, {}, {}, {}, 0, 0, {}};
    std::vector<std::uint64_t> pm(s.events.size(), 0);
    std::vector<std::uint64_t> qm(s.events.size(), 0);
    for (std::size_t k = 0; k < s.events.size(); ++k) {
      const auto& e = s.events[k];
      x.ctx.observe(e);
      for (std::size_t r = 0; r < x.residuals.size(); ++r) {
        auto& res = x.residuals[r];
        if (res->op == Op::True) continue;
        res = progress(res, e, x.ctx);
        if (res->op == Op::False) {
          x.violated.push_back(r);
          res = make_const(true);
        }
      }
      for (std::size_t r = 0; r < responses.size(); ++r) {
        if (holds_now(responses[r].p, e, x.ctx)) pm[k] |= 1ULL << r;
        if (holds_now(responses[r].q, e, x.ctx)) qm[k] |= 1ULL << r;
      }
    }
    std::uint64_t q_after = 0;
    for (std::size_t k = s.events.size(); k-- > 0;) {
      q_after |= qm[k];
      x.pmask |= pm[k] & ~q_after;
      x.qmask |= qm[k];
    }
    x.sys_text = x.sys.canonical().dump();
    x.sys_key = fingerprint(x.sys_text);
    std::string prod_text = x.sys_text;
    for (const auto& res : x.residuals) {
      prod_text += '\n';
      prod_text += relative_text(res, x.sys.tick());
    }
    x.prod_key = fingerprint(prod_text);
    out.push_back(std::move(x));
  }
  return out;
}

std::vector<CexStep> rebuild_path(const ScenarioConfig& cfg, const std::vector<std::uint32_t>& succ_path) {
  System sys(std::make_shared<const ScenarioConfig>(cfg), true);
  std::vector<CexStep> steps;
  for (auto idx : succ_path) {
    auto succs = enumerate_successors(sys);
    auto& s = succs.at(idx);
    steps.push_back({s.script, s.choices, s.events});
    sys = std::move(s.state);
  }
  return steps;
}

// Nested depth-first search over (system state, obligation state) for an
// accepting cycle; obligation state 1 ("waiting for Q") is accepting.
std::optional<std::pair<std::vector<std::uint32_t>, std::size_t>> find_lasso(
    const std::vector<std::vector<SysEdge>>& graph, std::size_t r) {
  const std::uint64_t bit = 1ULL << r;
  const auto n = static_cast<std::uint32_t>(graph.size());
  if (n == 0) return std::nullopt;
  using PV = std::uint32_t;  // product vertex = sys * 2 + q
  const auto succs = [&](PV v) {
    std::vector<std::pair<PV, std::uint32_t>> out;  // (target, succ index of the system edge)
    const auto s = v / 2;
    const bool waiting = (v % 2) == 1;
    for (const auto& e : graph[s]) {
      if (!waiting) {
        out.emplace_back(e.to * 2, e.succ);
        if (e.pmask & bit) out.emplace_back(e.to * 2 + 1, e.succ);
      } else if (!(e.qmask & bit)) {
        out.emplace_back(e.to * 2 + 1, e.succ);
      }
    }
    return out;
  };
  const auto accepting = [](PV v) { return (v % 2) == 1; };

  enum Color : std::uint8_t { White, Cyan, Blue };
  std::vector<std::uint8_t> color(static_cast<std::size_t>(n) * 2, White);
  std::vector<std::uint8_t> red(static_cast<std::size_t>(n) * 2, 0);
  std::vector<std::int64_t> pos(static_cast<std::size_t>(n) * 2, -1);

  struct Frame {
    PV v;
    std::uint32_t via;  // succ index of the edge that led here
    std::vector<std::pair<PV, std::uint32_t>> next;
    std::size_t i{0};
  };
  std::vector<Frame> blue;
  const auto path_to_top = [&]() {
    std::vector<std::uint32_t> p;
    for (std::size_t k = 1; k < blue.size(); ++k) p.push_back(blue[k].via);
    return p;
  };

  blue.push_back({0, 0, succs(0), 0});
  color[0] = Cyan;
  pos[0] = 0;
  while (!blue.empty()) {
    Frame& f = blue.back();
    if (f.i < f.next.size()) {
      const auto [t, via] = f.next[f.i++];
      if (color[t] == Cyan && (accepting(f.v) || accepting(t))) {
        auto p = path_to_top();
        p.push_back(via);
        return std::make_pair(p, static_cast<std::size_t>(pos[t]));
      }
      if (color[t] == White) {
        color[t] = Cyan;
        pos[t] = static_cast<std::int64_t>(blue.size());
        blue.push_back({t, via, succs(t), 0});
      }
      continue;
    }
    if (accepting(f.v)) {
      // Red search from the seed: reaching any cyan vertex closes a cycle.
      struct RFrame {
        PV v;
        std::uint32_t via;
        std::vector<std::pair<PV, std::uint32_t>> next;
        std::size_t i{0};
      };
      std::vector<RFrame> rs;
      rs.push_back({f.v, 0, succs(f.v), 0});
      while (!rs.empty()) {
        RFrame& rf = rs.back();
        if (rf.i >= rf.next.size()) {
          rs.pop_back();
          continue;
        }
        const auto [t, via] = rf.next[rf.i++];
        if (color[t] == Cyan) {
          auto p = path_to_top();
          for (std::size_t k = 1; k < rs.size(); ++k) p.push_back(rs[k].via);
          p.push_back(via);
          return std::make_pair(p, static_cast<std::size_t>(pos[t]));
        }
        if (!red[t]) {
          red[t] = 1;
          rs.push_back({t, via, succs(t), 0});
        }
      }
    }
    color[f.v] = Blue;
    pos[f.v] = -1;
    blue.pop_back();
  }
  return std::nullopt;
}

}  // namespace

PropertyClass classify_property(const Formula& f) {
  if (runtime_legal(f)) return PropertyClass::Safety;
  if (response_parts(f, nullptr, nullptr)) return PropertyClass::Response;
  return PropertyClass::Unsupported;
}

std::string_view to_string(CheckOutcome o) {
  switch (o) {
    case CheckOutcome::Holds: return "Holds";
    case CheckOutcome::Violated: return "Violated";
    case CheckOutcome::BudgetExceeded: return "BudgetExceeded";
    case CheckOutcome::Unsupported: return "Unsupported";
  }
  return "Unsupported";
}

ExplorationReport explore(const ScenarioConfig& cfg, const std::vector<PropertySpec>& props,
                          const ExplorerOptions& opts) {
  const auto started = std::chrono::steady_clock::now();
  const auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  };
  ExplorationReport report;
  report.workers = std::max(1u, opts.workers);

  std::vector<std::size_t> safety;  // indices into props
  std::vector<ResponseProp> responses;
  report.results.resize(props.size());
  for (std::size_t i = 0; i < props.size(); ++i) {
    auto& r = report.results[i];
    r.prop = props[i].name;
    r.cls = classify_property(props[i].formula);
    if (r.cls == PropertyClass::Safety) {
      safety.push_back(i);
    } else if (r.cls == PropertyClass::Response && responses.size() < 64) {
      Formula p;
      Formula q;
      response_parts(props[i].formula, &p, &q);
      responses.push_back({i, p, q});
    } else {
      r.cls = PropertyClass::Unsupported;
      r.outcome = CheckOutcome::Unsupported;
      r.note = "only safety, bounded and always (P => eventually Q) properties can be explored";
    }
  }

  auto shared_cfg = std::make_shared<const ScenarioConfig>(cfg);
  std::unordered_map<Key, std::uint32_t, KeyHash> sys_ids;
  std::unordered_map<Key, std::uint32_t, KeyHash> prod_ids;
  std::vector<std::vector<SysEdge>> graph;
  std::vector<std::uint8_t> expanded_sys;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> parent;  // product id -> (parent id, succ index)

  struct Found {
    std::uint32_t from;
    std::uint32_t succ;
  };
  std::vector<std::optional<Found>> found(safety.size());

  PNode root{System(shared_cfg, true), {}, {}, 0, 0};
  for (auto i : safety) root.residuals.push_back(props[i].formula);
  {
    const std::string text = root.sys.canonical().dump();
    std::string prod_text = text;
    for (const auto& r : root.residuals) prod_text += '\n' + relative_text(r, 0);
    sys_ids.emplace(fingerprint(text), 0);
    prod_ids.emplace(fingerprint(prod_text), 0);
    graph.emplace_back();
    expanded_sys.push_back(0);
    parent.emplace_back(0, 0);
  }

  std::vector<PNode> frontier;
  frontier.push_back(std::move(root));
  while (!frontier.empty()) {
    if (prod_ids.size() > opts.max_states || elapsed() > opts.max_seconds) {
      report.budget_exceeded = true;
      break;
    }
    std::vector<std::vector<Expanded>> results(frontier.size());
    const unsigned workers = std::min<unsigned>(report.workers, static_cast<unsigned>(frontier.size()));
    if (workers <= 1) {
      for (std::size_t i = 0; i < frontier.size(); ++i) results[i] = expand(frontier[i], responses);
    } else {
      std::vector<std::thread> pool;
      std::vector<std::exception_ptr> errors(workers);
      for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
          try {
            for (std::size_t i = w; i < frontier.size(); i += workers) results[i] = expand(frontier[i], responses);
          } catch (...) {
            errors[w] = std::current_exception();
          }
        });
      }
      for (auto& t : pool) t.join();
      for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
      }
    }

    // Deterministic merge in frontier order, independent of the worker count.
    std::vector<PNode> next;
    for (std::size_t i = 0; i < frontier.size(); ++i) {
      const auto& from = frontier[i];
      const bool record_edges = !expanded_sys[from.sys_id];
      expanded_sys[from.sys_id] = 1;
      for (auto& x : results[i]) {
        ++report.transitions;
        auto [sit, sys_new] = sys_ids.emplace(x.sys_key, static_cast<std::uint32_t>(graph.size()));
        if (sys_new) {
          graph.emplace_back();
          expanded_sys.push_back(0);
        }
        if (record_edges) graph[from.sys_id].push_back({sit->second, x.succ, x.pmask, x.qmask});
        for (auto r : x.violated) {
          if (!found[r]) found[r] = Found{from.id, x.succ};
        }
        // Decided properties stop contributing to the product state.
        bool rekey = false;
        for (std::size_t r = 0; r < safety.size(); ++r) {
          if (found[r] && x.residuals[r]->op != Op::True) {
            x.residuals[r] = make_const(true);
            rekey = true;
          }
        }
        if (rekey) {
          std::string prod_text = std::move(x.sys_text);
          for (const auto& res : x.residuals) prod_text += '\n' + relative_text(res, x.sys.tick());
          x.prod_key = fingerprint(prod_text);
        }
        auto [pit, prod_new] = prod_ids.emplace(x.prod_key, static_cast<std::uint32_t>(parent.size()));
        if (!prod_new) continue;
        parent.emplace_back(from.id, x.succ);
        next.push_back({std::move(x.sys), std::move(x.residuals), std::move(x.ctx), pit->second, sit->second});
      }
    }
    frontier = std::move(next);
  }

  report.product_states = prod_ids.size();
  report.system_states = graph.size();

  const Json cfg_json = cfg.to_json();
  for (std::size_t r = 0; r < safety.size(); ++r) {
    auto& res = report.results[safety[r]];
    if (found[r]) {
      std::vector<std::uint32_t> path{found[r]->succ};
      for (auto id = found[r]->from; id != 0; id = parent[id].first) path.push_back(parent[id].second);
      std::reverse(path.begin(), path.end());
      res.outcome = CheckOutcome::Violated;
      res.counterexample = Counterexample{res.prop, print(props[safety[r]].formula), "safety", 0, cfg_json,
                                          rebuild_path(cfg, path)};
    } else {
      res.outcome = report.budget_exceeded ? CheckOutcome::BudgetExceeded : CheckOutcome::Holds;
    }
  }
  for (std::size_t r = 0; r < responses.size(); ++r) {
    auto& res = report.results[responses[r].index];
    if (report.budget_exceeded) {
      res.outcome = CheckOutcome::BudgetExceeded;
      continue;
    }
    if (auto lasso = find_lasso(graph, r)) {
      res.outcome = CheckOutcome::Violated;
      res.counterexample = Counterexample{res.prop, print(props[responses[r].index].formula), "lasso",
                                          lasso->second, cfg_json, rebuild_path(cfg, lasso->first)};
    } else {
      res.outcome = CheckOutcome::Holds;
    }
  }
  report.seconds = elapsed();
  return report;
}

Json ExplorationReport::to_json(const ScenarioConfig& cfg) const {
  Json props = Json::array();
  for (const auto& r : results) {
    Json p{{"name", r.prop},
           {"class", r.cls == PropertyClass::Safety     ? "safety"
                     : r.cls == PropertyClass::Response ? "response"
                                                        : "unsupported"},
           {"verdict", rover::to_string(r.outcome)}};
    if (!r.note.empty()) p["note"] = r.note;
    if (r.counterexample) {
      p["counterexample_kind"] = r.counterexample->kind;
      p["counterexample_steps"] = r.counterexample->steps.size();
    }
    props.push_back(std::move(p));
  }
  return {{"properties", std::move(props)},
          {"states", product_states},
          {"system_states", system_states},
          {"transitions", transitions},
          {"seconds", seconds},
          {"workers", workers},
          {"budget_exceeded", budget_exceeded},
          {"assumptions",
           {{{"name", "radiation decay"},
             {"requirement", "decay rate >= 1 (needed for the response properties to be provable)"},
             {"configured_rate", cfg.decay_rate},
             {"met", cfg.decay_rate >= 1}}}}};
}

CheckResult check_property(const ScenarioConfig& cfg, const PropertySpec& prop, const ExplorerOptions& opts) {
  auto report = explore(cfg, {prop}, opts);
  return report.results.at(0);
}

CheckResult check_invariant(const ScenarioConfig& cfg, const std::string& name, const Formula& predicate,
                            const ExplorerOptions& opts) {
  if (!temporal_free(predicate)) throw Error("InvalidProperty", name + ": invariant must be a state predicate");
  return check_property(cfg, {name, make_node(Op::Always, {predicate}), 0}, opts);
}

CheckResult check_response(const ScenarioConfig& cfg, const std::string& name, const Formula& trigger,
                           const Formula& goal, const ExplorerOptions& opts) {
  const auto f = make_node(Op::Always, {make_node(Op::Implies, {trigger, make_node(Op::Eventually, {goal})})});
  return check_property(cfg, {name, f, 0}, opts);
}

CheckResult check_sequence(const ScenarioConfig& cfg, const std::string& name, const std::vector<Formula>& pattern,
                           const ExplorerOptions& opts) {
  if (pattern.empty()) throw Error("InvalidProperty", name + ": empty sequence");
  std::vector<Formula> links;
  for (std::size_t i = 0; i + 1 < pattern.size(); ++i) {
    links.push_back(make_node(Op::Precedes, {pattern[i], pattern[i + 1]}));
  }
  const Formula f = links.empty() ? make_const(true) : links.size() == 1 ? links[0] : make_node(Op::And, links);
  return check_property(cfg, {name, f, 0}, opts);
}

void write_counterexample(const std::string& path, const Counterexample& cex) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("IOError", "cannot write " + path);
  Json head{{"kind", "counterexample"}, {"prop", cex.prop},   {"formula", cex.formula},
            {"type", cex.kind},         {"loop_start", cex.loop_start}, {"steps", cex.steps.size()},
            {"config", cex.config}};
  out << head.dump() << '\n';
  for (std::size_t i = 0; i < cex.steps.size(); ++i) {
    const auto& s = cex.steps[i];
    Json choices = Json::array();
    for (const auto& c : s.choices) choices.push_back({{"label", c.label}, {"index", c.index}, {"options", c.options}});
    out << Json{{"step", i}, {"script", s.script}, {"choices", choices}, {"events", s.events}}.dump() << '\n';
  }
}

Counterexample read_counterexample(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("MalformedTrace", "cannot read " + path);
  std::string line;
  std::size_t line_no = 0;
  Counterexample cex;
  try {
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      const Json j = Json::parse(line);
      if (line_no == 1) {
        if (j.value("kind", std::string()) != "counterexample") throw Error("MalformedTrace", "line 1: not a counterexample header");
        cex.prop = j.at("prop").get<std::string>();
        cex.formula = j.at("formula").get<std::string>();
        cex.kind = j.at("type").get<std::string>();
        cex.loop_start = j.at("loop_start").get<std::size_t>();
        cex.config = j.at("config");
        continue;
      }
      CexStep s;
      s.script = j.at("script").get<std::vector<std::size_t>>();
      for (const auto& c : j.at("choices")) {
        s.choices.push_back({c.at("label").get<std::string>(), c.at("index").get<std::size_t>(),
                             c.at("options").get<std::size_t>()});
      }
      for (const auto& e : j.at("events")) s.events.push_back(e);
      cex.steps.push_back(std::move(s));
    }
  } catch (const Json::exception& e) {
    throw Error("MalformedTrace", "line " + std::to_string(line_no) + ": " + e.what());
  }
  if (line_no == 0) throw Error("MalformedTrace", path + " is empty");
  return cex;
}

ReplayResult replay(const Counterexample& cex) {
  ReplayResult out;
  const auto cfg = std::make_shared<const ScenarioConfig>(ScenarioConfig::from_json(cex.config));
  const Formula f = parse_formula(cex.formula);
  System sys(cfg, true);
  std::vector<std::string> canon;  // canonical state after each step (index 0 = initial)
  canon.push_back(sys.canonical().dump());
  std::vector<std::size_t> step_start;
  for (std::size_t i = 0; i < cex.steps.size(); ++i) {
    const auto& st = cex.steps[i];
    ScriptedChooser chooser(st.script);
    sys.step(chooser);
    auto events = sys.take_events();
    sys.take_explanations();
    std::vector<ChoiceTaken> taken;
    for (const auto& c : chooser.taken()) {
      if (c.options > 1) taken.push_back(c);
    }
    if (chooser.diverged() || taken != st.choices || events != st.events) {
      out.diverged = true;
      out.detail = "step " + std::to_string(i) + " does not match the recorded run";
      return out;
    }
    step_start.push_back(out.trace.size());
    for (auto& e : events) out.trace.push_back(std::move(e));
    canon.push_back(sys.canonical().dump());
  }

  if (cex.kind == "safety") {
    Progression p(f);
    for (std::size_t i = 0; i < out.trace.size(); ++i) {
      if (auto v = p.step(out.trace[i], i)) {
        out.violation = v;
        break;
      }
    }
    out.reproduced = out.violation.has_value() && !step_start.empty() && out.violation->index >= step_start.back();
    out.detail = out.reproduced ? "violation reproduced in the final step" : "no violation in the final step";
    return out;
  }

  Formula p;
  Formula q;
  if (!response_parts(f, &p, &q)) {
    out.detail = "lasso counterexample for a property that is not a response property";
    return out;
  }
  if (cex.loop_start >= cex.steps.size() || canon[cex.loop_start] != canon.back()) {
    out.detail = "final state does not close the loop";
    return out;
  }
  EvalContext ctx;
  std::optional<std::size_t> last_p;
  std::optional<std::size_t> last_q;
  for (std::size_t i = 0; i < out.trace.size(); ++i) {
    ctx.observe(out.trace[i]);
    if (holds_now(q, out.trace[i], ctx)) last_q = i;
    if (holds_now(p, out.trace[i], ctx) && (!last_q || *last_q < i)) last_p = i;
  }
  const std::size_t loop_begin = step_start[cex.loop_start];
  const bool open = last_p && (!last_q || *last_q < *last_p);
  const bool quiet_loop = !last_q || *last_q < loop_begin;
  out.reproduced = open && quiet_loop;
  if (out.reproduced) {
    const auto& e = out.trace[*last_p];
    out.violation = Violation{*last_p, e.value("t", Tick{0}), e.value("seq", std::int64_t{-1}),
                              "eventually " + print(q)};
  }
  out.detail = out.reproduced ? "trigger stays unanswered around the loop" : "loop does not keep the obligation open";
  return out;
}

}  // namespace rover
