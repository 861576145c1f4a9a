#include "rover/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "rover/explorer.hpp"
#include "rover/monitor.hpp"
#include "rover/simulation.hpp"

namespace rover {
namespace {

struct Options {
  std::string config;
  Tick ticks{500};
  std::optional<std::uint64_t> seed;
  std::string trace;
  std::string explain;
  std::string props;
  std::string monitors;
  std::size_t budget_states{1'000'000};
  double budget_secs{60.0};
  std::string mutant;
  bool block_mode{false};
  std::string report;
  std::string cex_dir{"counterexamples"};
  std::string counterexample;
  unsigned workers{1};
};

std::string default_data(const std::string& rel) { return std::string(ROVER_DATA_DIR) + "/" + rel; }

ScenarioConfig load_config(const Options& o) {
  ScenarioConfig cfg = o.config.empty() ? ScenarioConfig::load(default_data("scenarios/default.json"))
                                        : ScenarioConfig::load(o.config);
  if (!o.mutant.empty()) cfg.mutant = mutant_from_string(o.mutant);
  return cfg;
}

std::string props_path(const Options& o, const ScenarioConfig& cfg) {
  if (!o.props.empty()) return o.props;
  if (!cfg.properties_path.empty()) return cfg.properties_path;
  return default_data("properties/rover.prop");
}

std::string monitors_path(const Options& o, const ScenarioConfig* cfg) {
  if (!o.monitors.empty()) return o.monitors;
  if (cfg && !cfg->monitors_path.empty()) return cfg->monitors_path;
  return default_data("monitors/default.json");
}

Json violation_json(const Violation& v) {
  return {{"index", v.index}, {"t", v.t}, {"seq", v.seq}, {"subformula", v.subformula}};
}

int cmd_simulate(const Options& o, std::ostream& out, std::ostream& err) {
  const auto cfg = load_config(o);
  const auto props = load_properties(props_path(o, cfg));
  auto monitors = build_monitors(load_monitor_config(monitors_path(o, &cfg)), props, Topology::rover_default(),
                                 o.block_mode);
  const auto result = simulate(cfg, o.ticks, std::move(monitors), o.seed);
  std::string explain = o.explain;
  if (!o.trace.empty()) {
    write_trace(o.trace, result.trace);
    if (explain.empty()) explain = o.trace + ".explain.jsonl";
  }
  if (!explain.empty()) write_trace(explain, result.explanations);

  Json route = Json::array();
  for (const auto& [t, wp] : visits(result.trace)) route.push_back({{"t", t}, {"waypoint", to_string(wp)}});
  out << Json{{"command", "simulate"},
              {"ticks", o.ticks},
              {"seed", result.seed},
              {"mutant", to_string(cfg.mutant)},
              {"events", result.trace.size()},
              {"trace", o.trace.empty() ? Json(nullptr) : Json(o.trace)},
              {"explanations", explain.empty() ? Json(nullptr) : Json(explain)},
              {"visits", route},
              {"monitors", result.monitors},
              {"violated", result.violated}}
             .dump()
      << '\n';
  err << "simulated " << o.ticks << " ticks, " << result.trace.size() << " events, seed " << result.seed << '\n';
  for (const auto& m : result.monitors) {
    err << "  monitor " << m["property"].get<std::string>() << ": " << m["status"].get<std::string>() << " ("
        << m["violations"].get<std::size_t>() << " violations)\n";
  }
  return result.violated ? kExitViolation : kExitOk;
}

int cmd_verify(const Options& o, std::ostream& out, std::ostream& err) {
  const auto cfg = load_config(o);
  const auto props = load_properties(props_path(o, cfg));
  ExplorerOptions eo;
  eo.max_states = o.budget_states;
  eo.max_seconds = o.budget_secs;
  eo.workers = o.workers;
  const auto report = explore(cfg, props, eo);
  Json j = report.to_json(cfg);
  j["command"] = "verify";
  j["mutant"] = to_string(cfg.mutant);

  bool violated = false;
  bool unsupported = false;
  for (std::size_t i = 0; i < report.results.size(); ++i) {
    const auto& r = report.results[i];
    auto& pj = j["properties"][i];
    if (r.outcome == CheckOutcome::Violated) violated = true;
    if (r.outcome == CheckOutcome::Unsupported) unsupported = true;
    if (!r.counterexample) continue;
    std::filesystem::create_directories(o.cex_dir);
    const std::string path = (std::filesystem::path(o.cex_dir) / (r.prop + ".cex.jsonl")).string();
    write_counterexample(path, *r.counterexample);
    pj["counterexample"] = path;
    const auto rep = replay(*r.counterexample);
    pj["replay"] = rep.reproduced ? "reproduced" : "diverged";
    if (rep.violation) pj["violation"] = violation_json(*rep.violation);
  }
  if (!o.report.empty()) {
    std::ofstream f(o.report, std::ios::trunc);
    if (!f) throw Error("IOError", "cannot write " + o.report);
    f << j.dump(2) << '\n';
  }
  out << j.dump() << '\n';

  err << "explored " << report.product_states << " states (" << report.system_states << " system states) in "
      << report.seconds << " s" << (report.budget_exceeded ? ", budget exceeded" : "") << '\n';
  if (cfg.decay_rate < 1) err << "  note: decay rate " << cfg.decay_rate << " < 1, response properties may fail\n";
  for (const auto& r : report.results) {
    err << "  " << to_string(r.outcome) << "  " << r.prop;
    if (r.counterexample) err << "  (" << r.counterexample->kind << ", " << r.counterexample->steps.size() << " steps)";
    err << '\n';
  }
  if (violated) return kExitViolation;
  if (report.budget_exceeded) return kExitBudget;
  if (unsupported) return kExitInput;
  return kExitOk;
}

bool same_violations(const std::vector<Json>& online, const std::vector<Violation>& offline) {
  if (online.size() != offline.size()) return false;
  for (std::size_t i = 0; i < online.size(); ++i) {
    if (online[i].value("seq", std::int64_t{-2}) != offline[i].seq || online[i].value("t", Tick{0}) != offline[i].t ||
        online[i].value("subformula", std::string()) != offline[i].subformula) {
      return false;
    }
  }
  return true;
}

int cmd_check(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.trace.empty()) throw Error("ConfigError", "check needs --trace");
  const auto trace = read_trace(o.trace);
  std::optional<ScenarioConfig> cfg;
  if (!o.config.empty()) cfg = load_config(o);
  const auto props = load_properties(cfg ? props_path(o, *cfg) : (o.props.empty() ? default_data("properties/rover.prop") : o.props));

  bool violated = false;
  Json verdicts = Json::array();
  for (const auto& p : props) {
    const auto v = evaluate(p, trace);
    if (v.status == VerdictStatus::Violated) violated = true;
    Json vj = v.to_json();
    vj["property"] = p.name;
    verdicts.push_back(std::move(vj));
    err << "  " << to_string(v.status) << "  " << p.name;
    if (!v.violations.empty()) err << "  first at t=" << v.violations[0].t << ": " << v.violations[0].subformula;
    err << '\n';
  }

  // Online verdicts recorded in the trace must match an offline re-run of the
  // same monitor over the events it watched.
  bool agree = true;
  Json monitors = Json::array();
  const auto mconfigs = load_monitor_config(monitors_path(o, cfg ? &*cfg : nullptr));
  const auto set = build_monitors(mconfigs, props, Topology::rover_default(), o.block_mode);
  for (const auto& m : set.monitors()) {
    const auto online = recorded_verdicts(trace, m.name());
    const auto offline = check_trace(m, trace);
    const bool ok = same_violations(online, offline.violations);
    agree = agree && ok;
    monitors.push_back({{"property", m.name()},
                        {"online_violations", online.size()},
                        {"offline", offline.to_json()},
                        {"agree", ok}});
    if (!ok) err << "  monitor " << m.name() << ": online and offline verdicts differ\n";
  }
  out << Json{{"command", "check"},
              {"trace", o.trace},
              {"events", trace.size()},
              {"properties", verdicts},
              {"monitors", monitors},
              {"agree", agree}}
             .dump()
      << '\n';
  err << "checked " << trace.size() << " events against " << props.size() << " properties\n";
  if (!agree) return kExitDivergence;
  return violated ? kExitViolation : kExitOk;
}

int cmd_replay(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.counterexample.empty()) throw Error("ConfigError", "replay needs --counterexample");
  const auto cex = read_counterexample(o.counterexample);
  const auto r = replay(cex);
  if (!o.trace.empty()) write_trace(o.trace, r.trace);
  out << Json{{"command", "replay"},
              {"property", cex.prop},
              {"kind", cex.kind},
              {"steps", cex.steps.size()},
              {"reproduced", r.reproduced},
              {"diverged", r.diverged},
              {"detail", r.detail},
              {"violation", r.violation ? violation_json(*r.violation) : Json(nullptr)}}
             .dump()
      << '\n';
  err << cex.prop << ": " << r.detail << '\n';
  return r.reproduced ? kExitViolation : kExitDivergence;
}

int cmd_schema(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.config.empty()) {
    out << ScenarioConfig::schema().dump(2) << '\n';
    return kExitOk;
  }
  const auto cfg = load_config(o);
  out << Json{{"command", "schema"}, {"config", o.config}, {"valid", true}, {"resolved", cfg.to_json()}}.dump() << '\n';
  err << o.config << " is valid\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rover autonomy simulator, runtime monitors and explicit-state verifier", "rover"};
  app.require_subcommand(1);
  Options o;

  const auto add_config = [&](CLI::App* c) { c->add_option("--config", o.config, "scenario config (JSON)"); };
  const auto add_props = [&](CLI::App* c) { c->add_option("--props", o.props, "property file"); };
  const auto add_monitors = [&](CLI::App* c) {
    c->add_option("--monitors", o.monitors, "monitor config (JSON)");
    c->add_flag("--block-mode", o.block_mode, "run every monitor in block mode");
  };
  const auto add_mutant = [&](CLI::App* c) {
    c->add_option("--mutant", o.mutant, "env-blind | misrouting-bus | no-stop-wheels | premature-action");
  };

  auto* sim = app.add_subcommand("simulate", "run the node network with monitors attached");
  add_config(sim);
  add_props(sim);
  add_monitors(sim);
  add_mutant(sim);
  sim->add_option("--ticks", o.ticks, "ticks to run")->check(CLI::NonNegativeNumber);
  sim->add_option("--seed", o.seed, "seed for the choice generator");
  sim->add_option("--trace", o.trace, "write the JSON-lines trace here");
  sim->add_option("--explain", o.explain, "write the explanation log here (default: <trace>.explain.jsonl)");

  auto* ver = app.add_subcommand("verify", "explore every behaviour and check the property suite");
  add_config(ver);
  add_props(ver);
  add_mutant(ver);
  ver->add_option("--budget-states", o.budget_states, "state budget")->check(CLI::PositiveNumber);
  ver->add_option("--budget-secs", o.budget_secs, "time budget in seconds")->check(CLI::PositiveNumber);
  ver->add_option("--workers", o.workers, "exploration threads")->check(CLI::PositiveNumber);
  ver->add_option("--report", o.report, "also write the JSON report here");
  ver->add_option("--cex-dir", o.cex_dir, "directory for counterexample files");

  auto* chk = app.add_subcommand("check", "evaluate a recorded trace offline");
  chk->add_option("--trace", o.trace, "trace to check")->required();
  add_config(chk);
  add_props(chk);
  add_monitors(chk);

  auto* rep = app.add_subcommand("replay", "re-run a counterexample through the simulator");
  rep->add_option("--counterexample", o.counterexample, "counterexample file")->required();
  rep->add_option("--trace", o.trace, "write the replayed trace here");

  auto* sch = app.add_subcommand("schema", "print the config schema, or validate --config");
  add_config(sch);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }

  try {
    if (sim->parsed()) return cmd_simulate(o, out, err);
    if (ver->parsed()) return cmd_verify(o, out, err);
    if (chk->parsed()) return cmd_check(o, out, err);
    if (rep->parsed()) return cmd_replay(o, out, err);
    if (sch->parsed()) return cmd_schema(o, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    out << Json{{"error", e.code()}, {"message", e.what()}}.dump() << '\n';
    return kExitInput;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    out << Json{{"error", "IOError"}, {"message", e.what()}}.dump() << '\n';
    return kExitInput;
  }
  return kExitInput;
}

}  // namespace rover
