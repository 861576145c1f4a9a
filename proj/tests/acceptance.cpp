// Acceptance suite: one line per criterion, exit status 1 if any fails.

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include "rover/cli.hpp"
#include "rover/environment.hpp"
#include "rover/explorer.hpp"
#include "rover/simulation.hpp"

using namespace rover;

namespace {

std::string data(const std::string& rel) { return std::string(ROVER_DATA_DIR) + "/" + rel; }

const std::filesystem::path& workdir() {
  static const auto dir = [] {
    auto d = std::filesystem::temp_directory_path() / "rover_acceptance";
    std::filesystem::remove_all(d);
    std::filesystem::create_directories(d);
    return d;
  }();
  return dir;
}

std::string scratch(const std::string& name) { return (workdir() / name).string(); }

struct CliRun {
  int code{0};
  Json out;
  std::string err;
};

CliRun cli(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  CliRun r;
  r.code = run_cli(args, out, err);
  r.out = Json::parse(out.str(), nullptr, false);
  r.err = err.str();
  return r;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::map<std::string, std::string> verdicts(const Json& report) {
  std::map<std::string, std::string> out;
  if (!report.is_object() || !report.contains("properties")) return out;
  for (const auto& p : report["properties"]) out[p["name"]] = p["verdict"];
  return out;
}

// A failed expectation carries its explanation out of the criterion body.
struct Fail {
  std::string why;
};

void expect(bool ok, const std::string& why) {
  if (!ok) throw Fail{why};
}

void expect_holds(const std::map<std::string, std::string>& v, const std::string& name) {
  const auto it = v.find(name);
  expect(it != v.end(), name + " missing from the report");
  expect(it->second == "Holds", name + " is " + it->second);
}

// The nominal verification run is shared by criteria 1 to 3.
const CliRun& nominal_verify() {
  static const CliRun run = cli({"verify", "--config", data("scenarios/default.json"), "--cex-dir",
                                 scratch("nominal_cex"), "--report", scratch("nominal_report.json")});
  return run;
}

std::string criterion1() {
  const auto& r = nominal_verify();
  expect(r.code == kExitOk, "verify exited " + std::to_string(r.code));
  const auto v = verdicts(r.out);
  for (const char* w : {"A", "B", "C"}) expect_holds(v, std::string("ajpf_reach_") + w);
  const auto states = r.out["states"].get<std::size_t>();
  const auto secs = r.out["seconds"].get<double>();
  expect(states < 1'000'000, "too many states: " + std::to_string(states));
  expect(secs < 60.0, "too slow: " + std::to_string(secs) + " s");
  expect(r.out["assumptions"][0]["met"] == true, "decay assumption not met");
  std::ostringstream os;
  os << "response to A, B, C holds; " << states << " states, " << secs << " s";
  return os.str();
}

std::string criterion2() {
  const auto v = verdicts(nominal_verify().out);
  expect_holds(v, "dafny_readiness_guard");
  expect_holds(v, "dafny_radiation_avoidance");
  int checked = 0;
  for (int wind = 0; wind <= 10; ++wind) {
    for (int rad = 0; rad <= 10; ++rad) {
      if (wind < 5 && rad < 5) {
        expect(classify(wind, rad) == EnvClass::Fine,
               "classify(" + std::to_string(wind) + "," + std::to_string(rad) + ") is not Fine");
      }
      ++checked;
    }
  }
  return "readiness guard and radiation avoidance hold; classification checked on " + std::to_string(checked) +
         " readings";
}

std::string criterion3() {
  const auto cfg = ScenarioConfig::load(data("scenarios/default.json"));
  const auto props = load_properties(data("properties/rover.prop"));
  const auto v = verdicts(nominal_verify().out);
  for (auto e : kEffectors) {
    const std::string name(to_string(e));
    expect_holds(v, "csp_routing_" + name);
    expect_holds(v, "csp_response_" + name);
    expect_holds(v, "csp_sequence_" + name);
    // The response bound in the suite is the goal duration plus three ticks.
    const int duration = e == Effector::Wheels ? cfg.max_leg() : cfg.durations[index_of(e)];
    const auto it = std::find_if(props.begin(), props.end(),
                                 [&](const PropertySpec& p) { return p.name == "csp_response_" + name; });
    expect(it != props.end(), "csp_response_" + name + " missing");
    const std::string text = print(it->formula);
    const std::string want = "eventually[<=" + std::to_string(duration + 3) + "]";
    expect(text.find(want) != std::string::npos, name + " bound is not " + want);
  }
  return "routing, bounded response and ordering hold for wheels, arm and mast";
}

std::string criterion4() {
  const auto nominal = scratch("nominal.jsonl");
  const auto sim = cli({"simulate", "--config", data("scenarios/default.json"), "--ticks", "500", "--trace", nominal});
  expect(sim.code == kExitOk, "nominal simulate exited " + std::to_string(sim.code));
  for (const auto& m : sim.out["monitors"]) {
    expect(m["violations"] == 0, m["property"].get<std::string>() + " reported violations on the nominal run");
  }
  const auto nominal_check = cli({"check", "--trace", nominal, "--config", data("scenarios/default.json")});
  expect(nominal_check.code == kExitOk, "check on nominal trace exited " + std::to_string(nominal_check.code));
  expect(nominal_check.out["agree"] == true, "online/offline disagreement on the nominal trace");

  const auto fault_cfg = data("scenarios/fault_injection.json");
  const auto cfg = ScenarioConfig::load(fault_cfg);
  expect(!cfg.injections.empty(), "fault scenario has no injection");
  const Tick injected = cfg.injections.front().tick;
  const auto fault = scratch("fault.jsonl");
  const auto fsim = cli({"simulate", "--config", fault_cfg, "--ticks", "500", "--trace", fault});
  expect(fsim.code == kExitViolation, "fault simulate exited " + std::to_string(fsim.code));
  bool nonneg_violated = false;
  for (const auto& m : fsim.out["monitors"]) {
    if (m["property"] == "rml_nonneg") nonneg_violated = m["status"] == "Violated";
  }
  expect(nonneg_violated, "nonnegativity monitor did not report Violated");
  const auto online = recorded_verdicts(read_trace(fault), "rml_nonneg");
  expect(online.size() == 1, "expected exactly one nonnegativity verdict, got " + std::to_string(online.size()));
  expect(online[0]["t"] == injected, "verdict at t=" + online[0]["t"].dump() + ", injection at " +
                                          std::to_string(injected));
  const auto fcheck = cli({"check", "--trace", fault, "--config", fault_cfg});
  expect(fcheck.out["agree"] == true, "online and offline verdicts differ on the fault trace");
  expect(fcheck.code == kExitViolation, "check on the fault trace exited " + std::to_string(fcheck.code));
  return "nominal run clean; injected fault caught at t=" + std::to_string(injected) +
         "; online and offline verdicts agree";
}

std::string criterion5() {
  std::string summary;
  for (auto m : kAllMutants) {
    const std::string name(to_string(m));
    const auto dir = scratch("cex_" + name);
    const auto r = cli({"verify", "--config", data("scenarios/default.json"), "--mutant", name, "--cex-dir", dir});
    expect(r.code == kExitViolation, name + ": verify exited " + std::to_string(r.code));
    std::vector<std::string> killers;
    for (const auto& p : r.out["properties"]) {
      if (p["verdict"] != "Violated") continue;
      expect(p.contains("counterexample"), name + ": " + p["name"].get<std::string>() + " has no counterexample");
      const auto rep = cli({"replay", "--counterexample", p["counterexample"].get<std::string>()});
      expect(rep.code == kExitViolation && rep.out["reproduced"] == true,
             name + ": counterexample for " + p["name"].get<std::string>() + " does not replay");
      killers.push_back(p["name"]);
    }
    expect(!killers.empty(), name + " survived");
    summary += (summary.empty() ? "" : "; ") + name + " by " + killers.front();
    if (killers.size() > 1) summary += " (+" + std::to_string(killers.size() - 1) + ")";
  }
  return "4/4 killed, all counterexamples replay: " + summary;
}

std::string criterion6() {
  const auto trace = read_trace(scratch("nominal.jsonl"));
  expect(!trace.empty(), "nominal trace missing (criterion 4 writes it)");
  // When radiation at B was last seen hazardous, and first seen safe.
  std::optional<Tick> first_safe;
  Tick last_hot = -1;
  for (const auto& e : trace) {
    if (e["kind"] != "publish" || e["topic"] != "/env/sample" || e["payload"]["wp"] != "B") continue;
    const int rad = e["payload"]["rad"];
    const Tick t = e["t"];
    if (rad >= 5) last_hot = t;
    if (rad < 5 && !first_safe) first_safe = t;
  }
  expect(first_safe.has_value(), "radiation at B never dropped below the threshold");
  expect(last_hot < *first_safe, "radiation at B rose again");

  const auto route = visits(trace);
  std::string text;
  for (const auto& [t, w] : route) text += std::string(to_string(w)) + "@" + std::to_string(t) + " ";
  bool a_to_c = false;
  bool b_later = false;
  bool b_cycle = false;
  for (std::size_t i = 0; i < route.size(); ++i) {
    const auto [t, w] = route[i];
    if (t <= *first_safe) {
      expect(w != Waypoint::B, "arrived at B at t=" + std::to_string(t) + " while it was radiated");
      if (i + 1 < route.size() && w == Waypoint::A && route[i + 1].second == Waypoint::C) a_to_c = true;
    } else if (w == Waypoint::B) {
      b_later = true;
      if (i >= 1 && i + 1 < route.size() && route[i - 1].second == Waypoint::A && route[i + 1].second == Waypoint::C) {
        b_cycle = true;
      }
    }
  }
  expect(a_to_c, "no A->C transition while B was radiated: " + text);
  expect(b_later, "B never visited after decay: " + text);
  expect(b_cycle, "B not part of an A,B,C cycle after decay: " + text);
  return "B radiated until t=" + std::to_string(*first_safe) + "; visits " + text.substr(0, text.size() - 1);
}

std::string criterion7() {
  const auto cfg = ScenarioConfig::load(data("scenarios/randomized.json"));
  std::size_t results = 0;
  int aborted = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto r = simulate(cfg, 500, {}, seed);
    std::optional<bool> last_stopped;
    for (const auto& e : r.trace) {
      if (e["kind"] != "publish") continue;
      if (e["topic"] == "/wheels/telemetry") last_stopped = e["payload"]["stopped"].get<bool>();
      if (e["topic"] != "/wheels/result") continue;
      ++results;
      if (e["payload"]["status"] == "Aborted") ++aborted;
      expect(last_stopped.value_or(false),
             "seed " + std::to_string(seed) + ": result at t=" + e["t"].dump() + " without a preceding stop");
    }
  }
  expect(results > 0, "no wheels results at all");
  return "20 seeds, " + std::to_string(results) + " wheels results (" + std::to_string(aborted) +
         " aborted), each preceded by all-zero speeds";
}

std::string criterion8() {
  for (const auto& [cfg, seed] : std::vector<std::pair<std::string, std::string>>{
           {"scenarios/default.json", "0"}, {"scenarios/randomized.json", "42"}}) {
    const auto a = scratch("det_a.jsonl");
    const auto b = scratch("det_b.jsonl");
    cli({"simulate", "--config", data(cfg), "--ticks", "500", "--seed", seed, "--trace", a});
    cli({"simulate", "--config", data(cfg), "--ticks", "500", "--seed", seed, "--trace", b});
    const auto ta = slurp(a);
    expect(!ta.empty(), cfg + ": empty trace");
    expect(ta == slurp(b), cfg + ": traces differ");
    expect(slurp(a + ".explain.jsonl") == slurp(b + ".explain.jsonl"), cfg + ": explanations differ");
  }
  // Explorer with 1 and 4 workers: same report and byte-identical counterexamples.
  Json reports[2];
  std::string cex_bytes[2];
  const char* workers[2] = {"1", "4"};
  for (int i = 0; i < 2; ++i) {
    const auto dir = scratch(std::string("workers_") + workers[i]);
    const auto r = cli({"verify", "--config", data("scenarios/default.json"), "--mutant", "env-blind", "--workers",
                        workers[i], "--cex-dir", dir});
    reports[i] = r.out;
    for (auto key : {"seconds", "workers"}) reports[i].erase(key);
    for (auto& p : reports[i]["properties"]) p.erase("counterexample");
    cex_bytes[i] = slurp(dir + "/dafny_radiation_avoidance.cex.jsonl");
  }
  expect(reports[0] == reports[1], "explorer reports differ between 1 and 4 workers");
  expect(!cex_bytes[0].empty() && cex_bytes[0] == cex_bytes[1], "counterexamples differ between 1 and 4 workers");
  return "byte-identical traces for equal seeds; explorer output identical with 1 and 4 workers";
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<std::string()>>> criteria{
      {"1 agent response (reach A, B, C)", criterion1},
      {"2 readiness, classification, radiation avoidance", criterion2},
      {"3 protocol routing, bounded response, ordering", criterion3},
      {"4 runtime monitors, nominal and injected fault", criterion4},
      {"5 mutant kill suite", criterion5},
      {"6 mission route and skip rule", criterion6},
      {"7 stop before every wheels result", criterion7},
      {"8 determinism", criterion8},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    std::string line;
    bool ok = false;
    try {
      line = run();
      ok = true;
    } catch (const Fail& f) {
      line = f.why;
    } catch (const std::exception& e) {
      line = std::string("exception: ") + e.what();
    }
    if (!ok) ++failed;
    std::cout << (ok ? "PASS" : "FAIL") << "  criterion " << name << ": " << line << std::endl;
  }
  std::cout << (failed == 0 ? "all criteria pass" : std::to_string(failed) + " criteria failed") << std::endl;
  return failed == 0 ? 0 : 1;
}
