#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "helpers.hpp"
#include "rover/monitor.hpp"
#include "rover/simulation.hpp"

using namespace rover;
using testutil::error_code;

namespace {
PropertySpec prop(const std::string& name, const std::string& text) { return {name, parse_formula(text), 0}; }
MonitorConfig watch(const std::string& name, std::vector<std::string> topics, MonitorMode mode = MonitorMode::Log) {
  return {name, std::move(topics), mode};
}
}  // namespace

TEST_CASE("monitor synthesis rejects what a monitor cannot decide") {
  const auto topo = Topology::rover_default();
  CHECK(error_code([&] {
          synthesize(prop("p", "always (topic(\"/wheels/goal\") => eventually topic(\"/wheels/result\"))"),
                     watch("p", {"/wheels/goal", "/wheels/result"}), topo);
        }) == "IllegalOperatorForRuntime");
  CHECK(error_code([&] { synthesize(prop("p", "never kind(\"x\")"), watch("p", {"/bogus"}), topo); }) ==
        "UnknownTopic");
  CHECK(error_code([&] {
          synthesize(prop("p", "never believes(at(B))"), watch("p", {"/env/sample"}, MonitorMode::Block), topo);
        }) == "BlockModeNotAllowed");
  CHECK(error_code([&] {
          synthesize(prop("p", "never (topic(\"/env/sample\") && topic(\"/pose\"))"),
                     watch("p", {"/env/sample"}, MonitorMode::Block), topo);
        }) == "BlockModeNotAllowed");
  CHECK_NOTHROW(synthesize(prop("p", "always (topic(\"/env/sample\") => payload.wind >= 0)"),
                           watch("p", {"/env/sample"}, MonitorMode::Block), topo));
}

TEST_CASE("monitor config validation") {
  CHECK(error_code([] { parse_monitor_config(Json::object()); }) == "ConfigError");
  CHECK(error_code([] {
          parse_monitor_config(Json::parse(R"({"monitors":[{"property":"p","topics":["/x"],"mode":"loud"}]})"));
        }) == "ConfigError");
  CHECK(error_code([] { parse_monitor_config(Json::parse(R"({"monitors":[{"property":"p"}]})")); }) ==
        "ConfigError");
  const auto ok = parse_monitor_config(Json::parse(R"({"monitors":[{"property":"p","topics":["/x"],"mode":"block"}]})"));
  REQUIRE(ok.size() == 1);
  CHECK(ok[0].mode == MonitorMode::Block);
}

TEST_CASE("a block-mode monitor drops the violating message") {
  const auto topo = Topology::rover_default();
  MonitorSet set({synthesize(prop("nonneg", "always (topic(\"/env/sample\") => payload.wind >= 0)"),
                             watch("nonneg", {"/env/sample"}, MonitorMode::Block), topo)});
  Bus bus(topo);
  bus.subscribe(nodes::kEnvInterface, "/env/sample");
  bus.set_interposer(&set);
  bus.publish(nodes::kEnvironment, "/env/sample", Perception{EnvSample{Waypoint::A, 3, 0, EnvClass::Fine}});
  bus.publish(nodes::kEnvironment, "/env/sample", Perception{EnvSample{Waypoint::A, -1, 0, EnvClass::Fine}});
  const auto d = bus.step_deliver();
  CHECK(d.size() == 1);
  CHECK(set.any_violation());
  const auto ev = bus.take_events();
  REQUIRE(ev.size() == 4);  // publish, block, verdict, deliver
  CHECK(ev[1]["kind"] == "block");
  CHECK(ev[2]["kind"] == "verdict");
  CHECK(ev[2]["prop"] == "nonneg");
  CHECK(ev[2]["mode"] == "block");
}

TEST_CASE("online verdicts equal offline re-checks") {
  const auto cfg = ScenarioConfig::load(testutil::data("scenarios/fault_injection.json"));
  const auto props = load_properties(cfg.properties_path);
  const auto configs = load_monitor_config(cfg.monitors_path);
  for (bool block : {false, true}) {
    auto set = build_monitors(configs, props, Topology::rover_default(), block);
    const auto reference = set;
    const auto r = simulate(cfg, 200, std::move(set));
    CHECK(r.violated);
    for (const auto& m : reference.monitors()) {
      CAPTURE(m.name());
      const auto online = recorded_verdicts(r.trace, m.name());
      const auto offline = check_trace(m, r.trace);
      REQUIRE(online.size() == offline.violations.size());
      for (std::size_t i = 0; i < online.size(); ++i) {
        CHECK(online[i]["seq"] == offline.violations[i].seq);
        CHECK(online[i]["t"] == offline.violations[i].t);
      }
    }
    const auto nonneg = recorded_verdicts(r.trace, "rml_nonneg");
    REQUIRE(nonneg.size() == 1);
    CHECK(nonneg[0]["t"] == 100);
  }
}

TEST_CASE("trace files round-trip and reject damage") {
  const auto dir = std::filesystem::temp_directory_path() / "rover_monitor_test";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "t.jsonl").string();
  const std::vector<Json> events{{{"t", 0}, {"kind", "publish"}}, {{"t", 1}, {"kind", "deliver"}}};
  write_trace(path, events);
  CHECK(read_trace(path) == events);
  CHECK(error_code([] { parse_trace("{\"t\":0,\"kind\":\"x\"}\n{\"t\":1,\"ki"); }) == "MalformedTrace");
  CHECK(error_code([] { parse_trace("{\"t\":0,\"kind\":\"x\"}\n{\"t\":1,\"kind\":\"y\"}"); }) == "MalformedTrace");
  CHECK(error_code([] { parse_trace("{\"kind\":\"x\"}\n"); }) == "MalformedTrace");
  try {
    parse_trace("{\"t\":0,\"kind\":\"x\"}\n\n{oops\n");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  CHECK(parse_trace("").empty());
}
