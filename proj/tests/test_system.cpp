#include <doctest.h>

#include "helpers.hpp"
#include "rover/explorer.hpp"
#include "rover/simulation.hpp"

using namespace rover;

TEST_CASE("with nondeterminism off the explorer follows the simulator event for event") {
  const auto cfg = testutil::deterministic_config();
  const auto sim = simulate(cfg, 150);
  System s(std::make_shared<const ScenarioConfig>(cfg), true);
  std::vector<Json> explored;
  for (int i = 0; i < 150; ++i) {
    auto succ = enumerate_successors(s);
    REQUIRE(succ.size() == 1);
    CHECK(succ[0].choices.empty());
    for (auto& e : succ[0].events) explored.push_back(std::move(e));
    s = std::move(succ[0].state);
  }
  CHECK(explored == sim.trace);
}

TEST_CASE("a two-level wind set branches in two at an arrival") {
  auto cfg = testutil::deterministic_config();
  cfg.nondet.wind_on_arrival = {0, 7};
  System s(std::make_shared<const ScenarioConfig>(cfg), true);
  std::vector<Successor> succ;
  for (int i = 0; i < 60; ++i) {
    succ = enumerate_successors(s);
    if (succ.size() > 1) break;
    s = std::move(succ[0].state);
  }
  REQUIRE(succ.size() == 2);
  REQUIRE(succ[0].choices.size() == 1);
  CHECK(succ[0].choices[0].label.rfind("wind:", 0) == 0);
  CHECK(succ[0].choices[0].options == 2);
  const auto wp = waypoint_from_string(succ[0].choices[0].label.substr(5));
  CHECK(succ[0].state.world().hazards.wind[index_of(wp)] == 0);
  CHECK(succ[1].state.world().hazards.wind[index_of(wp)] == 7);
  CHECK(succ[0].state.canonical() != succ[1].state.canonical());
}

TEST_CASE("seeded simulation is reproducible") {
  const auto cfg = ScenarioConfig::load(testutil::data("scenarios/randomized.json"));
  const auto a = simulate(cfg, 300, {}, 11);
  const auto b = simulate(cfg, 300, {}, 11);
  CHECK(a.trace == b.trace);
  CHECK(a.explanations == b.explanations);
  CHECK(simulate(cfg, 0).trace.empty());
}

TEST_CASE("every agent action has an explanation") {
  const auto r = simulate(testutil::default_config(), 200);
  std::size_t actions = 0;
  for (const auto& e : r.trace) {
    if (e["kind"] == "publish" && e["topic"] == "/agent/action") ++actions;
  }
  CHECK(actions > 0);
  CHECK(r.explanations.size() == actions);
  for (const auto& x : r.explanations) {
    CHECK(x.contains("rule"));
    CHECK(x.contains("guard"));
  }
}

TEST_CASE("canonical state ignores the clock once the world repeats") {
  // With no hazards and no choices the patrol settles into a cycle; the
  // canonical form must repeat even though ticks keep growing.
  auto cfg = testutil::deterministic_config();
  cfg.wind = {0, 0, 0, 0};
  cfg.radiation = {0, 0, 0, 0};
  System s(std::make_shared<const ScenarioConfig>(cfg), false);
  ScriptedChooser none;
  std::set<std::string> seen;
  bool repeated = false;
  for (int i = 0; i < 400 && !repeated; ++i) {
    s.step(none);
    repeated = !seen.insert(s.canonical().dump()).second;
  }
  CHECK(repeated);
}
