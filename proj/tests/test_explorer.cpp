#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "helpers.hpp"
#include "rover/explorer.hpp"

using namespace rover;

namespace {
PropertySpec prop(const std::string& name, const std::string& text) { return {name, parse_formula(text), 0}; }
const char* kReadiness =
    "always ((topic(\"/agent/action\") && kind(\"publish\")) => "
    "(believes(ready(wheels)) && believes(ready(arm)) && believes(ready(mast))))";
}  // namespace

TEST_CASE("property classes") {
  CHECK(classify_property(parse_formula("never kind(\"x\")")) == PropertyClass::Safety);
  CHECK(classify_property(parse_formula("always (kind(\"a\") => eventually[<=2] kind(\"b\"))")) ==
        PropertyClass::Safety);
  CHECK(classify_property(parse_formula("always (kind(\"a\") => eventually kind(\"b\"))")) ==
        PropertyClass::Response);
  CHECK(classify_property(parse_formula("eventually kind(\"a\")")) == PropertyClass::Unsupported);
  CHECK(classify_property(parse_formula("always (kind(\"a\") => eventually (kind(\"b\") until kind(\"c\")))")) ==
        PropertyClass::Unsupported);
}

TEST_CASE("a tiny budget is reported, not silently truncated") {
  ExplorerOptions o;
  o.max_states = 10;
  const auto r = explore(testutil::default_config(), {prop("guard", kReadiness)}, o);
  CHECK(r.budget_exceeded);
  CHECK(r.results[0].outcome == CheckOutcome::BudgetExceeded);
}

TEST_CASE("readiness invariant holds, and the premature mutant breaks it with a replayable trace") {
  auto cfg = testutil::default_config();
  const auto pred = parse_formula(
      "(topic(\"/agent/action\") && kind(\"publish\")) => "
      "(believes(ready(wheels)) && believes(ready(arm)) && believes(ready(mast)))");
  CHECK(check_invariant(cfg, "guard", pred).outcome == CheckOutcome::Holds);

  cfg.mutant = Mutant::PrematureAction;
  const auto bad = check_invariant(cfg, "guard", pred);
  REQUIRE(bad.outcome == CheckOutcome::Violated);
  REQUIRE(bad.counterexample);
  CHECK(bad.counterexample->kind == "safety");

  const auto dir = std::filesystem::temp_directory_path() / "rover_explorer_test";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "guard.cex.jsonl").string();
  write_counterexample(path, *bad.counterexample);
  const auto back = read_counterexample(path);
  CHECK(back.steps.size() == bad.counterexample->steps.size());
  const auto rep = replay(back);
  CHECK(rep.reproduced);
  CHECK_FALSE(rep.diverged);
  REQUIRE(rep.violation);

  // A doctored run is caught as a divergence.
  auto doctored = back;
  doctored.steps.back().events.pop_back();
  CHECK(replay(doctored).diverged);
}

TEST_CASE("shortest counterexample: breadth-first search finds the earliest violation") {
  auto cfg = testutil::default_config();
  cfg.mutant = Mutant::PrematureAction;
  const auto r = check_property(cfg, prop("guard", kReadiness));
  REQUIRE(r.counterexample);
  // The agent can act no earlier than the tick after its first (empty) cycle.
  const auto steps = r.counterexample->steps.size();
  CHECK(steps <= 2);
}

TEST_CASE("response needs decay: rate 0 leaves B waiting forever") {
  auto cfg = testutil::default_config();
  const auto trig = parse_formula("believes(ready(mast))");
  const auto goal = parse_formula("believes(at(B))");
  CHECK(check_response(cfg, "visit_B", trig, goal).outcome == CheckOutcome::Holds);

  cfg.decay_rate = 0;
  const auto r = check_response(cfg, "visit_B", trig, goal);
  REQUIRE(r.outcome == CheckOutcome::Violated);
  REQUIRE(r.counterexample);
  CHECK(r.counterexample->kind == "lasso");
  CHECK(r.counterexample->loop_start < r.counterexample->steps.size());
  const auto rep = replay(*r.counterexample);
  CHECK(rep.reproduced);
}

TEST_CASE("sequence check: ready before goal before result") {
  const auto cfg = testutil::default_config();
  const std::vector<Formula> pattern{parse_formula("topic(\"/ready/arm\") && kind(\"publish\")"),
                                     parse_formula("topic(\"/arm/goal\") && kind(\"deliver\")"),
                                     parse_formula("topic(\"/arm/result\") && kind(\"deliver\")")};
  CHECK(check_sequence(cfg, "arm_order", pattern).outcome == CheckOutcome::Holds);
}

TEST_CASE("worker count does not change the outcome") {
  auto cfg = testutil::default_config();
  cfg.mutant = Mutant::MisroutingBus;
  const std::vector<PropertySpec> props{
      prop("routing", "always ((topic(\"/arm/goal\") && kind(\"deliver\")) => receiver(\"arm_server\"))"),
      prop("visit", "always (believes(ready(mast)) => eventually believes(at(B)))")};
  ExplorerOptions one;
  ExplorerOptions four;
  four.workers = 4;
  const auto a = explore(cfg, props, one);
  const auto b = explore(cfg, props, four);
  CHECK(a.product_states == b.product_states);
  CHECK(a.system_states == b.system_states);
  CHECK(a.transitions == b.transitions);
  for (std::size_t i = 0; i < props.size(); ++i) {
    CHECK(a.results[i].outcome == b.results[i].outcome);
    REQUIRE(a.results[i].counterexample.has_value() == b.results[i].counterexample.has_value());
    if (a.results[i].counterexample) {
      CHECK(a.results[i].counterexample->steps.size() == b.results[i].counterexample->steps.size());
    }
  }
}

TEST_CASE("the report states the decay assumption") {
  auto cfg = testutil::default_config();
  cfg.decay_rate = 0;
  ExplorerOptions o;
  o.max_states = 5;
  const auto j = explore(cfg, {prop("guard", kReadiness)}, o).to_json(cfg);
  REQUIRE(j["assumptions"].size() == 1);
  CHECK(j["assumptions"][0]["configured_rate"] == 0);
  CHECK(j["assumptions"][0]["met"] == false);
  CHECK(j.contains("states"));
  CHECK(j.contains("seconds"));
}
