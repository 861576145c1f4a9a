#include <doctest.h>

#include <algorithm>

#include "helpers.hpp"
#include "rover/agent.hpp"

using namespace rover;

namespace {

// Patrol order after each position, current waypoint excluded.
std::vector<Waypoint> patrol_after(Waypoint at) {
  switch (at) {
    case Waypoint::O: return {Waypoint::A, Waypoint::B, Waypoint::C};
    case Waypoint::A: return {Waypoint::B, Waypoint::C};
    case Waypoint::B: return {Waypoint::C, Waypoint::A};
    case Waypoint::C: return {Waypoint::A, Waypoint::B};
  }
  return {};
}

NextWaypoint oracle_next(const Beliefs& b, bool strict) {
  if (!b.at) return Wait{};
  for (auto w : patrol_after(*b.at)) {
    const auto env = b.env[index_of(w)];
    if (env == EnvClass::Radiation) continue;
    if (strict && !env) continue;
    return w;
  }
  return Wait{};
}

std::vector<std::optional<EnvClass>> env_values() {
  return {std::nullopt, EnvClass::Fine, EnvClass::Windy, EnvClass::Radiation};
}

}  // namespace

TEST_CASE("waypoint selection agrees with the skip rule on every belief combination") {
  std::vector<std::optional<Waypoint>> ats{std::nullopt, Waypoint::O, Waypoint::A, Waypoint::B, Waypoint::C};
  int cases = 0;
  for (bool strict : {false, true}) {
    for (const auto& at : ats) {
      for (const auto& ea : env_values()) {
        for (const auto& eb : env_values()) {
          for (const auto& ec : env_values()) {
            Beliefs b;
            b.at = at;
            b.env = {std::nullopt, ea, eb, ec};
            AgentView view;
            view.strict_radiation = strict;
            CHECK(next_waypoint(b, view) == oracle_next(b, strict));
            ++cases;
          }
        }
      }
    }
  }
  CHECK(cases == 2 * 5 * 64);
}

TEST_CASE("the env-blind view never sees hazards") {
  Beliefs b;
  b.at = Waypoint::A;
  b.env = {std::nullopt, EnvClass::Windy, EnvClass::Radiation, std::nullopt};
  AgentView blind;
  blind.env_blind = true;
  CHECK(next_waypoint(b, blind) == NextWaypoint{Waypoint::B});
  CHECK(next_waypoint(b, AgentView{}) == NextWaypoint{Waypoint::C});
}

TEST_CASE("no actions before every server is ready") {
  Beliefs b;
  b.ready = {true, true, false};
  CHECK(select_actions(b, AgentView{}).empty());
  b.ready = {true, true, true};
  const auto acts = select_actions(b, AgentView{});
  REQUIRE(acts.size() == 1);
  CHECK(acts[0].term() == "move_to_waypoint(A)");
  AgentView premature;
  premature.ignore_readiness = true;
  b.ready = {false, false, false};
  CHECK(select_actions(b, premature).size() == 1);
}

TEST_CASE("open effectors are closed before moving on") {
  Beliefs b;
  b.ready = {true, true, true};
  b.at = Waypoint::A;
  b.arm = Posture::Open;
  const auto acts = select_actions(b, AgentView{});
  REQUIRE(acts.size() == 1);
  CHECK(acts[0].term() == "control_arm(close)");
}

TEST_CASE("posture policy by local weather") {
  Beliefs b;
  b.at = Waypoint::C;
  CHECK(posture_policy(b, AgentView{}).empty());  // unknown reading
  b.env[index_of(Waypoint::C)] = EnvClass::Fine;
  auto acts = posture_policy(b, AgentView{});
  REQUIRE(acts.size() == 2);
  CHECK(acts[0].term() == "control_arm(open)");
  CHECK(acts[1].term() == "control_mast(open)");
  b.arm = Posture::Open;
  b.mast = Posture::Open;
  b.env[index_of(Waypoint::C)] = EnvClass::Windy;
  acts = posture_policy(b, AgentView{});
  REQUIRE(acts.size() == 2);
  CHECK(acts[0].term() == "control_arm(close)");
  b.at = Waypoint::O;
  CHECK(posture_policy(b, AgentView{}).empty());
}

TEST_CASE("belief revision") {
  Beliefs b;
  apply_perception(b, EnvSample{Waypoint::B, 0, 9, EnvClass::Radiation});
  CHECK(b.env[index_of(Waypoint::B)] == EnvClass::Radiation);
  apply_perception(b, ReadyFlag{Effector::Mast, true});
  apply_perception(b, ReadyFlag{Effector::Mast, false});
  CHECK(b.ready[index_of(Effector::Mast)]);
  apply_perception(b, ActionOutcome{AgentAction::move_to_waypoint(Waypoint::B), GoalStatus::Succeeded});
  CHECK(b.at == Waypoint::B);
  CHECK_FALSE(b.env[index_of(Waypoint::B)].has_value());
  apply_perception(b, ActionOutcome{AgentAction::control_arm(PostureCmd::Open), GoalStatus::Succeeded});
  CHECK(b.arm == Posture::Open);
  const auto terms = b.terms();
  CHECK(std::is_sorted(terms.begin(), terms.end()));
  CHECK(std::find(terms.begin(), terms.end(), "at(B)") != terms.end());
  CHECK(std::find(terms.begin(), terms.end(), "arm(open)") != terms.end());
  CHECK(std::find(terms.begin(), terms.end(), "ready(mast)") != terms.end());
}

TEST_CASE("patrol plan selection follows the rule order") {
  const auto cfg = testutil::deterministic_config();
  Beliefs b;
  auto p = select_plan("patrol", std::nullopt, b, AgentView{}, cfg);
  REQUIRE(p);
  CHECK(p->rule == "patrol.not_ready");
  b.ready = {true, true, true};
  p = select_plan("patrol", std::nullopt, b, AgentView{}, cfg);
  REQUIRE(p);
  CHECK(p->rule == "patrol.move");
  const auto& rules = plan_rules();
  CHECK(std::find(rules.begin(), rules.end(), "survey.hazard") != rules.end());
}

TEST_CASE("agent acts only after three ready flags arrive") {
  const auto cfg = testutil::deterministic_config();
  Agent agent(cfg);
  Bus bus(Topology::rover_default());
  std::vector<Json> explain;
  std::int64_t seq = 0;
  const auto perception = [&](Perception p) {
    return Message{++seq, bus.tick(), nodes::kEnvInterface, "/agent/perception", std::move(p)};
  };
  const auto actions = [&] {
    int n = 0;
    for (const auto& e : bus.take_events()) {
      if (e["kind"] == "publish" && e["topic"] == "/agent/action") ++n;
    }
    return n;
  };
  agent.step({perception(ReadyFlag{Effector::Wheels, true})}, bus, cfg, &explain);
  agent.step({perception(ReadyFlag{Effector::Arm, true})}, bus, cfg, &explain);
  CHECK(actions() == 0);
  agent.step({perception(ReadyFlag{Effector::Mast, true})}, bus, cfg, &explain);
  agent.step({}, bus, cfg, &explain);
  CHECK(actions() == 1);
  REQUIRE(explain.size() == 1);
  CHECK(explain[0].contains("rule"));
  CHECK(explain[0]["action"] == "move_to_waypoint(A)");
}
