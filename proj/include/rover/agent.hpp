#pragma once

// Belief-desire-intention patrol agent. Beliefs are updated from perceptions,
// plans are chosen from a fixed rule library, and at most one action is
// emitted per reasoning cycle.

#include <array>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "rover/bus.hpp"
#include "rover/config.hpp"
#include "rover/types.hpp"

namespace rover {

struct Beliefs {
  std::optional<Waypoint> at{Waypoint::O};
  std::array<std::optional<EnvClass>, 4> env{};
  std::array<bool, 3> ready{};
  Posture arm{Posture::Closed};
  Posture mast{Posture::Closed};

  Posture posture(Effector e) const { return e == Effector::Arm ? arm : mast; }
  bool all_ready() const { return ready[0] && ready[1] && ready[2]; }

  /// Ground terms, sorted: "arm(closed)", "at(A)", "env(B,Radiation)", "ready(mast)".
  std::vector<std::string> terms() const;
  friend bool operator==(const Beliefs&, const Beliefs&) = default;
};

/// How the agent sees hazard beliefs. The env-blind mutant sees Fine everywhere.
struct AgentView {
  bool strict_radiation{false};
  bool env_blind{false};
  bool ignore_readiness{false};
  std::optional<EnvClass> env(const Beliefs& b, Waypoint w) const;
  bool all_ready(const Beliefs& b) const { return ignore_readiness || b.all_ready(); }
};

/// Sentinel for "no admissible waypoint".
struct Wait {
  friend bool operator==(const Wait&, const Wait&) = default;
};
using NextWaypoint = std::variant<Waypoint, Wait>;

/// First of the next three cycle successors (other than the current waypoint)
/// not believed to carry radiation. Strict mode also skips unknown waypoints.
NextWaypoint next_waypoint(const Beliefs& b, const AgentView& view);

/// Close any open effector first, otherwise move on; empty when not ready or lost.
std::vector<AgentAction> select_actions(const Beliefs& b, const AgentView& view);

/// At a survey waypoint: open everything in fine weather, close everything
/// otherwise, nothing while the reading is unknown.
std::vector<AgentAction> posture_policy(const Beliefs& b, const AgentView& view);

/// Belief revision for one perception.
void apply_perception(Beliefs& b, const Perception& p);

struct Act {
  AgentAction action;
};
struct AwaitResults {};
struct Hold {
  int cycles{1};
};
struct Achieve {
  std::string goal;  // "patrol" or "survey"
  std::optional<Waypoint> arg;
};
using PlanStep = std::variant<Act, AwaitResults, Hold, Achieve>;

struct Frame {
  std::string goal;
  std::optional<Waypoint> arg;
  std::string rule;  // empty until a plan has been selected
  Json guard;        // bindings that made the rule applicable
  std::vector<PlanStep> body;
  std::size_t pc{0};
  int hold_left{0};
};

struct PlanChoice {
  std::string rule;
  Json guard;
  std::vector<PlanStep> body;
};

/// First applicable rule for the goal, in declaration order.
std::optional<PlanChoice> select_plan(const std::string& goal, std::optional<Waypoint> arg,
                                      const Beliefs& b, const AgentView& view,
                                      const ScenarioConfig& cfg);

/// Names of every rule in declaration order.
const std::vector<std::string>& plan_rules();

class Agent {
 public:
  explicit Agent(const ScenarioConfig& cfg);

  const Beliefs& beliefs() const { return beliefs_; }
  const std::vector<Frame>& intentions() const { return stack_; }
  const std::array<bool, 3>& awaiting() const { return awaiting_; }
  const AgentView& view() const { return view_; }

  /// One reasoning cycle: revise beliefs from the inbox, then run the top
  /// intention until it emits an action or blocks. Emitted actions go out on
  /// /agent/action; one explanation record per action is appended to `explain`.
  void step(const std::vector<Message>& inbox, Bus& bus, const ScenarioConfig& cfg,
            std::vector<Json>* explain);

  Json canonical() const;

 private:
  void push_goal(std::string goal, std::optional<Waypoint> arg);
  void emit(const AgentAction& a, const Frame& f, Bus& bus, std::vector<Json>* explain);

  Beliefs beliefs_;
  AgentView view_;
  std::vector<Frame> stack_;
  std::array<bool, 3> awaiting_{};
};

}  // namespace rover
