#pragma once

#include <optional>
#include <vector>

#include "rover/action_protocol.hpp"
#include "rover/bus.hpp"
#include "rover/choice.hpp"
#include "rover/config.hpp"

namespace rover {

/// Per-wheel speeds for one motion tick (left wheels at even indices).
std::array<int, 6> wheel_pattern(Direction dir, int speed);

/// One cell of travel in `dir`: forward +x, backward -x, left +y, right -y.
Pose step_pose(Pose p, Direction dir);

/// Next cell on the Manhattan path from `from` to `to`, x first.
Direction path_direction(Pose from, Pose to);

/// Joint interpolation start + (target - start) * k / d.
std::vector<double> lerp(const std::vector<double>& start, const std::vector<double>& target, int k,
                         int d);

struct ActiveGoal {
  GoalId id;
  Request request;
  int done{0};
  int total{0};
  std::vector<double> start;
  std::vector<double> target;
};

/// Server half of the protocol plus the effector it drives. The wheels server
/// moves the rover pose; arm and mast servers move their joints.
class EffectorServer {
 public:
  EffectorServer(Effector e, const ScenarioConfig& cfg);

  Effector effector() const { return effector_; }
  const NodeId& node() const { return node_; }
  bool ready() const { return startup_.ready(); }
  Posture posture() const { return posture_; }
  const std::vector<double>& joints() const { return joints_; }
  const std::optional<ActiveGoal>& active() const { return active_; }

  /// Start-up, then inbox triage, then one tick of motion for the active goal.
  void step(const std::vector<Message>& inbox, Bus& bus, Chooser& chooser,
            const ScenarioConfig& cfg, Pose& pose);

  Json canonical() const;

 private:
  std::string topic(std::string_view leaf) const;
  void finish(Bus& bus, const ScenarioConfig& cfg, GoalStatus status);
  void stop_wheels(Bus& bus, const ScenarioConfig& cfg);
  void accept(const GoalMsg& goal, Bus& bus, Chooser& chooser, const ScenarioConfig& cfg, Pose pose);
  void advance(Bus& bus, const ScenarioConfig& cfg, Pose& pose);
  void publish_joints(Bus& bus);
  void publish_result(Bus& bus, const GoalId& id, const Request& r, GoalStatus status);

  Effector effector_;
  NodeId node_;
  Startup startup_;
  std::optional<ActiveGoal> active_;
  Posture posture_{Posture::Closed};
  std::vector<double> joints_;
};

}  // namespace rover
