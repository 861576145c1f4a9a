#include "rover/effectors.hpp"

namespace rover {

std::array<int, 6> wheel_pattern(Direction dir, int speed) {
  switch (dir) {
    case Direction::Forward: return {speed, speed, speed, speed, speed, speed};
    case Direction::Backward: return {-speed, -speed, -speed, -speed, -speed, -speed};
    case Direction::Left: return {-speed, speed, -speed, speed, -speed, speed};
    case Direction::Right: return {speed, -speed, speed, -speed, speed, -speed};
  }
  return {};
}

Pose step_pose(Pose p, Direction dir) {
  switch (dir) {
    case Direction::Forward: ++p.x; break;
    case Direction::Backward: --p.x; break;
    case Direction::Left: ++p.y; break;
    case Direction::Right: --p.y; break;
  }
  return p;
}

Direction path_direction(Pose from, Pose to) {
  if (from.x < to.x) return Direction::Forward;
  if (from.x > to.x) return Direction::Backward;
  return from.y < to.y ? Direction::Left : Direction::Right;
}

std::vector<double> lerp(const std::vector<double>& start, const std::vector<double>& target, int k,
                         int d) {
  std::vector<double> out(target.size());
  for (std::size_t i = 0; i < target.size(); ++i) {
    const double s = i < start.size() ? start[i] : 0.0;
    out[i] = k >= d ? target[i] : s + (target[i] - s) * k / d;
  }
  return out;
}

EffectorServer::EffectorServer(Effector e, const ScenarioConfig& cfg)
    : effector_(e), node_(nodes::server(e)), startup_(cfg.init_delays[index_of(e)]) {
  if (e != Effector::Wheels) joints_ = cfg.closed_pose(e);
}

std::string EffectorServer::topic(std::string_view leaf) const {
  return "/" + std::string(to_string(effector_)) + "/" + std::string(leaf);
}

void EffectorServer::publish_result(Bus& bus, const GoalId& id, const Request& r,
                                    GoalStatus status) {
  bus.publish(node_, topic("result"), ResultMsg{id, effector_, r, status});
}

void EffectorServer::stop_wheels(Bus& bus, const ScenarioConfig& cfg) {
  if (effector_ != Effector::Wheels || cfg.mutant == Mutant::NoStopWheels) return;
  bus.publish(node_, topic("telemetry"), Telemetry{WheelTelemetry{}});
}

void EffectorServer::publish_joints(Bus& bus) {
  bus.publish(node_, topic("telemetry"), Telemetry{JointState{effector_, joints_, posture_}});
}

void EffectorServer::finish(Bus& bus, const ScenarioConfig& cfg, GoalStatus status) {
  stop_wheels(bus, cfg);
  publish_result(bus, active_->id, active_->request, status);
  active_.reset();
}

void EffectorServer::accept(const GoalMsg& goal, Bus& bus, Chooser& chooser,
                            const ScenarioConfig& cfg, Pose pose) {
  bool valid = request_fits(effector_, goal.request);
  if (const auto* d = std::get_if<DirectionMove>(&goal.request)) {
    valid = valid && d->speed > 0 && d->distance > 0;
  }
  const double p = cfg.nondet.fault_probability[index_of(effector_)];
  if (valid && p > 0.0) {
    const auto pick = chooser.choose({"fault:" + std::string(to_string(effector_)), 2, {1.0 - p, p}});
    valid = pick == 0;
  }
  if (!valid) {
    stop_wheels(bus, cfg);
    publish_result(bus, goal.id, goal.request, GoalStatus::Aborted);
    return;
  }

  ActiveGoal g{goal.id, goal.request, 0, cfg.goal_duration(effector_, goal.request, pose), {}, {}};
  if (effector_ == Effector::Wheels) {
    active_ = std::move(g);
    return;
  }

  const auto cmd = std::get<PostureMove>(goal.request).cmd;
  const Posture want = cmd == PostureCmd::Open ? Posture::Open : Posture::Closed;
  g.target = cmd == PostureCmd::Open ? cfg.open_pose(effector_) : cfg.closed_pose(effector_);
  g.start = joints_;
  if ((posture_ == want && joints_ == g.target) || g.total == 0) {
    joints_ = g.target;
    posture_ = want;
    publish_joints(bus);
    publish_result(bus, goal.id, goal.request, GoalStatus::Succeeded);
    return;
  }
  active_ = std::move(g);
}

void EffectorServer::advance(Bus& bus, const ScenarioConfig& cfg, Pose& pose) {
  auto& g = *active_;
  if (effector_ == Effector::Wheels) {
    if (g.done >= g.total) {
      finish(bus, cfg, GoalStatus::Succeeded);
      return;
    }
    Direction dir{};
    int speed = cfg.wheel_speed;
    if (const auto* d = std::get_if<DirectionMove>(&g.request)) {
      dir = d->dir;
      speed = d->speed;
    } else {
      dir = path_direction(pose, cfg.waypoints[index_of(std::get<WaypointMove>(g.request).wp)]);
    }
    bus.publish(node_, topic("telemetry"), Telemetry{WheelTelemetry{wheel_pattern(dir, speed)}});
    pose = step_pose(pose, dir);
    bus.publish(node_, "/pose", Telemetry{pose});
    ++g.done;
    bus.publish(node_, topic("feedback"), FeedbackMsg{g.id, effector_, g.done, g.total});
    return;
  }

  ++g.done;
  joints_ = lerp(g.start, g.target, g.done, g.total);
  const bool arrived = g.done >= g.total;
  const auto cmd = std::get<PostureMove>(g.request).cmd;
  posture_ = !arrived ? Posture::Moving : cmd == PostureCmd::Open ? Posture::Open : Posture::Closed;
  publish_joints(bus);
  bus.publish(node_, topic("feedback"), FeedbackMsg{g.id, effector_, g.done, g.total});
  if (arrived) finish(bus, cfg, GoalStatus::Succeeded);
}

void EffectorServer::step(const std::vector<Message>& inbox, Bus& bus, Chooser& chooser,
                          const ScenarioConfig& cfg, Pose& pose) {
  if (startup_.tick()) {
    bus.publish(node_, "/ready/" + std::string(to_string(effector_)), ReadyFlag{effector_, true});
  }

  std::optional<GoalId> active_id;
  if (active_) active_id = active_->id;
  for (const auto& op : triage(inbox, active_id)) {
    switch (op.kind) {
      case ServerOp::Kind::RejectCanceled:
        stop_wheels(bus, cfg);
        publish_result(bus, op.goal.id, op.goal.request, GoalStatus::Canceled);
        break;
      case ServerOp::Kind::StopActive:
        // Joints freeze where they are; wheels stop before the result goes out.
        if (active_) finish(bus, cfg, GoalStatus::Canceled);
        break;
      case ServerOp::Kind::Accept:
        accept(op.goal, bus, chooser, cfg, pose);
        break;
    }
  }

  if (active_) advance(bus, cfg, pose);
}

Json EffectorServer::canonical() const {
  Json j{{"countdown", startup_.countdown()}};
  if (active_) {
    j["active"] = {{"id", to_json(active_->id)},
                   {"request", to_json(active_->request)},
                   {"done", active_->done},
                   {"total", active_->total}};
  }
  if (effector_ != Effector::Wheels) {
    j["posture"] = to_string(posture_);
    j["joints"] = joints_;
  }
  return j;
}

}  // namespace rover
