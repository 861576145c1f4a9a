#include "rover/types.hpp"

#include <algorithm>

namespace rover {

namespace {

template <typename Enum, std::size_t N>
Enum parse_enum(std::string_view s, const std::array<std::string_view, N>& names,
                const char* what) {
  for (std::size_t i = 0; i < N; ++i) {
    if (names[i] == s) return static_cast<Enum>(i);
  }
  throw Error("InvalidValue", std::string("unknown ") + what + " '" + std::string(s) + "'");
}

constexpr std::array<std::string_view, 3> kEffectorNames{"wheels", "arm", "mast"};
constexpr std::array<std::string_view, 4> kWaypointNames{"o", "A", "B", "C"};
constexpr std::array<std::string_view, 3> kEnvNames{"Fine", "Windy", "Radiation"};
constexpr std::array<std::string_view, 5> kStatusNames{"Pending", "Active", "Succeeded",
                                                       "Canceled", "Aborted"};
constexpr std::array<std::string_view, 4> kDirectionNames{"forward", "backward", "left",
                                                          "right"};
constexpr std::array<std::string_view, 2> kCmdNames{"open", "close"};
constexpr std::array<std::string_view, 3> kPostureNames{"Open", "Closed", "Moving"};
constexpr std::array<std::string_view, 8> kPayloadNames{
    "Goal", "Cancel", "Feedback", "Result", "Perception", "Telemetry", "ReadyFlag", "Action"};

}  // namespace

std::string_view to_string(Effector e) { return kEffectorNames[index_of(e)]; }
std::string_view to_string(Waypoint w) { return kWaypointNames[index_of(w)]; }
std::string_view to_string(EnvClass c) { return kEnvNames[static_cast<std::size_t>(c)]; }
std::string_view to_string(GoalStatus s) { return kStatusNames[static_cast<std::size_t>(s)]; }
std::string_view to_string(Direction d) { return kDirectionNames[static_cast<std::size_t>(d)]; }
std::string_view to_string(PostureCmd c) { return kCmdNames[static_cast<std::size_t>(c)]; }
std::string_view to_string(Posture p) { return kPostureNames[static_cast<std::size_t>(p)]; }
std::string_view to_string(PayloadKind k) { return kPayloadNames[static_cast<std::size_t>(k)]; }

Effector effector_from_string(std::string_view s) {
  return parse_enum<Effector>(s, kEffectorNames, "effector");
}
Waypoint waypoint_from_string(std::string_view s) {
  return parse_enum<Waypoint>(s, kWaypointNames, "waypoint");
}
Direction direction_from_string(std::string_view s) {
  return parse_enum<Direction>(s, kDirectionNames, "direction");
}
PostureCmd posture_cmd_from_string(std::string_view s) {
  return parse_enum<PostureCmd>(s, kCmdNames, "command");
}

namespace nodes {
NodeId client(Effector e) { return std::string(to_string(e)) + "_client"; }
NodeId server(Effector e) { return std::string(to_string(e)) + "_server"; }
}  // namespace nodes

std::string AgentAction::name() const {
  if (std::holds_alternative<DirectionMove>(request)) return "control_wheels";
  if (std::holds_alternative<WaypointMove>(request)) return "move_to_waypoint";
  return target == Effector::Arm ? "control_arm" : "control_mast";
}

std::string AgentAction::term() const {
  std::string args;
  if (const auto* d = std::get_if<DirectionMove>(&request)) {
    args = std::string(to_string(d->dir)) + "," + std::to_string(d->speed) + "," +
           std::to_string(d->distance);
  } else if (const auto* w = std::get_if<WaypointMove>(&request)) {
    args = std::string(to_string(w->wp));
  } else {
    args = std::string(to_string(std::get<PostureMove>(request).cmd));
  }
  return name() + "(" + args + ")";
}

AgentAction AgentAction::control_wheels(Direction dir, int speed, int distance) {
  return {Effector::Wheels, DirectionMove{dir, speed, distance}};
}
AgentAction AgentAction::move_to_waypoint(Waypoint wp) {
  return {Effector::Wheels, WaypointMove{wp}};
}
AgentAction AgentAction::control_arm(PostureCmd cmd) { return {Effector::Arm, PostureMove{cmd}}; }
AgentAction AgentAction::control_mast(PostureCmd cmd) {
  return {Effector::Mast, PostureMove{cmd}};
}

bool WheelTelemetry::stopped() const {
  return std::all_of(speeds.begin(), speeds.end(), [](int s) { return s == 0; });
}

bool request_fits(Effector target, const Request& r) {
  if (target == Effector::Wheels) return !std::holds_alternative<PostureMove>(r);
  return std::holds_alternative<PostureMove>(r);
}

PayloadKind kind_of(const Payload& p) { return static_cast<PayloadKind>(p.index()); }

Json to_json(const GoalId& id) { return Json{{"origin", id.origin}, {"counter", id.counter}}; }

Json to_json(const Request& r) {
  if (const auto* d = std::get_if<DirectionMove>(&r)) {
    return Json{{"kind", "direction"},
                {"dir", to_string(d->dir)},
                {"speed", d->speed},
                {"distance", d->distance}};
  }
  if (const auto* w = std::get_if<WaypointMove>(&r)) {
    return Json{{"kind", "waypoint"}, {"wp", to_string(w->wp)}};
  }
  return Json{{"cmd", to_string(std::get<PostureMove>(r).cmd)}};
}

Json to_json(const AgentAction& a) {
  Json j{{"action", a.name()}};
  if (const auto* d = std::get_if<DirectionMove>(&a.request)) {
    j["dir"] = to_string(d->dir);
    j["speed"] = d->speed;
    j["distance"] = d->distance;
  } else if (const auto* w = std::get_if<WaypointMove>(&a.request)) {
    j["wp"] = to_string(w->wp);
  } else {
    j["cmd"] = to_string(std::get<PostureMove>(a.request).cmd);
  }
  return j;
}

namespace {

Json sample_json(const EnvSample& s) {
  return Json{{"wp", to_string(s.wp)}, {"wind", s.wind}, {"rad", s.rad}, {"env", to_string(s.env)}};
}

Json ready_json(const ReadyFlag& r) {
  return Json{{"module", to_string(r.module)}, {"ready", r.ready}};
}

}  // namespace

Json to_json(const Perception& p) {
  return std::visit(
      [](const auto& v) -> Json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, EnvSample>) {
          Json j{{"kind", "env"}};
          j.update(sample_json(v));
          return j;
        } else if constexpr (std::is_same_v<T, ReadyFlag>) {
          Json j{{"kind", "ready"}};
          j.update(ready_json(v));
          return j;
        } else {
          return Json{{"kind", "result"}, {"action", to_json(v.action)}, {"status", to_string(v.status)}};
        }
      },
      p);
}

Json to_json(const Telemetry& t) {
  return std::visit(
      [](const auto& v) -> Json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, WheelTelemetry>) {
          return Json{{"kind", "wheels"}, {"speeds", v.speeds}, {"stopped", v.stopped()}};
        } else if constexpr (std::is_same_v<T, JointState>) {
          return Json{{"kind", "joints"},
                      {"effector", to_string(v.effector)},
                      {"joints", v.joints},
                      {"posture", to_string(v.posture)}};
        } else {
          return Json{{"kind", "pose"}, {"x", v.x}, {"y", v.y}};
        }
      },
      t);
}

Json to_json(const Payload& p) {
  return std::visit(
      [](const auto& v) -> Json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, GoalMsg>) {
          return Json{{"id", to_json(v.id)}, {"target", to_string(v.target)}, {"request", to_json(v.request)}};
        } else if constexpr (std::is_same_v<T, CancelMsg>) {
          return Json{{"id", to_json(v.id)}, {"target", to_string(v.target)}};
        } else if constexpr (std::is_same_v<T, FeedbackMsg>) {
          return Json{{"id", to_json(v.id)},
                      {"target", to_string(v.target)},
                      {"done", v.done},
                      {"total", v.total}};
        } else if constexpr (std::is_same_v<T, ResultMsg>) {
          return Json{{"id", to_json(v.id)},
                      {"target", to_string(v.target)},
                      {"request", to_json(v.request)},
                      {"status", to_string(v.status)}};
        } else if constexpr (std::is_same_v<T, Perception> || std::is_same_v<T, Telemetry> ||
                             std::is_same_v<T, AgentAction>) {
          return to_json(v);
        } else {
          return ready_json(v);
        }
      },
      p);
}

}  // namespace rover
