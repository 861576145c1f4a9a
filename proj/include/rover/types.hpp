#pragma once

// Domain vocabulary shared by every node of the rover network: effectors,
// waypoints, action requests and the payload union carried on the bus.

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

namespace rover {

using Json = nlohmann::ordered_json;
using Tick = std::int64_t;
using NodeId = std::string;

/// Base for every error raised by the library. `code()` is a stable
/// machine-readable tag (e.g. "UnknownTopic") used in logs and tests.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(code + ": " + what), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

enum class Effector : std::uint8_t { Wheels, Arm, Mast };
inline constexpr std::array<Effector, 3> kEffectors{Effector::Wheels, Effector::Arm,
                                                    Effector::Mast};

enum class Waypoint : std::uint8_t { O, A, B, C };
inline constexpr std::array<Waypoint, 4> kWaypoints{Waypoint::O, Waypoint::A, Waypoint::B,
                                                    Waypoint::C};

enum class EnvClass : std::uint8_t { Fine, Windy, Radiation };
enum class GoalStatus : std::uint8_t { Pending, Active, Succeeded, Canceled, Aborted };
enum class Direction : std::uint8_t { Forward, Backward, Left, Right };
enum class PostureCmd : std::uint8_t { Open, Close };
enum class Posture : std::uint8_t { Open, Closed, Moving };

std::string_view to_string(Effector e);
std::string_view to_string(Waypoint w);
std::string_view to_string(EnvClass c);
std::string_view to_string(GoalStatus s);
std::string_view to_string(Direction d);
std::string_view to_string(PostureCmd c);
std::string_view to_string(Posture p);

Effector effector_from_string(std::string_view s);
Waypoint waypoint_from_string(std::string_view s);
Direction direction_from_string(std::string_view s);
PostureCmd posture_cmd_from_string(std::string_view s);

inline std::size_t index_of(Effector e) { return static_cast<std::size_t>(e); }
inline std::size_t index_of(Waypoint w) { return static_cast<std::size_t>(w); }

inline bool is_terminal(GoalStatus s) {
  return s == GoalStatus::Succeeded || s == GoalStatus::Canceled || s == GoalStatus::Aborted;
}

/// Node ids of the default topology.
namespace nodes {
inline const NodeId kAgent = "agent";
inline const NodeId kEnvInterface = "env_interface";
inline const NodeId kEnvironment = "environment";
inline const NodeId kRobotState = "robot_state";
NodeId client(Effector e);
NodeId server(Effector e);
}  // namespace nodes

struct DirectionMove {
  Direction dir{Direction::Forward};
  int speed{0};
  int distance{0};
  friend bool operator==(const DirectionMove&, const DirectionMove&) = default;
};

struct WaypointMove {
  Waypoint wp{Waypoint::O};
  friend bool operator==(const WaypointMove&, const WaypointMove&) = default;
};

struct PostureMove {
  PostureCmd cmd{PostureCmd::Close};
  friend bool operator==(const PostureMove&, const PostureMove&) = default;
};

using Request = std::variant<DirectionMove, WaypointMove, PostureMove>;

struct GoalId {
  NodeId origin;
  std::int64_t counter{0};
  friend bool operator==(const GoalId&, const GoalId&) = default;
  friend auto operator<=>(const GoalId&, const GoalId&) = default;
};

/// One of the four agent actions: control_wheels, move_to_waypoint,
/// control_arm, control_mast. The action name is derived from the target and
/// request alternative.
struct AgentAction {
  Effector target{Effector::Wheels};
  Request request;

  std::string name() const;
  /// Ground term form, e.g. "move_to_waypoint(A)" or "control_arm(open)".
  std::string term() const;
  friend bool operator==(const AgentAction&, const AgentAction&) = default;

  static AgentAction control_wheels(Direction dir, int speed, int distance);
  static AgentAction move_to_waypoint(Waypoint wp);
  static AgentAction control_arm(PostureCmd cmd);
  static AgentAction control_mast(PostureCmd cmd);
};

struct GoalMsg {
  GoalId id;
  Effector target{Effector::Wheels};
  Request request;
};

struct CancelMsg {
  GoalId id;
  Effector target{Effector::Wheels};
};

/// Progress is the rational done/total, always within [0, 1].
struct FeedbackMsg {
  GoalId id;
  Effector target{Effector::Wheels};
  int done{0};
  int total{1};
};

struct ResultMsg {
  GoalId id;
  Effector target{Effector::Wheels};
  Request request;
  GoalStatus status{GoalStatus::Succeeded};
};

struct EnvSample {
  Waypoint wp{Waypoint::O};
  int wind{0};
  int rad{0};
  EnvClass env{EnvClass::Fine};
};

struct ReadyFlag {
  Effector module{Effector::Wheels};
  bool ready{true};
};

/// Outcome of an agent action, as reported back to the agent.
struct ActionOutcome {
  AgentAction action;
  GoalStatus status{GoalStatus::Succeeded};
};

using Perception = std::variant<EnvSample, ReadyFlag, ActionOutcome>;

struct WheelTelemetry {
  std::array<int, 6> speeds{};
  bool stopped() const;
};

struct JointState {
  Effector effector{Effector::Arm};
  std::vector<double> joints;
  Posture posture{Posture::Closed};
};

struct Pose {
  int x{0};
  int y{0};
  friend bool operator==(const Pose&, const Pose&) = default;
};

using Telemetry = std::variant<WheelTelemetry, JointState, Pose>;

enum class PayloadKind : std::uint8_t {
  Goal,
  Cancel,
  Feedback,
  Result,
  Perception,
  Telemetry,
  ReadyFlag,
  Action
};

using Payload = std::variant<GoalMsg, CancelMsg, FeedbackMsg, ResultMsg, Perception, Telemetry,
                             ReadyFlag, AgentAction>;

PayloadKind kind_of(const Payload& p);
std::string_view to_string(PayloadKind k);

Json to_json(const GoalId& id);
Json to_json(const Request& r);
Json to_json(const AgentAction& a);
Json to_json(const Perception& p);
Json to_json(const Telemetry& t);
Json to_json(const Payload& p);

/// Wheels take direction/waypoint requests, arm and mast take open/close.
bool request_fits(Effector target, const Request& r);

}  // namespace rover
