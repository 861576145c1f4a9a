#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rover/types.hpp"

namespace rover {

/// Seeded faults that turn the system into a known-bad variant. Each one must
/// be caught by the property suite or a runtime monitor.
enum class Mutant : std::uint8_t {
  None,
  EnvBlind,         // agent ignores environment beliefs
  MisroutingBus,    // bus delivers /arm/goal to the mast server
  NoStopWheels,     // wheels server never publishes the stop telemetry
  PrematureAction,  // agent ignores the readiness guard
};

std::string_view to_string(Mutant m);
Mutant mutant_from_string(std::string_view s);
inline constexpr std::array<Mutant, 4> kAllMutants{Mutant::EnvBlind, Mutant::MisroutingBus,
                                                   Mutant::NoStopWheels, Mutant::PrematureAction};

/// A corrupted sensor reading published in addition to the regular samples.
struct Injection {
  Tick tick{0};
  Waypoint wp{Waypoint::O};
  std::optional<int> wind;
  std::optional<int> rad;
};

/// Choice sets. The explorer branches over every set; the simulator resolves
/// them with its seeded generator only when `in_simulation` is set.
struct Nondeterminism {
  std::vector<int> wind_on_arrival;
  std::array<std::vector<int>, 4> initial_radiation{};
  std::array<double, 3> fault_probability{};  // per effector, 0 disables
  bool schedule_permutations{false};
  bool in_simulation{false};
};

inline constexpr int kLevelCap = 10;

struct ScenarioConfig {
  std::array<Pose, 4> waypoints{Pose{0, 0}, Pose{6, 0}, Pose{6, -4}, Pose{6, -8}};
  std::array<int, 4> wind{0, 7, 0, 0};
  std::array<int, 4> radiation{0, 0, 9, 0};
  int decay_rate{1};
  int decay_period{10};
  std::array<int, 3> init_delays{1, 1, 1};
  std::array<int, 3> durations{0, 2, 2};  // posture durations; wheels follow geometry
  int wheel_speed{1};
  int dwell{3};
  std::uint64_t seed{0};
  bool strict_radiation{false};
  bool posture_policy{true};
  Nondeterminism nondet;
  std::vector<Injection> injections;
  Mutant mutant{Mutant::None};
  std::string monitors_path;
  std::string properties_path;
  std::size_t inbox_capacity{1024};
  std::vector<double> arm_open{1, 1, 1, 1};
  std::vector<double> arm_closed{0, 0, 0, 0};
  std::vector<double> mast_open{1, 1};
  std::vector<double> mast_closed{0, 0};

  /// Validates every key; unknown keys and out-of-range values throw
  /// Error("ConfigError"). Relative file paths are resolved against `base_dir`.
  static ScenarioConfig from_json(const Json& j, const std::filesystem::path& base_dir = {});
  static ScenarioConfig load(const std::filesystem::path& file);
  Json to_json() const;
  static Json schema();

  int manhattan(Waypoint a, Waypoint b) const;
  /// Longest waypoint-to-waypoint leg, the worst-case wheels goal duration.
  int max_leg() const;
  /// Duration of a goal in ticks once accepted (wheels: motion ticks).
  int goal_duration(Effector e, const Request& r, Pose from) const;
  /// Protocol response bound: goal publish to result receipt.
  int response_bound(Effector e) const;

  const std::vector<double>& open_pose(Effector e) const;
  const std::vector<double>& closed_pose(Effector e) const;
  std::optional<Waypoint> waypoint_at(Pose p) const;
  bool has_nondeterminism() const;
};

}  // namespace rover
