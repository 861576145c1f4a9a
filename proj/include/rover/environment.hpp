#pragma once

#include <array>
#include <string_view>
#include <vector>

#include "rover/bus.hpp"
#include "rover/choice.hpp"
#include "rover/config.hpp"
#include "rover/types.hpp"

namespace rover {

inline constexpr int kHazardThreshold = 5;

/// Fine iff both readings are below the threshold; radiation dominates wind.
/// Throws NegativeReading for corrupted (negative) inputs.
EnvClass classify(int wind, int radiation);

struct HazardField {
  std::array<int, 4> wind{};
  std::array<int, 4> rad{};
  int decay_rate{1};
  friend bool operator==(const HazardField&, const HazardField&) = default;
};

/// One decay step: every waypoint loses `decay_rate` radiation units, floored at 0.
HazardField decay_radiation(HazardField field);

/// Patrol cycle o -> A -> B -> C -> A.
Waypoint cycle_successor(Waypoint w);

struct World {
  HazardField hazards;
  Pose pose;
  Waypoint last_waypoint{Waypoint::O};
  int decay_countdown{1};
  bool initialized{false};
};

World initial_world(const ScenarioConfig& cfg);

EnvSample sample(const World& world, Waypoint wp);
/// Throws UnknownWaypoint.
EnvSample sample(const World& world, std::string_view wp);

/// The rover's current waypoint (if it stands on one) followed by the next two
/// cycle successors of the last waypoint it reached, without duplicates.
std::vector<Waypoint> sampled_waypoints(const World& world, const ScenarioConfig& cfg);

/// Advances the world by one tick before the nodes step: initial radiation
/// choice, wind choice on arrival, radiation decay, then /env/sample publication.
/// `branching` enables the configured choice sets.
void environment_step(World& world, Bus& bus, Chooser& chooser, const ScenarioConfig& cfg,
                      bool branching);

}  // namespace rover
