#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "rover/monitor.hpp"
#include "rover/system.hpp"

namespace rover {

struct SimulationResult {
  std::vector<Json> trace;
  std::vector<Json> explanations;
  Json monitors = Json::array();
  bool violated{false};
  std::uint64_t seed{0};
};

/// Runs the network for `ticks` ticks with the monitors interposed on the bus.
/// Choice points are resolved by a generator seeded with `seed` (default: the
/// config's seed).
SimulationResult simulate(const ScenarioConfig& cfg, Tick ticks, MonitorSet monitors = {},
                          std::optional<std::uint64_t> seed = std::nullopt);

/// Waypoints the rover reached, in order, from the wheels results in a trace.
std::vector<std::pair<Tick, Waypoint>> visits(const std::vector<Json>& trace);

}  // namespace rover
