#include "rover/environment.hpp"

#include <algorithm>

namespace rover {

EnvClass classify(int wind, int radiation) {
  if (wind < 0 || radiation < 0) {
    throw Error("NegativeReading",
                "wind=" + std::to_string(wind) + " radiation=" + std::to_string(radiation));
  }
  if (radiation >= kHazardThreshold) return EnvClass::Radiation;
  if (wind >= kHazardThreshold) return EnvClass::Windy;
  return EnvClass::Fine;
}

HazardField decay_radiation(HazardField field) {
  for (auto& r : field.rad) r = std::max(0, r - field.decay_rate);
  return field;
}

Waypoint cycle_successor(Waypoint w) {
  switch (w) {
    case Waypoint::O: return Waypoint::A;
    case Waypoint::A: return Waypoint::B;
    case Waypoint::B: return Waypoint::C;
    case Waypoint::C: return Waypoint::A;
  }
  return Waypoint::A;
}

World initial_world(const ScenarioConfig& cfg) {
  World w;
  w.hazards.wind = cfg.wind;
  w.hazards.rad = cfg.radiation;
  w.hazards.decay_rate = cfg.decay_rate;
  w.pose = cfg.waypoints[index_of(Waypoint::O)];
  w.last_waypoint = Waypoint::O;
  w.decay_countdown = cfg.decay_period;
  return w;
}

EnvSample sample(const World& world, Waypoint wp) {
  const int wind = world.hazards.wind[index_of(wp)];
  const int rad = world.hazards.rad[index_of(wp)];
  return EnvSample{wp, wind, rad, classify(wind, rad)};
}

EnvSample sample(const World& world, std::string_view wp) {
  Waypoint w{};
  try {
    w = waypoint_from_string(wp);
  } catch (const Error&) {
    throw Error("UnknownWaypoint", std::string(wp));
  }
  return sample(world, w);
}

std::vector<Waypoint> sampled_waypoints(const World& world, const ScenarioConfig& cfg) {
  std::vector<Waypoint> out;
  if (auto here = cfg.waypoint_at(world.pose)) out.push_back(*here);
  Waypoint next = world.last_waypoint;
  for (int i = 0; i < 2; ++i) {
    next = cycle_successor(next);
    if (std::find(out.begin(), out.end(), next) == out.end()) out.push_back(next);
  }
  return out;
}

void environment_step(World& world, Bus& bus, Chooser& chooser, const ScenarioConfig& cfg,
                      bool branching) {
  if (!world.initialized) {
    world.initialized = true;
    if (branching) {
      for (auto wp : kWaypoints) {
        const auto& set = cfg.nondet.initial_radiation[index_of(wp)];
        if (set.empty()) continue;
        const auto idx = chooser.choose({"init_rad:" + std::string(to_string(wp)), set.size(), {}});
        world.hazards.rad[index_of(wp)] = set[idx];
      }
    }
  }

  if (auto here = cfg.waypoint_at(world.pose); here && *here != world.last_waypoint) {
    world.last_waypoint = *here;
    const auto& set = cfg.nondet.wind_on_arrival;
    if (branching && !set.empty()) {
      const auto idx = chooser.choose({"wind:" + std::string(to_string(*here)), set.size(), {}});
      world.hazards.wind[index_of(*here)] = set[idx];
    }
  }

  if (--world.decay_countdown <= 0) {
    world.hazards = decay_radiation(world.hazards);
    world.decay_countdown = cfg.decay_period;
  }

  for (auto wp : sampled_waypoints(world, cfg)) {
    bus.publish(nodes::kEnvironment, "/env/sample", Perception{sample(world, wp)});
  }

  for (const auto& inj : cfg.injections) {
    if (inj.tick != bus.tick()) continue;
    EnvSample s = sample(world, inj.wp);
    if (inj.wind) s.wind = *inj.wind;
    if (inj.rad) s.rad = *inj.rad;
    // A corrupted reading still carries the label the sensor stack would compute.
    s.env = classify(std::max(0, s.wind), std::max(0, s.rad));
    bus.publish(nodes::kEnvironment, "/env/sample", Perception{s});
  }
}

}  // namespace rover
