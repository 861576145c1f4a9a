#include "rover/simulation.hpp"

namespace rover {

SimulationResult simulate(const ScenarioConfig& cfg, Tick ticks, MonitorSet monitors,
                          std::optional<std::uint64_t> seed) {
  SimulationResult out;
  out.seed = seed.value_or(cfg.seed);
  System sys(std::make_shared<const ScenarioConfig>(cfg), cfg.nondet.in_simulation);
  sys.bus().set_interposer(&monitors);
  RandomChooser chooser(out.seed);
  for (Tick i = 0; i < ticks; ++i) {
    sys.step(chooser);
    for (auto& e : sys.take_events()) out.trace.push_back(std::move(e));
    for (auto& e : sys.take_explanations()) out.explanations.push_back(std::move(e));
  }
  sys.bus().set_interposer(nullptr);
  out.monitors = monitors.summary();
  out.violated = monitors.any_violation();
  return out;
}

std::vector<std::pair<Tick, Waypoint>> visits(const std::vector<Json>& trace) {
  std::vector<std::pair<Tick, Waypoint>> out;
  for (const auto& e : trace) {
    if (e.value("kind", std::string()) != "publish" || e.value("topic", std::string()) != "/wheels/result") continue;
    const auto& p = e.at("payload");
    if (p.value("status", std::string()) != "Succeeded") continue;
    const auto& r = p.at("request");
    if (r.value("kind", std::string()) != "waypoint") continue;
    out.emplace_back(e.at("t").get<Tick>(), waypoint_from_string(r.at("wp").get<std::string>()));
  }
  return out;
}

}  // namespace rover
