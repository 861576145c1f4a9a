#pragma once

#include <string>

#include "rover/config.hpp"

namespace testutil {

inline std::string data(const std::string& rel) { return std::string(ROVER_DATA_DIR) + "/" + rel; }

inline rover::ScenarioConfig default_config() { return rover::ScenarioConfig::load(data("scenarios/default.json")); }

// Default geometry and hazards with every choice set emptied.
inline rover::ScenarioConfig deterministic_config() {
  auto cfg = default_config();
  cfg.nondet = {};
  return cfg;
}

template <typename F>
std::string error_code(F&& f) {
  try {
    f();
  } catch (const rover::Error& e) {
    return e.code();
  }
  return "";
}

}  // namespace testutil
