#include "rover/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <set>

namespace rover {

namespace {

constexpr std::array<std::string_view, 5> kMutantNames{"none", "env-blind", "misrouting-bus",
                                                       "no-stop-wheels", "premature-action"};

[[noreturn]] void fail(const std::string& where, const std::string& msg) {
  throw Error("ConfigError", where + ": " + msg);
}

void only_keys(const Json& j, const std::string& where, std::initializer_list<std::string_view> keys) {
  if (!j.is_object()) fail(where, "expected an object");
  for (const auto& [k, _] : j.items()) {
    if (std::find(keys.begin(), keys.end(), k) == keys.end()) fail(where, "unknown key '" + k + "'");
  }
}

int get_int(const Json& j, const std::string& where, int lo, int hi) {
  if (!j.is_number_integer()) fail(where, "expected an integer");
  const auto v = j.get<std::int64_t>();
  if (v < lo || v > hi) {
    fail(where, "value " + std::to_string(v) + " outside [" + std::to_string(lo) + ", " +
                    std::to_string(hi) + "]");
  }
  return static_cast<int>(v);
}

bool get_bool(const Json& j, const std::string& where) {
  if (!j.is_boolean()) fail(where, "expected a boolean");
  return j.get<bool>();
}

std::vector<double> get_pose(const Json& j, const std::string& where, std::size_t joints) {
  if (!j.is_array() || j.size() != joints) {
    fail(where, "expected an array of " + std::to_string(joints) + " numbers");
  }
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) fail(where, "expected numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

Waypoint get_waypoint(const std::string& name, const std::string& where) {
  try {
    return waypoint_from_string(name);
  } catch (const Error&) {
    fail(where, "unknown waypoint '" + name + "'");
  }
}

Effector get_effector(const std::string& name, const std::string& where) {
  try {
    return effector_from_string(name);
  } catch (const Error&) {
    fail(where, "unknown effector '" + name + "'");
  }
}

std::array<int, 4> get_levels(const Json& j, const std::string& where, std::array<int, 4> base) {
  only_keys(j, where, {"o", "A", "B", "C"});
  for (const auto& [k, v] : j.items()) {
    base[index_of(get_waypoint(k, where))] = get_int(v, where + "." + k, 0, kLevelCap);
  }
  return base;
}

std::string resolve(const std::string& p, const std::filesystem::path& base) {
  if (p.empty()) return p;
  std::filesystem::path path(p);
  if (path.is_relative() && !base.empty()) path = base / path;
  return path.lexically_normal().string();
}

}  // namespace

std::string_view to_string(Mutant m) { return kMutantNames[static_cast<std::size_t>(m)]; }

Mutant mutant_from_string(std::string_view s) {
  for (std::size_t i = 0; i < kMutantNames.size(); ++i) {
    if (kMutantNames[i] == s) return static_cast<Mutant>(i);
  }
  throw Error("ConfigError", "unknown mutant '" + std::string(s) + "'");
}

ScenarioConfig ScenarioConfig::from_json(const Json& j, const std::filesystem::path& base_dir) {
  ScenarioConfig c;
  only_keys(j, "config",
            {"waypoints", "wind", "radiation", "decay", "init_delays", "durations", "wheel_speed",
             "dwell", "seed", "agent", "nondeterminism", "injections", "mutant", "monitors",
             "properties", "inbox_capacity", "poses"});

  if (j.contains("waypoints")) {
    const auto& w = j["waypoints"];
    only_keys(w, "waypoints", {"o", "A", "B", "C"});
    for (const auto& [k, v] : w.items()) {
      const std::string where = "waypoints." + k;
      if (!v.is_array() || v.size() != 2) fail(where, "expected [x, y]");
      c.waypoints[index_of(get_waypoint(k, where))] =
          Pose{get_int(v[0], where, -1000, 1000), get_int(v[1], where, -1000, 1000)};
    }
    std::set<std::pair<int, int>> seen;
    for (const auto& p : c.waypoints) {
      if (!seen.emplace(p.x, p.y).second) fail("waypoints", "coordinates must be distinct");
    }
  }
  if (j.contains("wind")) c.wind = get_levels(j["wind"], "wind", c.wind);
  if (j.contains("radiation")) c.radiation = get_levels(j["radiation"], "radiation", c.radiation);
  if (j.contains("decay")) {
    const auto& d = j["decay"];
    only_keys(d, "decay", {"rate", "period"});
    if (d.contains("rate")) c.decay_rate = get_int(d["rate"], "decay.rate", 0, kLevelCap);
    if (d.contains("period")) c.decay_period = get_int(d["period"], "decay.period", 1, 1000);
  }
  if (j.contains("init_delays")) {
    const auto& d = j["init_delays"];
    only_keys(d, "init_delays", {"wheels", "arm", "mast"});
    for (const auto& [k, v] : d.items()) {
      c.init_delays[index_of(get_effector(k, "init_delays"))] =
          get_int(v, "init_delays." + k, 0, 1000);
    }
  }
  if (j.contains("durations")) {
    const auto& d = j["durations"];
    only_keys(d, "durations", {"arm", "mast"});
    for (const auto& [k, v] : d.items()) {
      c.durations[index_of(get_effector(k, "durations"))] = get_int(v, "durations." + k, 1, 100);
    }
  }
  if (j.contains("wheel_speed")) c.wheel_speed = get_int(j["wheel_speed"], "wheel_speed", 1, 100);
  if (j.contains("dwell")) c.dwell = get_int(j["dwell"], "dwell", 0, 100);
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) fail("seed", "expected a nonnegative integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("agent")) {
    const auto& a = j["agent"];
    only_keys(a, "agent", {"strict_radiation", "posture_policy"});
    if (a.contains("strict_radiation")) c.strict_radiation = get_bool(a["strict_radiation"], "agent.strict_radiation");
    if (a.contains("posture_policy")) c.posture_policy = get_bool(a["posture_policy"], "agent.posture_policy");
  }
  if (j.contains("nondeterminism")) {
    const auto& n = j["nondeterminism"];
    only_keys(n, "nondeterminism",
              {"wind_on_arrival", "initial_radiation", "faults", "schedule_permutations",
               "in_simulation"});
    if (n.contains("wind_on_arrival")) {
      if (!n["wind_on_arrival"].is_array()) fail("nondeterminism.wind_on_arrival", "expected an array");
      for (const auto& v : n["wind_on_arrival"]) {
        c.nondet.wind_on_arrival.push_back(get_int(v, "nondeterminism.wind_on_arrival", 0, kLevelCap));
      }
    }
    if (n.contains("initial_radiation")) {
      const auto& r = n["initial_radiation"];
      only_keys(r, "nondeterminism.initial_radiation", {"o", "A", "B", "C"});
      for (const auto& [k, v] : r.items()) {
        const std::string where = "nondeterminism.initial_radiation." + k;
        if (!v.is_array()) fail(where, "expected an array");
        auto& set = c.nondet.initial_radiation[index_of(get_waypoint(k, where))];
        for (const auto& x : v) set.push_back(get_int(x, where, 0, kLevelCap));
      }
    }
    if (n.contains("faults")) {
      const auto& f = n["faults"];
      only_keys(f, "nondeterminism.faults", {"wheels", "arm", "mast"});
      for (const auto& [k, v] : f.items()) {
        if (!v.is_number() || v.get<double>() < 0.0 || v.get<double>() > 1.0) {
          fail("nondeterminism.faults." + k, "expected a probability in [0, 1]");
        }
        c.nondet.fault_probability[index_of(get_effector(k, "nondeterminism.faults"))] = v.get<double>();
      }
    }
    if (n.contains("schedule_permutations")) {
      c.nondet.schedule_permutations = get_bool(n["schedule_permutations"], "nondeterminism.schedule_permutations");
    }
    if (n.contains("in_simulation")) {
      c.nondet.in_simulation = get_bool(n["in_simulation"], "nondeterminism.in_simulation");
    }
  }
  if (j.contains("injections")) {
    if (!j["injections"].is_array()) fail("injections", "expected an array");
    for (const auto& inj : j["injections"]) {
      only_keys(inj, "injections[]", {"tick", "waypoint", "wind", "rad"});
      if (!inj.contains("tick") || !inj.contains("waypoint")) fail("injections[]", "tick and waypoint are required");
      Injection x;
      x.tick = get_int(inj["tick"], "injections[].tick", 1, 1 << 30);
      if (!inj["waypoint"].is_string()) fail("injections[].waypoint", "expected a string");
      x.wp = get_waypoint(inj["waypoint"].get<std::string>(), "injections[].waypoint");
      if (inj.contains("wind")) x.wind = get_int(inj["wind"], "injections[].wind", -1000, 1000);
      if (inj.contains("rad")) x.rad = get_int(inj["rad"], "injections[].rad", -1000, 1000);
      c.injections.push_back(x);
    }
  }
  if (j.contains("mutant")) {
    if (!j["mutant"].is_string()) fail("mutant", "expected a string");
    try {
      c.mutant = mutant_from_string(j["mutant"].get<std::string>());
    } catch (const Error& e) {
      fail("mutant", e.what());
    }
  }
  if (j.contains("monitors")) {
    if (!j["monitors"].is_string()) fail("monitors", "expected a path");
    c.monitors_path = resolve(j["monitors"].get<std::string>(), base_dir);
  }
  if (j.contains("properties")) {
    if (!j["properties"].is_string()) fail("properties", "expected a path");
    c.properties_path = resolve(j["properties"].get<std::string>(), base_dir);
  }
  if (j.contains("inbox_capacity")) {
    c.inbox_capacity = static_cast<std::size_t>(get_int(j["inbox_capacity"], "inbox_capacity", 1, 1 << 20));
  }
  if (j.contains("poses")) {
    const auto& p = j["poses"];
    only_keys(p, "poses", {"arm", "mast"});
    if (p.contains("arm")) {
      only_keys(p["arm"], "poses.arm", {"open", "closed"});
      if (p["arm"].contains("open")) c.arm_open = get_pose(p["arm"]["open"], "poses.arm.open", 4);
      if (p["arm"].contains("closed")) c.arm_closed = get_pose(p["arm"]["closed"], "poses.arm.closed", 4);
    }
    if (p.contains("mast")) {
      only_keys(p["mast"], "poses.mast", {"open", "closed"});
      if (p["mast"].contains("open")) c.mast_open = get_pose(p["mast"]["open"], "poses.mast.open", 2);
      if (p["mast"].contains("closed")) c.mast_closed = get_pose(p["mast"]["closed"], "poses.mast.closed", 2);
    }
    if (c.arm_open == c.arm_closed || c.mast_open == c.mast_closed) {
      fail("poses", "open and closed poses must differ");
    }
  }
  return c;
}

ScenarioConfig ScenarioConfig::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Error("ConfigError", "cannot open " + file.string());
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error("ConfigError", file.string() + ": " + e.what());
  }
  return from_json(j, file.parent_path());
}

Json ScenarioConfig::to_json() const {
  Json j;
  Json wps = Json::object();
  Json wind_j = Json::object();
  Json rad_j = Json::object();
  for (auto w : kWaypoints) {
    const std::string k(rover::to_string(w));
    wps[k] = {waypoints[index_of(w)].x, waypoints[index_of(w)].y};
    wind_j[k] = wind[index_of(w)];
    rad_j[k] = radiation[index_of(w)];
  }
  j["waypoints"] = wps;
  j["wind"] = wind_j;
  j["radiation"] = rad_j;
  j["decay"] = {{"rate", decay_rate}, {"period", decay_period}};
  j["init_delays"] = {{"wheels", init_delays[0]}, {"arm", init_delays[1]}, {"mast", init_delays[2]}};
  j["durations"] = {{"arm", durations[1]}, {"mast", durations[2]}};
  j["wheel_speed"] = wheel_speed;
  j["dwell"] = dwell;
  j["seed"] = seed;
  j["agent"] = {{"strict_radiation", strict_radiation}, {"posture_policy", posture_policy}};
  Json nd;
  nd["wind_on_arrival"] = nondet.wind_on_arrival;
  Json ir = Json::object();
  for (auto w : kWaypoints) {
    if (!nondet.initial_radiation[index_of(w)].empty()) {
      ir[std::string(rover::to_string(w))] = nondet.initial_radiation[index_of(w)];
    }
  }
  nd["initial_radiation"] = ir;
  nd["faults"] = {{"wheels", nondet.fault_probability[0]},
                  {"arm", nondet.fault_probability[1]},
                  {"mast", nondet.fault_probability[2]}};
  nd["schedule_permutations"] = nondet.schedule_permutations;
  nd["in_simulation"] = nondet.in_simulation;
  j["nondeterminism"] = nd;
  Json inj = Json::array();
  for (const auto& x : injections) {
    Json e{{"tick", x.tick}, {"waypoint", rover::to_string(x.wp)}};
    if (x.wind) e["wind"] = *x.wind;
    if (x.rad) e["rad"] = *x.rad;
    inj.push_back(e);
  }
  j["injections"] = inj;
  j["mutant"] = rover::to_string(mutant);
  if (!monitors_path.empty()) j["monitors"] = monitors_path;
  if (!properties_path.empty()) j["properties"] = properties_path;
  j["inbox_capacity"] = inbox_capacity;
  j["poses"] = {{"arm", {{"open", arm_open}, {"closed", arm_closed}}},
                {"mast", {{"open", mast_open}, {"closed", mast_closed}}}};
  return j;
}

Json ScenarioConfig::schema() {
  const Json level{{"type", "integer"}, {"minimum", 0}, {"maximum", kLevelCap}};
  const Json per_wp_level{{"type", "object"},
                          {"additionalProperties", false},
                          {"properties", {{"o", level}, {"A", level}, {"B", level}, {"C", level}}}};
  const Json coord{{"type", "array"}, {"items", {{"type", "integer"}}}, {"minItems", 2}, {"maxItems", 2}};
  const Json level_set{{"type", "array"}, {"items", level}};
  const Json prob{{"type", "number"}, {"minimum", 0}, {"maximum", 1}};
  auto pose = [](int n) {
    return Json{{"type", "array"}, {"items", {{"type", "number"}}}, {"minItems", n}, {"maxItems", n}};
  };
  auto object = [](Json props) {
    return Json{{"type", "object"}, {"additionalProperties", false}, {"properties", std::move(props)}};
  };
  const Json delay{{"type", "integer"}, {"minimum", 0}};
  return Json{
      {"$schema", "http://json-schema.org/draft-07/schema#"},
      {"title", "Rover scenario configuration"},
      {"type", "object"},
      {"additionalProperties", false},
      {"properties",
       {{"waypoints", object({{"o", coord}, {"A", coord}, {"B", coord}, {"C", coord}})},
        {"wind", per_wp_level},
        {"radiation", per_wp_level},
        {"decay", object({{"rate", level}, {"period", {{"type", "integer"}, {"minimum", 1}}}})},
        {"init_delays", object({{"wheels", delay}, {"arm", delay}, {"mast", delay}})},
        {"durations", object({{"arm", {{"type", "integer"}, {"minimum", 1}}},
                              {"mast", {{"type", "integer"}, {"minimum", 1}}}})},
        {"wheel_speed", {{"type", "integer"}, {"minimum", 1}}},
        {"dwell", {{"type", "integer"}, {"minimum", 0}}},
        {"seed", {{"type", "integer"}, {"minimum", 0}}},
        {"agent", object({{"strict_radiation", {{"type", "boolean"}}},
                          {"posture_policy", {{"type", "boolean"}}}})},
        {"nondeterminism",
         object({{"wind_on_arrival", level_set},
                 {"initial_radiation",
                  object({{"o", level_set}, {"A", level_set}, {"B", level_set}, {"C", level_set}})},
                 {"faults", object({{"wheels", prob}, {"arm", prob}, {"mast", prob}})},
                 {"schedule_permutations", {{"type", "boolean"}}},
                 {"in_simulation", {{"type", "boolean"}}}})},
        {"injections",
         {{"type", "array"},
          {"items",
           {{"type", "object"},
            {"additionalProperties", false},
            {"required", {"tick", "waypoint"}},
            {"properties",
             {{"tick", {{"type", "integer"}, {"minimum", 1}}},
              {"waypoint", {{"enum", {"o", "A", "B", "C"}}}},
              {"wind", {{"type", "integer"}}},
              {"rad", {{"type", "integer"}}}}}}}}},
        {"mutant", {{"enum", kMutantNames}}},
        {"monitors", {{"type", "string"}}},
        {"properties", {{"type", "string"}}},
        {"inbox_capacity", {{"type", "integer"}, {"minimum", 1}}},
        {"poses", object({{"arm", object({{"open", pose(4)}, {"closed", pose(4)}})},
                          {"mast", object({{"open", pose(2)}, {"closed", pose(2)}})}})}}}};
}

int ScenarioConfig::manhattan(Waypoint a, Waypoint b) const {
  const auto& p = waypoints[index_of(a)];
  const auto& q = waypoints[index_of(b)];
  return std::abs(p.x - q.x) + std::abs(p.y - q.y);
}

int ScenarioConfig::max_leg() const {
  int best = 0;
  for (auto a : kWaypoints) {
    for (auto b : kWaypoints) best = std::max(best, manhattan(a, b));
  }
  return best;
}

int ScenarioConfig::goal_duration(Effector e, const Request& r, Pose from) const {
  if (e != Effector::Wheels) return durations[index_of(e)];
  if (const auto* d = std::get_if<DirectionMove>(&r)) return d->distance;
  const auto& to = waypoints[index_of(std::get<WaypointMove>(r).wp)];
  return std::abs(from.x - to.x) + std::abs(from.y - to.y);
}

int ScenarioConfig::response_bound(Effector e) const {
  const int duration = e == Effector::Wheels ? max_leg() : durations[index_of(e)];
  return duration + 3;
}

const std::vector<double>& ScenarioConfig::open_pose(Effector e) const {
  return e == Effector::Arm ? arm_open : mast_open;
}

const std::vector<double>& ScenarioConfig::closed_pose(Effector e) const {
  return e == Effector::Arm ? arm_closed : mast_closed;
}

std::optional<Waypoint> ScenarioConfig::waypoint_at(Pose p) const {
  for (auto w : kWaypoints) {
    if (waypoints[index_of(w)] == p) return w;
  }
  return std::nullopt;
}

bool ScenarioConfig::has_nondeterminism() const {
  if (!nondet.wind_on_arrival.empty() || nondet.schedule_permutations) return true;
  for (const auto& s : nondet.initial_radiation) {
    if (!s.empty()) return true;
  }
  for (double p : nondet.fault_probability) {
    if (p > 0.0) return true;
  }
  return false;
}

}  // namespace rover
