#include "rover/system.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace rover {

Json world_snapshot(const World& world, const std::array<EffectorServer, 3>& servers,
                    const ScenarioConfig& cfg) {
  Json j{{"x", world.pose.x}, {"y", world.pose.y}};
  if (auto at = cfg.waypoint_at(world.pose)) {
    const auto s = sample(world, *at);
    j["at"] = to_string(*at);
    j["env"] = to_string(s.env);
    j["wind"] = s.wind;
    j["rad"] = s.rad;
  } else {
    j["at"] = nullptr;
    j["env"] = nullptr;
    j["wind"] = nullptr;
    j["rad"] = nullptr;
  }
  j["arm"] = to_string(servers[index_of(Effector::Arm)].posture());
  j["mast"] = to_string(servers[index_of(Effector::Mast)].posture());
  return j;
}

System::System(std::shared_ptr<const ScenarioConfig> cfg, bool branching)
    : cfg_(std::move(cfg)),
      branching_(branching),
      bus_(Topology::rover_default(), cfg_->inbox_capacity),
      world_(initial_world(*cfg_)),
      agent_(*cfg_),
      clients_{ActionClient(Effector::Wheels), ActionClient(Effector::Arm),
               ActionClient(Effector::Mast)},
      servers_{EffectorServer(Effector::Wheels, *cfg_), EffectorServer(Effector::Arm, *cfg_),
               EffectorServer(Effector::Mast, *cfg_)} {
  for (const auto& e : bus_.topology().edges()) bus_.subscribe(e.subscriber, e.topic);
  bus_.set_misroute_arm_goals(cfg_->mutant == Mutant::MisroutingBus);
}

std::vector<Json> System::take_explanations() {
  std::vector<Json> out;
  out.swap(explanations_);
  return out;
}

void System::env_interface_step(const std::vector<Message>& inbox) {
  const NodeId& self = nodes::kEnvInterface;
  for (const auto& m : inbox) {
    if (const auto* act = std::get_if<AgentAction>(&m.payload)) {
      bus_.publish(self, "/" + std::string(to_string(act->target)) + "/command", *act);
    } else if (const auto* p = std::get_if<Perception>(&m.payload)) {
      bus_.publish(self, "/agent/perception", *p);
    } else if (const auto* flag = std::get_if<ReadyFlag>(&m.payload)) {
      bus_.publish(self, "/agent/perception", Perception{*flag});
    } else if (const auto* res = std::get_if<ResultMsg>(&m.payload)) {
      bus_.publish(self, "/agent/perception",
                   Perception{ActionOutcome{AgentAction{res->target, res->request}, res->status}});
    }
  }
}

void System::record_snapshots() {
  if (!started_) {
    bus_.record({{"t", bus_.tick()}, {"kind", "beliefs"}, {"beliefs", agent_.beliefs().terms()}});
  }
  auto w = world_view();
  if (!started_ || w != last_world_) {
    bus_.record({{"t", bus_.tick()}, {"kind", "world"}, {"world", w}});
    last_world_ = std::move(w);
  }
}

void System::step(Chooser& chooser) {
  chooser.clear();
  if (!started_) {
    record_snapshots();
    started_ = true;
  }

  std::map<NodeId, std::vector<Message>> inbox;
  for (auto& d : bus_.step_deliver()) inbox[d.subscriber].push_back(std::move(d.message));

  environment_step(world_, bus_, chooser, *cfg_, branching_);
  env_interface_step(inbox[nodes::kEnvInterface]);
  agent_.step(inbox[nodes::kAgent], bus_, *cfg_, &explanations_);
  for (auto& c : clients_) client_step(c, inbox[c.node()], bus_);

  std::array<std::size_t, 3> order{0, 1, 2};
  if (branching_ && cfg_->nondet.schedule_permutations) {
    const auto pick = chooser.choose({"schedule", 6, {}});
    for (std::size_t i = 0; i < pick; ++i) std::next_permutation(order.begin(), order.end());
  }
  for (auto i : order) servers_[i].step(inbox[servers_[i].node()], bus_, chooser, *cfg_, world_.pose);
  // robot_state only aggregates telemetry for display; it publishes nothing.

  for (const auto& c : chooser.taken()) {
    if (c.options < 2) continue;
    bus_.record({{"t", bus_.tick()}, {"kind", "choice"}, {"label", c.label},
                 {"index", c.index}, {"options", c.options}});
  }
  record_snapshots();
}

namespace {

void normalize_ids(Json& j, const std::map<std::string, std::int64_t>& next) {
  if (j.is_object()) {
    if (j.contains("origin") && j.contains("counter") && j["origin"].is_string()) {
      const auto it = next.find(j["origin"].get<std::string>());
      if (it != next.end()) j["counter"] = it->second - j["counter"].get<std::int64_t>();
      return;
    }
    for (auto& [k, v] : j.items()) normalize_ids(v, next);
  } else if (j.is_array()) {
    for (auto& v : j) normalize_ids(v, next);
  }
}

}  // namespace

Json System::canonical() const {
  Json pending = Json::array();
  for (const auto& m : bus_.pending()) {
    pending.push_back({m.topic, m.sender, to_json(m.payload)});
  }
  Json j{{"pending", std::move(pending)},
         {"world",
          {{"wind", world_.hazards.wind},
           {"rad", world_.hazards.rad},
           {"pose", {world_.pose.x, world_.pose.y}},
           {"last", to_string(world_.last_waypoint)},
           {"decay", world_.decay_countdown},
           {"init", world_.initialized}}},
         {"agent", agent_.canonical()}};
  Json clients = Json::array();
  Json servers = Json::array();
  std::map<std::string, std::int64_t> next;
  for (const auto& c : clients_) {
    clients.push_back(c.canonical());
    next[c.node()] = c.next_counter();
  }
  for (const auto& s : servers_) servers.push_back(s.canonical());
  j["clients"] = std::move(clients);
  j["servers"] = std::move(servers);
  if (!cfg_->injections.empty()) {
    Tick last = 0;
    for (const auto& inj : cfg_->injections) last = std::max(last, inj.tick);
    j["tick"] = std::min(bus_.tick(), last + 1);
  }
  normalize_ids(j, next);
  return j;
}

}  // namespace rover
