#pragma once

// The whole rover network as one copyable value: bus, world, agent, action
// clients and effector servers. step() advances every node by one tick.

#include <array>
#include <memory>
#include <optional>
#include <vector>

#include "rover/action_protocol.hpp"
#include "rover/agent.hpp"
#include "rover/bus.hpp"
#include "rover/choice.hpp"
#include "rover/config.hpp"
#include "rover/effectors.hpp"
#include "rover/environment.hpp"

namespace rover {

/// Ground-truth view used by world.* property atoms.
Json world_snapshot(const World& world, const std::array<EffectorServer, 3>& servers,
                    const ScenarioConfig& cfg);

class System {
 public:
  /// `branching` turns the configured choice sets on (always for the explorer,
  /// `nondeterminism.in_simulation` for the simulator).
  System(std::shared_ptr<const ScenarioConfig> cfg, bool branching);

  /// One tick. Trace events and explanation records accumulate until taken.
  void step(Chooser& chooser);

  std::vector<Json> take_events() { return bus_.take_events(); }
  std::vector<Json> take_explanations();

  /// Everything that determines future behaviour, without tick or sequence
  /// numbers. Goal ids are rewritten relative to their client's next counter.
  Json canonical() const;

  Tick tick() const { return bus_.tick(); }
  Bus& bus() { return bus_; }
  const Bus& bus() const { return bus_; }
  const World& world() const { return world_; }
  const Agent& agent() const { return agent_; }
  const ActionClient& client(Effector e) const { return clients_[index_of(e)]; }
  const EffectorServer& server(Effector e) const { return servers_[index_of(e)]; }
  const ScenarioConfig& config() const { return *cfg_; }
  Json world_view() const { return world_snapshot(world_, servers_, *cfg_); }

 private:
  void env_interface_step(const std::vector<Message>& inbox);
  void record_snapshots();

  std::shared_ptr<const ScenarioConfig> cfg_;
  bool branching_;
  Bus bus_;
  World world_;
  Agent agent_;
  std::array<ActionClient, 3> clients_;
  std::array<EffectorServer, 3> servers_;
  bool started_{false};
  Json last_world_;
  std::vector<Json> explanations_;
};

}  // namespace rover
