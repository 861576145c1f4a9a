#include "rover/action_protocol.hpp"

#include <algorithm>

namespace rover {

GoalMsg ActionClient::send_goal(const Request& request) {
  if (!ready_) throw Error("NotReady", node_ + " has not seen its server's ready flag");
  GoalId id{node_, next_counter_++};
  live_.push_back({id, request, GoalStatus::Pending, 0, 0});
  return {id, effector_, request};
}

CancelMsg ActionClient::cancel(const GoalId& id) const {
  for (const auto& g : live_) {
    if (g.id == id) return {id, effector_};
  }
  for (const auto& g : resolved_) {
    if (g.id == id) throw Error("AlreadyResolved", id.origin + "#" + std::to_string(id.counter));
  }
  throw Error("UnknownGoal", id.origin + "#" + std::to_string(id.counter));
}

ClientGoal* ActionClient::find_live(const GoalId& id) {
  auto it = std::find_if(live_.begin(), live_.end(), [&](const ClientGoal& g) { return g.id == id; });
  return it == live_.end() ? nullptr : &*it;
}

void ActionClient::on_feedback(const FeedbackMsg& fb) {
  if (auto* g = find_live(fb.id)) {
    g->status = GoalStatus::Active;
    g->done = fb.done;
    g->total = fb.total;
  }
}

void ActionClient::on_result(const ResultMsg& res) {
  auto it = std::find_if(live_.begin(), live_.end(),
                         [&](const ClientGoal& g) { return g.id == res.id; });
  if (it == live_.end()) return;
  ClientGoal done = *it;
  done.status = res.status;
  live_.erase(it);
  resolved_.push_back(std::move(done));
  while (resolved_.size() > kResolvedHistory) resolved_.pop_front();
}

std::optional<GoalStatus> ActionClient::status(const GoalId& id) const {
  for (const auto& g : live_) {
    if (g.id == id) return g.status;
  }
  for (const auto& g : resolved_) {
    if (g.id == id) return g.status;
  }
  return std::nullopt;
}

Json ActionClient::canonical() const {
  Json goals = Json::array();
  for (const auto& g : live_) {
    goals.push_back({{"id", to_json(g.id)}, {"request", to_json(g.request)},
                     {"status", to_string(g.status)}});
  }
  return {{"ready", ready_}, {"goals", std::move(goals)}};
}

void client_step(ActionClient& client, const std::vector<Message>& inbox, Bus& bus) {
  const std::string goal_topic = "/" + std::string(to_string(client.effector())) + "/goal";
  for (const auto& m : inbox) {
    if (const auto* flag = std::get_if<ReadyFlag>(&m.payload)) {
      client.on_ready(*flag);
    } else if (const auto* fb = std::get_if<FeedbackMsg>(&m.payload)) {
      client.on_feedback(*fb);
    } else if (const auto* res = std::get_if<ResultMsg>(&m.payload)) {
      client.on_result(*res);
    } else if (const auto* act = std::get_if<AgentAction>(&m.payload)) {
      try {
        bus.publish(client.node(), goal_topic, client.send_goal(act->request));
      } catch (const Error& e) {
        if (e.code() != "NotReady") throw;
        bus.record({{"t", bus.tick()},
                    {"kind", "error"},
                    {"node", client.node()},
                    {"code", e.code()},
                    {"dropped", to_json(*act)}});
      }
    }
  }
}

bool Startup::tick() {
  if (countdown_ == 0) return false;
  return --countdown_ == 0;
}

std::vector<ServerOp> triage(const std::vector<Message>& inbox, const std::optional<GoalId>& active) {
  std::vector<ServerOp> ops;
  std::optional<GoalId> current = active;
  for (std::size_t i = 0; i < inbox.size(); ++i) {
    if (const auto* g = std::get_if<GoalMsg>(&inbox[i].payload)) {
      const bool cancelled_later =
          std::any_of(inbox.begin() + static_cast<std::ptrdiff_t>(i) + 1, inbox.end(),
                      [&](const Message& m) {
                        const auto* c = std::get_if<CancelMsg>(&m.payload);
                        return c != nullptr && c->id == g->id;
                      });
      if (cancelled_later) {
        ops.push_back({ServerOp::Kind::RejectCanceled, *g});
        continue;
      }
      if (current) ops.push_back({ServerOp::Kind::StopActive, {}});
      current = g->id;
      ops.push_back({ServerOp::Kind::Accept, *g});
    } else if (const auto* c = std::get_if<CancelMsg>(&inbox[i].payload)) {
      if (current && *current == c->id) {
        ops.push_back({ServerOp::Kind::StopActive, {}});
        current.reset();
      }
    }
  }
  return ops;
}

}  // namespace rover
