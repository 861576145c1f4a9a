#include "rover/bus.hpp"

#include <algorithm>

namespace rover {

void Topology::add_node(const NodeId& node) { nodes_.insert(node); }

void Topology::add_topic(const std::string& topic, PayloadKind kind) {
  if (topic.empty() || topic.front() != '/') throw Error("InvalidTopic", "'" + topic + "'");
  if (!topics_.emplace(topic, kind).second) throw Error("InvalidTopic", "duplicate '" + topic + "'");
}

void Topology::add_edge(const NodeId& publisher, const std::string& topic, const NodeId& subscriber) {
  if (!has_node(publisher)) throw Error("UnknownNode", publisher);
  if (!has_node(subscriber)) throw Error("UnknownNode", subscriber);
  if (!has_topic(topic)) throw Error("UnknownTopic", topic);
  edges_.push_back({publisher, topic, subscriber});
}

PayloadKind Topology::topic_kind(const std::string& topic) const {
  const auto it = topics_.find(topic);
  if (it == topics_.end()) throw Error("UnknownTopic", topic);
  return it->second;
}

bool Topology::can_publish(const NodeId& node, const std::string& topic) const {
  return std::any_of(edges_.begin(), edges_.end(),
                     [&](const Edge& e) { return e.publisher == node && e.topic == topic; });
}

bool Topology::can_subscribe(const NodeId& node, const std::string& topic) const {
  return std::any_of(edges_.begin(), edges_.end(),
                     [&](const Edge& e) { return e.subscriber == node && e.topic == topic; });
}

Topology Topology::rover_default() {
  using namespace nodes;
  Topology t;
  for (const auto& n : {kAgent, kEnvInterface, kEnvironment, kRobotState}) t.add_node(n);
  for (auto e : kEffectors) {
    t.add_node(client(e));
    t.add_node(server(e));
  }

  t.add_topic("/agent/action", PayloadKind::Action);
  t.add_topic("/agent/perception", PayloadKind::Perception);
  t.add_topic("/env/sample", PayloadKind::Perception);
  t.add_topic("/pose", PayloadKind::Telemetry);
  t.add_edge(kAgent, "/agent/action", kEnvInterface);
  t.add_edge(kEnvInterface, "/agent/perception", kAgent);
  t.add_edge(kEnvironment, "/env/sample", kEnvInterface);

  for (auto e : kEffectors) {
    const std::string base = "/" + std::string(to_string(e));
    const std::string ready = "/ready/" + std::string(to_string(e));
    t.add_topic(base + "/command", PayloadKind::Action);
    t.add_topic(base + "/goal", PayloadKind::Goal);
    t.add_topic(base + "/cancel", PayloadKind::Cancel);
    t.add_topic(base + "/feedback", PayloadKind::Feedback);
    t.add_topic(base + "/result", PayloadKind::Result);
    t.add_topic(base + "/telemetry", PayloadKind::Telemetry);
    t.add_topic(ready, PayloadKind::ReadyFlag);

    t.add_edge(kEnvInterface, base + "/command", client(e));
    t.add_edge(client(e), base + "/goal", server(e));
    t.add_edge(client(e), base + "/cancel", server(e));
    t.add_edge(server(e), base + "/feedback", client(e));
    t.add_edge(server(e), base + "/result", client(e));
    t.add_edge(server(e), base + "/result", kEnvInterface);
    t.add_edge(server(e), ready, client(e));
    t.add_edge(server(e), ready, kEnvInterface);
    t.add_edge(server(e), base + "/telemetry", kRobotState);
  }
  t.add_edge(server(Effector::Wheels), "/pose", kRobotState);
  t.add_edge(server(Effector::Wheels), "/pose", kEnvInterface);
  return t;
}

Json message_event(std::string_view kind, const Message& m, Tick t, const NodeId* receiver) {
  Json j{{"t", t}, {"kind", kind}, {"seq", m.seq}, {"topic", m.topic}, {"sender", m.sender}};
  if (receiver) j["receiver"] = *receiver;
  j["payload"] = to_json(m.payload);
  return j;
}

Bus::Bus(Topology topology, std::size_t inbox_capacity)
    : topology_(std::make_shared<const Topology>(std::move(topology))), inbox_capacity_(inbox_capacity) {}

std::int64_t Bus::publish(const NodeId& sender, const std::string& topic, Payload payload) {
  if (!topology_->has_topic(topic)) throw Error("UnknownTopic", topic);
  if (!topology_->can_publish(sender, topic)) {
    throw Error("UnauthorizedPublisher", sender + " on " + topic);
  }
  if (topology_->topic_kind(topic) != kind_of(payload)) {
    throw Error("PayloadMismatch", std::string(to_string(kind_of(payload))) + " on " + topic);
  }
  Message m{++seq_, tick_, sender, topic, std::move(payload)};
  Json event = message_event("publish", m, tick_);
  Admission adm;
  if (interposer_ != nullptr) adm = interposer_->admit(m, event);
  ++published_[topic];
  if (adm.blocked) {
    event["kind"] = "block";
    ++blocked_[topic];
  }
  events_.push_back(std::move(event));
  for (auto& r : adm.reports) events_.push_back(std::move(r));
  if (!adm.blocked) pending_.push_back(std::move(m));
  return seq_;
}

std::vector<Delivery> Bus::step_deliver() {
  ++tick_;
  std::vector<Message> batch;
  batch.swap(pending_);
  // publish() appends in seq order, so the batch is already sorted.
  std::vector<Delivery> out;
  std::map<NodeId, std::size_t> inbox_sizes;
  for (auto& m : batch) {
    const auto& subs = subscribers(m.topic);
    for (const auto& sub : subs) {
      NodeId receiver = sub;
      if (misroute_arm_goals_ && m.topic == "/arm/goal" && sub == nodes::server(Effector::Arm)) {
        receiver = nodes::server(Effector::Mast);
      }
      if (++inbox_sizes[receiver] > inbox_capacity_) {
        throw Error("InboxOverflow", receiver + " exceeded " + std::to_string(inbox_capacity_) +
                                         " messages at tick " + std::to_string(tick_));
      }
      events_.push_back(message_event("deliver", m, tick_, &receiver));
      ++delivered_[{sub, m.topic}];
      out.push_back({receiver, m});
    }
  }
  return out;
}

SubscriptionHandle Bus::subscribe(const NodeId& node, const std::string& topic) {
  if (!topology_->has_topic(topic) || !topology_->can_subscribe(node, topic)) {
    throw Error("UnknownTopic", node + " has no edge for " + topic);
  }
  auto& subs = subscriptions_[topic];
  if (std::find(subs.begin(), subs.end(), node) == subs.end()) subs.push_back(node);
  return {node, topic};
}

const std::vector<NodeId>& Bus::subscribers(const std::string& topic) const {
  static const std::vector<NodeId> kNone;
  const auto it = subscriptions_.find(topic);
  return it == subscriptions_.end() ? kNone : it->second;
}

void Bus::record(Json event) { events_.push_back(std::move(event)); }

std::vector<Json> Bus::take_events() {
  std::vector<Json> out;
  out.swap(events_);
  return out;
}

std::int64_t Bus::published_count(const std::string& topic) const {
  const auto it = published_.find(topic);
  return it == published_.end() ? 0 : it->second;
}

std::int64_t Bus::blocked_count(const std::string& topic) const {
  const auto it = blocked_.find(topic);
  return it == blocked_.end() ? 0 : it->second;
}

std::int64_t Bus::delivered_count(const NodeId& subscriber, const std::string& topic) const {
  const auto it = delivered_.find({subscriber, topic});
  return it == delivered_.end() ? 0 : it->second;
}

}  // namespace rover
