#pragma once

// Deterministic publish/subscribe bus. One call to step_deliver() is one
// simulation tick: everything published before it is delivered in seq order.

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "rover/types.hpp"

namespace rover {

struct Edge {
  NodeId publisher;
  std::string topic;
  NodeId subscriber;
  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Declared nodes, topics (with their payload kind) and dataflow edges.
class Topology {
 public:
  void add_node(const NodeId& node);
  void add_topic(const std::string& topic, PayloadKind kind);
  void add_edge(const NodeId& publisher, const std::string& topic, const NodeId& subscriber);

  /// The rover network: agent, environment interface, environment, the three
  /// action clients and servers, and the robot state publisher.
  static Topology rover_default();

  bool has_node(const NodeId& node) const { return nodes_.count(node) != 0; }
  bool has_topic(const std::string& topic) const { return topics_.count(topic) != 0; }
  PayloadKind topic_kind(const std::string& topic) const;
  bool can_publish(const NodeId& node, const std::string& topic) const;
  bool can_subscribe(const NodeId& node, const std::string& topic) const;

  const std::set<NodeId>& nodes() const { return nodes_; }
  const std::map<std::string, PayloadKind>& topics() const { return topics_; }
  const std::vector<Edge>& edges() const { return edges_; }

 private:
  std::set<NodeId> nodes_;
  std::map<std::string, PayloadKind> topics_;
  std::vector<Edge> edges_;
};

struct Message {
  std::int64_t seq{0};
  Tick tick{0};
  NodeId sender;
  std::string topic;
  Payload payload;
};

struct Delivery {
  NodeId subscriber;
  Message message;
};

struct SubscriptionHandle {
  NodeId node;
  std::string topic;
};

/// Outcome of passing a message through the interposed monitors.
struct Admission {
  bool blocked{false};
  std::vector<Json> reports;
};

/// Hook for runtime monitors; consulted synchronously inside publish().
class Interposer {
 public:
  virtual ~Interposer() = default;
  virtual Admission admit(const Message& message, const Json& event) = 0;
};

/// Trace record for a message: {"t","kind","seq","topic","sender",["receiver"],"payload"}.
Json message_event(std::string_view kind, const Message& m, Tick t, const NodeId* receiver = nullptr);

class Bus {
 public:
  explicit Bus(Topology topology, std::size_t inbox_capacity = 1024);

  /// Throws UnknownTopic, UnauthorizedPublisher or PayloadMismatch. A message
  /// blocked by a monitor still consumes its seq number.
  std::int64_t publish(const NodeId& sender, const std::string& topic, Payload payload);

  /// Advances the tick and delivers every pending message in seq order, one
  /// delivery per subscriber. Throws InboxOverflow if a subscriber would
  /// receive more than the inbox capacity in one tick.
  std::vector<Delivery> step_deliver();

  /// Idempotent; throws UnknownTopic when the (node, topic) edge is not declared.
  SubscriptionHandle subscribe(const NodeId& node, const std::string& topic);

  void set_interposer(Interposer* interposer) { interposer_ = interposer; }
  void set_misroute_arm_goals(bool on) { misroute_arm_goals_ = on; }

  /// Appends a non-message record (beliefs, world, choice, error) to the trace.
  void record(Json event);
  std::vector<Json> take_events();
  const std::vector<Json>& events() const { return events_; }

  Tick tick() const { return tick_; }
  std::int64_t last_seq() const { return seq_; }
  const std::vector<Message>& pending() const { return pending_; }
  const Topology& topology() const { return *topology_; }
  const std::vector<NodeId>& subscribers(const std::string& topic) const;

  std::int64_t published_count(const std::string& topic) const;
  std::int64_t blocked_count(const std::string& topic) const;
  std::int64_t delivered_count(const NodeId& subscriber, const std::string& topic) const;

 private:
  std::shared_ptr<const Topology> topology_;
  std::size_t inbox_capacity_;
  std::map<std::string, std::vector<NodeId>> subscriptions_;
  std::vector<Message> pending_;
  std::vector<Json> events_;
  Tick tick_{0};
  std::int64_t seq_{0};
  Interposer* interposer_{nullptr};
  bool misroute_arm_goals_{false};
  std::map<std::string, std::int64_t> published_;
  std::map<std::string, std::int64_t> blocked_;
  std::map<std::pair<NodeId, std::string>, std::int64_t> delivered_;
};

}  // namespace rover
