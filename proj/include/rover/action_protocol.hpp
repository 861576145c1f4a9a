#pragma once

// Goal/feedback/result/cancel protocol between an action client and its
// server. The server side that actually moves hardware lives in effectors.hpp.

#include <deque>
#include <optional>
#include <vector>

#include "rover/bus.hpp"
#include "rover/types.hpp"

namespace rover {

struct ClientGoal {
  GoalId id;
  Request request;
  GoalStatus status{GoalStatus::Pending};
  int done{0};
  int total{0};
};

/// Client half of the protocol. Goals go Pending -> Active on the first
/// feedback and become terminal on their result.
class ActionClient {
 public:
  static constexpr std::size_t kResolvedHistory = 8;

  explicit ActionClient(Effector e) : effector_(e), node_(nodes::client(e)) {}

  Effector effector() const { return effector_; }
  const NodeId& node() const { return node_; }
  bool ready() const { return ready_; }

  void on_ready(const ReadyFlag& flag) { ready_ = ready_ || flag.ready; }
  /// Throws NotReady before the server's ready flag has been seen.
  GoalMsg send_goal(const Request& request);
  /// Throws AlreadyResolved for a terminal goal, UnknownGoal otherwise.
  CancelMsg cancel(const GoalId& id) const;
  void on_feedback(const FeedbackMsg& fb);
  /// Results for ids this client never issued are ignored.
  void on_result(const ResultMsg& res);

  std::optional<GoalStatus> status(const GoalId& id) const;
  const std::vector<ClientGoal>& live() const { return live_; }
  const std::deque<ClientGoal>& resolved() const { return resolved_; }
  std::int64_t next_counter() const { return next_counter_; }

  /// Protocol state without the resolved history.
  Json canonical() const;

 private:
  ClientGoal* find_live(const GoalId& id);

  Effector effector_;
  NodeId node_;
  bool ready_{false};
  std::int64_t next_counter_{1};
  std::vector<ClientGoal> live_;
  std::deque<ClientGoal> resolved_;
};

/// Client node: turns /<e>/command actions into goals and tracks replies.
/// A command received before readiness is dropped with an "error" trace event.
void client_step(ActionClient& client, const std::vector<Message>& inbox, Bus& bus);

/// One-shot readiness announcement after a start-up delay (at least one tick).
class Startup {
 public:
  explicit Startup(int delay = 1) : countdown_(delay < 1 ? 1 : delay) {}
  /// True exactly on the tick the server becomes ready.
  bool tick();
  bool ready() const { return countdown_ == 0; }
  int countdown() const { return countdown_; }

 private:
  int countdown_;
};

/// What a server must do with its inbox, in order.
struct ServerOp {
  enum class Kind { RejectCanceled, StopActive, Accept };
  Kind kind;
  GoalMsg goal;  // unused for StopActive
};

/// Goals cancelled later in the same inbox are rejected without ever becoming
/// active; a new goal preempts the active one; a cancel of the active goal stops it.
std::vector<ServerOp> triage(const std::vector<Message>& inbox, const std::optional<GoalId>& active);

}  // namespace rover
