#include <doctest.h>

#include "helpers.hpp"
#include "rover/action_protocol.hpp"

using namespace rover;
using testutil::error_code;

TEST_CASE("a client refuses goals until its server is ready") {
  ActionClient c(Effector::Arm);
  CHECK(error_code([&] { c.send_goal(PostureMove{PostureCmd::Open}); }) == "NotReady");
  c.on_ready(ReadyFlag{Effector::Arm, true});
  const auto g = c.send_goal(PostureMove{PostureCmd::Open});
  CHECK(g.target == Effector::Arm);
  CHECK(g.id.origin == nodes::client(Effector::Arm));
  CHECK(c.status(g.id) == GoalStatus::Pending);
  const auto g2 = c.send_goal(PostureMove{PostureCmd::Close});
  CHECK(g2.id.counter > g.id.counter);
}

TEST_CASE("goal lifecycle: pending, active, terminal") {
  ActionClient c(Effector::Wheels);
  c.on_ready(ReadyFlag{Effector::Wheels, true});
  const auto g = c.send_goal(WaypointMove{Waypoint::A});
  c.on_feedback(FeedbackMsg{g.id, Effector::Wheels, 1, 6});
  CHECK(c.status(g.id) == GoalStatus::Active);
  c.on_result(ResultMsg{g.id, Effector::Wheels, g.request, GoalStatus::Succeeded});
  CHECK(c.status(g.id) == GoalStatus::Succeeded);
  CHECK(c.live().empty());
  CHECK(error_code([&] { c.cancel(g.id); }) == "AlreadyResolved");
  CHECK(error_code([&] { c.cancel(GoalId{"someone", 99}); }) == "UnknownGoal");
  // A result for a goal nobody sent is ignored.
  c.on_result(ResultMsg{GoalId{"someone", 99}, Effector::Wheels, g.request, GoalStatus::Aborted});
  CHECK_FALSE(c.status(GoalId{"someone", 99}).has_value());
}

TEST_CASE("cancel targets a live goal") {
  ActionClient c(Effector::Mast);
  c.on_ready(ReadyFlag{Effector::Mast, true});
  const auto g = c.send_goal(PostureMove{PostureCmd::Open});
  const auto cm = c.cancel(g.id);
  CHECK(cm.id == g.id);
  CHECK(cm.target == Effector::Mast);
}

TEST_CASE("resolved history is bounded") {
  ActionClient c(Effector::Arm);
  c.on_ready(ReadyFlag{Effector::Arm, true});
  for (int i = 0; i < 20; ++i) {
    const auto g = c.send_goal(PostureMove{PostureCmd::Open});
    c.on_result(ResultMsg{g.id, Effector::Arm, g.request, GoalStatus::Succeeded});
  }
  CHECK(c.resolved().size() == ActionClient::kResolvedHistory);
}

TEST_CASE("startup announces readiness exactly once after the delay") {
  for (int delay = 0; delay <= 4; ++delay) {
    Startup s(delay);
    const int wait = std::max(delay, 1);
    int fired_at = -1;
    int fires = 0;
    for (int t = 1; t <= 8; ++t) {
      if (s.tick()) {
        ++fires;
        fired_at = t;
      }
    }
    CHECK(fires == 1);
    CHECK(fired_at == wait);
    CHECK(s.ready());
  }
}

namespace {
Message goal_msg(std::int64_t seq, std::int64_t counter) {
  return {seq, 0, "arm_client", "/arm/goal",
          GoalMsg{GoalId{"arm_client", counter}, Effector::Arm, PostureMove{PostureCmd::Open}}};
}
Message cancel_msg(std::int64_t seq, std::int64_t counter) {
  return {seq, 0, "arm_client", "/arm/cancel", CancelMsg{GoalId{"arm_client", counter}, Effector::Arm}};
}
}  // namespace

TEST_CASE("server triage: new goals preempt, cancels stop or reject") {
  using K = ServerOp::Kind;
  SUBCASE("goal while idle is accepted") {
    const auto ops = triage({goal_msg(1, 1)}, std::nullopt);
    REQUIRE(ops.size() == 1);
    CHECK(ops[0].kind == K::Accept);
  }
  SUBCASE("goal while busy preempts the active one") {
    const auto ops = triage({goal_msg(1, 2)}, GoalId{"arm_client", 1});
    REQUIRE(ops.size() == 2);
    CHECK(ops[0].kind == K::StopActive);
    CHECK(ops[1].kind == K::Accept);
  }
  SUBCASE("goal canceled in the same inbox is rejected") {
    const auto ops = triage({goal_msg(1, 1), cancel_msg(2, 1)}, std::nullopt);
    REQUIRE(ops.size() == 1);
    CHECK(ops[0].kind == K::RejectCanceled);
  }
  SUBCASE("cancel of the active goal stops it") {
    const auto ops = triage({cancel_msg(1, 1)}, GoalId{"arm_client", 1});
    REQUIRE(ops.size() == 1);
    CHECK(ops[0].kind == K::StopActive);
  }
  SUBCASE("cancel of something else is ignored") {
    CHECK(triage({cancel_msg(1, 5)}, GoalId{"arm_client", 1}).empty());
  }
}
