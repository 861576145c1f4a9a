#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "rover/choice.hpp"
#include "rover/effectors.hpp"

using namespace rover;

TEST_CASE("wheel speed patterns") {
  for (int s = 1; s <= 3; ++s) {
    const auto f = wheel_pattern(Direction::Forward, s);
    const auto b = wheel_pattern(Direction::Backward, s);
    const auto l = wheel_pattern(Direction::Left, s);
    const auto r = wheel_pattern(Direction::Right, s);
    for (std::size_t i = 0; i < 6; ++i) {
      CHECK(f[i] == s);
      CHECK(b[i] == -s);
      CHECK(l[i] == (i % 2 == 0 ? -s : s));
      CHECK(r[i] == (i % 2 == 0 ? s : -s));
    }
  }
}

TEST_CASE("lerp hits both ends and moves monotonically") {
  const std::vector<double> a{0, 0, 1};
  const std::vector<double> b{1, 2, 0};
  for (int d = 1; d <= 5; ++d) {
    CHECK(lerp(a, b, 0, d) == a);
    CHECK(lerp(a, b, d, d) == b);
    for (int k = 0; k <= d; ++k) {
      const auto v = lerp(a, b, k, d);
      for (std::size_t i = 0; i < 3; ++i) {
        const double want = a[i] + (b[i] - a[i]) * static_cast<double>(k) / d;
        CHECK(v[i] == doctest::Approx(want));
      }
    }
  }
}

TEST_CASE("path direction reduces manhattan distance by one per step") {
  for (int x0 = -3; x0 <= 3; ++x0) {
    for (int y0 = -3; y0 <= 3; ++y0) {
      Pose p{x0, y0};
      const Pose target{1, -2};
      int steps = 0;
      while (!(p == target)) {
        const int before = std::abs(p.x - target.x) + std::abs(p.y - target.y);
        p = step_pose(p, path_direction(p, target));
        CHECK(std::abs(p.x - target.x) + std::abs(p.y - target.y) == before - 1);
        REQUIRE(++steps < 50);
      }
      CHECK(steps == std::abs(x0 - 1) + std::abs(y0 + 2));
    }
  }
}

namespace {

struct Rig {
  ScenarioConfig cfg = testutil::deterministic_config();
  Bus bus{Topology::rover_default()};
  ScriptedChooser chooser;
  Pose pose{};
  EffectorServer server;
  std::vector<Json> events;
  std::int64_t seq{1000};

  explicit Rig(Effector e) : server(e, cfg) {}

  void tick(std::vector<Message> inbox = {}) {
    bus.step_deliver();
    server.step(inbox, bus, chooser, cfg, pose);
    for (auto& e : bus.take_events()) events.push_back(std::move(e));
  }
  void until_ready() {
    for (int i = 0; i < 10 && !server.ready(); ++i) tick();
    REQUIRE(server.ready());
  }
  Message goal(Effector e, Request r, std::int64_t counter) {
    const std::string topic = "/" + std::string(to_string(e)) + "/goal";
    return {++seq, bus.tick(), nodes::client(e), topic, GoalMsg{GoalId{nodes::client(e), counter}, e, r}};
  }
  std::vector<Json> published(const std::string& topic) const {
    std::vector<Json> out;
    for (const auto& e : events) {
      if (e["kind"] == "publish" && e["topic"] == topic) out.push_back(e);
    }
    return out;
  }
  std::optional<std::string> result_status() const {
    const auto r = published("/" + std::string(to_string(server.effector())) + "/result");
    if (r.empty()) return std::nullopt;
    return r.back()["payload"]["status"].get<std::string>();
  }
};

}  // namespace

TEST_CASE("server announces readiness once") {
  Rig rig(Effector::Arm);
  rig.until_ready();
  for (int i = 0; i < 5; ++i) rig.tick();
  CHECK(rig.published("/ready/arm").size() == 1);
}

TEST_CASE("wheels drive the requested distance and stop before reporting") {
  Rig rig(Effector::Wheels);
  rig.until_ready();
  rig.tick({rig.goal(Effector::Wheels, DirectionMove{Direction::Forward, 1, 3}, 1)});
  for (int i = 0; i < 10 && !rig.result_status(); ++i) rig.tick();
  REQUIRE(rig.result_status() == "Succeeded");
  CHECK(rig.pose == Pose{3, 0});
  // The last telemetry before the result is all zeros.
  std::optional<Json> last_telemetry;
  for (const auto& e : rig.events) {
    if (e["kind"] != "publish") continue;
    if (e["topic"] == "/wheels/telemetry") last_telemetry = e;
    if (e["topic"] == "/wheels/result") break;
  }
  REQUIRE(last_telemetry);
  for (const auto& s : (*last_telemetry)["payload"]["speeds"]) CHECK(s == 0);
  CHECK(rig.published("/wheels/feedback").size() == 3);
}

TEST_CASE("invalid wheel requests abort") {
  for (const auto& bad : {DirectionMove{Direction::Left, 0, 2}, DirectionMove{Direction::Left, -1, 2}}) {
    Rig rig(Effector::Wheels);
    rig.until_ready();
    rig.tick({rig.goal(Effector::Wheels, bad, 1)});
    for (int i = 0; i < 3 && !rig.result_status(); ++i) rig.tick();
    CHECK(rig.result_status() == "Aborted");
    CHECK(rig.pose == Pose{0, 0});
  }
}

TEST_CASE("a posture request on the wheels aborts") {
  Rig rig(Effector::Wheels);
  rig.until_ready();
  rig.tick({rig.goal(Effector::Wheels, PostureMove{PostureCmd::Open}, 1)});
  for (int i = 0; i < 3 && !rig.result_status(); ++i) rig.tick();
  CHECK(rig.result_status() == "Aborted");
}

TEST_CASE("arm opens over its configured duration") {
  Rig rig(Effector::Arm);
  rig.until_ready();
  CHECK(rig.server.posture() == Posture::Closed);
  rig.tick({rig.goal(Effector::Arm, PostureMove{PostureCmd::Open}, 1)});
  int ticks = 1;
  while (!rig.result_status() && ticks < 10) {
    CHECK(rig.server.posture() == Posture::Moving);
    rig.tick();
    ++ticks;
  }
  CHECK(rig.result_status() == "Succeeded");
  CHECK(rig.server.posture() == Posture::Open);
  CHECK(rig.server.joints() == rig.cfg.open_pose(Effector::Arm));
  CHECK(ticks <= rig.cfg.durations[index_of(Effector::Arm)]);
}

TEST_CASE("a second goal preempts the first") {
  Rig rig(Effector::Mast);
  rig.until_ready();
  rig.tick({rig.goal(Effector::Mast, PostureMove{PostureCmd::Open}, 1)});
  rig.tick({rig.goal(Effector::Mast, PostureMove{PostureCmd::Close}, 2)});
  for (int i = 0; i < 6; ++i) rig.tick();
  const auto results = rig.published("/mast/result");
  REQUIRE(results.size() == 2);
  CHECK(results[0]["payload"]["status"] == "Canceled");
  CHECK(results[1]["payload"]["status"] == "Succeeded");
  CHECK(rig.server.posture() == Posture::Closed);
}
