#include "rover/agent.hpp"

#include <algorithm>

namespace rover {

namespace {

std::string lower_posture(Posture p) {
  switch (p) {
    case Posture::Open: return "open";
    case Posture::Closed: return "closed";
    case Posture::Moving: return "moving";
  }
  return "closed";
}

Waypoint successor(Waypoint w) {
  switch (w) {
    case Waypoint::O: return Waypoint::A;
    case Waypoint::A: return Waypoint::B;
    case Waypoint::B: return Waypoint::C;
    case Waypoint::C: return Waypoint::A;
  }
  return Waypoint::A;
}

AgentAction posture_action(Effector e, PostureCmd cmd) {
  return e == Effector::Arm ? AgentAction::control_arm(cmd) : AgentAction::control_mast(cmd);
}

std::vector<AgentAction> close_open(const Beliefs& b) {
  std::vector<AgentAction> out;
  for (auto e : {Effector::Arm, Effector::Mast}) {
    if (b.posture(e) != Posture::Closed) out.push_back(posture_action(e, PostureCmd::Close));
  }
  return out;
}

std::string step_text(const PlanStep& s) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Act>) {
          return v.action.term();
        } else if constexpr (std::is_same_v<T, AwaitResults>) {
          return "await";
        } else if constexpr (std::is_same_v<T, Hold>) {
          return "hold(" + std::to_string(v.cycles) + ")";
        } else {
          return "!" + v.goal + (v.arg ? "(" + std::string(to_string(*v.arg)) + ")" : "");
        }
      },
      s);
}

}  // namespace

std::vector<std::string> Beliefs::terms() const {
  std::vector<std::string> out;
  out.push_back("arm(" + lower_posture(arm) + ")");
  if (at) out.push_back("at(" + std::string(to_string(*at)) + ")");
  for (auto w : kWaypoints) {
    if (const auto& c = env[index_of(w)]) {
      out.push_back("env(" + std::string(to_string(w)) + "," + std::string(to_string(*c)) + ")");
    }
  }
  out.push_back("mast(" + lower_posture(mast) + ")");
  for (auto e : kEffectors) {
    if (ready[index_of(e)]) out.push_back("ready(" + std::string(to_string(e)) + ")");
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<EnvClass> AgentView::env(const Beliefs& b, Waypoint w) const {
  if (env_blind) return EnvClass::Fine;
  return b.env[index_of(w)];
}

NextWaypoint next_waypoint(const Beliefs& b, const AgentView& view) {
  if (!b.at) return Wait{};
  Waypoint cand = *b.at;
  for (int i = 0; i < 3; ++i) {
    cand = successor(cand);
    if (cand == *b.at) continue;
    const auto c = view.env(b, cand);
    if (c == EnvClass::Radiation) continue;
    if (!c && view.strict_radiation) continue;
    return cand;
  }
  return Wait{};
}

std::vector<AgentAction> select_actions(const Beliefs& b, const AgentView& view) {
  if (!view.all_ready(b) || !b.at) return {};
  if (auto closes = close_open(b); !closes.empty()) return closes;
  const auto next = next_waypoint(b, view);
  if (const auto* w = std::get_if<Waypoint>(&next)) return {AgentAction::move_to_waypoint(*w)};
  return {};
}

std::vector<AgentAction> posture_policy(const Beliefs& b, const AgentView& view) {
  if (!b.at || *b.at == Waypoint::O) return {};
  const auto c = view.env(b, *b.at);
  if (!c) return {};
  if (*c != EnvClass::Fine) return close_open(b);
  std::vector<AgentAction> out;
  for (auto e : {Effector::Arm, Effector::Mast}) {
    if (b.posture(e) != Posture::Open) out.push_back(posture_action(e, PostureCmd::Open));
  }
  return out;
}

void apply_perception(Beliefs& b, const Perception& p) {
  if (const auto* s = std::get_if<EnvSample>(&p)) {
    b.env[index_of(s->wp)] = s->env;
  } else if (const auto* r = std::get_if<ReadyFlag>(&p)) {
    b.ready[index_of(r->module)] = b.ready[index_of(r->module)] || r->ready;
  } else {
    const auto& o = std::get<ActionOutcome>(p);
    const auto status = o.status;
    if (o.action.target == Effector::Wheels) {
      if (const auto* w = std::get_if<WaypointMove>(&o.action.request)) {
        if (status == GoalStatus::Succeeded) {
          b.at = w->wp;
          b.env[index_of(w->wp)].reset();  // readings taken before arrival are stale
        } else if (status == GoalStatus::Canceled) {
          b.at.reset();
        }
      } else if (status == GoalStatus::Succeeded || status == GoalStatus::Canceled) {
        b.at.reset();
      }
      return;
    }
    Posture& slot = o.action.target == Effector::Arm ? b.arm : b.mast;
    if (status == GoalStatus::Succeeded) {
      const auto cmd = std::get<PostureMove>(o.action.request).cmd;
      slot = cmd == PostureCmd::Open ? Posture::Open : Posture::Closed;
    } else if (status == GoalStatus::Canceled) {
      slot = Posture::Moving;
    }
  }
}

const std::vector<std::string>& plan_rules() {
  static const std::vector<std::string> kRules{
      "patrol.not_ready", "patrol.retract",     "patrol.move",         "patrol.wait",
      "patrol.lost",      "survey.no_posture",  "survey.fine",         "survey.hazard",
      "survey.await_sample", "survey.lost"};
  return kRules;
}

std::optional<PlanChoice> select_plan(const std::string& goal, std::optional<Waypoint> arg,
                                      const Beliefs& b, const AgentView& view,
                                      const ScenarioConfig& cfg) {
  const Achieve patrol{"patrol", std::nullopt};
  if (goal == "patrol") {
    if (!view.all_ready(b)) {
      return PlanChoice{"patrol.not_ready", {{"ready", false}}, {Hold{1}, patrol}};
    }
    if (b.at) {
      if (auto closes = close_open(b); !closes.empty()) {
        PlanChoice c{"patrol.retract", {{"arm", lower_posture(b.arm)}, {"mast", lower_posture(b.mast)}}, {}};
        for (auto& a : closes) c.body.push_back(Act{a});
        c.body.push_back(AwaitResults{});
        c.body.push_back(patrol);
        return c;
      }
      const auto next = next_waypoint(b, view);
      if (const auto* w = std::get_if<Waypoint>(&next)) {
        return PlanChoice{"patrol.move",
                          {{"X", to_string(*b.at)}, {"Y", to_string(*w)}},
                          {Act{AgentAction::move_to_waypoint(*w)}, AwaitResults{},
                           Achieve{"survey", *w}}};
      }
      return PlanChoice{"patrol.wait", {{"X", to_string(*b.at)}}, {Hold{1}, patrol}};
    }
    return PlanChoice{"patrol.lost", Json::object(), {Hold{1}, patrol}};
  }

  if (goal == "survey" && arg) {
    const Waypoint y = *arg;
    const Json ybind{{"Y", to_string(y)}};
    if (!cfg.posture_policy) return PlanChoice{"survey.no_posture", ybind, {patrol}};
    if (b.at == y) {
      const auto c = view.env(b, y);
      if (c == EnvClass::Fine) {
        PlanChoice p{"survey.fine", {{"Y", to_string(y)}, {"env", "Fine"}}, {}};
        for (auto& a : posture_policy(b, view)) p.body.push_back(Act{a});
        p.body.push_back(AwaitResults{});
        p.body.push_back(Hold{cfg.dwell});
        p.body.push_back(Act{AgentAction::control_arm(PostureCmd::Close)});
        p.body.push_back(Act{AgentAction::control_mast(PostureCmd::Close)});
        p.body.push_back(AwaitResults{});
        p.body.push_back(patrol);
        return p;
      }
      if (c) {
        PlanChoice p{"survey.hazard", {{"Y", to_string(y)}, {"env", to_string(*c)}}, {}};
        for (auto& a : posture_policy(b, view)) p.body.push_back(Act{a});
        p.body.push_back(AwaitResults{});
        p.body.push_back(Hold{cfg.dwell});
        p.body.push_back(patrol);
        return p;
      }
      return PlanChoice{"survey.await_sample", ybind, {Hold{1}, Achieve{"survey", y}}};
    }
    return PlanChoice{"survey.lost", ybind, {patrol}};
  }
  return std::nullopt;
}

Agent::Agent(const ScenarioConfig& cfg) {
  view_.strict_radiation = cfg.strict_radiation;
  view_.env_blind = cfg.mutant == Mutant::EnvBlind;
  view_.ignore_readiness = cfg.mutant == Mutant::PrematureAction;
}

void Agent::push_goal(std::string goal, std::optional<Waypoint> arg) {
  Frame f;
  f.goal = std::move(goal);
  f.arg = arg;
  stack_.push_back(std::move(f));
}

void Agent::emit(const AgentAction& a, const Frame& f, Bus& bus, std::vector<Json>* explain) {
  bus.publish(nodes::kAgent, "/agent/action", a);
  awaiting_[index_of(a.target)] = true;
  if (explain != nullptr) {
    explain->push_back({{"t", bus.tick()}, {"rule", f.rule}, {"guard", f.guard}, {"action", a.term()}});
  }
}

void Agent::step(const std::vector<Message>& inbox, Bus& bus, const ScenarioConfig& cfg,
                 std::vector<Json>* explain) {
  const Beliefs before = beliefs_;
  for (const auto& m : inbox) {
    const auto* p = std::get_if<Perception>(&m.payload);
    if (p == nullptr) continue;
    apply_perception(beliefs_, *p);
    if (const auto* o = std::get_if<ActionOutcome>(p)) awaiting_[index_of(o->action.target)] = false;
  }
  // Revised beliefs go on the trace before anything the agent does with them.
  if (!(beliefs_ == before)) {
    bus.record({{"t", bus.tick()}, {"kind", "beliefs"}, {"beliefs", beliefs_.terms()}});
  }

  // Internal steps (plan selection, satisfied awaits, subgoal posting) are free;
  // the cycle ends on an action, a hold or a blocking await. The cap only
  // guards against a rule library without any such step.
  for (int budget = 0; budget < 32; ++budget) {
    if (stack_.empty()) push_goal("patrol", std::nullopt);
    Frame& f = stack_.back();
    if (f.rule.empty()) {
      auto choice = select_plan(f.goal, f.arg, beliefs_, view_, cfg);
      if (!choice) {
        bus.record({{"t", bus.tick()}, {"kind", "error"}, {"node", nodes::kAgent},
                    {"code", "NoApplicablePlan"}, {"goal", f.goal}});
        stack_.pop_back();
        continue;
      }
      f.rule = std::move(choice->rule);
      f.guard = std::move(choice->guard);
      f.body = std::move(choice->body);
      f.pc = 0;
    }
    if (f.pc >= f.body.size()) {
      stack_.pop_back();
      continue;
    }
    const PlanStep step = f.body[f.pc];
    if (const auto* act = std::get_if<Act>(&step)) {
      ++f.pc;
      emit(act->action, f, bus, explain);
      return;
    }
    if (std::holds_alternative<AwaitResults>(step)) {
      if (std::any_of(awaiting_.begin(), awaiting_.end(), [](bool w) { return w; })) return;
      ++f.pc;
      continue;
    }
    if (const auto* hold = std::get_if<Hold>(&step)) {
      if (hold->cycles <= 0) {
        ++f.pc;
        continue;
      }
      if (f.hold_left == 0) f.hold_left = hold->cycles;
      if (--f.hold_left == 0) ++f.pc;
      return;
    }
    const auto& sub = std::get<Achieve>(step);
    const bool tail = f.pc + 1 == f.body.size();
    ++f.pc;
    if (tail) stack_.pop_back();
    push_goal(sub.goal, sub.arg);
  }
}

Json Agent::canonical() const {
  Json stack = Json::array();
  for (const auto& f : stack_) {
    Json body = Json::array();
    for (const auto& s : f.body) body.push_back(step_text(s));
    stack.push_back({{"goal", f.goal},
                     {"arg", f.arg ? Json(to_string(*f.arg)) : Json()},
                     {"rule", f.rule},
                     {"body", std::move(body)},
                     {"pc", f.pc},
                     {"hold", f.hold_left}});
  }
  return {{"beliefs", beliefs_.terms()}, {"stack", std::move(stack)}, {"awaiting", awaiting_}};
}

}  // namespace rover
