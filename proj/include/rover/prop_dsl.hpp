#pragma once

// Temporal property language over JSON trace events.
//
//   prop nonneg: always (topic("/env/sample") => payload.wind >= 0)
//
// Formulas are evaluated by progression: each event rewrites the formula into
// the obligation that remains for the rest of the trace.

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "rover/types.hpp"

namespace rover {

enum class Op : std::uint8_t {
  True,
  False,
  Atom,
  Not,
  And,
  Or,
  Implies,
  Always,
  Never,
  Eventually,  // unbounded
  Within,      // eventually[<=k], not yet anchored
  By,          // anchored bounded eventually with an absolute tick deadline
  Until,
  Precedes,
};

enum class AtomKind : std::uint8_t { Topic, Kind, Sender, Receiver, Believes, Action, Payload, World };
enum class CmpOp : std::uint8_t { Eq, Ne, Lt, Le, Gt, Ge };

struct AtomSpec {
  AtomKind kind{AtomKind::Topic};
  std::string arg;                // string argument or ground term
  std::vector<std::string> path;  // payload/world field path
  CmpOp cmp{CmpOp::Eq};
  Json literal;
};

struct Node;
using Formula = std::shared_ptr<const Node>;

struct Node {
  Op op{Op::True};
  std::vector<Formula> kids;
  AtomSpec atom;
  int bound{0};
  Tick deadline{0};
  std::string text;  // printed form; structural equality is text equality
  bool has_deadline{false};
};

/// Raw constructors (no simplification); the parser uses these.
Formula make_const(bool value);
Formula make_atom(AtomSpec atom);
Formula make_node(Op op, std::vector<Formula> kids, int bound = 0, Tick deadline = 0);

std::string print(const Formula& f);
bool same(const Formula& a, const Formula& b);

struct PropertySpec {
  std::string name;
  Formula formula;
  int line{0};
};

/// Throws SyntaxError (with line:col), UnknownField or NonPositiveBound.
Formula parse_formula(std::string_view source);
/// A property file: `prop <name>: <formula>` stanzas, optional `;`, `#` comments.
std::vector<PropertySpec> parse_properties(std::string_view source);
std::vector<PropertySpec> load_properties(const std::string& path);

/// Payload keys any bus payload may carry; field paths are checked against it.
const std::set<std::string>& known_payload_fields();
const std::set<std::string>& known_world_fields();

/// Ground term of an /agent/action payload, e.g. "move_to_waypoint(A)".
std::string action_term(const Json& payload);

/// Belief and ground-truth context that believes(...) and world.* atoms read.
struct EvalContext {
  std::set<std::string> beliefs;
  Json world;
  /// Absorbs beliefs/world events; other events leave the context unchanged.
  void observe(const Json& event);
};

bool eval_atom(const AtomSpec& atom, const Json& event, const EvalContext& ctx);

/// One progression step. The event's "t" anchors bounded eventualities.
Formula progress(const Formula& f, const Json& event, const EvalContext& ctx);

/// Smallest subformula to blame when `f` progresses to false on `event`.
std::string blame(const Formula& f, const Json& event, const EvalContext& ctx);

enum class VerdictStatus : std::uint8_t { Satisfied, Violated, Undetermined };
std::string_view to_string(VerdictStatus s);

/// Value of a residual at the end of a finite trace: safety residuals hold,
/// pending eventualities leave the verdict open.
VerdictStatus finalize(const Formula& f);

/// Printed form with anchored deadlines expressed relative to `now`.
std::string relative_text(const Formula& f, Tick now);

struct Violation {
  std::size_t index{0};  // position in the evaluated event sequence
  Tick t{0};
  std::int64_t seq{-1};
  std::string subformula;
};

struct Verdict {
  VerdictStatus status{VerdictStatus::Undetermined};
  std::vector<Violation> violations;  // every violating event; progression re-arms after each
  Json to_json() const;
};

/// Incremental evaluator shared by online monitors and offline checks.
class Progression {
 public:
  explicit Progression(Formula f) : original_(f), residual_(std::move(f)) {}
  /// Returns the violation if this event falsifies the current obligation.
  std::optional<Violation> step(const Json& event, std::size_t index);
  Verdict verdict() const;
  const Formula& residual() const { return residual_; }
  EvalContext& context() { return ctx_; }

 private:
  Formula original_;
  Formula residual_;
  EvalContext ctx_;
  bool satisfied_{false};
  bool seen_{false};
  std::vector<Violation> violations_;
};

/// Pure offline evaluation; "verdict" records in the trace are skipped.
Verdict evaluate(const PropertySpec& spec, const std::vector<Json>& trace);

/// Operators a runtime monitor cannot decide: unbounded eventually and until.
bool runtime_legal(const Formula& f);
bool contains(const Formula& f, Op op);
bool has_atom(const Formula& f, AtomKind kind);
std::set<std::string> topics_of(const Formula& f);

}  // namespace rover
