#pragma once

// Explicit-state exploration of the rover network. Safety and bounded
// properties are checked by breadth-first search over the product of the
// system with the property's residual obligation; unbounded response
// properties always (P => eventually Q) by nested depth-first search for an
// accepting cycle of a two-state obligation automaton.

#include <optional>
#include <string>
#include <vector>

#include "rover/choice.hpp"
#include "rover/config.hpp"
#include "rover/prop_dsl.hpp"
#include "rover/system.hpp"

namespace rover {

struct Successor {
  std::vector<std::size_t> script;   // indices for the multi-option choice points
  std::vector<ChoiceTaken> choices;  // every multi-option point, in order
  System state;
  std::vector<Json> events;
  std::string label() const;
};

/// One successor per combination of choices reachable in the next tick, in a
/// fixed order. A configuration without nondeterminism yields exactly one.
std::vector<Successor> enumerate_successors(const System& s);

struct ExplorerOptions {
  std::size_t max_states{1'000'000};
  double max_seconds{60.0};
  unsigned workers{1};
};

enum class PropertyClass : std::uint8_t { Safety, Response, Unsupported };
PropertyClass classify_property(const Formula& f);

enum class CheckOutcome : std::uint8_t { Holds, Violated, BudgetExceeded, Unsupported };
std::string_view to_string(CheckOutcome o);

struct CexStep {
  std::vector<std::size_t> script;
  std::vector<ChoiceTaken> choices;
  std::vector<Json> events;
};

struct Counterexample {
  std::string prop;
  std::string formula;
  std::string kind;  // "safety" or "lasso"
  std::size_t loop_start{0};  // lasso only: the state after this many steps recurs at the end
  Json config;
  std::vector<CexStep> steps;
};

struct CheckResult {
  std::string prop;
  PropertyClass cls{PropertyClass::Safety};
  CheckOutcome outcome{CheckOutcome::Holds};
  std::optional<Counterexample> counterexample;
  std::string note;
};

struct ExplorationReport {
  std::vector<CheckResult> results;
  std::size_t product_states{0};
  std::size_t system_states{0};
  std::size_t transitions{0};
  double seconds{0};
  bool budget_exceeded{false};
  unsigned workers{1};
  Json to_json(const ScenarioConfig& cfg) const;
};

/// Checks every property against all behaviours of the configuration.
ExplorationReport explore(const ScenarioConfig& cfg, const std::vector<PropertySpec>& props,
                          const ExplorerOptions& opts = {});

CheckResult check_property(const ScenarioConfig& cfg, const PropertySpec& prop,
                           const ExplorerOptions& opts = {});
/// `always predicate`, for a predicate without temporal operators.
CheckResult check_invariant(const ScenarioConfig& cfg, const std::string& name, const Formula& predicate,
                            const ExplorerOptions& opts = {});
CheckResult check_response(const ScenarioConfig& cfg, const std::string& name, const Formula& trigger,
                           const Formula& goal, const ExplorerOptions& opts = {});
/// Occurrences respect the order of `pattern` on every path.
CheckResult check_sequence(const ScenarioConfig& cfg, const std::string& name,
                           const std::vector<Formula>& pattern, const ExplorerOptions& opts = {});

void write_counterexample(const std::string& path, const Counterexample& cex);
Counterexample read_counterexample(const std::string& path);

struct ReplayResult {
  bool reproduced{false};
  bool diverged{false};
  std::string detail;
  std::optional<Violation> violation;
  std::vector<Json> trace;
};

/// Re-runs the recorded choices through the simulator and re-checks the property.
ReplayResult replay(const Counterexample& cex);

}  // namespace rover
