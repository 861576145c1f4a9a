#pragma once

// Online monitors interposed on bus publication, and the offline check that
// must agree with them.

#include <string>
#include <vector>

#include "rover/bus.hpp"
#include "rover/prop_dsl.hpp"

namespace rover {

enum class MonitorMode : std::uint8_t { Log, Block };
std::string_view to_string(MonitorMode m);

struct MonitorConfig {
  std::string property;
  std::vector<std::string> topics;
  MonitorMode mode{MonitorMode::Log};
};

/// {"monitors":[{"property":..,"topics":[..],"mode":"log|block"}]}; throws ConfigError.
std::vector<MonitorConfig> parse_monitor_config(const Json& j);
std::vector<MonitorConfig> load_monitor_config(const std::string& path);

class Monitor {
 public:
  Monitor(PropertySpec spec, MonitorConfig config);

  const std::string& name() const { return spec_.name; }
  const PropertySpec& spec() const { return spec_; }
  const MonitorConfig& config() const { return config_; }
  bool watches(const std::string& topic) const;

  /// Advances on one candidate publication; returns the violation, if any.
  std::optional<Violation> step(const Json& event);
  Verdict verdict() const { return progression_.verdict(); }

 private:
  PropertySpec spec_;
  MonitorConfig config_;
  Progression progression_;
  std::size_t seen_{0};
};

/// Throws IllegalOperatorForRuntime for unbounded operators, UnknownTopic for
/// topics missing from the topology, and BlockModeNotAllowed when a blocking
/// monitor depends on anything but its watched topics.
Monitor synthesize(const PropertySpec& spec, const MonitorConfig& config, const Topology& topology);

/// Trace record for one violation.
Json verdict_event(const Monitor& m, const Violation& v);

/// Every configured monitor, consulted synchronously inside Bus::publish.
class MonitorSet final : public Interposer {
 public:
  MonitorSet() = default;
  explicit MonitorSet(std::vector<Monitor> monitors) : monitors_(std::move(monitors)) {}

  Admission admit(const Message& message, const Json& event) override;

  const std::vector<Monitor>& monitors() const { return monitors_; }
  bool any_violation() const;
  Json summary() const;

 private:
  std::vector<Monitor> monitors_;
};

/// Builds monitors from a config, looking properties up by name.
MonitorSet build_monitors(const std::vector<MonitorConfig>& configs,
                          const std::vector<PropertySpec>& properties, const Topology& topology,
                          bool force_block = false);

/// Reads a JSON-lines trace; throws MalformedTrace naming the offending line.
std::vector<Json> read_trace(const std::string& path);
std::vector<Json> parse_trace(std::string_view text);
void write_trace(const std::string& path, const std::vector<Json>& events);

/// The message stream a monitor on `topics` saw online: publications (blocked
/// ones included) on those topics, in trace order.
std::vector<Json> monitor_stream(const std::vector<Json>& trace, const std::vector<std::string>& topics);

/// Offline verdict for a monitor's property over its stream of `trace`.
Verdict check_trace(const Monitor& m, const std::vector<Json>& trace);

/// Verdict records a run wrote inline for one property.
std::vector<Json> recorded_verdicts(const std::vector<Json>& trace, const std::string& prop);

}  // namespace rover
