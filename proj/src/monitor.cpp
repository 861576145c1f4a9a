#include "rover/monitor.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace rover {

std::string_view to_string(MonitorMode m) { return m == MonitorMode::Block ? "block" : "log"; }

std::vector<MonitorConfig> parse_monitor_config(const Json& j) {
  if (!j.is_object() || !j.contains("monitors") || !j["monitors"].is_array()) {
    throw Error("ConfigError", "monitor config needs a \"monitors\" array");
  }
  for (const auto& [k, v] : j.items()) {
    if (k != "monitors") throw Error("ConfigError", "unknown monitor config key '" + k + "'");
  }
  std::vector<MonitorConfig> out;
  for (const auto& m : j["monitors"]) {
    if (!m.is_object()) throw Error("ConfigError", "monitor entry must be an object");
    MonitorConfig c;
    for (const auto& [k, v] : m.items()) {
      if (k == "property" && v.is_string()) {
        c.property = v.get<std::string>();
      } else if (k == "topics" && v.is_array()) {
        for (const auto& t : v) {
          if (!t.is_string()) throw Error("ConfigError", "topics must be strings");
          c.topics.push_back(t.get<std::string>());
        }
      } else if (k == "mode" && v.is_string()) {
        if (v == "log") {
          c.mode = MonitorMode::Log;
        } else if (v == "block") {
          c.mode = MonitorMode::Block;
        } else {
          throw Error("ConfigError", "monitor mode must be log or block");
        }
      } else {
        throw Error("ConfigError", "bad monitor key '" + k + "'");
      }
    }
    if (c.property.empty() || c.topics.empty()) {
      throw Error("ConfigError", "monitor entry needs a property and at least one topic");
    }
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<MonitorConfig> load_monitor_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("ConfigError", "cannot read monitor config " + path);
  try {
    return parse_monitor_config(Json::parse(in));
  } catch (const Json::parse_error& e) {
    throw Error("ConfigError", path + ": " + e.what());
  }
}

Monitor::Monitor(PropertySpec spec, MonitorConfig config)
    : spec_(std::move(spec)), config_(std::move(config)), progression_(spec_.formula) {}

bool Monitor::watches(const std::string& topic) const {
  return std::find(config_.topics.begin(), config_.topics.end(), topic) != config_.topics.end();
}

std::optional<Violation> Monitor::step(const Json& event) { return progression_.step(event, seen_++); }

Monitor synthesize(const PropertySpec& spec, const MonitorConfig& config, const Topology& topology) {
  if (!runtime_legal(spec.formula)) {
    throw Error("IllegalOperatorForRuntime",
                spec.name + " uses an unbounded eventually or until; a monitor could never decide it");
  }
  for (const auto& t : config.topics) {
    if (!topology.has_topic(t)) throw Error("UnknownTopic", t + " (monitor " + spec.name + ")");
  }
  if (config.mode == MonitorMode::Block) {
    const auto used = topics_of(spec.formula);
    const bool closed = std::all_of(used.begin(), used.end(), [&](const std::string& t) {
      return std::find(config.topics.begin(), config.topics.end(), t) != config.topics.end();
    });
    if (used.empty() || !closed || has_atom(spec.formula, AtomKind::Believes) ||
        has_atom(spec.formula, AtomKind::World)) {
      throw Error("BlockModeNotAllowed",
                  spec.name + " is not fully determined by its watched topics");
    }
  }
  return Monitor(spec, config);
}

Json verdict_event(const Monitor& m, const Violation& v) {
  return {{"t", v.t},
          {"kind", "verdict"},
          {"prop", m.name()},
          {"seq", v.seq},
          {"subformula", v.subformula},
          {"mode", to_string(m.config().mode)}};
}

Admission MonitorSet::admit(const Message& message, const Json& event) {
  Admission adm;
  for (auto& m : monitors_) {
    if (!m.watches(message.topic)) continue;
    if (auto v = m.step(event)) {
      adm.reports.push_back(verdict_event(m, *v));
      if (m.config().mode == MonitorMode::Block) adm.blocked = true;
    }
  }
  return adm;
}

bool MonitorSet::any_violation() const {
  return std::any_of(monitors_.begin(), monitors_.end(),
                     [](const Monitor& m) { return m.verdict().status == VerdictStatus::Violated; });
}

Json MonitorSet::summary() const {
  Json out = Json::array();
  for (const auto& m : monitors_) {
    const auto v = m.verdict();
    out.push_back({{"property", m.name()},
                   {"topics", m.config().topics},
                   {"mode", to_string(m.config().mode)},
                   {"status", to_string(v.status)},
                   {"violations", v.violations.size()}});
  }
  return out;
}

MonitorSet build_monitors(const std::vector<MonitorConfig>& configs,
                          const std::vector<PropertySpec>& properties, const Topology& topology,
                          bool force_block) {
  std::vector<Monitor> out;
  for (auto c : configs) {
    const auto it = std::find_if(properties.begin(), properties.end(),
                                 [&](const PropertySpec& p) { return p.name == c.property; });
    if (it == properties.end()) throw Error("ConfigError", "monitor for unknown property '" + c.property + "'");
    if (force_block) c.mode = MonitorMode::Block;
    out.push_back(synthesize(*it, c, topology));
  }
  return MonitorSet(std::move(out));
}

std::vector<Json> parse_trace(std::string_view text) {
  std::vector<Json> out;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    const bool terminated = end != std::string_view::npos;
    if (!terminated) end = text.size();
    ++line_no;
    const auto line = text.substr(start, end - start);
    start = end + 1;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::parse_error& e) {
      throw Error("MalformedTrace", "line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("t") || !j["t"].is_number_integer() || !j.contains("kind") ||
        !j["kind"].is_string()) {
      throw Error("MalformedTrace", "line " + std::to_string(line_no) + ": event needs integer \"t\" and string \"kind\"");
    }
    if (!terminated) {
      throw Error("MalformedTrace", "line " + std::to_string(line_no) + ": truncated (no newline)");
    }
    out.push_back(std::move(j));
  }
  return out;
}

std::vector<Json> read_trace(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("MalformedTrace", "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_trace(ss.str());
}

void write_trace(const std::string& path, const std::vector<Json>& events) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("IOError", "cannot write " + path);
  for (const auto& e : events) out << e.dump() << '\n';
}

std::vector<Json> monitor_stream(const std::vector<Json>& trace, const std::vector<std::string>& topics) {
  std::vector<Json> out;
  for (const auto& e : trace) {
    const auto kind = e.value("kind", std::string());
    if (kind != "publish" && kind != "block") continue;
    const auto topic = e.value("topic", std::string());
    if (std::find(topics.begin(), topics.end(), topic) == topics.end()) continue;
    Json copy = e;
    copy["kind"] = "publish";
    out.push_back(std::move(copy));
  }
  return out;
}

Verdict check_trace(const Monitor& m, const std::vector<Json>& trace) {
  return evaluate(m.spec(), monitor_stream(trace, m.config().topics));
}

std::vector<Json> recorded_verdicts(const std::vector<Json>& trace, const std::string& prop) {
  std::vector<Json> out;
  for (const auto& e : trace) {
    if (e.value("kind", std::string()) == "verdict" && e.value("prop", std::string()) == prop) out.push_back(e);
  }
  return out;
}

}  // namespace rover
