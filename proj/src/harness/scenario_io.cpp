#include "dexitac/harness/scenario_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <optional>
#include <set>
#include <sstream>
#include <vector>

#include "dexitac/error.hpp"

namespace dexitac::harness {
namespace {

using control::Scenario;
using control::StimulusEvent;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_real(const std::string& v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out)) {
    throw ConfigError("'" + v + "' is not a finite number");
  }
  return out;
}

template <class Int>
Int parse_integer(const std::string& v) {
  Int out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw ConfigError("'" + v + "' is not an integer");
  return out;
}

bool parse_bool(const std::string& v) {
  if (v == "true") return true;
  if (v == "false") return false;
  throw ConfigError("'" + v + "' is not true or false");
}

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <class T>
struct Binding {
  std::string key;
  std::function<void(T&, const std::string&)> set;
  std::function<std::optional<std::string>(const T&)> get;
};

template <class T, class Acc>
Binding<T> real(std::string key, Acc acc) {
  return {std::move(key), [acc](T& t, const std::string& v) { acc(t) = parse_real(v); },
          [acc](const T& t) -> std::optional<std::string> { return format_real(acc(t)); }};
}

template <class T, class Acc>
Binding<T> integer(std::string key, Acc acc) {
  return {std::move(key),
          [acc](T& t, const std::string& v) {
            auto& field = acc(t);
            field = parse_integer<std::remove_reference_t<decltype(field)>>(v);
          },
          [acc](const T& t) -> std::optional<std::string> { return std::to_string(acc(t)); }};
}

template <class T, class Acc>
Binding<T> boolean(std::string key, Acc acc) {
  return {std::move(key), [acc](T& t, const std::string& v) { acc(t) = parse_bool(v); },
          [acc](const T& t) -> std::optional<std::string> { return acc(t) ? "true" : "false"; }};
}

std::vector<Binding<Scenario>> root_bindings() {
  return {
      {"name",
       [](Scenario& s, const std::string& v) { s.name = v; },
       [](const Scenario& s) -> std::optional<std::string> { return s.name; }},
      integer<Scenario>("seed", [](auto& s) -> auto& { return s.seed; }),
      real<Scenario>("duration", [](auto& s) -> auto& { return s.duration; }),
  };
}

std::vector<Binding<Scenario>> sensor_bindings() {
  // The sensor seed is derived from the scenario seed, so it has no key.
  return {
      integer<Scenario>("grid_rows", [](auto& s) -> auto& { return s.sensor.grid_rows; }),
      integer<Scenario>("grid_cols", [](auto& s) -> auto& { return s.sensor.grid_cols; }),
      real<Scenario>("spacing", [](auto& s) -> auto& { return s.sensor.spacing; }),
      real<Scenario>("marker_radius", [](auto& s) -> auto& { return s.sensor.marker_radius; }),
      real<Scenario>("noise_sigma", [](auto& s) -> auto& { return s.sensor.noise_sigma; }),
      real<Scenario>("displacement_gain", [](auto& s) -> auto& { return s.sensor.displacement_gain; }),
      real<Scenario>("jitter", [](auto& s) -> auto& { return s.sensor.jitter; }),
      real<Scenario>("background", [](auto& s) -> auto& { return s.sensor.background; }),
      real<Scenario>("marker_intensity", [](auto& s) -> auto& { return s.sensor.marker_intensity; }),
      integer<Scenario>("frame_width", [](auto& s) -> auto& { return s.sensor.frame_width; }),
      integer<Scenario>("frame_height", [](auto& s) -> auto& { return s.sensor.frame_height; }),
  };
}

std::vector<Binding<Scenario>> plant_bindings() {
  return {
      real<Scenario>("valve_latency", [](auto& s) -> auto& { return s.plant.valve_latency; }),
      real<Scenario>("control_delay", [](auto& s) -> auto& { return s.plant.control_delay; }),
      real<Scenario>("line_delay", [](auto& s) -> auto& { return s.plant.line_delay; }),
      real<Scenario>("chamber_time_constant", [](auto& s) -> auto& { return s.plant.chamber_time_constant; }),
      real<Scenario>("tank_pos_setpoint", [](auto& s) -> auto& { return s.plant.tank_pos_setpoint; }),
      real<Scenario>("tank_neg_setpoint", [](auto& s) -> auto& { return s.plant.tank_neg_setpoint; }),
      real<Scenario>("hysteresis", [](auto& s) -> auto& { return s.plant.hysteresis; }),
      real<Scenario>("pump_rate", [](auto& s) -> auto& { return s.plant.pump_rate; }),
      real<Scenario>("volume_ratio", [](auto& s) -> auto& { return s.plant.volume_ratio; }),
      real<Scenario>("tick_dt", [](auto& s) -> auto& { return s.plant.tick_dt; }),
  };
}

std::vector<Binding<Scenario>> threshold_bindings() {
  using control::WindowMode;
  return {
      real<Scenario>("t1", [](auto& s) -> auto& { return s.thresholds.t1; }),
      real<Scenario>("t2", [](auto& s) -> auto& { return s.thresholds.t2; }),
      real<Scenario>("stability_window", [](auto& s) -> auto& { return s.thresholds.stability_window; }),
      real<Scenario>("no_contact_timeout", [](auto& s) -> auto& { return s.thresholds.no_contact_timeout; }),
      {"window_mode",
       [](Scenario& s, const std::string& v) {
         if (v == "sliding") {
           s.thresholds.window_mode = WindowMode::Sliding;
         } else if (v == "restart") {
           s.thresholds.window_mode = WindowMode::Restart;
         } else {
           throw ConfigError("window_mode must be sliding or restart");
         }
       },
       [](const Scenario& s) -> std::optional<std::string> {
         return s.thresholds.window_mode == WindowMode::Sliding ? "sliding" : "restart";
       }},
  };
}

std::vector<Binding<Scenario>> control_bindings() {
  return {
      real<Scenario>("frame_rate", [](auto& s) -> auto& { return s.control.frame_rate; }),
      {"perception",
       [](Scenario& s, const std::string& v) { s.control.perception = control::perception_mode_from_string(v); },
       [](const Scenario& s) -> std::optional<std::string> { return control::to_string(s.control.perception); }},
      integer<Scenario>("kde_stride", [](auto& s) -> auto& { return s.control.kde_stride; }),
      real<Scenario>("marker_noise", [](auto& s) -> auto& { return s.control.marker_noise; }),
      boolean<Scenario>("concurrent", [](auto& s) -> auto& { return s.control.concurrent; }),
      {"release_at",
       [](Scenario& s, const std::string& v) { s.control.release_at = parse_real(v); },
       [](const Scenario& s) -> std::optional<std::string> {
         if (!s.control.release_at) return std::nullopt;
         return format_real(*s.control.release_at);
       }},
      integer<Scenario>("max_regrasps", [](auto& s) -> auto& { return s.control.max_regrasps; }),
      real<Scenario>("regrasp_release", [](auto& s) -> auto& { return s.control.regrasp_release; }),
      real<Scenario>("regrasp_pause", [](auto& s) -> auto& { return s.control.regrasp_pause; }),
      real<Scenario>("contact_pressure", [](auto& s) -> auto& { return s.control.contact_pressure; }),
      real<Scenario>("full_pressure", [](auto& s) -> auto& { return s.control.full_pressure; }),
      real<Scenario>("edge_margin", [](auto& s) -> auto& { return s.control.edge_margin; }),
  };
}

std::vector<Binding<StimulusEvent>> event_bindings() {
  return {
      real<StimulusEvent>("time", [](auto& e) -> auto& { return e.time; }),
      integer<StimulusEvent>("finger", [](auto& e) -> auto& { return e.finger; }),
      {"kind",
       [](StimulusEvent& e, const std::string& v) { e.kind = control::stimulus_kind_from_string(v); },
       [](const StimulusEvent& e) -> std::optional<std::string> { return control::to_string(e.kind); }},
      real<StimulusEvent>("x", [](auto& e) -> auto& { return e.stimulus.center.x; }),
      real<StimulusEvent>("y", [](auto& e) -> auto& { return e.stimulus.center.y; }),
      real<StimulusEvent>("depth", [](auto& e) -> auto& { return e.stimulus.depth; }),
      real<StimulusEvent>("radius", [](auto& e) -> auto& { return e.stimulus.radius; }),
      real<StimulusEvent>("shear_x", [](auto& e) -> auto& { return e.stimulus.shear.x; }),
      real<StimulusEvent>("shear_y", [](auto& e) -> auto& { return e.stimulus.shear.y; }),
  };
}

const std::vector<std::pair<std::string, std::vector<Binding<Scenario>>>>& scenario_sections() {
  static const std::vector<std::pair<std::string, std::vector<Binding<Scenario>>>> sections = {
      {"", root_bindings()},
      {"sensor", sensor_bindings()},
      {"plant", plant_bindings()},
      {"thresholds", threshold_bindings()},
      {"control", control_bindings()},
  };
  return sections;
}

template <class T>
const Binding<T>* find_binding(const std::vector<Binding<T>>& bindings, const std::string& key) {
  for (const auto& b : bindings) {
    if (b.key == key) return &b;
  }
  return nullptr;
}

struct OpenEvent {
  int header_line = 0;
  std::set<std::string> keys;
};

void check_event_keys(const OpenEvent& open, const StimulusEvent& e) {
  std::vector<std::string> required = {"time", "finger", "kind"};
  if (open.keys.count("kind") && e.kind != control::StimulusKind::Remove) {
    required.insert(required.end(), {"x", "y", "depth"});
  }
  for (const std::string& k : required) {
    if (!open.keys.count(k)) throw ParseError(open.header_line, "[event] is missing '" + k + "'");
  }
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
  Scenario sc;
  const auto& sections = scenario_sections();
  const std::vector<Binding<Scenario>>* current = &sections.front().second;
  std::string section_name;
  std::set<std::string> seen;  // "section.key" outside events
  std::optional<OpenEvent> event;
  const auto event_table = event_bindings();

  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError(line_no, "malformed section header '" + line + "'");
      const std::string name = trim(line.substr(1, line.size() - 2));
      if (event) check_event_keys(*event, sc.events.back());
      event.reset();
      section_name = name;
      if (name == "event") {
        sc.events.emplace_back();
        event = OpenEvent{line_no, {}};
        current = nullptr;
        continue;
      }
      current = nullptr;
      for (const auto& [sname, table] : sections) {
        if (sname == name && !name.empty()) current = &table;
      }
      if (!current) throw ParseError(line_no, "unknown section [" + name + "]");
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(line_no, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError(line_no, "missing key");
    if (value.empty()) throw ParseError(line_no, "missing value for '" + key + "'");
    const std::string where = section_name.empty() ? "top level" : "[" + section_name + "]";

    try {
      if (event) {
        const auto* b = find_binding(event_table, key);
        if (!b) throw ParseError(line_no, "unknown key '" + key + "' in " + where);
        if (!event->keys.insert(key).second) throw ParseError(line_no, "duplicate key '" + key + "'");
        b->set(sc.events.back(), value);
      } else {
        const auto* b = find_binding(*current, key);
        if (!b) throw ParseError(line_no, "unknown key '" + key + "' in " + where);
        if (!seen.insert(section_name + "." + key).second) {
          throw ParseError(line_no, "duplicate key '" + key + "'");
        }
        b->set(sc, value);
      }
    } catch (const ConfigError& e) {
      throw ParseError(line_no, key + ": " + e.what());
    }
  }
  if (event) check_event_keys(*event, sc.events.back());

  control::validate(sc);
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError("cannot open scenario '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_scenario(text.str());
}

std::string format_scenario(const Scenario& sc) {
  std::ostringstream out;
  for (const auto& [name, table] : scenario_sections()) {
    if (!name.empty()) out << "\n[" << name << "]\n";
    for (const auto& b : table) {
      if (auto v = b.get(sc)) out << b.key << " = " << *v << '\n';
    }
  }
  const auto event_table = event_bindings();
  for (const StimulusEvent& e : sc.events) {
    out << "\n[event]\n";
    for (const auto& b : event_table) {
      if (e.kind == control::StimulusKind::Remove && b.key != "time" && b.key != "finger" && b.key != "kind") {
        continue;
      }
      if (auto v = b.get(e)) out << b.key << " = " << *v << '\n';
    }
  }
  return out.str();
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t config_hash(const Scenario& sc) { return fnv1a64(format_scenario(sc)); }

}  // namespace dexitac::harness
