#include "dexitac/plant/plant.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "dexitac/error.hpp"

namespace dexitac::plant {

Valve valve_from_int(int v) {
  if (v < -1 || v > 1) throw ConfigError("valve state must be -1, 0 or +1");
  return static_cast<Valve>(v);
}

void validate(const PlantConfig& c) {
  if (c.valve_latency < 0 || c.control_delay < 0 || c.line_delay < 0) {
    throw ConfigError("plant delays must be >= 0");
  }
  if (!(c.tick_dt > 0)) throw ConfigError("tick_dt must be > 0");
  if (!(c.chamber_time_constant > 0)) throw ConfigError("chamber_time_constant must be > 0");
  auto in_limits = [](double p) { return p >= kPressureMin && p <= kPressureMax; };
  if (!in_limits(c.tank_pos_setpoint) || !in_limits(c.tank_neg_setpoint)) {
    throw ConfigError("tank setpoints must lie within [-57, 50] kPa");
  }
  if (c.tank_neg_setpoint > c.tank_pos_setpoint) throw ConfigError("negative setpoint above positive");
  if (c.hysteresis < 0 || c.pump_rate < 0 || c.volume_ratio < 0) {
    throw ConfigError("hysteresis, pump_rate and volume_ratio must be >= 0");
  }
}

std::int64_t ticks_for(double seconds, double tick_dt) {
  return static_cast<std::int64_t>(std::ceil(seconds / tick_dt - 1e-9));
}

PumpCommand safety_loop(const PlantState& s, const PlantConfig& c) {
  PumpCommand cmd{s.pump_pos_on, s.pump_neg_on};
  const double pos_off = std::min(c.tank_pos_setpoint + c.hysteresis, kPressureMax);
  const double neg_off = std::max(c.tank_neg_setpoint - c.hysteresis, kPressureMin);
  if (s.tank_pos < c.tank_pos_setpoint - c.hysteresis) cmd.pos_on = true;
  if (s.tank_pos >= pos_off) cmd.pos_on = false;
  if (s.tank_neg > c.tank_neg_setpoint + c.hysteresis) cmd.neg_on = true;
  if (s.tank_neg <= neg_off) cmd.neg_on = false;
  return cmd;
}

Plant::Plant(PlantConfig config) : config_(config) {
  validate(config_);
  state_.tick_dt = config_.tick_dt;
  state_.tank_pos = config_.tank_pos_setpoint;
  state_.tank_neg = config_.tank_neg_setpoint;
  latency_ticks_ = ticks_for(config_.valve_latency, config_.tick_dt);
  line_ticks_ = ticks_for(config_.line_delay, config_.tick_dt);
  decay_ = std::exp(-config_.tick_dt / config_.chamber_time_constant);
}

void Plant::set_state(const PlantState& s) {
  for (double p : s.chambers) {
    if (!(p >= kPressureMin && p <= kPressureMax)) throw ConfigError("chamber pressure out of limits");
  }
  if (!(s.tank_pos >= kPressureMin && s.tank_pos <= kPressureMax && s.tank_neg >= kPressureMin &&
        s.tank_neg <= kPressureMax)) {
    throw ConfigError("tank pressure out of limits");
  }
  state_ = s;
  state_.tick_dt = config_.tick_dt;
}

void Plant::apply_valve_command(std::uint8_t mask, Valve command) {
  if (mask == 0) throw InvalidSelector("empty valve mask");
  for (int i = 0; i < kChambers; ++i) {
    if (mask & (1u << i)) valve_events_.push_back({state_.tick + latency_ticks_, i, command});
  }
  process_due();
}

void Plant::apply_chamber_command(int chamber, Valve command) {
  if (chamber < 0 || chamber >= kChambers) {
    throw InvalidSelector("chamber index " + std::to_string(chamber) + " outside 0..7");
  }
  apply_valve_command(static_cast<std::uint8_t>(1u << chamber), command);
}

void Plant::process_due() {
  // Delays are constant, so both queues stay sorted by due tick.
  while (!valve_events_.empty() && valve_events_.front().due <= state_.tick) {
    Event e = valve_events_.front();
    valve_events_.pop_front();
    state_.valves[e.chamber] = e.value;
    line_events_.push_back({e.due + line_ticks_, e.chamber, e.value});
  }
  while (!line_events_.empty() && line_events_.front().due <= state_.tick) {
    const Event& e = line_events_.front();
    state_.connections[e.chamber] = e.value;
    line_events_.pop_front();
  }
}

void Plant::step() {
  double draw_pos = 0.0;
  double draw_neg = 0.0;
  for (int i = 0; i < kChambers; ++i) {
    const Valve link = state_.connections[i];
    if (link == Valve::Seal) continue;
    const double tank = link == Valve::Inflate ? state_.tank_pos : state_.tank_neg;
    double& p = state_.chambers[i];
    const double next = tank + (p - tank) * decay_;
    (link == Valve::Inflate ? draw_pos : draw_neg) += next - p;
    p = std::clamp(next, kPressureMin, kPressureMax);
  }

  const double pump = config_.pump_rate * config_.tick_dt;
  state_.tank_pos -= config_.volume_ratio * draw_pos;
  state_.tank_neg -= config_.volume_ratio * draw_neg;
  if (state_.pump_pos_on) state_.tank_pos += pump;
  if (state_.pump_neg_on) state_.tank_neg -= pump;
  state_.tank_pos = std::clamp(state_.tank_pos, kPressureMin, kPressureMax);
  state_.tank_neg = std::clamp(state_.tank_neg, kPressureMin, kPressureMax);

  ++state_.tick;
  process_due();
  const PumpCommand cmd = safety_loop(state_, config_);
  state_.pump_pos_on = cmd.pos_on;
  state_.pump_neg_on = cmd.neg_on;
}

void Plant::run_for(double seconds) {
  const std::int64_t n = ticks_for(seconds, config_.tick_dt);
  for (std::int64_t i = 0; i < n; ++i) step();
}

std::string plant_trace_header() {
  std::string h = "sim_time,tank_pos,tank_neg";
  for (int i = 1; i <= kChambers; ++i) h += ",p" + std::to_string(i);
  for (int i = 1; i <= kChambers; ++i) h += ",v" + std::to_string(i);
  return h;
}

std::string plant_trace_row(const PlantState& s) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f,%.6f,%.6f", s.sim_time(), s.tank_pos, s.tank_neg);
  std::string row = buf;
  for (double p : s.chambers) {
    std::snprintf(buf, sizeof buf, ",%.6f", p);
    row += buf;
  }
  for (Valve v : s.valves) row += "," + std::to_string(to_int(v));
  return row;
}

}  // namespace dexitac::plant
