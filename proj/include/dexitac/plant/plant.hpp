#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <string>

namespace dexitac::plant {

inline constexpr double kPressureMax = 50.0;   // kPa
inline constexpr double kPressureMin = -57.0;  // kPa
inline constexpr int kChambers = 8;

// +1 inflation valve open (positive tank), -1 suction valve open
// (negative tank), 0 sealed.
enum class Valve : std::int8_t { Deflate = -1, Seal = 0, Inflate = 1 };

inline int to_int(Valve v) { return static_cast<int>(v); }
Valve valve_from_int(int v);

struct PlantConfig {
  double valve_latency = 0.010;  // s, command -> valve moves
  double control_delay = 0.050;  // s, tactile processing before a command leaves the host
  double line_delay = 0.050;     // s, air transit valve -> actuator (500 mm line)
  double chamber_time_constant = 0.15;  // s
  double tank_pos_setpoint = 48.0;      // kPa
  double tank_neg_setpoint = -55.0;     // kPa
  double hysteresis = 2.0;              // kPa
  double pump_rate = 60.0;              // kPa/s while a pump runs
  // Chamber-to-tank volume ratio; filling a chamber draws the tank down.
  double volume_ratio = 0.02;
  double tick_dt = 0.001;  // s
};

// Throws ConfigError, including for setpoints outside [-57, 50] kPa.
void validate(const PlantConfig& config);

struct PumpCommand {
  bool pos_on = false;
  bool neg_on = false;
  friend bool operator==(const PumpCommand&, const PumpCommand&) = default;
};

struct PlantState {
  double tank_pos = 0.0;
  double tank_neg = 0.0;
  std::array<double, kChambers> chambers{};
  std::array<Valve, kChambers> valves{};       // physical valve positions
  std::array<Valve, kChambers> connections{};  // what each actuator currently feels (after line delay)
  bool pump_pos_on = false;
  bool pump_neg_on = false;
  std::int64_t tick = 0;
  double tick_dt = 0.001;

  double sim_time() const { return static_cast<double>(tick) * tick_dt; }
};

// Bang-bang tank regulation with hysteresis. A pump switches on below
// (setpoint - hysteresis) and off at (setpoint + hysteresis), the off
// level capped at the actuator limit; inside the band it keeps its state.
PumpCommand safety_loop(const PlantState& state, const PlantConfig& config);

// The pneumatic plant. One owner steps it; commands are queued FIFO.
class Plant {
 public:
  explicit Plant(PlantConfig config = {});

  const PlantState& state() const { return state_; }
  const PlantConfig& config() const { return config_; }

  // Moves every chamber whose bit is set in `mask` to `command` once
  // valve_latency has elapsed. Throws InvalidSelector for an empty mask.
  void apply_valve_command(std::uint8_t mask, Valve command);
  // Single chamber 0..7; throws InvalidSelector otherwise.
  void apply_chamber_command(int chamber, Valve command);

  // Advances one tick_dt: first-order chamber response toward the tank
  // each actuator is connected to, tank draw-down, pumps, then due
  // valve/line events and the safety loop.
  void step();
  void run_for(double seconds);

  // Test hook for initial conditions; invariants are re-checked.
  void set_state(const PlantState& state);

 private:
  struct Event {
    std::int64_t due;
    int chamber;
    Valve value;
  };
  void process_due();

  PlantConfig config_;
  PlantState state_;
  std::int64_t latency_ticks_ = 0;
  std::int64_t line_ticks_ = 0;
  double decay_ = 0.0;
  std::deque<Event> valve_events_;
  std::deque<Event> line_events_;
};

std::int64_t ticks_for(double seconds, double tick_dt);

// Trace CSV: sim_time, tank_pos, tank_neg, p1..p8, v1..v8.
std::string plant_trace_header();
std::string plant_trace_row(const PlantState& state);

}  // namespace dexitac::plant
