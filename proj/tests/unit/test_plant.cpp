#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "dexitac/error.hpp"
#include "dexitac/plant/plant.hpp"

using namespace dexitac;
using namespace dexitac::plant;

namespace {

PlantConfig instant() {
  PlantConfig c;
  c.valve_latency = 0.0;
  c.line_delay = 0.0;
  c.control_delay = 0.0;
  return c;
}

}  // namespace

TEST_CASE("config validation") {
  PlantConfig c;
  c.tank_pos_setpoint = 55.0;
  CHECK_THROWS_AS(validate(c), ConfigError);
  c = {};
  c.tank_neg_setpoint = -60.0;
  CHECK_THROWS_AS(validate(c), ConfigError);
  c = {};
  c.valve_latency = -0.001;
  CHECK_THROWS_AS(validate(c), ConfigError);
  c = {};
  c.tick_dt = 0.0;
  CHECK_THROWS_AS(Plant{c}, ConfigError);
  CHECK_THROWS_AS(valve_from_int(2), ConfigError);
  CHECK(valve_from_int(-1) == Valve::Deflate);
}

TEST_CASE("invalid selectors") {
  Plant p;
  CHECK_THROWS_AS(p.apply_valve_command(0, Valve::Inflate), InvalidSelector);
  CHECK_THROWS_AS(p.apply_chamber_command(8, Valve::Inflate), InvalidSelector);
  CHECK_THROWS_AS(p.apply_chamber_command(-1, Valve::Inflate), InvalidSelector);
  CHECK_NOTHROW(p.apply_chamber_command(7, Valve::Inflate));
}

TEST_CASE("sealed chambers keep their pressures exactly") {
  Plant p;
  PlantState s = p.state();
  s.chambers = {10.0, -20.0, 33.3, 0.0, 49.0, -56.0, 1e-3, 7.0};
  p.set_state(s);
  p.apply_valve_command(0xFF, Valve::Seal);
  const auto before = p.state().chambers;
  p.run_for(5.0);
  CHECK(p.state().chambers == before);
}

TEST_CASE("first-order response matches the analytic solution") {
  PlantConfig c = instant();
  c.tank_pos_setpoint = 50.0;
  c.volume_ratio = 0.0;
  Plant p(c);
  p.apply_chamber_command(0, Valve::Inflate);
  double previous = 0.0;
  for (int k = 1; k <= 150; ++k) {
    p.step();
    const double expect = 50.0 * (1.0 - std::exp(-k * c.tick_dt / c.chamber_time_constant));
    REQUIRE(p.state().chambers[0] == doctest::Approx(expect).epsilon(1e-12));
    REQUIRE(p.state().chambers[0] > previous);
    previous = p.state().chambers[0];
  }
  CHECK(p.state().chambers[0] == doctest::Approx(31.606).epsilon(1e-4));
  CHECK(p.state().chambers[1] == 0.0);
}

TEST_CASE("no effect before the valve latency") {
  for (double latency : {0.0, 0.003, 0.010, 0.025}) {
    PlantConfig c;
    c.valve_latency = latency;
    c.line_delay = 0.0;
    Plant p(c);
    p.run_for(0.1);
    const std::int64_t issued = p.state().tick;
    p.apply_valve_command(0x0F, Valve::Inflate);
    const std::int64_t due = ticks_for(latency, c.tick_dt);
    while (p.state().tick < issued + due) {
      REQUIRE(p.state().valves[0] == Valve::Seal);
      REQUIRE(p.state().chambers[0] == 0.0);
      p.step();
    }
    CHECK(p.state().valves[0] == Valve::Inflate);
    p.step();
    CHECK(p.state().chambers[0] > 0.0);
  }
}

TEST_CASE("line delay postpones the pressure change after the valve moves") {
  PlantConfig c;
  Plant p(c);
  p.apply_chamber_command(2, Valve::Deflate);
  const std::int64_t valve_at = ticks_for(c.valve_latency, c.tick_dt);
  const std::int64_t line_at = valve_at + ticks_for(c.line_delay, c.tick_dt);
  while (p.state().tick < line_at) {
    if (p.state().tick >= valve_at) REQUIRE(p.state().valves[2] == Valve::Deflate);
    REQUIRE(p.state().chambers[2] == 0.0);
    p.step();
  }
  p.step();
  CHECK(p.state().chambers[2] < 0.0);
}

TEST_CASE("safety loop") {
  const PlantConfig c;
  PlantState s;
  s.tank_pos = c.tank_pos_setpoint;
  s.tank_neg = c.tank_neg_setpoint;
  CHECK(safety_loop(s, c) == PumpCommand{false, false});

  // Positive tank 5 kPa low: the pump runs until setpoint + hysteresis.
  Plant p(c);
  s = p.state();
  s.tank_pos = c.tank_pos_setpoint - 5.0;
  p.set_state(s);
  p.step();
  CHECK(p.state().pump_pos_on);
  int ticks = 0;
  while (p.state().pump_pos_on) {
    REQUIRE(p.state().tank_pos < c.tank_pos_setpoint + c.hysteresis);
    p.step();
    REQUIRE(++ticks < 10000);
  }
  CHECK(p.state().tank_pos >= c.tank_pos_setpoint + c.hysteresis);
  CHECK(p.state().tank_pos <= kPressureMax);
  // Inside the band the pump stays off.
  for (int i = 0; i < 100; ++i) {
    p.step();
    REQUIRE(!p.state().pump_pos_on);
  }

  // The off level never exceeds the actuator limit.
  PlantConfig top = c;
  top.tank_pos_setpoint = 49.5;
  s.tank_pos = kPressureMax;
  s.pump_pos_on = true;
  CHECK(!safety_loop(s, top).pos_on);

  s = {};
  s.tank_pos = c.tank_pos_setpoint;
  s.tank_neg = c.tank_neg_setpoint + 5.0;
  CHECK(safety_loop(s, c).neg_on);
}

TEST_CASE("tanks recover after a large draw") {
  Plant p;
  p.apply_valve_command(0xFF, Valve::Inflate);
  p.run_for(1.0);
  p.apply_valve_command(0xFF, Valve::Deflate);
  p.run_for(3.0);
  const PlantConfig& c = p.config();
  CHECK(std::abs(p.state().tank_pos - c.tank_pos_setpoint) <= c.hysteresis + 1e-9);
  CHECK(std::abs(p.state().tank_neg - c.tank_neg_setpoint) <= c.hysteresis + 1e-9);
}

TEST_CASE("random valve commands never break the pressure limits") {
  PlantConfig c;
  c.volume_ratio = 0.2;  // strong tank coupling
  Plant p(c);
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> mask(1, 255);
  std::uniform_int_distribution<int> valve(-1, 1);
  std::uniform_int_distribution<int> gap(1, 200);
  int next = 0;
  for (int t = 0; t < 100000; ++t) {
    if (t == next) {
      p.apply_valve_command(static_cast<std::uint8_t>(mask(rng)), valve_from_int(valve(rng)));
      next += gap(rng);
    }
    p.step();
    const PlantState& s = p.state();
    for (double v : s.chambers) REQUIRE((v >= kPressureMin && v <= kPressureMax));
    REQUIRE((s.tank_pos >= kPressureMin && s.tank_pos <= kPressureMax));
    REQUIRE((s.tank_neg >= kPressureMin && s.tank_neg <= kPressureMax));
    for (Valve v : s.valves) REQUIRE((to_int(v) >= -1 && to_int(v) <= 1));
  }
}

TEST_CASE("identical command traces give identical state traces") {
  auto run = [] {
    Plant p;
    std::vector<std::string> rows;
    std::mt19937_64 rng(9);
    std::uniform_int_distribution<int> mask(1, 255);
    std::uniform_int_distribution<int> valve(-1, 1);
    for (int t = 0; t < 3000; ++t) {
      if (t % 97 == 0) p.apply_valve_command(static_cast<std::uint8_t>(mask(rng)), valve_from_int(valve(rng)));
      p.step();
      rows.push_back(plant_trace_row(p.state()));
    }
    return rows;
  };
  CHECK(run() == run());
}

TEST_CASE("trace format") {
  CHECK(plant_trace_header() ==
        "sim_time,tank_pos,tank_neg,p1,p2,p3,p4,p5,p6,p7,p8,v1,v2,v3,v4,v5,v6,v7,v8");
  Plant p;
  CHECK(plant_trace_row(p.state()) ==
        "0.000,48.000000,-55.000000,0.000000,0.000000,0.000000,0.000000,0.000000,0.000000,0.000000,0.000000,"
        "0,0,0,0,0,0,0,0");
}
