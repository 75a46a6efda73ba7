#include "dexitac/control/mcu.hpp"

#include "dexitac/error.hpp"

namespace dexitac::control {

McuEmulator::McuEmulator(McuTiming timing, double tick_dt) : timing_(timing), tick_dt_(tick_dt) {
  if (!(tick_dt > 0)) throw ConfigError("tick_dt must be > 0");
  if (timing.regrasp_release < 0 || timing.regrasp_pause < 0) {
    throw ConfigError("regrasp timings must be >= 0");
  }
}

void McuEmulator::receive(std::span<const std::uint8_t> bytes, std::int64_t tick) {
  using plant::Valve;
  for (McuCommand c : decoder_.feed(bytes)) {
    c.timestamp = static_cast<double>(tick) * tick_dt_;
    received_.push_back(c);
    pending_.clear();
    if (c.valve_mask == 0) continue;
    switch (c.kind) {
      case CommandKind::CloseValves: pending_.push_back({tick, c.valve_mask, Valve::Seal}); break;
      case CommandKind::ReopenValves: pending_.push_back({tick, c.valve_mask, Valve::Inflate}); break;
      case CommandKind::Release: pending_.push_back({tick, c.valve_mask, Valve::Deflate}); break;
      case CommandKind::Regrasp: {
        const std::int64_t open = plant::ticks_for(timing_.regrasp_release, tick_dt_);
        const std::int64_t pause = plant::ticks_for(timing_.regrasp_pause, tick_dt_);
        pending_.push_back({tick, c.valve_mask, Valve::Deflate});
        pending_.push_back({tick + open, c.valve_mask, Valve::Seal});
        pending_.push_back({tick + open + pause, c.valve_mask, Valve::Inflate});
        break;
      }
    }
  }
}

void McuEmulator::poll(std::int64_t tick, plant::Plant& plant) {
  while (!pending_.empty() && pending_.front().due <= tick) {
    const Action a = pending_.front();
    pending_.pop_front();
    plant.apply_valve_command(a.mask, a.valve);
  }
}

}  // namespace dexitac::control
