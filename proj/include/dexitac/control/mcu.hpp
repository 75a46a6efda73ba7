#pragma once

#include <cstdint>
#include <deque>
#include <span>
#include <vector>

#include "dexitac/control/protocol.hpp"
#include "dexitac/plant/plant.hpp"

namespace dexitac::control {

struct McuTiming {
  double regrasp_release = 1.0;  // s with the selected chambers venting
  double regrasp_pause = 0.5;    // s sealed before re-inflating
};

// Low-level controller: decodes wire frames and drives plant valves.
//   CloseValves  -> seal
//   ReopenValves -> inflate
//   Release      -> vent to the negative tank
//   Regrasp      -> vent, pause sealed, inflate
// A new command cancels whatever is left of a running sequence.
class McuEmulator {
 public:
  McuEmulator(McuTiming timing, double tick_dt);

  void receive(std::span<const std::uint8_t> bytes, std::int64_t tick);
  // Applies every action due at or before `tick`.
  void poll(std::int64_t tick, plant::Plant& plant);

  const std::vector<McuCommand>& received() const { return received_; }
  std::size_t dropped_frames() const { return decoder_.dropped_frames(); }
  bool idle() const { return pending_.empty(); }

 private:
  struct Action {
    std::int64_t due;
    std::uint8_t mask;
    plant::Valve valve;
  };

  McuTiming timing_;
  double tick_dt_;
  FrameDecoder decoder_;
  std::deque<Action> pending_;
  std::vector<McuCommand> received_;
};

}  // namespace dexitac::control
