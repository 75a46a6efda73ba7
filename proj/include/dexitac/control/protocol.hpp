#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dexitac::control {

enum class CommandKind : std::uint8_t {
  CloseValves = 0x01,
  ReopenValves = 0x02,
  Regrasp = 0x03,
  Release = 0x04,
};

std::string to_string(CommandKind kind);

struct McuCommand {
  CommandKind kind = CommandKind::CloseValves;
  std::uint8_t valve_mask = 0;  // bit i = chamber i
  double timestamp = 0.0;

  friend bool operator==(const McuCommand&, const McuCommand&) = default;
};

// Wire frame: [0xAA][code][mask][code ^ mask].
inline constexpr std::uint8_t kSync = 0xAA;
inline constexpr std::size_t kFrameSize = 4;

std::array<std::uint8_t, kFrameSize> encode_frame(const McuCommand& command);

// Strict decode of exactly one frame; throws ProtocolError on bad sync,
// unknown code or checksum mismatch. The timestamp is not on the wire.
McuCommand decode_frame(std::span<const std::uint8_t> bytes);

// Byte-stream decoder that resynchronizes on the sync byte and drops
// frames with a bad checksum or code.
class FrameDecoder {
 public:
  // Returns the commands completed by `bytes`.
  std::vector<McuCommand> feed(std::span<const std::uint8_t> bytes);
  std::size_t dropped_frames() const { return dropped_; }

 private:
  std::vector<std::uint8_t> buffer_;
  std::size_t dropped_ = 0;
};

}  // namespace dexitac::control
