#include "dexitac/control/protocol.hpp"

#include <algorithm>

#include "dexitac/error.hpp"

namespace dexitac::control {
namespace {

bool known_code(std::uint8_t code) { return code >= 0x01 && code <= 0x04; }

}  // namespace

std::string to_string(CommandKind kind) {
  switch (kind) {
    case CommandKind::CloseValves: return "CloseValves";
    case CommandKind::ReopenValves: return "ReopenValves";
    case CommandKind::Regrasp: return "Regrasp";
    case CommandKind::Release: return "Release";
  }
  return "?";
}

std::array<std::uint8_t, kFrameSize> encode_frame(const McuCommand& c) {
  const auto code = static_cast<std::uint8_t>(c.kind);
  return {kSync, code, c.valve_mask, static_cast<std::uint8_t>(code ^ c.valve_mask)};
}

McuCommand decode_frame(std::span<const std::uint8_t> b) {
  if (b.size() != kFrameSize) throw ProtocolError("frame must be 4 bytes");
  if (b[0] != kSync) throw ProtocolError("missing sync byte");
  if (!known_code(b[1])) throw ProtocolError("unknown command code");
  if (static_cast<std::uint8_t>(b[1] ^ b[2]) != b[3]) throw ProtocolError("checksum mismatch");
  return {static_cast<CommandKind>(b[1]), b[2], 0.0};
}

std::vector<McuCommand> FrameDecoder::feed(std::span<const std::uint8_t> bytes) {
  std::vector<McuCommand> out;
  buffer_.insert(buffer_.end(), bytes.begin(), bytes.end());
  std::size_t pos = 0;
  while (true) {
    const auto sync = std::find(buffer_.begin() + static_cast<std::ptrdiff_t>(pos), buffer_.end(), kSync);
    pos = static_cast<std::size_t>(sync - buffer_.begin());
    if (buffer_.size() - pos < kFrameSize) break;
    const std::uint8_t code = buffer_[pos + 1];
    const std::uint8_t mask = buffer_[pos + 2];
    if (known_code(code) && static_cast<std::uint8_t>(code ^ mask) == buffer_[pos + 3]) {
      out.push_back({static_cast<CommandKind>(code), mask, 0.0});
      pos += kFrameSize;
    } else {
      ++dropped_;
      ++pos;  // resync from the next byte
    }
  }
  buffer_.erase(buffer_.begin(), buffer_.begin() + static_cast<std::ptrdiff_t>(pos));
  return out;
}

}  // namespace dexitac::control
