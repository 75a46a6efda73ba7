#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dexitac/control/classifier.hpp"
#include "dexitac/control/protocol.hpp"

namespace dexitac::control {

enum class GraspPhase { Idle, Closing, Contacted, Stable, Disturbed, Regrasping, Released };

inline constexpr std::array<GraspPhase, 7> kAllPhases = {
    GraspPhase::Idle,   GraspPhase::Closing,    GraspPhase::Contacted, GraspPhase::Stable,
    GraspPhase::Disturbed, GraspPhase::Regrasping, GraspPhase::Released};

std::string to_string(GraspPhase phase);
bool is_legal_transition(GraspPhase from, GraspPhase to);

// Chambers 0..3 belong to finger 1 (Rot, then Dex a/b/c), 4..7 to finger 2.
inline constexpr std::uint8_t kGraspMask = 0x11;  // the two Rot chambers close the grasp
inline constexpr std::uint8_t kAllMask = 0xFF;

struct ArbiterConfig {
  ControlThresholds thresholds;
  double control_period = 1.0 / 30.0;  // s
  double regrasp_release = 1.0;        // s, fingers open
  double regrasp_pause = 0.5;          // s, before closing again
  int max_regrasps = 3;
  std::uint8_t grasp_mask = kGraspMask;
};

void validate(const ArbiterConfig& config);

struct PhaseChange {
  double time = 0.0;
  GraspPhase from = GraspPhase::Idle;
  GraspPhase to = GraspPhase::Idle;
};

// Arbitration process: consumes one flag per finger per control period
// and is the only producer of MCU commands.
class GraspController {
 public:
  explicit GraspController(ArbiterConfig config = {});

  // Test hook: a controller already in `phase` since `entered_at`.
  static GraspController in_phase(GraspPhase phase, double entered_at, ArbiterConfig config = {});

  // Idle -> Closing; inflates the grasp chambers.
  McuCommand start(double now);

  // Throws StaleFlags if either flag is older than two control periods.
  std::optional<McuCommand> arbitrate(const PerceptionFlag& finger1, const PerceptionFlag& finger2,
                                      double now);

  // Scripted end of a stable hold: Stable -> Released.
  std::optional<McuCommand> release(double now);

  GraspPhase phase() const { return phase_; }
  double entered_at() const { return entered_at_; }
  int regrasp_count() const { return regrasps_; }
  const std::vector<PhaseChange>& history() const { return history_; }

 private:
  void enter(GraspPhase next, double now);
  McuCommand command(CommandKind kind, std::uint8_t mask, double now) const;
  std::optional<McuCommand> begin_regrasp(double now);

  ArbiterConfig config_;
  GraspPhase phase_ = GraspPhase::Idle;
  double entered_at_ = 0.0;
  int regrasps_ = 0;
  bool abandoning_ = false;  // regrasp budget spent, waiting out the closing timeout
  std::array<bool, 2> stable_{};
  std::array<double, 2> last_contact_{};
  std::vector<PhaseChange> history_;
};

}  // namespace dexitac::control
