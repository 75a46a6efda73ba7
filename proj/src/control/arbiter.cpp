#include "dexitac/control/arbiter.hpp"

#include "dexitac/error.hpp"

namespace dexitac::control {
namespace {

constexpr double kTimeEps = 1e-9;

}  // namespace

std::string to_string(GraspPhase p) {
  switch (p) {
    case GraspPhase::Idle: return "Idle";
    case GraspPhase::Closing: return "Closing";
    case GraspPhase::Contacted: return "Contacted";
    case GraspPhase::Stable: return "Stable";
    case GraspPhase::Disturbed: return "Disturbed";
    case GraspPhase::Regrasping: return "Regrasping";
    case GraspPhase::Released: return "Released";
  }
  return "?";
}

bool is_legal_transition(GraspPhase from, GraspPhase to) {
  using P = GraspPhase;
  switch (from) {
    case P::Idle: return to == P::Closing;
    case P::Closing: return to == P::Contacted || to == P::Released;
    case P::Contacted: return to == P::Stable || to == P::Regrasping;
    case P::Stable: return to == P::Disturbed || to == P::Released;
    case P::Disturbed: return to == P::Stable || to == P::Regrasping;
    case P::Regrasping: return to == P::Closing;
    case P::Released: return false;
  }
  return false;
}

void validate(const ArbiterConfig& c) {
  validate(c.thresholds);
  if (!(c.control_period > 0)) throw ConfigError("control_period must be > 0");
  if (c.regrasp_release < 0 || c.regrasp_pause < 0) throw ConfigError("regrasp timings must be >= 0");
  if (c.max_regrasps < 0) throw ConfigError("max_regrasps must be >= 0");
  if (c.grasp_mask == 0) throw ConfigError("grasp_mask selects no chamber");
}

GraspController::GraspController(ArbiterConfig config) : config_(config) { validate(config_); }

GraspController GraspController::in_phase(GraspPhase phase, double entered_at, ArbiterConfig config) {
  GraspController c(config);
  c.phase_ = phase;
  c.entered_at_ = entered_at;
  c.last_contact_ = {entered_at, entered_at};
  return c;
}

void GraspController::enter(GraspPhase next, double now) {
  if (!is_legal_transition(phase_, next)) {
    throw Error("illegal phase transition " + to_string(phase_) + " -> " + to_string(next));
  }
  history_.push_back({now, phase_, next});
  phase_ = next;
  entered_at_ = now;
  if (next == GraspPhase::Closing || next == GraspPhase::Contacted) {
    stable_ = {false, false};
    last_contact_ = {now, now};
  }
}

McuCommand GraspController::command(CommandKind kind, std::uint8_t mask, double now) const {
  return {kind, mask, now};
}

McuCommand GraspController::start(double now) {
  enter(GraspPhase::Closing, now);
  return command(CommandKind::ReopenValves, config_.grasp_mask, now);
}

std::optional<McuCommand> GraspController::begin_regrasp(double now) {
  if (phase_ == GraspPhase::Stable) enter(GraspPhase::Disturbed, now);
  enter(GraspPhase::Regrasping, now);
  if (regrasps_ >= config_.max_regrasps) {
    // Out of attempts: open the hand and let the closing timeout end it.
    abandoning_ = true;
    return command(CommandKind::Release, config_.grasp_mask, now);
  }
  ++regrasps_;
  return command(CommandKind::Regrasp, config_.grasp_mask, now);
}

std::optional<McuCommand> GraspController::arbitrate(const PerceptionFlag& f1, const PerceptionFlag& f2,
                                                     double now) {
  const double max_age = 2.0 * config_.control_period + kTimeEps;
  if (now - f1.timestamp > max_age || now - f2.timestamp > max_age) {
    throw StaleFlags("flag older than two control periods");
  }

  const std::array<const PerceptionFlag*, 2> flags = {&f1, &f2};
  bool any_regrasp = false;
  bool any_disturbance = false;
  bool any_contact = false;
  bool lost_contact = false;
  for (std::size_t i = 0; i < 2; ++i) {
    const PerceptionFlag& f = *flags[i];
    if (f.contact) last_contact_[i] = now;
    if (f.kind == FlagKind::StableGrasp) stable_[i] = true;
    if (f.kind == FlagKind::DisturbanceOccured || f.kind == FlagKind::Regrasp || !f.contact) {
      stable_[i] = false;
    }
    any_regrasp |= f.kind == FlagKind::Regrasp;
    any_disturbance |= f.kind == FlagKind::DisturbanceOccured;
    any_contact |= f.contact;
    lost_contact |= !f.contact;
  }
  const bool both_stable = stable_[0] && stable_[1];
  const double timeout = config_.thresholds.no_contact_timeout;

  switch (phase_) {
    case GraspPhase::Idle:
    case GraspPhase::Released:
      return std::nullopt;

    case GraspPhase::Closing:
      if (any_contact && !abandoning_) {
        enter(GraspPhase::Contacted, now);
        return std::nullopt;
      }
      if (now - entered_at_ >= timeout - kTimeEps) {
        enter(GraspPhase::Released, now);
        return command(CommandKind::Release, config_.grasp_mask, now);
      }
      return std::nullopt;

    case GraspPhase::Contacted:
      if (any_regrasp) return begin_regrasp(now);
      if (both_stable) {
        enter(GraspPhase::Stable, now);
        return command(CommandKind::CloseValves, kAllMask, now);
      }
      for (double t : last_contact_) {
        if (now - t >= timeout - kTimeEps) return begin_regrasp(now);
      }
      return std::nullopt;

    case GraspPhase::Stable:
      if (any_regrasp || lost_contact) return begin_regrasp(now);
      if (any_disturbance) {
        enter(GraspPhase::Disturbed, now);
        return command(CommandKind::ReopenValves, config_.grasp_mask, now);
      }
      return std::nullopt;

    case GraspPhase::Disturbed:
      if (any_regrasp || lost_contact) return begin_regrasp(now);
      if (both_stable) {
        enter(GraspPhase::Stable, now);
        return command(CommandKind::CloseValves, kAllMask, now);
      }
      return std::nullopt;

    case GraspPhase::Regrasping:
      // The MCU runs the open/pause/close sequence itself.
      if (now - entered_at_ >= config_.regrasp_release + config_.regrasp_pause - kTimeEps) {
        enter(GraspPhase::Closing, now);
      }
      return std::nullopt;
  }
  return std::nullopt;
}

std::optional<McuCommand> GraspController::release(double now) {
  if (phase_ != GraspPhase::Stable) return std::nullopt;
  enter(GraspPhase::Released, now);
  return command(CommandKind::Release, config_.grasp_mask, now);
}

}  // namespace dexitac::control
