#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dexitac/control/arbiter.hpp"
#include "dexitac/control/classifier.hpp"
#include "dexitac/control/guards.hpp"
#include "dexitac/control/protocol.hpp"
#include "dexitac/plant/plant.hpp"
#include "dexitac/sensor/sensor_sim.hpp"

namespace dexitac::control {

// contact: the object is (re)presented to a finger.
// disturbance: same, but marks a ground-truth disturbance onset.
// remove: the object leaves the finger.
enum class StimulusKind { Contact, Disturbance, Remove };

std::string to_string(StimulusKind kind);
StimulusKind stimulus_kind_from_string(const std::string& s);

struct StimulusEvent {
  double time = 0.0;  // s
  int finger = 1;     // 1 or 2
  StimulusKind kind = StimulusKind::Contact;
  sensor::ContactStimulus stimulus;  // ignored for remove
};

enum class PerceptionMode {
  Image,    // render the frame and run the full detector
  Markers,  // skip rendering: displaced markers plus Gaussian position noise
};

std::string to_string(PerceptionMode mode);
PerceptionMode perception_mode_from_string(const std::string& s);

struct ControlSettings {
  double frame_rate = 30.0;  // Hz, one arbitration per frame pair
  PerceptionMode perception = PerceptionMode::Image;
  int kde_stride = 4;          // px; the centre is refined at full resolution
  double marker_noise = 0.2;   // px, Markers mode only
  bool concurrent = false;     // one perception worker per finger
  std::optional<double> release_at;  // s, scripted end of the hold
  int max_regrasps = 3;
  double regrasp_release = 1.0;  // s
  double regrasp_pause = 0.5;    // s
  // Grip coupling: the scripted indentation is scaled by how far the
  // finger's Rot chamber sits between these two pressures.
  double contact_pressure = 15.0;  // kPa
  double full_pressure = 40.0;     // kPa
  double edge_margin = 40.0;       // px
};

struct Scenario {
  std::string name = "scenario";
  std::uint64_t seed = 1;
  double duration = 15.0;  // s
  sensor::SensorModel sensor;
  plant::PlantConfig plant;
  ControlThresholds thresholds;
  ControlSettings control;
  std::vector<StimulusEvent> events;
};

// Throws ValidationError naming the violated invariant.
void validate(const Scenario& scenario);

struct FingerSample {
  bool contact = false;
  Point2 center;
  std::optional<double> displacement_mm;
  double depth = 0.0;  // effective indentation this frame, mm
  PerceptionFlag flag;
  EdgeAction edge = EdgeAction::Continue;
};

// One row per frame pair.
struct EpisodeRow {
  std::int64_t tick = 0;
  double time = 0.0;
  GraspPhase phase = GraspPhase::Idle;  // after arbitration
  std::array<FingerSample, 2> fingers;
  std::optional<McuCommand> command;
  plant::PlantState plant;
};

struct EpisodeTrace {
  std::string scenario_name;
  std::uint64_t seed = 0;
  double tick_dt = 0.001;
  std::vector<EpisodeRow> rows;
  std::vector<plant::PlantState> plant_states;  // one per tick, after commands
  std::vector<PhaseChange> transitions;
  std::vector<McuCommand> commands;             // as sent, controller time
  std::vector<double> disturbance_onsets;       // scenario ground truth, s
  GraspPhase final_phase = GraspPhase::Idle;

  // First entry into Stable, if any.
  std::optional<double> time_to_stable() const;
};

// Drives the loop tick by tick until Released or the scenario ends.
// Throws ScenarioError on an invalid scenario.
EpisodeTrace run_grasp(const Scenario& scenario);

// Time from the first disturbance onset to the first valve change in the
// plant trace at or after it. Throws NoDisturbance when the scenario has
// no disturbance event or the valves never move afterwards.
double measure_response_latency(const EpisodeTrace& trace);

// tick,time,phase, per finger x,y,D,flag,edge, command, v1..v8, p1..p8
void write_episode_csv(std::ostream& out, const EpisodeTrace& trace);
void write_plant_csv(std::ostream& out, const EpisodeTrace& trace);
void write_transitions_csv(std::ostream& out, const EpisodeTrace& trace);

}  // namespace dexitac::control
