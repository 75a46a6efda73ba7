#include "dexitac/control/episode.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <future>
#include <ostream>
#include <random>

#include "dexitac/control/mcu.hpp"
#include "dexitac/error.hpp"
#include "dexitac/tactile/pipeline.hpp"

namespace dexitac::control {
namespace {

// Sub-seed tags.
constexpr std::uint64_t kSensorSeed = 1;
constexpr std::uint64_t kImageNoiseSeed = 2;
constexpr std::uint64_t kMarkerNoiseSeed = 3;

struct FingerView {
  std::optional<Point2> center;
  double depth = 0.0;
};

struct PerceptionContext {
  const Scenario* scenario;
  sensor::SensorModel model;
  tactile::PerceptionConfig config;
  tactile::MarkerSet nominal;
};

FingerView perceive_finger(const PerceptionContext& ctx, const std::optional<sensor::ContactStimulus>& stim,
                           double coupling, int finger, std::int64_t frame, double now) {
  const Scenario& sc = *ctx.scenario;
  FingerView view;
  tactile::MarkerSet markers;
  if (stim && stim->depth * coupling > 0.0) {
    sensor::ContactStimulus s = *stim;
    s.depth *= coupling;
    s.timestamp = now;
    view.depth = s.depth;
    markers = sensor::displace_markers(ctx.model, s);
  } else {
    markers = ctx.nominal;
    markers.frame_timestamp = now;
  }

  const auto f = static_cast<std::uint64_t>(finger);
  const auto k = static_cast<std::uint64_t>(frame);
  tactile::Perception p;
  if (sc.control.perception == PerceptionMode::Image) {
    sensor::SensorModel m = ctx.model;
    m.seed = sensor::derive_seed(sc.seed, kImageNoiseSeed, f, k);
    tactile::TactileFrame img = sensor::render_frame(markers, m);
    img.timestamp = now;
    img.finger_id = finger;
    p = tactile::perceive(img, ctx.config);
  } else {
    std::mt19937_64 rng(sensor::derive_seed(sc.seed, kMarkerNoiseSeed, f, k));
    std::normal_distribution<double> noise(0.0, sc.control.marker_noise);
    if (sc.control.marker_noise > 0.0) {
      for (Point2& c : markers.centroids) {
        c.x += noise(rng);
        c.y += noise(rng);
      }
    }
    p = tactile::perceive_markers(markers, ctx.config.kde);
  }
  if (p.contact) view.center = p.contact->center;
  return view;
}

std::string format_command(const std::optional<McuCommand>& c) {
  if (!c) return "";
  char buf[48];
  std::snprintf(buf, sizeof buf, "%s:%02x", to_string(c->kind).c_str(), c->valve_mask);
  return buf;
}

}  // namespace

std::string to_string(StimulusKind k) {
  switch (k) {
    case StimulusKind::Contact: return "contact";
    case StimulusKind::Disturbance: return "disturbance";
    case StimulusKind::Remove: return "remove";
  }
  return "?";
}

StimulusKind stimulus_kind_from_string(const std::string& s) {
  for (StimulusKind k : {StimulusKind::Contact, StimulusKind::Disturbance, StimulusKind::Remove}) {
    if (to_string(k) == s) return k;
  }
  throw ConfigError("unknown stimulus kind '" + s + "'");
}

std::string to_string(PerceptionMode m) { return m == PerceptionMode::Image ? "image" : "markers"; }

PerceptionMode perception_mode_from_string(const std::string& s) {
  if (s == "image") return PerceptionMode::Image;
  if (s == "markers") return PerceptionMode::Markers;
  throw ConfigError("unknown perception mode '" + s + "'");
}

void validate(const Scenario& sc) {
  try {
    sensor::validate(sc.sensor);
    plant::validate(sc.plant);
    validate(sc.thresholds);
  } catch (const ConfigError& e) {
    throw ValidationError(e.what());
  }
  const ControlSettings& c = sc.control;
  if (!(sc.duration > 0)) throw ValidationError("duration must be > 0");
  if (!(c.frame_rate > 0)) throw ValidationError("frame_rate must be > 0");
  if (c.kde_stride < 1) throw ValidationError("kde_stride must be >= 1");
  if (!(c.marker_noise >= 0)) throw ValidationError("marker_noise must be >= 0");
  if (c.max_regrasps < 0) throw ValidationError("max_regrasps must be >= 0");
  if (c.regrasp_release < 0 || c.regrasp_pause < 0) throw ValidationError("regrasp timings must be >= 0");
  if (!(c.contact_pressure < c.full_pressure)) {
    throw ValidationError("contact_pressure must be below full_pressure");
  }
  if (c.release_at && !(*c.release_at >= 0)) throw ValidationError("release_at must be >= 0");
  if (!(c.edge_margin >= 0)) throw ValidationError("edge_margin must be >= 0");

  double last = 0.0;
  for (std::size_t i = 0; i < sc.events.size(); ++i) {
    const StimulusEvent& e = sc.events[i];
    const std::string where = "event " + std::to_string(i + 1) + ": ";
    if (!(e.time >= 0)) throw ValidationError(where + "time must be >= 0");
    if (e.time < last) throw ValidationError(where + "stimulus event times must be nondecreasing");
    last = e.time;
    if (e.finger != 1 && e.finger != 2) throw ValidationError(where + "finger must be 1 or 2");
    if (e.kind != StimulusKind::Remove) {
      try {
        sensor::validate(e.stimulus);
      } catch (const ConfigError& err) {
        throw ValidationError(where + err.what());
      }
    }
  }
}

std::optional<double> EpisodeTrace::time_to_stable() const {
  for (const PhaseChange& c : transitions) {
    if (c.to == GraspPhase::Stable) return c.time;
  }
  return std::nullopt;
}

EpisodeTrace run_grasp(const Scenario& sc) {
  validate(sc);
  const double dt = sc.plant.tick_dt;

  PerceptionContext ctx{&sc, sc.sensor, {}, {}};
  ctx.model.seed = sensor::derive_seed(sc.seed, kSensorSeed);
  ctx.config.kde.grid_stride = sc.control.kde_stride;
  ctx.config.kde.frame_width = sc.sensor.frame_width;
  ctx.config.kde.frame_height = sc.sensor.frame_height;
  ctx.nominal = sensor::nominal_markers(ctx.model);

  ArbiterConfig arb;
  arb.thresholds = sc.thresholds;
  arb.control_period = 1.0 / sc.control.frame_rate;
  arb.regrasp_release = sc.control.regrasp_release;
  arb.regrasp_pause = sc.control.regrasp_pause;
  arb.max_regrasps = sc.control.max_regrasps;

  plant::Plant plant(sc.plant);
  McuEmulator mcu({sc.control.regrasp_release, sc.control.regrasp_pause}, dt);
  GraspController controller(arb);
  std::array<FingerMonitor, 2> monitors = {FingerMonitor(1, sc.thresholds, ctx.config.kde),
                                           FingerMonitor(2, sc.thresholds, ctx.config.kde)};

  EpisodeTrace trace;
  trace.scenario_name = sc.name;
  trace.seed = sc.seed;
  trace.tick_dt = dt;

  const std::int64_t delay_ticks = plant::ticks_for(sc.plant.control_delay, dt);
  std::deque<std::pair<std::int64_t, McuCommand>> outbox;
  auto send = [&](const McuCommand& c, std::int64_t tick) {
    trace.commands.push_back(c);
    outbox.emplace_back(tick + delay_ticks, c);
  };

  std::array<std::optional<sensor::ContactStimulus>, 2> stimulus;
  std::size_t next_event = 0;
  std::int64_t frame = 0;
  const double period = 1.0 / sc.control.frame_rate;
  auto frame_tick = [&](std::int64_t k) {
    return static_cast<std::int64_t>(std::llround(static_cast<double>(k) * period / dt));
  };

  send(controller.start(0.0), 0);
  const std::int64_t total = plant::ticks_for(sc.duration, dt);
  for (std::int64_t n = 0; n <= total; ++n) {
    const double now = static_cast<double>(n) * dt;

    while (next_event < sc.events.size() && plant::ticks_for(sc.events[next_event].time, dt) <= n) {
      const StimulusEvent& e = sc.events[next_event++];
      auto& slot = stimulus[static_cast<std::size_t>(e.finger - 1)];
      if (e.kind == StimulusKind::Remove) {
        slot.reset();
      } else {
        slot = e.stimulus;
      }
      if (e.kind == StimulusKind::Disturbance) trace.disturbance_onsets.push_back(e.time);
    }

    if (n == frame_tick(frame)) {
      std::array<double, 2> coupling{};
      for (int f = 0; f < 2; ++f) {
        const double p_rot = plant.state().chambers[static_cast<std::size_t>(4 * f)];
        coupling[f] = std::clamp((p_rot - sc.control.contact_pressure) /
                                     (sc.control.full_pressure - sc.control.contact_pressure),
                                 0.0, 1.0);
      }
      std::array<FingerView, 2> views;
      if (sc.control.concurrent) {
        // Perception is a pure function of its inputs, so the workers share
        // nothing and the result matches the sequential path.
        std::array<std::future<FingerView>, 2> workers;
        for (int f = 0; f < 2; ++f) {
          workers[f] = std::async(std::launch::async, perceive_finger, std::cref(ctx),
                                  std::cref(stimulus[f]), coupling[f], f + 1, frame, now);
        }
        for (int f = 0; f < 2; ++f) views[f] = workers[f].get();
      } else {
        for (int f = 0; f < 2; ++f) views[f] = perceive_finger(ctx, stimulus[f], coupling[f], f + 1, frame, now);
      }

      EpisodeRow row;
      row.tick = n;
      row.time = now;
      for (std::size_t f = 0; f < 2; ++f) {
        FingerSample& s = row.fingers[f];
        s.flag = monitors[f].update(views[f].center, now);
        s.contact = views[f].center.has_value();
        if (s.contact) s.center = *views[f].center;
        s.displacement_mm = monitors[f].latest_displacement();
        s.depth = views[f].depth;
        s.edge = edge_guard(monitors[f].track(), sc.sensor.frame_width, sc.sensor.frame_height,
                            sc.control.edge_margin);
      }
      row.command = controller.arbitrate(row.fingers[0].flag, row.fingers[1].flag, now);
      if (!row.command && sc.control.release_at && now >= *sc.control.release_at - 1e-9) {
        row.command = controller.release(now);
      }
      if (row.command) send(*row.command, n);
      row.phase = controller.phase();
      row.plant = plant.state();
      trace.rows.push_back(row);
      ++frame;
    }

    while (!outbox.empty() && outbox.front().first <= n) {
      const auto bytes = encode_frame(outbox.front().second);
      mcu.receive(bytes, n);
      outbox.pop_front();
    }
    mcu.poll(n, plant);
    trace.plant_states.push_back(plant.state());

    if (controller.phase() == GraspPhase::Released && outbox.empty() && mcu.idle()) break;
    plant.step();
  }

  trace.transitions = controller.history();
  trace.final_phase = controller.phase();
  return trace;
}

double measure_response_latency(const EpisodeTrace& trace) {
  if (trace.disturbance_onsets.empty()) throw NoDisturbance("episode has no disturbance event");
  const double onset = trace.disturbance_onsets.front();
  const std::int64_t onset_tick = plant::ticks_for(onset, trace.tick_dt);
  for (std::size_t i = 1; i < trace.plant_states.size(); ++i) {
    const plant::PlantState& s = trace.plant_states[i];
    if (s.tick < onset_tick) continue;
    if (s.valves != trace.plant_states[i - 1].valves) {
      return static_cast<double>(s.tick - onset_tick) * trace.tick_dt;
    }
  }
  throw NoDisturbance("no valve actuation after the disturbance onset");
}

void write_episode_csv(std::ostream& out, const EpisodeTrace& trace) {
  out << "tick,time,phase,x1,y1,d1,flag1,edge1,x2,y2,d2,flag2,edge2,command";
  for (int i = 1; i <= plant::kChambers; ++i) out << ",v" << i;
  for (int i = 1; i <= plant::kChambers; ++i) out << ",p" << i;
  out << '\n';
  char buf[64];
  for (const EpisodeRow& r : trace.rows) {
    std::snprintf(buf, sizeof buf, "%lld,%.3f,", static_cast<long long>(r.tick), r.time);
    out << buf << to_string(r.phase);
    for (const FingerSample& s : r.fingers) {
      if (s.contact) {
        std::snprintf(buf, sizeof buf, ",%.17g,%.17g", s.center.x, s.center.y);
        out << buf;
      } else {
        out << ",,";
      }
      if (s.displacement_mm) {
        std::snprintf(buf, sizeof buf, ",%.6f", *s.displacement_mm);
        out << buf;
      } else {
        out << ',';
      }
      out << ',' << to_string(s.flag.kind) << ',' << to_string(s.edge);
    }
    out << ',' << format_command(r.command);
    for (plant::Valve v : r.plant.valves) out << ',' << plant::to_int(v);
    for (double p : r.plant.chambers) {
      std::snprintf(buf, sizeof buf, ",%.6f", p);
      out << buf;
    }
    out << '\n';
  }
}

void write_plant_csv(std::ostream& out, const EpisodeTrace& trace) {
  out << plant::plant_trace_header() << '\n';
  for (const plant::PlantState& s : trace.plant_states) out << plant::plant_trace_row(s) << '\n';
}

void write_transitions_csv(std::ostream& out, const EpisodeTrace& trace) {
  out << "time,from,to\n";
  char buf[32];
  for (const PhaseChange& c : trace.transitions) {
    std::snprintf(buf, sizeof buf, "%.3f", c.time);
    out << buf << ',' << to_string(c.from) << ',' << to_string(c.to) << '\n';
  }
}

}  // namespace dexitac::control
