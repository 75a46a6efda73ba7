#include "dexitac/harness/track_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "dexitac/error.hpp"

namespace dexitac::harness {
namespace {

constexpr const char* kColumns = "finger,seq,timestamp,contact,x,y,d_mm,flag";

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

double to_real(const std::string& v, int line) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw ParseError(line, "bad number '" + v + "'");
  return out;
}

long to_long(const std::string& v, int line) {
  long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw ParseError(line, "bad integer '" + v + "'");
  return out;
}

std::string real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_track_csv(std::ostream& out, const TrackFile& t) {
  out << "# pixel_scale_s = " << real(t.pixel_scale_s) << '\n'
      << "# t1 = " << real(t.thresholds.t1) << '\n'
      << "# t2 = " << real(t.thresholds.t2) << '\n'
      << "# stability_window = " << real(t.thresholds.stability_window) << '\n'
      << "# no_contact_timeout = " << real(t.thresholds.no_contact_timeout) << '\n'
      << "# window_mode = "
      << (t.thresholds.window_mode == control::WindowMode::Sliding ? "sliding" : "restart") << '\n'
      << kColumns << '\n';
  char buf[32];
  for (const TrackRow& r : t.rows) {
    std::snprintf(buf, sizeof buf, "%.6f", r.timestamp);
    out << r.finger << ',' << r.seq << ',' << buf << ',' << (r.center ? 1 : 0) << ',';
    if (r.center) out << real(r.center->x) << ',' << real(r.center->y);
    else out << ',';
    out << ',';
    if (r.displacement_mm) out << real(*r.displacement_mm);
    out << ',' << control::to_string(r.flag) << '\n';
  }
}

void write_track_csv(const std::filesystem::path& path, const TrackFile& t) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  write_track_csv(out, t);
}

TrackFile read_track_csv(std::istream& in) {
  TrackFile t;
  std::string line;
  int n = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = trim(line.substr(1, eq - 1));
      const std::string value = trim(line.substr(eq + 1));
      if (key == "pixel_scale_s") t.pixel_scale_s = to_real(value, n);
      else if (key == "t1") t.thresholds.t1 = to_real(value, n);
      else if (key == "t2") t.thresholds.t2 = to_real(value, n);
      else if (key == "stability_window") t.thresholds.stability_window = to_real(value, n);
      else if (key == "no_contact_timeout") t.thresholds.no_contact_timeout = to_real(value, n);
      else if (key == "window_mode") {
        if (value == "sliding") t.thresholds.window_mode = control::WindowMode::Sliding;
        else if (value == "restart") t.thresholds.window_mode = control::WindowMode::Restart;
        else throw ParseError(n, "bad window_mode '" + value + "'");
      }
      continue;
    }
    if (!header) {
      if (line != kColumns) throw ParseError(n, "expected header '" + std::string(kColumns) + "'");
      header = true;
      continue;
    }
    const auto cells = split(line, ',');
    if (cells.size() != 8) throw ParseError(n, "expected 8 columns");
    TrackRow r;
    r.finger = static_cast<int>(to_long(cells[0], n));
    if (r.finger != 1 && r.finger != 2) throw ParseError(n, "finger must be 1 or 2");
    r.seq = to_long(cells[1], n);
    r.timestamp = to_real(cells[2], n);
    if (cells[3] == "1") r.center = Point2{to_real(cells[4], n), to_real(cells[5], n)};
    else if (cells[3] != "0") throw ParseError(n, "contact must be 0 or 1");
    if (!cells[6].empty()) r.displacement_mm = to_real(cells[6], n);
    try {
      r.flag = control::flag_kind_from_string(cells[7]);
    } catch (const Error& e) {
      throw ParseError(n, e.what());
    }
    t.rows.push_back(r);
  }
  if (!header) throw ParseError(n, "missing column header");
  control::validate(t.thresholds);
  return t;
}

TrackFile read_track_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  return read_track_csv(in);
}

TrackFile track_from_episode(const control::EpisodeTrace& trace, const control::ControlThresholds& thresholds,
                             double pixel_scale_s) {
  TrackFile t;
  t.thresholds = thresholds;
  t.pixel_scale_s = pixel_scale_s;
  for (int f = 0; f < 2; ++f) {
    long seq = 0;
    for (const control::EpisodeRow& row : trace.rows) {
      const control::FingerSample& s = row.fingers[static_cast<std::size_t>(f)];
      TrackRow r;
      r.finger = f + 1;
      r.seq = seq++;
      r.timestamp = row.time;
      if (s.contact) r.center = s.center;
      r.displacement_mm = s.displacement_mm;
      r.flag = s.flag.kind;
      t.rows.push_back(r);
    }
  }
  return t;
}

ReplayResult replay_track(const TrackFile& t) {
  tactile::KdeConfig kde;
  kde.pixel_scale_s = t.pixel_scale_s;
  std::map<int, control::FingerMonitor> monitors;
  ReplayResult result;
  for (const TrackRow& recorded : t.rows) {
    auto it = monitors.find(recorded.finger);
    if (it == monitors.end()) {
      it = monitors.emplace(recorded.finger, control::FingerMonitor(recorded.finger, t.thresholds, kde)).first;
    }
    TrackRow r = recorded;
    r.flag = it->second.update(recorded.center, recorded.timestamp).kind;
    r.displacement_mm = it->second.latest_displacement();
    if (r.flag != recorded.flag) ++result.mismatches;
    result.rows.push_back(r);
  }
  return result;
}

}  // namespace dexitac::harness
