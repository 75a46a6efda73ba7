#include "dexitac/kinematics/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "dexitac/error.hpp"
#include "dexitac/kinematics/hull.hpp"

namespace dexitac::kinematics {
namespace {

constexpr double kDeg = std::numbers::pi / 180.0;
constexpr double kSeriesThreshold = 1e-6;

const std::array<double, 3> kChamberAngles{0.0, 2.0 * std::numbers::pi / 3.0,
                                           4.0 * std::numbers::pi / 3.0};

void check_pressure(const JointModel& j, double p) {
  if (!(p >= j.pressure_min_kpa && p <= j.pressure_max_kpa)) {
    std::ostringstream os;
    os << "chamber pressure " << p << " kPa outside [" << j.pressure_min_kpa << ", "
       << j.pressure_max_kpa << "]";
    throw PressureOutOfRange(os.str());
  }
}

}  // namespace

void validate(const JointGeometry& g) {
  if (!(g.connector_side_l > 0 && g.connector_thickness_t > 0 && g.actuator_length_h > 0 &&
        g.actuator_diameter_d > 0)) {
    throw ConfigError("joint geometry values must be positive");
  }
}

JointModel default_rot_joint() {
  JointModel j;
  j.kind = JointKind::Rot;
  j.bend_gain_deg_per_kpa = 1.2;
  j.extension_gain_mm_per_kpa = 0.0;
  return j;
}

JointModel default_dex_joint() {
  JointModel j;
  j.kind = JointKind::Dex;
  j.bend_gain_deg_per_kpa = 0.9;
  j.extension_gain_mm_per_kpa = 0.1;
  return j;
}

void validate(const JointModel& j) {
  validate(j.geometry);
  if (!(j.angle_min_deg <= 0.0 && j.angle_max_deg >= 0.0)) {
    throw ConfigError("angle limits must bracket zero");
  }
  if (!(j.pressure_min_kpa <= j.pressure_max_kpa)) throw ConfigError("pressure limits inverted");
  if (j.pressure_min_kpa < -57.0 || j.pressure_max_kpa > 50.0) {
    throw ConfigError("pressure limits exceed the actuator range [-57, 50] kPa");
  }
  if (j.kind == JointKind::Dex) {
    const double shortest = j.geometry.rest_length() +
                            j.extension_gain_mm_per_kpa * std::min(j.pressure_min_kpa, 0.0);
    if (!(shortest > 0.0)) throw ConfigError("extension gain collapses the Dex joint length");
  }
}

CcSegment pressure_to_cc(const JointModel& joint, std::span<const double> pressures) {
  if (static_cast<int>(pressures.size()) != joint.chamber_count()) {
    throw PressureOutOfRange("expected " + std::to_string(joint.chamber_count()) +
                             " chamber pressures, got " + std::to_string(pressures.size()));
  }
  for (double p : pressures) check_pressure(joint, p);

  CcSegment seg;
  seg.length = joint.geometry.rest_length();
  if (joint.kind == JointKind::Rot) {
    const double angle =
        std::clamp(joint.bend_gain_deg_per_kpa * pressures[0], joint.angle_min_deg, joint.angle_max_deg);
    seg.kappa = angle * kDeg / seg.length;
    return seg;
  }

  double bx = 0.0;
  double by = 0.0;
  double mean = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    bx += pressures[i] * std::cos(kChamberAngles[i]);
    by += pressures[i] * std::sin(kChamberAngles[i]);
    mean += pressures[i];
  }
  bx *= 2.0 / 3.0;
  by *= 2.0 / 3.0;
  mean /= 3.0;
  seg.length += joint.extension_gain_mm_per_kpa * mean;
  const double magnitude = std::hypot(bx, by);
  // Chamber trigonometry leaves ~1e-15 residue for a pure-extension input.
  if (magnitude > 1e-9) {
    const double angle = std::min(joint.bend_gain_deg_per_kpa * magnitude, joint.angle_max_deg);
    seg.phi = std::atan2(by, bx);
    seg.kappa = angle * kDeg / seg.length;
  }
  return seg;
}

std::array<double, 3> dex_chamber_pressures(double bend_x, double bend_y, double mean) {
  std::array<double, 3> p{};
  for (std::size_t i = 0; i < 3; ++i) {
    p[i] = mean + bend_x * std::cos(kChamberAngles[i]) + bend_y * std::sin(kChamberAngles[i]);
  }
  return p;
}

Eigen::Matrix4d translation(double x, double y, double z) {
  Eigen::Matrix4d t = Eigen::Matrix4d::Identity();
  t.block<3, 1>(0, 3) = Eigen::Vector3d(x, y, z);
  return t;
}

Eigen::Matrix4d cc_transform(const CcSegment& s) {
  const double theta = s.kappa * s.length;
  const double L = s.length;
  double in_plane_x;
  double in_plane_z;
  if (std::abs(theta) < kSeriesThreshold) {
    const double t2 = theta * theta;
    in_plane_x = L * (theta / 2.0 - theta * t2 / 24.0);
    in_plane_z = L * (1.0 - t2 / 6.0 + t2 * t2 / 120.0);
  } else {
    const double half = std::sin(theta / 2.0);
    in_plane_x = 2.0 * half * half / s.kappa;
    in_plane_z = std::sin(theta) / s.kappa;
  }

  const Eigen::Matrix3d rz = Eigen::AngleAxisd(s.phi, Eigen::Vector3d::UnitZ()).toRotationMatrix();
  const Eigen::Matrix3d ry = Eigen::AngleAxisd(theta, Eigen::Vector3d::UnitY()).toRotationMatrix();
  Eigen::Matrix4d t = Eigen::Matrix4d::Identity();
  t.block<3, 3>(0, 0) = rz * ry * rz.transpose();
  t.block<3, 1>(0, 3) = rz * Eigen::Vector3d(in_plane_x, 0.0, in_plane_z);
  return t;
}

std::string to_string(ChainOrder order) { return order == ChainOrder::DexRot ? "dexrot" : "rotdex"; }

ChainOrder chain_order_from_string(const std::string& s) {
  if (s == "dexrot") return ChainOrder::DexRot;
  if (s == "rotdex") return ChainOrder::RotDex;
  throw ConfigError("unknown chain order '" + s + "'");
}

double FingerChain::rest_length() const {
  return dex.geometry.rest_length() + rot.geometry.rest_length() + tip_offset_mm;
}

void validate(const FingerChain& c) {
  if (c.dex.kind != JointKind::Dex || c.rot.kind != JointKind::Rot) {
    throw ConfigError("a finger needs exactly one Dex and one Rot joint");
  }
  validate(c.dex);
  validate(c.rot);
  if (c.tip_offset_mm < 0.0) throw ConfigError("tip offset must be >= 0");
}

Eigen::Matrix4d compose(std::span<const Eigen::Matrix4d> transforms) {
  Eigen::Matrix4d t = Eigen::Matrix4d::Identity();
  for (const auto& m : transforms) t = t * m;
  return t;
}

Eigen::Matrix4d finger_fk(const FingerChain& chain, const FingerPressures& p) {
  const Eigen::Matrix4d dex = cc_transform(pressure_to_cc(chain.dex, p.dex));
  const double rot_p[1] = {p.rot};
  const Eigen::Matrix4d rot = cc_transform(pressure_to_cc(chain.rot, rot_p));
  const Eigen::Matrix4d tip = translation(0.0, 0.0, chain.tip_offset_mm);
  const std::array<Eigen::Matrix4d, 4> parts =
      chain.order == ChainOrder::DexRot ? std::array{chain.base, dex, rot, tip}
                                        : std::array{chain.base, rot, dex, tip};
  return compose(parts);
}

Workspace workspace(const FingerChain& chain, int samples_per_axis) {
  validate(chain);
  if (samples_per_axis < 2) throw ConfigError("samples_per_axis must be >= 2");
  const int n = samples_per_axis;
  auto sample = [n](const JointModel& j, int i) {
    return j.pressure_min_kpa + (j.pressure_max_kpa - j.pressure_min_kpa) * i / (n - 1);
  };

  Workspace ws;
  ws.points.reserve(static_cast<std::size_t>(n) * n * n * n);
  for (int r = 0; r < n; ++r) {
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        for (int c = 0; c < n; ++c) {
          FingerPressures p;
          p.rot = sample(chain.rot, r);
          p.dex = {sample(chain.dex, a), sample(chain.dex, b), sample(chain.dex, c)};
          ws.points.push_back(finger_fk(chain, p).block<3, 1>(0, 3));
        }
      }
    }
  }
  ws.hull_volume = convex_hull_volume(ws.points);
  return ws;
}

}  // namespace dexitac::kinematics
