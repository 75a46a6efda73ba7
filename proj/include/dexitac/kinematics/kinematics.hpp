#pragma once

#include <Eigen/Dense>
#include <array>
#include <span>
#include <string>
#include <vector>

namespace dexitac::kinematics {

// Bellows joint dimensions, mm.
struct JointGeometry {
  double connector_side_l = 18.0;
  double connector_thickness_t = 2.0;
  double actuator_length_h = 26.0;
  double actuator_diameter_d = 10.0;

  // Bending length at zero pressure: actuator plus the connector on each end.
  double rest_length() const { return actuator_length_h + 2.0 * connector_thickness_t; }
};

void validate(const JointGeometry& g);

enum class JointKind { Rot, Dex };

// Linear pressure -> bend/extension model of one joint.
//
// Rot: a single chamber bending in the joint's fixed x-z plane,
//   angle = bend_gain * p.
// Dex: three chambers at 0, 120 and 240 degrees around the axis. Their
//   pressures resolve into two orthogonal bend components
//   b = 2/3 * sum_i p_i (cos a_i, sin a_i), bend angle = bend_gain * |b|
//   in the plane phi = atan2(b_y, b_x), and an axial extension
//   extension_gain * mean(p).
struct JointModel {
  JointKind kind = JointKind::Rot;
  double bend_gain_deg_per_kpa = 1.2;
  double extension_gain_mm_per_kpa = 0.0;
  double angle_min_deg = -90.0;
  double angle_max_deg = 90.0;
  double pressure_min_kpa = -57.0;
  double pressure_max_kpa = 50.0;
  JointGeometry geometry;

  int chamber_count() const { return kind == JointKind::Rot ? 1 : 3; }
};

JointModel default_rot_joint();
JointModel default_dex_joint();
void validate(const JointModel& j);

// Constant-curvature arc: curvature (1/mm, signed), bending-plane angle
// (rad) and arc length (mm).
struct CcSegment {
  double kappa = 0.0;
  double phi = 0.0;
  double length = 0.0;

  double bend_angle() const { return kappa * length; }
};

// Throws PressureOutOfRange if any chamber is outside the joint limits or
// the chamber count does not match the joint kind.
CcSegment pressure_to_cc(const JointModel& joint, std::span<const double> pressures);

// Chamber pressures of a Dex joint producing bend components (bx, by) and
// the given mean pressure; the inverse of the Dex mapping above.
std::array<double, 3> dex_chamber_pressures(double bend_x_kpa, double bend_y_kpa, double mean_kpa);

// Rz(phi) * [arc in x-z plane] * Rz(-phi). For |kappa * length| below
// 1e-6 the arc position uses its 4th-order series, so kappa = 0 is exact
// translation by `length` along z.
Eigen::Matrix4d cc_transform(const CcSegment& segment);

Eigen::Matrix4d translation(double x, double y, double z);

enum class ChainOrder { DexRot, RotDex };

std::string to_string(ChainOrder order);
ChainOrder chain_order_from_string(const std::string& s);

struct FingerPressures {
  double rot = 0.0;
  std::array<double, 3> dex{0.0, 0.0, 0.0};
};

// One finger: a Dex and a Rot joint composed base-to-tip in `order`,
// followed by a rigid tip offset along the last joint's axis.
struct FingerChain {
  ChainOrder order = ChainOrder::DexRot;
  JointModel dex = default_dex_joint();
  JointModel rot = default_rot_joint();
  Eigen::Matrix4d base = Eigen::Matrix4d::Identity();
  double tip_offset_mm = 20.0;

  // Total length along the axis when all pressures are zero.
  double rest_length() const;
};

void validate(const FingerChain& chain);

// Product of 4x4 transforms in the given order.
Eigen::Matrix4d compose(std::span<const Eigen::Matrix4d> transforms);

// base * T(first joint) * T(second joint) * tip offset.
Eigen::Matrix4d finger_fk(const FingerChain& chain, const FingerPressures& pressures);

struct Workspace {
  std::vector<Eigen::Vector3d> points;
  double hull_volume = 0.0;  // mm^3
};

// Uniform grid of `samples_per_axis` values over every chamber's pressure
// range (4 chambers), tip position of each sample, convex-hull volume.
Workspace workspace(const FingerChain& chain, int samples_per_axis);

}  // namespace dexitac::kinematics
