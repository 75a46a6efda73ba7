#include "dexitac/kinematics/hull.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace dexitac::kinematics {
namespace {

struct Face {
  std::array<int, 3> v;
  Eigen::Vector3d normal;
  double offset;
  bool alive = true;
};

Face make_face(const std::vector<Eigen::Vector3d>& pts, int a, int b, int c) {
  Face f{{a, b, c}, (pts[b] - pts[a]).cross(pts[c] - pts[a]), 0.0};
  const double n = f.normal.norm();
  if (n > 0.0) f.normal /= n;
  f.offset = f.normal.dot(pts[a]);
  return f;
}

std::uint64_t edge_key(int a, int b) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

}  // namespace

ConvexHull convex_hull(std::span<const Eigen::Vector3d> input, double tolerance) {
  ConvexHull hull;
  hull.degenerate = true;
  if (input.size() < 4) return hull;

  std::vector<Eigen::Vector3d> pts(input.begin(), input.end());
  Eigen::Vector3d lo = pts[0];
  Eigen::Vector3d hi = pts[0];
  for (const auto& p : pts) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const double scale = (hi - lo).norm();
  if (scale == 0.0) return hull;
  const double eps = tolerance * scale;

  // Initial simplex from extreme points.
  int i0 = 0;
  for (int i = 1; i < static_cast<int>(pts.size()); ++i) {
    if (pts[i].x() < pts[i0].x()) i0 = i;
  }
  int i1 = i0;
  double best = 0.0;
  for (int i = 0; i < static_cast<int>(pts.size()); ++i) {
    const double d = (pts[i] - pts[i0]).norm();
    if (d > best) best = d, i1 = i;
  }
  if (best <= eps) return hull;
  const Eigen::Vector3d axis = (pts[i1] - pts[i0]).normalized();
  int i2 = i0;
  best = 0.0;
  for (int i = 0; i < static_cast<int>(pts.size()); ++i) {
    const double d = (pts[i] - pts[i0]).cross(axis).norm();
    if (d > best) best = d, i2 = i;
  }
  if (best <= eps) return hull;
  const Eigen::Vector3d plane_n = (pts[i1] - pts[i0]).cross(pts[i2] - pts[i0]).normalized();
  int i3 = i0;
  best = 0.0;
  for (int i = 0; i < static_cast<int>(pts.size()); ++i) {
    const double d = std::abs(plane_n.dot(pts[i] - pts[i0]));
    if (d > best) best = d, i3 = i;
  }
  if (best <= eps) return hull;

  hull.degenerate = false;
  std::vector<Face> faces;
  const Eigen::Vector3d inside = (pts[i0] + pts[i1] + pts[i2] + pts[i3]) / 4.0;
  auto add_oriented = [&](int a, int b, int c) {
    Face f = make_face(pts, a, b, c);
    if (f.normal.dot(inside) - f.offset > 0.0) f = make_face(pts, a, c, b);
    faces.push_back(f);
  };
  add_oriented(i0, i1, i2);
  add_oriented(i0, i1, i3);
  add_oriented(i0, i2, i3);
  add_oriented(i1, i2, i3);

  std::vector<int> visible;
  std::unordered_set<std::uint64_t> edges;
  for (int p = 0; p < static_cast<int>(pts.size()); ++p) {
    if (p == i0 || p == i1 || p == i2 || p == i3) continue;
    visible.clear();
    for (int f = 0; f < static_cast<int>(faces.size()); ++f) {
      if (faces[f].alive && faces[f].normal.dot(pts[p]) - faces[f].offset > eps) visible.push_back(f);
    }
    if (visible.empty()) continue;

    edges.clear();
    for (int f : visible) {
      const auto& v = faces[f].v;
      for (int k = 0; k < 3; ++k) edges.insert(edge_key(v[k], v[(k + 1) % 3]));
    }
    for (int f : visible) {
      const auto v = faces[f].v;
      faces[f].alive = false;
      for (int k = 0; k < 3; ++k) {
        const int a = v[k];
        const int b = v[(k + 1) % 3];
        if (!edges.contains(edge_key(b, a))) faces.push_back(make_face(pts, a, b, p));
      }
    }
    if (faces.size() > 4096 && faces.size() > 4 * visible.size()) {
      std::erase_if(faces, [](const Face& f) { return !f.alive; });
    }
  }

  // Compact to the vertices actually referenced.
  std::vector<int> remap(pts.size(), -1);
  double volume = 0.0;
  for (const Face& f : faces) {
    if (!f.alive) continue;
    std::array<int, 3> out{};
    for (int k = 0; k < 3; ++k) {
      int& r = remap[f.v[k]];
      if (r < 0) {
        r = static_cast<int>(hull.vertices.size());
        hull.vertices.push_back(pts[f.v[k]]);
      }
      out[k] = r;
    }
    hull.faces.push_back(out);
    const Eigen::Vector3d a = pts[f.v[0]] - inside;
    const Eigen::Vector3d b = pts[f.v[1]] - inside;
    const Eigen::Vector3d c = pts[f.v[2]] - inside;
    volume += a.dot(b.cross(c)) / 6.0;
  }
  hull.volume = volume;
  return hull;
}

double convex_hull_volume(std::span<const Eigen::Vector3d> points) {
  return convex_hull(points).volume;
}

}  // namespace dexitac::kinematics
