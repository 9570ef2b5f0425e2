#pragma once

#include "vhfriction/core.hpp"
#include "vhfriction/kdtree.hpp"
#include "vhfriction/mesh.hpp"
#include "vhfriction/pointcloud.hpp"
#include "vhfriction/wrench_hull.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <vector>

namespace vhf {

inline constexpr int kDefaultConeEdges = 8;
inline constexpr double kConeTolerance = 1e-9;  // on the cosine

struct FrictionCone {
  Vec3 contact_point = Vec3::Zero();
  Vec3 inward_normal = Vec3::UnitZ();
  double cof = 0.0;
  int edge_count = kDefaultConeEdges;

  double half_angle() const { return std::atan(cof); }

  /// Unit edge directions; a single direction when cof == 0.
  std::vector<Vec3> edges() const {
    require(edge_count >= 3, "friction cone needs at least 3 edges");
    require(cof >= 0.0, "friction coefficient must be >= 0");
    if (cof == 0.0) return {inward_normal};
    const Vec3 t1 = any_orthogonal(inward_normal);
    const Vec3 t2 = inward_normal.cross(t1);
    const double c = 1.0 / std::sqrt(1.0 + cof * cof), s = cof * c;
    std::vector<Vec3> out;
    out.reserve(static_cast<std::size_t>(edge_count));
    for (int k = 0; k < edge_count; ++k) {
      const double a = 2.0 * M_PI * k / edge_count;
      out.push_back(c * inward_normal + s * (std::cos(a) * t1 + std::sin(a) * t2));
    }
    return out;
  }

  /// Whether a direction lies inside the (continuous) cone.
  bool contains(const Vec3& direction) const {
    const double len = direction.norm();
    if (!(len > 0)) return false;
    return direction.dot(inward_normal) / len >= 1.0 / std::sqrt(1.0 + cof * cof) - kConeTolerance;
  }
};

struct MeshContact {
  Vec3 point = Vec3::Zero();
  std::size_t face = 0;
};

struct GraspCandidate {
  MeshContact contact_a, contact_b;
  Vec3 closing_vector = Vec3::UnitX();   // unit, a -> b
  Vec3 approach_vector = Vec3::UnitZ();  // unit, orthogonal to closing
  double cof_a = 0.0, cof_b = 0.0;       // friction used when sampling

  double width() const { return (contact_b.point - contact_a.point).norm(); }
};

struct GraspScore {
  double quality = 0.0;
  bool force_closure = false;
};

// ---------------------------------------------------------------------------

/// Each face takes the friction of the cloud point nearest its centroid.
inline TriangleMesh assign_face_friction(TriangleMesh mesh, const PointCloud& cloud,
                                         const std::vector<double>& point_friction) {
  require(!cloud.empty(), "cannot assign friction from an empty cloud");
  require(point_friction.size() == cloud.size(), "friction field must cover the cloud");
  const KdTree tree(cloud.positions());
  std::vector<double> f(mesh.faces.size());
  for (std::size_t i = 0; i < mesh.faces.size(); ++i)
    f[i] = point_friction[tree.nearest(mesh.face_centroid(i))];
  mesh.face_friction = std::move(f);
  return mesh;
}

inline FrictionCone contact_cone(const TriangleMesh& mesh, const MeshContact& c, double cof,
                                 int edges = kDefaultConeEdges) {
  return FrictionCone{c.point, -mesh.face_normal(c.face), cof, edges};
}

struct SamplerParams {
  std::size_t count = 1000;
  std::uint64_t seed = 0;
  std::optional<double> uniform_friction;  // overrides per-face values
  std::size_t attempts_per_candidate = 100;
};

struct SamplingResult {
  std::vector<GraspCandidate> candidates;
  std::size_t attempts = 0;
};

/// Friction-cone constrained antipodal sampling.
inline SamplingResult sample_antipodal(const TriangleMesh& mesh, const SamplerParams& params) {
  require(params.count >= 1, "count must be >= 1");
  require(!mesh.faces.empty(), "mesh has no faces");
  if (params.uniform_friction)
    require(*params.uniform_friction >= 0.0, "uniform friction must be >= 0");
  else
    require(mesh.face_friction.has_value(), "mesh has no face friction; assign it or pass a uniform value");

  auto mu = [&](std::size_t face) {
    return params.uniform_friction ? *params.uniform_friction : mesh.friction(face);
  };

  std::vector<double> cdf(mesh.faces.size());
  double total = 0.0;
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) cdf[f] = total += mesh.face_area(f);
  require(total > 0.0, "mesh has zero surface area");

  Rng rng(params.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  SamplingResult out;
  const std::size_t budget = params.attempts_per_candidate * params.count;
  while (out.candidates.size() < params.count && out.attempts < budget) {
    ++out.attempts;
    const double pick = unit(rng) * total;
    const std::size_t fa =
        std::min<std::size_t>(static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), pick) - cdf.begin()),
                              cdf.size() - 1);
    double r1 = unit(rng), r2 = unit(rng);
    if (r1 + r2 > 1.0) {
      r1 = 1.0 - r1;
      r2 = 1.0 - r2;
    }
    const Vec3 pa = mesh.corner(fa, 0) + r1 * (mesh.corner(fa, 1) - mesh.corner(fa, 0)) +
                    r2 * (mesh.corner(fa, 2) - mesh.corner(fa, 0));
    const FrictionCone cone_a = contact_cone(mesh, {pa, fa}, mu(fa));

    // direction uniform in solid angle inside the cone
    const double cos_max = 1.0 / std::sqrt(1.0 + cone_a.cof * cone_a.cof);
    const double cos_t = 1.0 - unit(rng) * (1.0 - cos_max);
    const double sin_t = std::sqrt(std::max(0.0, 1.0 - cos_t * cos_t));
    const double phi = 2.0 * M_PI * unit(rng);
    const Vec3 t1 = any_orthogonal(cone_a.inward_normal), t2 = cone_a.inward_normal.cross(t1);
    const Vec3 dir = (cos_t * cone_a.inward_normal + sin_t * (std::cos(phi) * t1 + std::sin(phi) * t2)).normalized();
    const double roll = 2.0 * M_PI * unit(rng);

    const auto hit = cast_ray(mesh, pa, dir, 1e-6);
    if (!hit) continue;
    const MeshContact b{hit->point, hit->face};
    const Vec3 chord = b.point - pa;
    if (chord.norm() <= 1e-6) continue;
    const Vec3 closing = chord.normalized();
    const FrictionCone cone_b = contact_cone(mesh, b, mu(b.face));
    if (!cone_a.contains(closing) || !cone_b.contains(-closing)) continue;

    const Vec3 u = any_orthogonal(closing), v = closing.cross(u);
    GraspCandidate g;
    g.contact_a = {pa, fa};
    g.contact_b = b;
    g.closing_vector = closing;
    g.approach_vector = (std::cos(roll) * u + std::sin(roll) * v).normalized();
    g.cof_a = cone_a.cof;
    g.cof_b = cone_b.cof;
    out.candidates.push_back(g);
  }
  if (out.candidates.empty())
    throw InfeasibleError("no antipodal grasp found in " + std::to_string(out.attempts) + " attempts");
  return out;
}

// ---------------------------------------------------------------------------
// Collision

struct GripperGeometry {
  double finger_length = 0.05;
  double finger_width = 0.01;
  double max_opening = 0.08;
  double palm_depth = 0.02;

  void validate() const {
    require(finger_length > 0 && finger_width > 0 && max_opening > 0 && palm_depth > 0,
            "gripper dimensions must be positive");
  }
};

/// Oriented box: center + R * diag(half) * [-1, 1]^3.
struct OrientedBox {
  Vec3 center = Vec3::Zero();
  Mat3 axes = Mat3::Identity();  // columns are the box axes
  Vec3 half = Vec3::Zero();
};

inline constexpr double kCollisionTolerance = 1e-6;

/// Exact separating-axis test between a triangle and an oriented box.
inline bool triangle_box_overlap(const Vec3& a, const Vec3& b, const Vec3& c, const OrientedBox& box) {
  const Vec3 v[3] = {box.axes.transpose() * (a - box.center), box.axes.transpose() * (b - box.center),
                     box.axes.transpose() * (c - box.center)};
  const Vec3& h = box.half;
  auto separated = [&](const Vec3& axis) {
    if (axis.squaredNorm() < 1e-30) return false;
    const double p0 = axis.dot(v[0]), p1 = axis.dot(v[1]), p2 = axis.dot(v[2]);
    const double r = h.x() * std::abs(axis.x()) + h.y() * std::abs(axis.y()) + h.z() * std::abs(axis.z());
    return std::min({p0, p1, p2}) > r || std::max({p0, p1, p2}) < -r;
  };
  for (int k = 0; k < 3; ++k)
    if (separated(Vec3::Unit(k))) return false;
  const Vec3 e[3] = {v[1] - v[0], v[2] - v[1], v[0] - v[2]};
  if (separated(e[0].cross(e[1]))) return false;
  for (int k = 0; k < 3; ++k)
    for (int j = 0; j < 3; ++j)
      if (separated(Vec3::Unit(k).cross(e[j]))) return false;
  return true;
}

/// Finger and palm boxes for a candidate with the jaws open. The fingers'
/// inner faces sit max_opening/2 either side of the grasp centre along the
/// closing line; the pads reach finger_width/2 past the contacts along the
/// approach and extend finger_length back; the palm spans both fingers.
inline std::vector<OrientedBox> gripper_boxes(const GraspCandidate& g, const GripperGeometry& grip) {
  const Vec3 x = g.closing_vector, a = g.approach_vector, y = a.cross(x);
  Mat3 axes;
  axes << x, y, a;
  const double w = grip.finger_width, L = grip.finger_length, m = 0.5 * grip.max_opening;
  const Vec3 center = 0.5 * (g.contact_a.point + g.contact_b.point);
  auto make = [&](double x0, double x1, double a0, double a1) {
    OrientedBox b;
    b.axes = axes;
    b.center = center + axes * Vec3(0.5 * (x0 + x1), 0.0, 0.5 * (a0 + a1));
    b.half = Vec3(0.5 * (x1 - x0), 0.5 * w, 0.5 * (a1 - a0));
    return b;
  };
  const double tip = 0.5 * w, root = tip - L;
  return {make(-m - w, -m, root, tip), make(m, m + w, root, tip),
          make(-m - w, m + w, root - grip.palm_depth, root)};
}

/// Box shrunk by the collision tolerance; touching within it is not a hit.
inline OrientedBox shrink(OrientedBox b, double tol = kCollisionTolerance) {
  b.half = (b.half.array() - tol).cwiseMax(0.0).matrix();
  return b;
}

/// true when the grasp is collision free and within the opening.
inline bool check_collision(const GraspCandidate& g, const TriangleMesh& mesh, const GripperGeometry& grip) {
  grip.validate();
  if (g.width() > grip.max_opening) return false;
  const auto boxes = gripper_boxes(g, grip);
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const Vec3 a = mesh.corner(f, 0), b = mesh.corner(f, 1), c = mesh.corner(f, 2);
    const Vec3 lo = a.cwiseMin(b).cwiseMin(c), hi = a.cwiseMax(b).cwiseMax(c);
    std::optional<bool> near_contact;
    for (const auto& box_raw : boxes) {
      const OrientedBox box = shrink(box_raw);
      const Vec3 ext = box.axes.cwiseAbs() * box.half;
      if (((box.center - ext).array() > hi.array()).any() || ((box.center + ext).array() < lo.array()).any())
        continue;
      if (!near_contact) {
        // faces touching a contact point are allowed
        const double da = (closest_point_on_triangle(g.contact_a.point, a, b, c) - g.contact_a.point).norm();
        const double db = (closest_point_on_triangle(g.contact_b.point, a, b, c) - g.contact_b.point).norm();
        near_contact = da <= kCollisionTolerance || db <= kCollisionTolerance;
      }
      if (*near_contact) break;
      if (triangle_box_overlap(a, b, c, box)) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Wrenches and quality

/// One 6D wrench per cone edge: [e_k ; (p - origin) x e_k / scale].
inline std::vector<Vec6> contact_wrenches(const FrictionCone& cone, const Vec3& torque_origin,
                                          double torque_scale) {
  require(torque_scale > 0.0, "torque scale must be positive");
  const Vec3 r = cone.contact_point - torque_origin;
  std::vector<Vec6> out;
  for (const Vec3& e : cone.edges()) {
    Vec6 w;
    w << e, r.cross(e) / torque_scale;
    out.push_back(w);
  }
  return out;
}

/// Optional soft-contact pair: unit normal force with a spin moment of
/// +/- radius * cof about the normal.
inline std::vector<Vec6> torsional_wrenches(const FrictionCone& cone, const Vec3& torque_origin,
                                            double torque_scale, double patch_radius) {
  require(patch_radius >= 0.0, "patch radius must be >= 0");
  if (patch_radius == 0.0 || cone.cof == 0.0) return {};
  const Vec3 r = cone.contact_point - torque_origin;
  const Vec3 n = cone.inward_normal;
  std::vector<Vec6> out;
  for (double sign : {1.0, -1.0}) {
    Vec6 w;
    w << n, (r.cross(n) + sign * patch_radius * cone.cof * n) / torque_scale;
    out.push_back(w);
  }
  return out;
}

inline GraspScore ferrari_canny_l1(const std::vector<Vec6>& wrenches) {
  require(!wrenches.empty(), "need at least one wrench");
  const HullDistance h = hull_distance_to_origin(wrenches);
  return {h.distance, h.distance > 0.0};
}

struct ScoringParams {
  int cone_edges = kDefaultConeEdges;
  double torsional_radius = 0.0;  // m; 0 keeps hard point contacts
  std::optional<double> uniform_friction;
};

inline GraspScore score_grasp(const GraspCandidate& g, const TriangleMesh& mesh, const Vec3& origin,
                              double scale, const ScoringParams& sp) {
  auto mu = [&](std::size_t f) { return sp.uniform_friction ? *sp.uniform_friction : mesh.friction(f); };
  std::vector<Vec6> w;
  for (const MeshContact* c : {&g.contact_a, &g.contact_b}) {
    const FrictionCone cone = contact_cone(mesh, *c, mu(c->face), sp.cone_edges);
    for (const auto& x : contact_wrenches(cone, origin, scale)) w.push_back(x);
    for (const auto& x : torsional_wrenches(cone, origin, scale, sp.torsional_radius)) w.push_back(x);
  }
  return ferrari_canny_l1(w);
}

struct RankedGrasp {
  std::size_t index = 0;  // into the candidate list
  GraspCandidate candidate;
  GraspScore score;
};

/// Collision filter, scoring, then the top_k by quality (ties -> lower index).
inline std::vector<RankedGrasp> rank_grasps(const std::vector<GraspCandidate>& candidates,
                                            const TriangleMesh& mesh, const GripperGeometry& grip,
                                            std::size_t top_k, const ScoringParams& sp = {}) {
  require(top_k >= 1, "top_k must be >= 1");
  grip.validate();
  const Vec3 origin = mesh.centroid();
  const double scale = mesh.max_radius(origin);
  require(scale > 0.0, "mesh has zero extent");
  std::vector<RankedGrasp> ranked;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (!check_collision(candidates[i], mesh, grip)) continue;
    ranked.push_back({i, candidates[i], score_grasp(candidates[i], mesh, origin, scale, sp)});
  }
  if (ranked.empty()) throw InfeasibleError("every grasp candidate collides with the mesh");
  std::stable_sort(ranked.begin(), ranked.end(), [](const RankedGrasp& a, const RankedGrasp& b) {
    return a.score.quality > b.score.quality;
  });
  if (ranked.size() > top_k) ranked.resize(top_k);
  return ranked;
}

}  // namespace vhf
