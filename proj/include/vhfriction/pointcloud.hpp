#pragma once

#include "vhfriction/core.hpp"
#include "vhfriction/ply.hpp"

#include <algorithm>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

namespace vhf {

struct ColoredPoint {
  Vec3 position = Vec3::Zero();  // meters
  Vec3 color = Vec3::Zero();     // RGB in [0, 1]
};

struct PointCloud {
  std::vector<ColoredPoint> points;
  std::string frame_id = "camera";

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }

  std::vector<Vec3> positions() const {
    std::vector<Vec3> out;
    out.reserve(points.size());
    for (const auto& p : points) out.push_back(p.position);
    return out;
  }

  PointCloud subset(const std::vector<std::size_t>& indices) const {
    PointCloud out;
    out.frame_id = frame_id;
    out.points.reserve(indices.size());
    for (auto i : indices) out.points.push_back(points[i]);
    return out;
  }
};

/// Per-point friction mean and variance carried alongside a cloud.
struct FrictionAnnotations {
  std::vector<double> friction;
  std::vector<double> variance;
};

struct AnnotatedCloud {
  PointCloud cloud;
  std::optional<FrictionAnnotations> annotations;
};

/// Plane {x : normal . x + offset = 0} with unit normal.
struct PlaneModel {
  Vec3 normal = Vec3::UnitZ();
  double offset = 0.0;

  PlaneModel() = default;
  PlaneModel(const Vec3& n, double d) {
    const double len = n.norm();
    require(len > 0.0 && std::isfinite(len), "plane normal must be non-zero");
    normal = n / len;
    offset = d / len;
  }

  double distance(const Vec3& x) const { return std::abs(normal.dot(x) + offset); }
};

// ---------------------------------------------------------------------------
// PLY I/O

inline AnnotatedCloud load_annotated_cloud(const std::string& path) {
  const ply::Document doc = ply::read_file(path);
  const ply::Element* vertex = doc.find("vertex");
  if (!vertex) throw ParseError("no 'vertex' element", 1, path);

  const char* required[] = {"x", "y", "z", "red", "green", "blue"};
  std::size_t col[6];
  for (int k = 0; k < 6; ++k) {
    auto idx = vertex->find(required[k]);
    if (!idx || vertex->properties[*idx].is_list)
      throw ParseError(std::string("missing required vertex property '") + required[k] + "'",
                       1, path);
    col[k] = *idx;
  }
  // uchar colours are rescaled; float colours are taken as already normalised.
  const auto& ctype = vertex->properties[col[3]].type;
  const bool eight_bit = ctype == "uchar" || ctype == "uint8";

  AnnotatedCloud out;
  out.cloud.points.reserve(vertex->count);
  for (const auto& row : vertex->rows) {
    ColoredPoint p;
    p.position = Vec3(row[col[0]], row[col[1]], row[col[2]]);
    p.color = Vec3(row[col[3]], row[col[4]], row[col[5]]);
    if (eight_bit) p.color /= 255.0;
    p.color = p.color.cwiseMax(0.0).cwiseMin(1.0);
    out.cloud.points.push_back(p);
  }

  auto fi = vertex->find("friction");
  auto vi = vertex->find("variance");
  if (fi && vi) {
    FrictionAnnotations ann;
    ann.friction.reserve(vertex->count);
    ann.variance.reserve(vertex->count);
    for (const auto& row : vertex->rows) {
      ann.friction.push_back(row[*fi]);
      ann.variance.push_back(row[*vi]);
    }
    out.annotations = std::move(ann);
  }

  // frame id travels in a header comment
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line) && line.rfind("end_header", 0) != 0) {
    if (line.rfind("comment frame_id ", 0) == 0) out.cloud.frame_id = line.substr(17);
  }
  return out;
}

inline PointCloud load_cloud(const std::string& path) { return load_annotated_cloud(path).cloud; }

inline std::uint8_t to_uchar(double c) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(c, 0.0, 1.0) * 255.0));
}

inline void write_cloud(std::ostream& os, const PointCloud& cloud,
                        const FrictionAnnotations* annotations = nullptr) {
  if (annotations) {
    require(annotations->friction.size() == cloud.size() &&
                annotations->variance.size() == cloud.size(),
            "annotation length must equal point count");
  }
  os << "ply\nformat ascii 1.0\n";
  os << "comment frame_id " << cloud.frame_id << "\n";
  os << "element vertex " << cloud.size() << "\n";
  os << "property float x\nproperty float y\nproperty float z\n";
  os << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
  if (annotations) os << "property float friction\nproperty float variance\n";
  os << "end_header\n";
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto& p = cloud.points[i];
    os << ply::format_float(p.position.x()) << ' ' << ply::format_float(p.position.y()) << ' '
       << ply::format_float(p.position.z()) << ' ' << int(to_uchar(p.color.x())) << ' '
       << int(to_uchar(p.color.y())) << ' ' << int(to_uchar(p.color.z()));
    if (annotations) {
      os << ' ' << ply::format_float(annotations->friction[i]) << ' '
         << ply::format_float(annotations->variance[i]);
    }
    os << '\n';
  }
}

inline void save_cloud(const PointCloud& cloud, const std::optional<FrictionAnnotations>& ann,
                       const std::string& path) {
  if (ann) {
    require(ann->friction.size() == cloud.size() && ann->variance.size() == cloud.size(),
            "annotation length must equal point count");
  }
  std::ofstream os(path);
  if (!os) throw IoError("cannot write '" + path + "'");
  write_cloud(os, cloud, ann ? &*ann : nullptr);
  if (!os) throw IoError("write failed for '" + path + "'");
}

inline void save_cloud(const PointCloud& cloud, const std::string& path) {
  save_cloud(cloud, std::nullopt, path);
}

// ---------------------------------------------------------------------------
// Filtering

struct FilterResult {
  PointCloud cloud;
  std::vector<std::size_t> kept;     // indices into the input, ascending
  std::vector<std::size_t> removed;  // complement of kept
};

/// Keeps points with |p - origin| <= max_distance.
inline FilterResult crop_depth(const PointCloud& cloud, double max_distance,
                               const Vec3& origin = Vec3::Zero()) {
  require(max_distance > 0.0, "max_distance must be positive");
  FilterResult out;
  const double r2 = max_distance * max_distance;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if ((cloud.points[i].position - origin).squaredNorm() <= r2)
      out.kept.push_back(i);
    else
      out.removed.push_back(i);
  }
  out.cloud = cloud.subset(out.kept);
  return out;
}

struct PlaneRemoval {
  FilterResult filtered;
  PlaneModel plane;
};

namespace detail {

// Least-squares plane through the given points (PCA smallest axis).
inline std::optional<PlaneModel> fit_plane_lsq(const PointCloud& cloud,
                                               const std::vector<std::size_t>& idx) {
  if (idx.size() < 3) return std::nullopt;
  Vec3 mean = Vec3::Zero();
  for (auto i : idx) mean += cloud.points[i].position;
  mean /= static_cast<double>(idx.size());
  Mat3 cov = Mat3::Zero();
  for (auto i : idx) {
    const Vec3 d = cloud.points[i].position - mean;
    cov += d * d.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Mat3> es(cov);
  if (es.eigenvalues()(1) <= 1e-18 * std::max(1.0, es.eigenvalues()(2))) return std::nullopt;
  const Vec3 n = es.eigenvectors().col(0);
  return PlaneModel(n, -n.dot(mean));
}

inline PlaneModel canonical(PlaneModel p) {
  int k = 0;
  p.normal.cwiseAbs().maxCoeff(&k);
  if (p.normal[k] < 0) {
    p.normal = -p.normal;
    p.offset = -p.offset;
  }
  return p;
}

}  // namespace detail

inline constexpr int kPlaneIterations = 200;

/// Removes the supporting plane. A null plane triggers a seeded consensus fit
/// (fixed iteration count) followed by a least-squares refit on its inliers.
inline PlaneRemoval remove_plane(const PointCloud& cloud, std::optional<PlaneModel> plane,
                                 double inlier_threshold, std::uint64_t seed = 0,
                                 int iterations = kPlaneIterations) {
  require(inlier_threshold > 0.0, "inlier_threshold must be positive");

  auto inliers_of = [&](const PlaneModel& pl) {
    std::vector<std::size_t> in;
    for (std::size_t i = 0; i < cloud.size(); ++i)
      if (pl.distance(cloud.points[i].position) <= inlier_threshold) in.push_back(i);
    return in;
  };

  if (!plane) {
    require(cloud.size() >= 3, "plane fitting needs at least 3 points");
    std::vector<std::size_t> all(cloud.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    if (!detail::fit_plane_lsq(cloud, all))
      throw InvalidArgument("degenerate cloud: all points are collinear");

    Rng rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, cloud.size() - 1);
    std::optional<PlaneModel> best;
    std::size_t best_count = 0;
    for (int it = 0; it < iterations; ++it) {
      const std::size_t a = pick(rng), b = pick(rng), c = pick(rng);
      if (a == b || b == c || a == c) continue;
      const Vec3& pa = cloud.points[a].position;
      const Vec3 n = (cloud.points[b].position - pa).cross(cloud.points[c].position - pa);
      if (n.norm() < 1e-12) continue;
      const PlaneModel cand(n, -n.normalized().dot(pa) * n.norm());
      std::size_t count = 0;
      for (const auto& p : cloud.points) count += cand.distance(p.position) <= inlier_threshold;
      if (count > best_count) {
        best_count = count;
        best = cand;
      }
    }
    if (!best) throw InvalidArgument("degenerate cloud: no plane hypothesis found");
    if (auto refined = detail::fit_plane_lsq(cloud, inliers_of(*best))) {
      if (inliers_of(*refined).size() >= best_count) best = refined;
    }
    plane = detail::canonical(*best);
  }

  PlaneRemoval out;
  out.plane = *plane;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (plane->distance(cloud.points[i].position) <= inlier_threshold)
      out.filtered.removed.push_back(i);
    else
      out.filtered.kept.push_back(i);
  }
  out.filtered.cloud = cloud.subset(out.filtered.kept);
  return out;
}

}  // namespace vhf
