#pragma once

// Desk-scale synthetic scenes: a table, a far wall and one object, seen from
// a camera at the origin (+z up). Only camera-facing object surfaces are
// sampled. Every point carries its ground-truth c.o.f. and material label.

#include "vhfriction/core.hpp"
#include "vhfriction/mesh.hpp"
#include "vhfriction/pointcloud.hpp"

#include <fstream>
#include <sstream>
#include <optional>
#include <string>
#include <vector>

namespace vhf {

enum class Shape { box, cylinder, two_band_cylinder, checker_board, mug };

inline Shape parse_shape(const std::string& name) {
  if (name == "box") return Shape::box;
  if (name == "cylinder") return Shape::cylinder;
  if (name == "two-band-cylinder" || name == "two_band_cylinder") return Shape::two_band_cylinder;
  if (name == "checker-board" || name == "checker_board" || name == "checkerboard")
    return Shape::checker_board;
  if (name == "mug") return Shape::mug;
  throw InvalidArgument("unknown shape '" + name +
                        "' (expected box, cylinder, two-band-cylinder, checker-board, mug)");
}

inline std::string shape_name(Shape s) {
  switch (s) {
    case Shape::box: return "box";
    case Shape::cylinder: return "cylinder";
    case Shape::two_band_cylinder: return "two-band-cylinder";
    case Shape::checker_board: return "checker-board";
    case Shape::mug: return "mug";
  }
  return "?";
}

inline std::size_t material_count(Shape s) {
  return s == Shape::box || s == Shape::cylinder ? 1 : 2;
}

struct Material {
  Vec3 color = Vec3::Constant(0.5);
  double cof = 0.3;
};

inline std::vector<Material> default_materials(Shape s) {
  switch (s) {
    case Shape::box:
    case Shape::cylinder: return {{Vec3(0.95, 0.95, 0.95), 0.3}};
    case Shape::two_band_cylinder: return {{Vec3(0.9, 0.8, 0.1), 0.35}, {Vec3(0.1, 0.1, 0.1), 0.9}};
    case Shape::checker_board: return {{Vec3(0.85, 0.1, 0.1), 0.3}, {Vec3(0.1, 0.2, 0.8), 0.7}};
    case Shape::mug: return {{Vec3(0.9, 0.8, 0.1), 0.2}, {Vec3(0.1, 0.1, 0.1), 0.8}};
  }
  return {};
}

struct SceneParams {
  Shape shape = Shape::box;
  std::vector<Material> materials;  // empty -> shape defaults
  double color_noise = 0.02;
  double position_noise = 0.0005;
  double table_noise = 0.001;
  double spacing = 0.005;
  std::uint64_t seed = 0;
  std::optional<Material> decal;  // small patch of a further material
};

inline constexpr int kTableLabel = -1;
inline constexpr int kWallLabel = -2;
inline constexpr double kSceneSurfaceCof = 0.5;

struct SyntheticScene {
  SceneParams params;
  PointCloud cloud;
  std::vector<double> cof;  // per point
  std::vector<int> label;   // material index, or kTableLabel / kWallLabel
  TriangleMesh mesh;        // object surface in the cloud frame
  std::vector<int> mesh_label;  // per face
  Vec3 trace_start = Vec3::Zero(), trace_end = Vec3::Zero();
  double table_height = 0.0;
};

namespace scene_geometry {
inline constexpr double kTableZ = -0.35;
inline constexpr double kObjectY = 0.55;
inline constexpr double kWallY = 2.0;
inline constexpr double kBottomGap = 0.02;  // object points start this far above the table
inline constexpr double kBoxW = 0.12, kBoxD = 0.06, kBoxH = 0.18;
inline constexpr double kCylR = 0.04, kCylH = 0.12;
inline constexpr double kCheckerSquare = 0.03;
}  // namespace scene_geometry

inline MugProxyShape scene_mug_shape() { return MugProxyShape{}; }

inline TriangleMesh translated(TriangleMesh m, const Vec3& offset) {
  for (auto& v : m.vertices) v += offset;
  return m;
}

inline SyntheticScene make_scene(const SceneParams& in) {
  using namespace scene_geometry;
  SceneParams p = in;
  if (p.materials.empty()) p.materials = default_materials(p.shape);
  require(!p.materials.empty(), "at least one material is required");
  require(p.materials.size() == material_count(p.shape),
          shape_name(p.shape) + " needs exactly " + std::to_string(material_count(p.shape)) +
              " material(s)");
  for (const auto& m : p.materials)
    require(m.cof >= 0.0 && (m.color.array() >= 0).all() && (m.color.array() <= 1).all(),
            "material colors must be in [0, 1] and c.o.f. >= 0");
  require(p.color_noise >= 0 && p.position_noise >= 0 && p.table_noise >= 0,
          "noise levels must be non-negative");
  require(p.spacing > 0, "spacing must be positive");

  SyntheticScene s;
  s.params = p;
  s.table_height = kTableZ;
  Rng rng(p.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const Vec3 camera = Vec3::Zero();
  const Vec3 base(0.0, kObjectY, kTableZ);

  auto push = [&](Vec3 pos, const Vec3& color, double cof, int label, double pos_noise) {
    pos += pos_noise * Vec3(gauss(rng), gauss(rng), gauss(rng));
    Vec3 c = color + p.color_noise * Vec3(gauss(rng), gauss(rng), gauss(rng));
    s.cloud.points.push_back({pos, c.cwiseMax(0.0).cwiseMin(1.0)});
    s.cof.push_back(cof);
    s.label.push_back(label);
  };
  auto cells = [&](double length, double step) {
    return std::max(1, static_cast<int>(std::lround(length / step)));
  };
  auto facing = [&](const Vec3& pos, const Vec3& normal) { return normal.dot(camera - pos) > 0.0; };
  auto object_point = [&](const Vec3& pos, int label) {
    const Material& m = label < static_cast<int>(p.materials.size()) ? p.materials[static_cast<std::size_t>(label)] : *p.decal;
    push(pos, m.color, m.cof, label, p.position_noise);
  };
  const int decal_label = static_cast<int>(p.materials.size());

  // Table, minus the object footprint.
  double footprint = 0.0;
  switch (p.shape) {
    case Shape::box:
    case Shape::checker_board: footprint = 0.5 * std::hypot(kBoxW, kBoxD); break;
    case Shape::cylinder:
    case Shape::two_band_cylinder: footprint = kCylR; break;
    case Shape::mug: footprint = scene_mug_shape().bottom_radius; break;
  }
  {
    const Vec3 table_color(0.55, 0.4, 0.25);
    const double tx = 0.6, ty = 0.6, step = 0.01;
    const int nx = cells(tx, step), ny = cells(ty, step);
    for (int i = 0; i < nx; ++i)
      for (int j = 0; j < ny; ++j) {
        const Vec3 pos(-0.5 * tx + (i + 0.5) * tx / nx, kObjectY - 0.5 * ty + (j + 0.5) * ty / ny, kTableZ);
        const Vec3 rel = pos - base;
        const bool under = (p.shape == Shape::box || p.shape == Shape::checker_board)
                               ? std::abs(rel.x()) <= 0.5 * kBoxW && std::abs(rel.y()) <= 0.5 * kBoxD
                               : rel.head<2>().norm() <= footprint;
        if (under) continue;
        push(pos, table_color, kSceneSurfaceCof, kTableLabel, 0.0);
        s.cloud.points.back().position.z() += p.table_noise * gauss(rng);
      }
  }

  const double h = p.spacing;
  const double cam_azimuth = std::atan2(camera.y() - base.y(), camera.x() - base.x());
  switch (p.shape) {
    case Shape::box:
    case Shape::checker_board: {
      const double W = kBoxW, D = kBoxD, H = kBoxH;
      auto material_at = [&](double u, double v) {
        if (p.shape == Shape::box) return 0;
        const long a = static_cast<long>(std::floor(u / kCheckerSquare));
        const long b = static_cast<long>(std::floor(v / kCheckerSquare));
        return static_cast<int>(((a + b) % 2 + 2) % 2);
      };
      // faces: (origin corner, u axis, v axis, u length, v length, normal)
      struct Side {
        Vec3 o, u, v;
        double lu, lv;
        Vec3 n;
      };
      const double z0 = kBottomGap;
      const Side sides[] = {
          {base + Vec3(-W / 2, -D / 2, z0), Vec3::UnitX(), Vec3::UnitZ(), W, H - z0, -Vec3::UnitY()},
          {base + Vec3(-W / 2, D / 2, z0), Vec3::UnitX(), Vec3::UnitZ(), W, H - z0, Vec3::UnitY()},
          {base + Vec3(-W / 2, -D / 2, z0), Vec3::UnitY(), Vec3::UnitZ(), D, H - z0, -Vec3::UnitX()},
          {base + Vec3(W / 2, -D / 2, z0), Vec3::UnitY(), Vec3::UnitZ(), D, H - z0, Vec3::UnitX()},
          {base + Vec3(-W / 2, -D / 2, H), Vec3::UnitX(), Vec3::UnitY(), W, D, Vec3::UnitZ()}};
      for (const auto& side : sides) {
        const int nu = cells(side.lu, h), nv = cells(side.lv, h);
        for (int i = 0; i < nu; ++i)
          for (int j = 0; j < nv; ++j) {
            const double u = (i + 0.5) * side.lu / nu, v = (j + 0.5) * side.lv / nv;
            const Vec3 pos = side.o + u * side.u + v * side.v;
            if (!facing(pos, side.n)) continue;
            int label = material_at(u, side.n.z() > 0 ? v : v + z0);
            if (p.decal && side.n.y() < 0 && u >= 0.01 && u <= 0.03 && v >= side.lv - 0.03 &&
                v <= side.lv - 0.01)
              label = decal_label;
            object_point(pos, label);
          }
      }
      s.trace_start = base + Vec3(-0.4 * W, -D / 2, 0.5 * H);
      s.trace_end = base + Vec3(0.4 * W, -D / 2, 0.5 * H);
      s.mesh = make_box(Vec3(W, D, H), base + Vec3(0, 0, H / 2));
      break;
    }
    case Shape::cylinder:
    case Shape::two_band_cylinder: {
      const double R = kCylR, H = kCylH;
      const int nphi = cells(2 * M_PI * R, h);
      const int nz = cells(H - kBottomGap, h);
      for (int i = 0; i < nphi; ++i) {
        const double phi = 2 * M_PI * (i + 0.5) / nphi;
        const Vec3 n(std::cos(phi), std::sin(phi), 0.0);
        for (int j = 0; j < nz; ++j) {
          const double z = kBottomGap + (j + 0.5) * (H - kBottomGap) / nz;
          const Vec3 pos = base + R * n + Vec3(0, 0, z);
          if (!facing(pos, n)) continue;
          int label = p.shape == Shape::cylinder ? 0 : (z < 0.5 * H ? 0 : 1);
          if (p.decal) {
            double d = std::remainder(phi - (cam_azimuth + 0.6), 2 * M_PI);
            if (std::abs(d) * R <= 0.01 && z >= 0.75 * H && z <= 0.75 * H + 0.02) label = decal_label;
          }
          object_point(pos, label);
        }
      }
      const int nd = cells(2 * R, h);
      for (int i = 0; i < nd; ++i)
        for (int j = 0; j < nd; ++j) {
          const Vec3 rel(-R + (i + 0.5) * 2 * R / nd, -R + (j + 0.5) * 2 * R / nd, H);
          if (rel.head<2>().norm() > R) continue;
          const Vec3 pos = base + rel;
          if (!facing(pos, Vec3::UnitZ())) continue;
          object_point(pos, p.shape == Shape::cylinder ? 0 : 1);
        }
      const Vec3 side = base + R * Vec3(std::cos(cam_azimuth), std::sin(cam_azimuth), 0.0);
      s.trace_start = side + Vec3(0, 0, kBottomGap + 0.01);
      s.trace_end = side + Vec3(0, 0, H - 0.01);
      s.mesh = make_cylinder(R, H, 64, 12, base);
      break;
    }
    case Shape::mug: {
      const MugProxyShape ms = scene_mug_shape();
      const Vec3 origin = base;
      const double top_r = ms.top_radius();
      const double band_z = ms.split_z();
      const double slant = std::sqrt(1.0 + ms.flare * ms.flare);
      const double z_lo = std::max(kBottomGap, ms.tip_height), z_hi = ms.top_z();
      const int nz = cells((z_hi - z_lo) * slant, h);
      for (int j = 0; j < nz; ++j) {
        const double z = z_lo + (j + 0.5) * (z_hi - z_lo) / nz;
        const double r = ms.wall_radius(z);
        const int nphi = cells(2 * M_PI * r, h);
        for (int i = 0; i < nphi; ++i) {
          const double phi = 2 * M_PI * (i + 0.5) / nphi;
          const Vec3 radial(std::cos(phi), std::sin(phi), 0.0);
          const Vec3 n = (radial - ms.flare * Vec3::UnitZ()).normalized();
          const Vec3 pos = origin + r * radial + Vec3(0, 0, z);
          if (!facing(pos, n)) continue;
          object_point(pos, z < band_z ? 0 : 1);
        }
      }
      const int nd = cells(2 * top_r, h);
      for (int i = 0; i < nd; ++i)
        for (int j = 0; j < nd; ++j) {
          const Vec3 rel(-top_r + (i + 0.5) * 2 * top_r / nd, -top_r + (j + 0.5) * 2 * top_r / nd, z_hi);
          if (rel.head<2>().norm() > top_r) continue;
          const Vec3 pos = origin + rel;
          if (!facing(pos, Vec3::UnitZ())) continue;
          object_point(pos, 1);
        }
      const Vec3 dir(std::cos(cam_azimuth), std::sin(cam_azimuth), 0.0);
      const double z0 = z_lo + 0.003, z1 = z_hi - 0.003;
      s.trace_start = origin + ms.wall_radius(z0) * dir + Vec3(0, 0, z0);
      s.trace_end = origin + ms.wall_radius(z1) * dir + Vec3(0, 0, z1);
      MugProxy mug = make_mug_proxy(ms);
      s.mesh = translated(mug.mesh, origin);
      s.mesh_label = mug.band;
      break;
    }
  }
  if (s.mesh_label.empty()) {
    s.mesh_label.assign(s.mesh.faces.size(), 0);
    if (p.shape == Shape::two_band_cylinder)
      for (std::size_t f = 0; f < s.mesh.faces.size(); ++f)
        s.mesh_label[f] = s.mesh.face_centroid(f).z() - kTableZ >= 0.5 * kCylH ? 1 : 0;
  }
  std::vector<double> face_cof(s.mesh.faces.size());
  for (std::size_t f = 0; f < face_cof.size(); ++f)
    face_cof[f] = p.materials[static_cast<std::size_t>(std::min<int>(s.mesh_label[f], static_cast<int>(p.materials.size()) - 1))].cof;
  s.mesh.face_friction = std::move(face_cof);

  // Far wall, beyond the default crop distance.
  {
    const Vec3 wall_color(0.8, 0.8, 0.8);
    const double wx = 1.2, wz = 0.75, step = 0.02;
    const int nx = cells(wx, step), nz = cells(wz, step);
    for (int i = 0; i < nx; ++i)
      for (int j = 0; j < nz; ++j)
        push(Vec3(-0.5 * wx + (i + 0.5) * wx / nx, kWallY, kTableZ + (j + 0.5) * wz / nz), wall_color,
             kSceneSurfaceCof, kWallLabel, p.table_noise);
  }
  return s;
}

/// Object-only point indices (labels >= 0).
inline std::vector<std::size_t> object_indices(const SyntheticScene& s) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < s.label.size(); ++i)
    if (s.label[i] >= 0) out.push_back(i);
  return out;
}

inline void write_truth_csv(std::ostream& os, const SyntheticScene& s) {
  os << "index,cof,label\n";
  for (std::size_t i = 0; i < s.cof.size(); ++i) os << i << ',' << ply::format_float(s.cof[i]) << ',' << s.label[i] << '\n';
}

struct GroundTruth {
  std::vector<double> cof;
  std::vector<int> label;
};

inline GroundTruth read_truth_csv(std::istream& in, const std::string& source = "") {
  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(in, line)) throw ParseError("empty truth file", 1, source);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "index,cof,label") throw ParseError("expected header 'index,cof,label'", 1, source);
  GroundTruth g;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string a, b, c;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, c))
      throw ParseError("expected 3 columns", lineno, source);
    try {
      std::size_t pos = 0;
      const long idx = std::stol(a, &pos);
      if (pos != a.size() || idx != static_cast<long>(g.cof.size())) throw std::invalid_argument("index");
      const double cof = std::stod(b, &pos);
      if (pos != b.size() || !std::isfinite(cof)) throw std::invalid_argument("cof");
      const int label = std::stoi(c, &pos);
      if (pos != c.size()) throw std::invalid_argument("label");
      g.cof.push_back(cof);
      g.label.push_back(label);
    } catch (const std::exception&) {
      throw ParseError("malformed truth row", lineno, source);
    }
  }
  return g;
}

inline GroundTruth load_truth_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  return read_truth_csv(in, path);
}

}  // namespace vhf
