#pragma once

#include "vhfriction/core.hpp"
#include "vhfriction/ply.hpp"

#include <array>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace vhf {

using Face = std::array<std::size_t, 3>;

struct TriangleMesh {
  std::vector<Vec3> vertices;  // meters
  std::vector<Face> faces;     // counter-clockwise seen from outside
  std::optional<std::vector<double>> face_friction;

  std::size_t face_count() const { return faces.size(); }

  Vec3 corner(std::size_t f, int k) const { return vertices[faces[f][static_cast<std::size_t>(k)]]; }

  Vec3 face_cross(std::size_t f) const {
    return (corner(f, 1) - corner(f, 0)).cross(corner(f, 2) - corner(f, 0));
  }
  double face_area(std::size_t f) const { return 0.5 * face_cross(f).norm(); }
  Vec3 face_normal(std::size_t f) const { return face_cross(f).normalized(); }  // outward
  Vec3 face_centroid(std::size_t f) const {
    return (corner(f, 0) + corner(f, 1) + corner(f, 2)) / 3.0;
  }

  double friction(std::size_t f) const {
    require(face_friction.has_value(), "mesh has no face friction");
    return (*face_friction)[f];
  }

  /// Area-weighted surface centroid.
  Vec3 centroid() const {
    Vec3 c = Vec3::Zero();
    double total = 0.0;
    for (std::size_t f = 0; f < faces.size(); ++f) {
      const double a = face_area(f);
      c += a * face_centroid(f);
      total += a;
    }
    return total > 0.0 ? Vec3(c / total) : c;
  }

  double max_radius(const Vec3& about) const {
    double r = 0.0;
    for (const auto& v : vertices) r = std::max(r, (v - about).norm());
    return r;
  }

  /// Signed enclosed volume; positive for a closed, outward-oriented mesh.
  double signed_volume() const {
    double v = 0.0;
    for (std::size_t f = 0; f < faces.size(); ++f)
      v += corner(f, 0).dot(corner(f, 1).cross(corner(f, 2))) / 6.0;
    return v;
  }

  void validate() const {
    for (std::size_t f = 0; f < faces.size(); ++f) {
      for (auto i : faces[f])
        require(i < vertices.size(), "face " + std::to_string(f) + " references a missing vertex");
      require(face_area(f) > 1e-12, "face " + std::to_string(f) + " is degenerate");
    }
    if (face_friction)
      require(face_friction->size() == faces.size(), "face friction length must match faces");
  }
};

// ---------------------------------------------------------------------------
// Ray casting

struct RayHit {
  std::size_t face = 0;
  double t = 0.0;
  Vec3 point = Vec3::Zero();
};

/// Moller-Trumbore against one triangle; returns t for hits in front.
inline std::optional<double> intersect_triangle(const Vec3& origin, const Vec3& dir, const Vec3& a,
                                                const Vec3& b, const Vec3& c) {
  const Vec3 e1 = b - a, e2 = c - a;
  const Vec3 p = dir.cross(e2);
  const double det = e1.dot(p);
  if (std::abs(det) < 1e-18) return std::nullopt;
  const double inv = 1.0 / det;
  const Vec3 s = origin - a;
  const double u = s.dot(p) * inv;
  if (u < 0.0 || u > 1.0) return std::nullopt;
  const Vec3 q = s.cross(e1);
  const double v = dir.dot(q) * inv;
  if (v < 0.0 || u + v > 1.0) return std::nullopt;
  return e2.dot(q) * inv;
}

/// Closest intersection with t > t_min (ties -> lowest face index).
inline std::optional<RayHit> cast_ray(const TriangleMesh& mesh, const Vec3& origin, const Vec3& dir,
                                      double t_min = 1e-6) {
  std::optional<RayHit> best;
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    auto t = intersect_triangle(origin, dir, mesh.corner(f, 0), mesh.corner(f, 1), mesh.corner(f, 2));
    if (!t || *t <= t_min) continue;
    if (!best || *t < best->t) best = RayHit{f, *t, origin + *t * dir};
  }
  return best;
}

/// Closest point on triangle abc to p.
inline Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0 && d2 <= 0) return a;
  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0 && d4 <= d3) return b;
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0 && d1 >= 0 && d3 <= 0) return a + d1 / (d1 - d3) * ab;
  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0 && d5 <= d6) return c;
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0 && d2 >= 0 && d6 <= 0) return a + d2 / (d2 - d6) * ac;
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0)
    return b + (d4 - d3) / ((d4 - d3) + (d5 - d6)) * (c - b);
  const double denom = 1.0 / (va + vb + vc);
  return a + ab * (vb * denom) + ac * (vc * denom);
}

// ---------------------------------------------------------------------------
// File I/O: ASCII OFF and ASCII PLY with a face element

inline TriangleMesh read_off(std::istream& in, const std::string& source = "") {
  std::vector<std::string> tokens;
  std::vector<std::size_t> token_line;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) {
      tokens.push_back(tok);
      token_line.push_back(lineno);
    }
  }
  std::size_t pos = 0;
  auto at_line = [&]() { return pos < token_line.size() ? token_line[pos] : lineno + 1; };
  auto next_number = [&](const char* what) {
    if (pos >= tokens.size()) throw ParseError(std::string("unexpected end of file reading ") + what, at_line(), source);
    const std::size_t ln = at_line();
    const std::string& t = tokens[pos++];
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size() || !std::isfinite(v))
      throw ParseError("invalid number '" + t + "' in " + what, ln, source);
    return v;
  };
  if (tokens.empty() || tokens[0] != "OFF") throw ParseError("missing 'OFF' header", 1, source);
  pos = 1;
  const double nv = next_number("header"), nf = next_number("header");
  next_number("header");  // edge count, unused
  if (nv < 0 || nf < 0 || nv != std::floor(nv) || nf != std::floor(nf))
    throw ParseError("bad element counts", token_line[pos - 1], source);

  TriangleMesh mesh;
  mesh.vertices.reserve(static_cast<std::size_t>(nv));
  for (std::size_t i = 0; i < static_cast<std::size_t>(nv); ++i) {
    const double x = next_number("vertex"), y = next_number("vertex"), z = next_number("vertex");
    mesh.vertices.emplace_back(x, y, z);
  }
  for (std::size_t f = 0; f < static_cast<std::size_t>(nf); ++f) {
    const std::size_t ln = at_line();
    const double k = next_number("face");
    if (k < 3 || k != std::floor(k)) throw ParseError("face needs at least 3 vertices", ln, source);
    std::vector<std::size_t> idx;
    for (int j = 0; j < static_cast<int>(k); ++j) {
      const double v = next_number("face");
      if (v < 0 || v != std::floor(v) || v >= nv)
        throw ParseError("face vertex index out of range", ln, source);
      idx.push_back(static_cast<std::size_t>(v));
    }
    for (std::size_t j = 1; j + 1 < idx.size(); ++j) mesh.faces.push_back({idx[0], idx[j], idx[j + 1]});
  }
  return mesh;
}

inline TriangleMesh mesh_from_ply(const ply::Document& doc, const std::string& source = "") {
  const ply::Element* vertex = doc.find("vertex");
  const ply::Element* face = doc.find("face");
  if (!vertex || !face) throw ParseError("PLY mesh needs 'vertex' and 'face' elements", 1, source);
  auto xi = vertex->find("x"), yi = vertex->find("y"), zi = vertex->find("z");
  if (!xi || !yi || !zi) throw ParseError("vertex element lacks x/y/z", 1, source);
  auto li = face->find("vertex_indices");
  if (!li) li = face->find("vertex_index");
  if (!li || !face->properties[*li].is_list)
    throw ParseError("face element lacks a vertex_indices list", 1, source);
  std::size_t list_slot = 0;
  for (std::size_t p = 0; p < *li; ++p) list_slot += face->properties[p].is_list;

  TriangleMesh mesh;
  for (const auto& row : vertex->rows) mesh.vertices.emplace_back(row[*xi], row[*yi], row[*zi]);
  for (std::size_t f = 0; f < face->lists.size(); ++f) {
    const auto& idx = face->lists[f][list_slot];
    if (idx.size() < 3) throw ParseError("face " + std::to_string(f) + " has < 3 vertices", 1, source);
    for (double v : idx)
      if (v < 0 || v >= static_cast<double>(mesh.vertices.size()))
        throw ParseError("face " + std::to_string(f) + " index out of range", 1, source);
    for (std::size_t j = 1; j + 1 < idx.size(); ++j)
      mesh.faces.push_back({static_cast<std::size_t>(idx[0]), static_cast<std::size_t>(idx[j]),
                            static_cast<std::size_t>(idx[j + 1])});
  }
  return mesh;
}

/// Loads .off or .ply by extension.
inline TriangleMesh load_mesh(const std::string& path) {
  const bool is_ply = path.size() >= 4 && path.compare(path.size() - 4, 4, ".ply") == 0;
  TriangleMesh mesh;
  if (is_ply) {
    mesh = mesh_from_ply(ply::read_file(path), path);
  } else {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    mesh = read_off(in, path);
  }
  try {
    mesh.validate();
  } catch (const InvalidArgument& e) {
    throw ParseError(e.what(), 1, path);
  }
  return mesh;
}

inline void write_off(std::ostream& os, const TriangleMesh& mesh) {
  os << "OFF\n" << mesh.vertices.size() << ' ' << mesh.faces.size() << " 0\n";
  char buf[96];
  for (const auto& v : mesh.vertices) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", v.x(), v.y(), v.z());
    os << buf;
  }
  for (const auto& f : mesh.faces) os << "3 " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
}

inline void save_off(const TriangleMesh& mesh, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write '" + path + "'");
  write_off(os, mesh);
  if (!os) throw IoError("write failed for '" + path + "'");
}

// ---------------------------------------------------------------------------
// Primitive meshes

inline TriangleMesh make_box(const Vec3& size, const Vec3& center = Vec3::Zero()) {
  require((size.array() > 0).all(), "box size must be positive");
  TriangleMesh m;
  const Vec3 h = 0.5 * size;
  for (int i = 0; i < 8; ++i)
    m.vertices.push_back(center + Vec3((i & 1) ? h.x() : -h.x(), (i & 2) ? h.y() : -h.y(),
                                       (i & 4) ? h.z() : -h.z()));
  // two triangles per side, outward winding
  const int quads[6][4] = {{0, 2, 3, 1}, {4, 5, 7, 6}, {0, 1, 5, 4},
                           {2, 6, 7, 3}, {0, 4, 6, 2}, {1, 3, 7, 5}};
  for (const auto& q : quads) {
    m.faces.push_back({std::size_t(q[0]), std::size_t(q[1]), std::size_t(q[2])});
    m.faces.push_back({std::size_t(q[0]), std::size_t(q[2]), std::size_t(q[3])});
  }
  return m;
}

/// Closed surface of revolution about +z. The profile is a list of (r, z)
/// running from the bottom pole (r = 0) to the top pole (r = 0).
inline TriangleMesh make_revolution(const std::vector<std::pair<double, double>>& profile,
                                    int slices, const Vec3& center = Vec3::Zero()) {
  require(profile.size() >= 3, "profile needs at least 3 points");
  require(slices >= 3, "need at least 3 slices");
  require(profile.front().first == 0.0 && profile.back().first == 0.0,
          "profile must start and end on the axis");
  TriangleMesh m;
  const std::size_t rings = profile.size() - 2;
  const auto S = static_cast<std::size_t>(slices);
  m.vertices.push_back(center + Vec3(0, 0, profile.front().second));
  for (std::size_t r = 1; r <= rings; ++r) {
    for (std::size_t s = 0; s < S; ++s) {
      const double phi = 2.0 * M_PI * static_cast<double>(s) / static_cast<double>(S);
      const auto [rad, z] = profile[r];
      m.vertices.push_back(center + Vec3(rad * std::cos(phi), rad * std::sin(phi), z));
    }
  }
  m.vertices.push_back(center + Vec3(0, 0, profile.back().second));
  const std::size_t top = m.vertices.size() - 1;
  auto ring = [&](std::size_t r, std::size_t s) { return 1 + (r - 1) * S + (s % S); };
  for (std::size_t s = 0; s < S; ++s) m.faces.push_back({0, ring(1, s + 1), ring(1, s)});
  for (std::size_t r = 1; r < rings; ++r)
    for (std::size_t s = 0; s < S; ++s) {
      m.faces.push_back({ring(r, s), ring(r, s + 1), ring(r + 1, s + 1)});
      m.faces.push_back({ring(r, s), ring(r + 1, s + 1), ring(r + 1, s)});
    }
  for (std::size_t s = 0; s < S; ++s) m.faces.push_back({top, ring(rings, s), ring(rings, s + 1)});
  if (m.signed_volume() < 0)
    for (auto& f : m.faces) std::swap(f[1], f[2]);
  return m;
}

inline TriangleMesh make_sphere(double radius, int stacks = 24, int slices = 48,
                                const Vec3& center = Vec3::Zero()) {
  require(radius > 0 && stacks >= 2, "sphere needs radius > 0 and stacks >= 2");
  std::vector<std::pair<double, double>> profile;
  for (int i = 0; i <= stacks; ++i) {
    const double th = M_PI * static_cast<double>(i) / stacks;  // from the south pole
    profile.emplace_back(i == 0 || i == stacks ? 0.0 : radius * std::sin(th), -radius * std::cos(th));
  }
  return make_revolution(profile, slices, center);
}

inline TriangleMesh make_cylinder(double radius, double height, int slices = 48, int rings = 8,
                                  const Vec3& center = Vec3::Zero()) {
  require(radius > 0 && height > 0 && rings >= 1, "cylinder needs radius, height > 0");
  std::vector<std::pair<double, double>> profile{{0.0, 0.0}};
  for (int i = 0; i <= rings; ++i) profile.emplace_back(radius, height * i / rings);
  profile.emplace_back(0.0, height);
  return make_revolution(profile, slices, center);
}

/// Flared two-band body: a short steep cone at the bottom, a frustum wall and a flat top.
/// Faces are tagged band 0 (bottom cone and lower half of the wall) or band 1 (the rest).
struct MugProxy {
  TriangleMesh mesh;
  std::vector<int> band;  // per face
  double split_height = 0.0;
};

struct MugProxyShape {
  double bottom_radius = 0.005;  // wall radius where it meets the bottom cone
  double tip_height = 0.0075;    // bottom cone height
  double height = 0.06;          // wall height
  double flare = 0.50952544949442879;  // tan(27 deg): wall tilt from vertical
  int rings = 12;
  int cap_rings = 4;
  int slices = 64;

  double top_z() const { return tip_height + height; }
  double top_radius() const { return bottom_radius + height * flare; }
  double wall_radius(double z) const { return bottom_radius + (z - tip_height) * flare; }
  double split_z() const { return tip_height + 0.5 * height; }
};

inline MugProxy make_mug_proxy(const MugProxyShape& shape = {}) {
  require(shape.bottom_radius > 0 && shape.tip_height > 0 && shape.height > 0 && shape.flare >= 0 &&
              shape.rings >= 2 && shape.cap_rings >= 1,
          "invalid mug shape");
  const double top = shape.top_radius();
  std::vector<std::pair<double, double>> profile{{0.0, 0.0}};
  for (int i = 1; i < shape.cap_rings; ++i) {
    const double t = double(i) / shape.cap_rings;
    profile.emplace_back(shape.bottom_radius * t, shape.tip_height * t);
  }
  for (int i = 0; i <= shape.rings; ++i) {
    const double z = shape.tip_height + shape.height * i / shape.rings;
    profile.emplace_back(shape.wall_radius(z), z);
  }
  for (int i = shape.cap_rings - 1; i >= 1; --i) profile.emplace_back(top * i / shape.cap_rings, shape.top_z());
  profile.emplace_back(0.0, shape.top_z());

  MugProxy out;
  out.split_height = shape.split_z();
  out.mesh = make_revolution(profile, shape.slices);
  out.band.resize(out.mesh.faces.size());
  for (std::size_t f = 0; f < out.mesh.faces.size(); ++f)
    out.band[f] = out.mesh.face_centroid(f).z() >= out.split_height ? 1 : 0;
  return out;
}

/// Open cup with wall thickness: outer wall, rim, inner wall and inner floor.
inline TriangleMesh make_cup(double outer_radius, double height, double wall, int slices = 48) {
  require(outer_radius > wall && wall > 0 && height > wall, "invalid cup dimensions");
  const double ri = outer_radius - wall;
  std::vector<std::pair<double, double>> profile{{0.0, 0.0},        {outer_radius, 0.0},
                                                 {outer_radius, height}, {ri, height},
                                                 {ri, wall},        {0.0, wall}};
  // the profile re-enters from the inside, so winding follows the outer wall
  TriangleMesh m = make_revolution(profile, slices);
  return m;
}

inline TriangleMesh make_plate(double width, double depth, double thickness,
                               const Vec3& center = Vec3::Zero()) {
  return make_box(Vec3(width, depth, thickness), center);
}

}  // namespace vhf
