#pragma once

// Independent oracles and fixtures shared by the unit tests and the
// acceptance runner. Nothing here calls the routine it is used to check.

#include "vhfriction/vhfriction.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

namespace vhf::testing {

// ---------------------------------------------------------------------------
// Files

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("vhf_" + tag + "_" + std::to_string(rd()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const { return (path_ / name).string(); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream os(path);
  os << text;
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// ---------------------------------------------------------------------------
// Random fixtures

inline double uniform(Rng& rng, double lo = 0.0, double hi = 1.0) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline double normal(Rng& rng) { return std::normal_distribution<double>(0.0, 1.0)(rng); }

inline Vec3 random_vec3(Rng& rng, double lo, double hi) {
  return Vec3(uniform(rng, lo, hi), uniform(rng, lo, hi), uniform(rng, lo, hi));
}

inline Vec3 random_unit(Rng& rng) {
  Vec3 v(normal(rng), normal(rng), normal(rng));
  while (v.norm() < 1e-6) v = Vec3(normal(rng), normal(rng), normal(rng));
  return v.normalized();
}

inline Mat3 random_rotation(Rng& rng) {
  Eigen::Quaterniond q(normal(rng), normal(rng), normal(rng), normal(rng));
  return q.normalized().toRotationMatrix();
}

/// Colours lie on the 8-bit grid so PLY round trips are exact.
inline PointCloud random_cloud(Rng& rng, std::size_t n, double extent = 1.0) {
  PointCloud c;
  std::uniform_int_distribution<int> byte(0, 255);
  for (std::size_t i = 0; i < n; ++i) {
    ColoredPoint p;
    p.position = random_vec3(rng, -extent, extent);
    p.color = Vec3(byte(rng), byte(rng), byte(rng)) / 255.0;
    c.points.push_back(p);
  }
  return c;
}

// Random cloud drawn from a few blobs of different density and colour.
inline PointCloud blob_cloud(Rng& rng, std::size_t n) {
  PointCloud c;
  const int blobs = std::uniform_int_distribution<int>(1, 4)(rng);
  std::vector<Vec3> centers, colors;
  std::vector<double> spread;
  for (int b = 0; b < blobs; ++b) {
    centers.push_back(random_vec3(rng, -0.2, 0.2));
    colors.push_back(random_vec3(rng, 0, 1));
    spread.push_back(uniform(rng, 0.005, 0.08));
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto b = static_cast<std::size_t>(i % static_cast<std::size_t>(blobs));
    const Vec3 pos = centers[b] + spread[b] * Vec3(normal(rng), normal(rng), normal(rng));
    const Vec3 col = (colors[b] + 0.05 * Vec3(normal(rng), normal(rng), normal(rng))).cwiseMax(0.0).cwiseMin(1.0);
    c.points.push_back({pos, col});
  }
  return c;
}

inline Mat4 random_spd4(Rng& rng, double scale, double ridge) {
  Mat4 a;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) a(i, j) = scale * normal(rng);
  Mat4 s = a * a.transpose() + ridge * Mat4::Identity();
  return 0.5 * (s + s.transpose());
}

/// C components, the last one flagged background, n_materials = C - 1.
inline VhGmm random_model(Rng& rng, int C) {
  VhGmm m;
  m.n_materials = C - 1;
  double total = 0.0;
  for (int c = 0; c < C; ++c) {
    GaussianComponent g;
    g.prior = uniform(rng, 0.2, 1.0);
    total += g.prior;
    g.mean << random_vec3(rng, 0.1, 0.9), uniform(rng, 0.1, 1.0);
    g.covariance = random_spd4(rng, 0.12, 2e-3);
    g.is_background = c == C - 1;
    m.components.push_back(g);
  }
  for (auto& g : m.components) g.prior /= total;
  return m;
}

inline PointCloud uniform_color_cloud(Rng& rng, std::size_t n) {
  PointCloud c;
  for (std::size_t i = 0; i < n; ++i) c.points.push_back({random_vec3(rng, -1, 1), random_vec3(rng, 0, 1)});
  return c;
}

struct Blob {
  Vec3 color;
  double h;
};

// Full samples around each material: colour sd 0.02, H sd 0.02.
inline VisuoHapticDataset material_dataset(Rng& rng, const std::vector<Blob>& mats, int per_material) {
  VisuoHapticDataset ds;
  for (std::size_t m = 0; m < mats.size(); ++m)
    for (int i = 0; i < per_material; ++i) {
      const Vec3 v = mats[m].color + 0.02 * Vec3(normal(rng), normal(rng), normal(rng));
      ds.samples.push_back({v, mats[m].h + 0.02 * normal(rng), static_cast<int>(m)});
    }
  ds.region_explored.assign(mats.size(), true);
  return ds;
}

inline GaussianComponent broad_background(Rng& rng) {
  return make_background(uniform_color_cloud(rng, 2000));
}

// ---------------------------------------------------------------------------
// Gaussian density oracles

/// Plain density, explicit inverse and determinant.
template <int N>
double gaussian_pdf(const Eigen::Matrix<double, N, 1>& x, const Eigen::Matrix<double, N, 1>& mu,
                    const Eigen::Matrix<double, N, N>& cov) {
  const Eigen::Matrix<double, N, 1> d = x - mu;
  const double q = d.dot(cov.inverse() * d);
  return std::exp(-0.5 * q) / std::sqrt(std::pow(2.0 * M_PI, N) * cov.determinant());
}

inline std::vector<double> direct_responsibilities(const VhGmm& m, const Vec3& v) {
  std::vector<double> w;
  double total = 0.0;
  for (const auto& g : m.components) {
    const Mat3 cv = g.covariance.topLeftCorner<3, 3>();
    const Vec3 mv = g.mean.head<3>();
    w.push_back(g.prior * gaussian_pdf<3>(v, mv, cv));
    total += w.back();
  }
  for (auto& x : w) x /= total;
  return w;
}

/// Conditional moments of a single joint Gaussian through its precision matrix.
inline GmrEstimate precision_conditional(const GaussianComponent& g, const Vec3& v) {
  const Mat4 lambda = g.covariance.inverse();
  const double lhh = lambda(3, 3);
  const Eigen::RowVector3d lhv = lambda.block<1, 3>(3, 0);
  return {g.mean(3) - lhv.dot(v - g.mean.head<3>()) / lhh, 1.0 / lhh};
}

struct McMoments {
  double mean = 0.0, mean_se = 0.0;
  double variance = 0.0, variance_se = 0.0;
};

/// Self-normalised importance sampling of p(H | v) using only the joint
/// mixture density. Proposal: a broad normal covering every component.
inline McMoments mc_conditional(const VhGmm& m, const Vec3& v, std::size_t samples, std::uint64_t seed) {
  double lo = 1e300, hi = -1e300, sd = 0.0;
  for (const auto& g : m.components) {
    lo = std::min(lo, g.mean(3));
    hi = std::max(hi, g.mean(3));
    sd = std::max(sd, std::sqrt(g.covariance(3, 3)));
  }
  // conditional means can sit a few marginal sd away from mu_H
  const double q_mean = 0.5 * (lo + hi);
  const double q_sd = 0.5 * (hi - lo) + 4.0 * sd;

  std::vector<Mat4> inv;
  std::vector<double> norm;
  for (const auto& g : m.components) {
    inv.push_back(g.covariance.inverse());
    norm.push_back(g.prior / std::sqrt(std::pow(2.0 * M_PI, 4) * g.covariance.determinant()));
  }
  auto joint = [&](double h) {
    Vec4 x;
    x << v, h;
    double p = 0.0;
    for (std::size_t c = 0; c < m.components.size(); ++c) {
      const Vec4 d = x - m.components[c].mean;
      p += norm[c] * std::exp(-0.5 * d.dot(inv[c] * d));
    }
    return p;
  };

  Rng rng(seed);
  std::normal_distribution<double> proposal(q_mean, q_sd);
  std::vector<double> hs(samples), ws(samples);
  double sw = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double h = proposal(rng);
    const double z = (h - q_mean) / q_sd;
    const double q = std::exp(-0.5 * z * z) / (q_sd * std::sqrt(2.0 * M_PI));
    hs[i] = h;
    ws[i] = joint(h) / q;
    sw += ws[i];
  }
  McMoments out;
  for (std::size_t i = 0; i < samples; ++i) out.mean += ws[i] * hs[i];
  out.mean /= sw;
  for (std::size_t i = 0; i < samples; ++i) {
    const double d = hs[i] - out.mean;
    out.variance += ws[i] * d * d;
  }
  out.variance /= sw;
  double a = 0.0, b = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double d = hs[i] - out.mean;
    const double wn = ws[i] / sw;
    a += wn * wn * d * d;
    b += wn * wn * (d * d - out.variance) * (d * d - out.variance);
  }
  out.mean_se = std::sqrt(a);
  out.variance_se = std::sqrt(b);
  return out;
}

// ---------------------------------------------------------------------------
// Exact 6D hull distance by facet enumeration

struct BruteHull {
  double distance = 0.0;
  std::size_t facets = 0;
};

/// Every 6-subset spanning a hyperplane that leaves all points on one side
/// is a facet; the origin's distance is the smallest facet offset.
inline BruteHull brute_force_hull_distance(const std::vector<Vec6>& w, double eps = 1e-10) {
  BruteHull out;
  const int n = static_cast<int>(w.size());
  if (n < 7) return out;
  double scale = 0.0;
  for (const auto& p : w) scale = std::max(scale, p.norm());
  const double tol = eps * std::max(1.0, scale);

  bool origin_inside = true;
  double best = 1e300;
  std::array<int, 6> idx{};
  std::vector<int> sel(static_cast<std::size_t>(n), 0);
  std::fill(sel.begin(), sel.begin() + 6, 1);
  std::sort(sel.begin(), sel.end(), std::greater<int>());

  Eigen::Matrix<double, 5, 6> a;
  do {
    int k = 0;
    for (int i = 0; i < n; ++i)
      if (sel[static_cast<std::size_t>(i)]) idx[static_cast<std::size_t>(k++)] = i;
    for (int r = 0; r < 5; ++r) a.row(r) = (w[static_cast<std::size_t>(idx[static_cast<std::size_t>(r + 1)])] - w[static_cast<std::size_t>(idx[0])]).transpose();
    Eigen::FullPivLU<Eigen::Matrix<double, 5, 6>> lu(a);
    lu.setThreshold(1e-12);
    if (lu.rank() != 5) continue;
    Vec6 nrm = lu.kernel().col(0);
    nrm.normalize();
    const double off = nrm.dot(w[static_cast<std::size_t>(idx[0])]);
    int above = 0, below = 0;
    for (const auto& p : w) {
      const double s = nrm.dot(p) - off;
      above += s > tol;
      below += s < -tol;
    }
    if (above > 0 && below > 0) continue;
    if (above == 0 && below == 0) return out;  // everything on one hyperplane
    const double d = above == 0 ? off : -off;  // signed offset with points on the inner side
    ++out.facets;
    if (d <= tol) origin_inside = false;
    best = std::min(best, d);
  } while (std::prev_permutation(sel.begin(), sel.end()));

  out.distance = origin_inside && out.facets > 0 ? best : 0.0;
  return out;
}

// ---------------------------------------------------------------------------
// Triangle / box overlap by polygon clipping

/// Clips the triangle against the six slabs of the box; overlap iff anything survives.
inline bool clip_overlap(const Vec3& a, const Vec3& b, const Vec3& c, const OrientedBox& box) {
  std::vector<Vec3> poly = {box.axes.transpose() * (a - box.center), box.axes.transpose() * (b - box.center),
                            box.axes.transpose() * (c - box.center)};
  for (int axis = 0; axis < 3; ++axis) {
    for (double sign : {1.0, -1.0}) {
      // keep sign * x[axis] <= half[axis]
      std::vector<Vec3> next;
      const double h = box.half[axis];
      for (std::size_t i = 0; i < poly.size(); ++i) {
        const Vec3& p = poly[i];
        const Vec3& q = poly[(i + 1) % poly.size()];
        const double fp = sign * p[axis] - h, fq = sign * q[axis] - h;
        if (fp <= 0) next.push_back(p);
        if ((fp < 0 && fq > 0) || (fp > 0 && fq < 0)) next.push_back(p + (q - p) * (fp / (fp - fq)));
      }
      poly.swap(next);
      if (poly.empty()) return false;
    }
  }
  return true;
}

inline double segment_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 ab = b - a;
  const double t = std::clamp((p - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
  return (a + t * ab - p).norm();
}

/// Point-triangle distance via the plane projection and the three edges.
inline double point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 n = (b - a).cross(c - a).normalized();
  const Vec3 q = p - n * n.dot(p - a);
  const bool inside = n.dot((b - a).cross(q - a)) >= 0 && n.dot((c - b).cross(q - b)) >= 0 &&
                      n.dot((a - c).cross(q - c)) >= 0;
  if (inside) return std::abs(n.dot(p - a));
  return std::min({segment_distance(p, a, b), segment_distance(p, b, c), segment_distance(p, c, a)});
}

/// All faces against all gripper boxes, no prefilter.
inline bool brute_force_collision_free(const GraspCandidate& g, const TriangleMesh& mesh,
                                       const GripperGeometry& grip) {
  if ((g.contact_b.point - g.contact_a.point).norm() > grip.max_opening) return false;
  const auto boxes = gripper_boxes(g, grip);
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const Vec3 a = mesh.vertices[mesh.faces[f][0]], b = mesh.vertices[mesh.faces[f][1]],
               c = mesh.vertices[mesh.faces[f][2]];
    if (point_triangle_distance(g.contact_a.point, a, b, c) <= kCollisionTolerance ||
        point_triangle_distance(g.contact_b.point, a, b, c) <= kCollisionTolerance)
      continue;
    for (auto box : boxes) {
      box.half = (box.half.array() - kCollisionTolerance).matrix();
      if (clip_overlap(a, b, c, box)) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Synthetic pipeline runs

struct SceneRun {
  PipelineResult result;
  GroundTruth truth;  // scene-indexed
};

/// Synthesises a scene into dir and runs the pipeline on it.
inline SceneRun run_scene(const SceneParams& sp, const std::string& dir, double trace_noise,
                          std::uint64_t pipeline_seed) {
  run_synth(sp, dir);
  PipelineConfig cfg = load_pipeline_config((std::filesystem::path(dir) / "pipeline.json").string());
  cfg.synthetic_trace->slide.noise_std = trace_noise;
  cfg.seed = pipeline_seed;
  cfg.output_dir = (std::filesystem::path(dir) / ("run_" + std::to_string(pipeline_seed))).string();
  SceneRun r;
  r.result = run_pipeline(cfg);
  r.truth = load_truth_csv((std::filesystem::path(dir) / "truth.csv").string());
  return r;
}

/// Majority ground-truth label of each region.
inline std::vector<int> region_majority_labels(const SceneRun& run) {
  std::vector<int> out;
  for (const auto& region : run.result.partition.regions) {
    std::map<int, int> votes;
    for (auto i : region.member_indices) ++votes[run.truth.label[run.result.object_to_scene[i]]];
    out.push_back(std::max_element(votes.begin(), votes.end(), [](auto& a, auto& b) {
                    return a.second < b.second;
                  })->first);
  }
  return out;
}

}  // namespace vhf::testing
