#pragma once

// Supervoxel-style over-segmentation: grid-seeded clustering in a joint
// colour / normalised-space metric, followed by a connectivity split so that
// every region is spatially connected.

#include "vhfriction/core.hpp"
#include "vhfriction/kdtree.hpp"
#include "vhfriction/pointcloud.hpp"

#include <array>
#include <map>
#include <string>
#include <vector>

namespace vhf {

struct Region {
  int id = 0;
  std::vector<std::size_t> member_indices;  // ascending
  Vec3 centroid = Vec3::Zero();
  Vec3 mean_color = Vec3::Zero();
};

struct Partition {
  std::vector<Region> regions;
  std::size_t source_point_count = 0;

  // region id per point; -1 where unassigned
  std::vector<int> labels() const {
    std::vector<int> out(source_point_count, -1);
    for (const auto& r : regions)
      for (auto i : r.member_indices)
        if (i < out.size()) out[i] = r.id;
    return out;
  }
};

struct PartitionError : InvalidArgument {
  enum class Kind { uncovered, duplicated, out_of_range, bad_region };
  PartitionError(Kind kind, std::size_t index, const std::string& msg)
      : InvalidArgument(msg), kind_(kind), index_(index) {}
  Kind kind() const noexcept { return kind_; }
  std::size_t index() const noexcept { return index_; }

 private:
  Kind kind_;
  std::size_t index_;
};

/// Throws PartitionError unless every point index in [0, source_point_count)
/// belongs to exactly one region and region ids run 0..N-1.
inline void validate_partition(const Partition& partition) {
  std::vector<int> owner(partition.source_point_count, -1);
  for (std::size_t r = 0; r < partition.regions.size(); ++r) {
    const Region& region = partition.regions[r];
    if (region.id != static_cast<int>(r))
      throw PartitionError(PartitionError::Kind::bad_region, r,
                           "region ids must be contiguous from 0; position " +
                               std::to_string(r) + " has id " + std::to_string(region.id));
    if (region.member_indices.empty())
      throw PartitionError(PartitionError::Kind::bad_region, r,
                           "region " + std::to_string(r) + " is empty");
    for (auto i : region.member_indices) {
      if (i >= owner.size())
        throw PartitionError(PartitionError::Kind::out_of_range, i,
                             "point index " + std::to_string(i) + " out of range");
      if (owner[i] >= 0)
        throw PartitionError(PartitionError::Kind::duplicated, i,
                             "point " + std::to_string(i) + " is in regions " +
                                 std::to_string(owner[i]) + " and " + std::to_string(r));
      owner[i] = static_cast<int>(r);
    }
  }
  for (std::size_t i = 0; i < owner.size(); ++i) {
    if (owner[i] < 0)
      throw PartitionError(PartitionError::Kind::uncovered, i,
                           "point " + std::to_string(i) + " is not covered by any region");
  }
}

struct SegmentationParams {
  double seed_resolution = 0.015;  // meters
  double color_weight = 1.0;
  double spatial_weight = 1.0;
  int refinement_rounds = 5;
};

namespace detail {

inline Region make_region(int id, std::vector<std::size_t> members, const PointCloud& cloud) {
  Region r;
  r.id = id;
  r.member_indices = std::move(members);
  for (auto i : r.member_indices) {
    r.centroid += cloud.points[i].position;
    r.mean_color += cloud.points[i].color;
  }
  const double n = static_cast<double>(r.member_indices.size());
  r.centroid /= n;
  r.mean_color /= n;
  return r;
}

}  // namespace detail

inline Partition segment(const PointCloud& cloud, const SegmentationParams& params,
                         std::uint64_t seed = 0) {
  require(!cloud.empty(), "cannot segment an empty cloud");
  require(params.seed_resolution > 0.0, "seed_resolution must be positive");
  require(params.color_weight >= 0.0 && params.spatial_weight >= 0.0,
          "segmentation weights must be non-negative");
  require(params.color_weight + params.spatial_weight > 0.0,
          "segmentation weights must not both be zero");

  const double res = params.seed_resolution;
  const std::size_t n = cloud.size();

  // Seed grid: cells of edge `res`, centred on the bounding box.
  Vec3 lo = cloud.points[0].position, hi = lo;
  for (const auto& p : cloud.points) {
    lo = lo.cwiseMin(p.position);
    hi = hi.cwiseMax(p.position);
  }
  std::array<long, 3> cells{};
  Vec3 origin;
  for (int a = 0; a < 3; ++a) {
    cells[a] = std::max(1L, static_cast<long>(std::ceil((hi[a] - lo[a]) / res - 1e-9)));
    origin[a] = 0.5 * (lo[a] + hi[a]) - 0.5 * static_cast<double>(cells[a]) * res;
  }
  std::map<std::array<long, 3>, std::vector<std::size_t>> voxels;
  for (std::size_t i = 0; i < n; ++i) {
    std::array<long, 3> key{};
    for (int a = 0; a < 3; ++a) {
      const long k = static_cast<long>(std::floor((cloud.points[i].position[a] - origin[a]) / res));
      key[a] = std::clamp(k, 0L, cells[a] - 1);
    }
    voxels[key].push_back(i);
  }

  Rng rng(seed);
  std::vector<Vec3> seed_pos, seed_col;
  for (const auto& [key, members] : voxels) {
    std::uniform_int_distribution<std::size_t> pick(0, members.size() - 1);
    const auto& p = cloud.points[members[pick(rng)]];
    seed_pos.push_back(p.position);
    seed_col.push_back(p.color);
  }

  const double wc = params.color_weight;
  const double ws = params.spatial_weight / (res * res);
  std::vector<int> label(n, 0);
  auto assign = [&]() {
    for (std::size_t i = 0; i < n; ++i) {
      const auto& p = cloud.points[i];
      double best = std::numeric_limits<double>::infinity();
      int arg = 0;
      for (std::size_t s = 0; s < seed_pos.size(); ++s) {
        const double d = wc * (p.color - seed_col[s]).squaredNorm() +
                         ws * (p.position - seed_pos[s]).squaredNorm();
        if (d < best) {
          best = d;
          arg = static_cast<int>(s);
        }
      }
      label[i] = arg;
    }
  };

  for (int round = 0; round < params.refinement_rounds; ++round) {
    assign();
    std::vector<Vec3> sum_p(seed_pos.size(), Vec3::Zero()), sum_c(seed_pos.size(), Vec3::Zero());
    std::vector<std::size_t> count(seed_pos.size(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      sum_p[label[i]] += cloud.points[i].position;
      sum_c[label[i]] += cloud.points[i].color;
      ++count[label[i]];
    }
    std::vector<Vec3> np, nc;
    for (std::size_t s = 0; s < seed_pos.size(); ++s) {
      if (count[s] == 0) continue;  // seed lost all members
      np.push_back(sum_p[s] / static_cast<double>(count[s]));
      nc.push_back(sum_c[s] / static_cast<double>(count[s]));
    }
    seed_pos = std::move(np);
    seed_col = std::move(nc);
  }
  assign();

  // Connectivity split over a radius graph restricted to equal labels.
  const KdTree tree(cloud.positions());
  std::vector<int> component(n, -1);
  std::vector<std::vector<std::size_t>> groups;
  std::vector<std::size_t> stack;
  for (std::size_t start = 0; start < n; ++start) {
    if (component[start] >= 0) continue;
    const int cid = static_cast<int>(groups.size());
    groups.emplace_back();
    component[start] = cid;
    stack.assign(1, start);
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      groups[cid].push_back(i);
      for (auto j : tree.radius(cloud.points[i].position, res)) {
        if (component[j] < 0 && label[j] == label[i]) {
          component[j] = cid;
          stack.push_back(j);
        }
      }
    }
  }

  Partition out;
  out.source_point_count = n;
  out.regions.reserve(groups.size());
  for (std::size_t g = 0; g < groups.size(); ++g) {
    std::sort(groups[g].begin(), groups[g].end());
    out.regions.push_back(detail::make_region(static_cast<int>(g), std::move(groups[g]), cloud));
  }
  return out;
}

inline Partition segment(const PointCloud& cloud, double seed_resolution, double color_weight,
                         double spatial_weight, std::uint64_t seed = 0) {
  SegmentationParams p;
  p.seed_resolution = seed_resolution;
  p.color_weight = color_weight;
  p.spatial_weight = spatial_weight;
  return segment(cloud, p, seed);
}

/// Debug view: each region painted from a fixed palette (id mod palette size).
inline PointCloud colorize_partition(const PointCloud& cloud, const Partition& partition) {
  static const std::array<Vec3, 12> palette = {
      Vec3(0.90, 0.10, 0.10), Vec3(0.10, 0.70, 0.20), Vec3(0.15, 0.30, 0.90),
      Vec3(0.95, 0.80, 0.10), Vec3(0.70, 0.20, 0.80), Vec3(0.10, 0.80, 0.80),
      Vec3(0.95, 0.50, 0.10), Vec3(0.50, 0.50, 0.50), Vec3(0.55, 0.35, 0.15),
      Vec3(0.95, 0.55, 0.75), Vec3(0.40, 0.75, 0.10), Vec3(0.10, 0.10, 0.45)};
  PointCloud out = cloud;
  for (const auto& r : partition.regions)
    for (auto i : r.member_indices)
      out.points[i].color = palette[static_cast<std::size_t>(r.id) % palette.size()];
  return out;
}

}  // namespace vhf
