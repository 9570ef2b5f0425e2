#pragma once

#include "vhfriction/core.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <vector>

namespace vhf {

/// Static 3-d tree over a copy of the given points.
///
/// Queries are exact. Nearest-neighbour ties resolve to the lowest point
/// index so results are identical to a linear scan.
class KdTree {
 public:
  KdTree() = default;

  explicit KdTree(std::vector<Vec3> points) : points_(std::move(points)) {
    order_.resize(points_.size());
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    nodes_.reserve(points_.size() / kLeafSize * 2 + 2);
    if (!points_.empty()) build(0, points_.size(), 0);
  }

  std::size_t size() const { return points_.size(); }

  /// Index of the closest point; requires a non-empty tree.
  std::size_t nearest(const Vec3& q) const {
    require(!points_.empty(), "nearest() on empty point set");
    Best best{std::numeric_limits<double>::infinity(), points_.size()};
    search_nearest(0, q, best);
    return best.index;
  }

  /// Indices of all points with distance <= radius, sorted ascending.
  std::vector<std::size_t> radius(const Vec3& q, double r) const {
    std::vector<std::size_t> out;
    if (!points_.empty()) search_radius(0, q, r * r, out);
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  static constexpr std::size_t kLeafSize = 12;

  struct Node {
    std::size_t begin, end;  // range into order_
    int axis = -1;           // -1 for leaves
    double split = 0.0;
    std::size_t left = 0, right = 0;
    Vec3 lo, hi;  // bounding box
  };

  struct Best {
    double d2;
    std::size_t index;
  };

  std::size_t build(std::size_t begin, std::size_t end, int depth) {
    const std::size_t id = nodes_.size();
    nodes_.emplace_back();
    nodes_[id].begin = begin;
    nodes_[id].end = end;
    Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
    Vec3 hi = -lo;
    for (std::size_t i = begin; i < end; ++i) {
      lo = lo.cwiseMin(points_[order_[i]]);
      hi = hi.cwiseMax(points_[order_[i]]);
    }
    nodes_[id].lo = lo;
    nodes_[id].hi = hi;
    if (end - begin <= kLeafSize) return id;

    int axis = 0;
    (hi - lo).maxCoeff(&axis);
    const std::size_t mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + static_cast<std::ptrdiff_t>(begin),
                     order_.begin() + static_cast<std::ptrdiff_t>(mid),
                     order_.begin() + static_cast<std::ptrdiff_t>(end),
                     [&](std::size_t a, std::size_t b) {
                       return points_[a][axis] < points_[b][axis];
                     });
    nodes_[id].axis = axis;
    nodes_[id].split = points_[order_[mid]][axis];
    const std::size_t l = build(begin, mid, depth + 1);
    const std::size_t r = build(mid, end, depth + 1);
    nodes_[id].left = l;
    nodes_[id].right = r;
    return id;
  }

  static double box_d2(const Node& n, const Vec3& q) {
    const Vec3 d = (n.lo - q).cwiseMax(q - n.hi).cwiseMax(0.0);
    return d.squaredNorm();
  }

  void search_nearest(std::size_t id, const Vec3& q, Best& best) const {
    const Node& n = nodes_[id];
    if (box_d2(n, q) > best.d2) return;
    if (n.axis < 0) {
      for (std::size_t i = n.begin; i < n.end; ++i) {
        const std::size_t idx = order_[i];
        const double d2 = (points_[idx] - q).squaredNorm();
        if (d2 < best.d2 || (d2 == best.d2 && idx < best.index)) best = {d2, idx};
      }
      return;
    }
    const bool go_left = q[n.axis] < n.split;
    search_nearest(go_left ? n.left : n.right, q, best);
    search_nearest(go_left ? n.right : n.left, q, best);
  }

  void search_radius(std::size_t id, const Vec3& q, double r2,
                     std::vector<std::size_t>& out) const {
    const Node& n = nodes_[id];
    if (box_d2(n, q) > r2) return;
    if (n.axis < 0) {
      for (std::size_t i = n.begin; i < n.end; ++i) {
        if ((points_[order_[i]] - q).squaredNorm() <= r2) out.push_back(order_[i]);
      }
      return;
    }
    search_radius(n.left, q, r2, out);
    search_radius(n.right, q, r2, out);
  }

  std::vector<Vec3> points_;
  std::vector<std::size_t> order_;
  std::vector<Node> nodes_;
};

}  // namespace vhf
