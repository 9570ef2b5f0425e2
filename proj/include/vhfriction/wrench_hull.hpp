#pragma once

// Distance from the origin to the boundary of conv(W) for a finite set of
// 6D points, by polytope expansion driven by the support function: start
// from a simplex, repeatedly take the facet nearest the origin, query the
// support point along its normal, and stop once that facet supports conv(W).

#include "vhfriction/core.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <vector>

namespace vhf {

struct HullDistance {
  double distance = 0.0;   // 0 when the origin is not strictly inside
  bool full_rank = false;  // false when conv(W) is lower dimensional
  bool inside = false;
  int iterations = 0;
};

namespace detail {

using Ridge = std::array<int, 5>;

struct HullFacet {
  std::array<int, 6> v{};
  Vec6 normal = Vec6::Zero();
  double offset = 0.0;  // normal . x = offset on the facet; origin inside iff offset > 0
  bool alive = true;
};

// Unit normal of the hyperplane through the given 6 points, oriented away
// from `interior`.
inline bool facet_plane(const std::vector<Vec6>& w, const std::array<int, 6>& idx,
                        const Vec6& interior, HullFacet& f) {
  Eigen::Matrix<double, 6, 6> a = Eigen::Matrix<double, 6, 6>::Zero();
  for (int k = 1; k < 6; ++k) a.row(k - 1) = (w[static_cast<std::size_t>(idx[static_cast<std::size_t>(k)])] - w[static_cast<std::size_t>(idx[0])]).transpose();
  Eigen::JacobiSVD<Eigen::Matrix<double, 6, 6>> svd(a, Eigen::ComputeFullV);
  Vec6 n = svd.matrixV().col(5);
  const double len = n.norm();
  if (!(len > 0)) return false;
  n /= len;
  const Vec6& p0 = w[static_cast<std::size_t>(idx[0])];
  if (n.dot(interior - p0) > 0) n = -n;
  f.v = idx;
  f.normal = n;
  f.offset = n.dot(p0);
  f.alive = true;
  return true;
}

}  // namespace detail

/// Relative tolerance for rank decisions.
inline constexpr double kHullRankTol = 1e-10;

inline HullDistance hull_distance_to_origin(const std::vector<Vec6>& w, double tol = 1e-9,
                                            int max_iter = 100000) {
  HullDistance out;
  if (w.size() < 7) return out;

  double scale = 0.0;
  for (const auto& p : w) scale = std::max(scale, p.norm());
  if (scale == 0.0) return out;

  // Greedy affinely independent simplex: each new vertex is the point
  // farthest from the affine span of those already chosen.
  std::vector<int> simplex;
  {
    Vec6 mean = Vec6::Zero();
    for (const auto& p : w) mean += p;
    mean /= static_cast<double>(w.size());
    int first = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double d = (w[i] - mean).squaredNorm();
      if (d > best) {
        best = d;
        first = static_cast<int>(i);
      }
    }
    simplex.push_back(first);
    std::vector<Vec6> basis;  // orthonormal span of (v_k - v_0)
    while (simplex.size() < 7) {
      int arg = -1;
      double far = -1.0;
      for (std::size_t i = 0; i < w.size(); ++i) {
        Vec6 r = w[i] - w[static_cast<std::size_t>(simplex[0])];
        for (const auto& b : basis) r -= b.dot(r) * b;
        const double d = r.norm();
        if (d > far) {
          far = d;
          arg = static_cast<int>(i);
        }
      }
      if (far <= kHullRankTol * scale) return out;  // lower-dimensional hull
      Vec6 r = w[static_cast<std::size_t>(arg)] - w[static_cast<std::size_t>(simplex[0])];
      for (const auto& b : basis) r -= b.dot(r) * b;
      for (const auto& b : basis) r -= b.dot(r) * b;  // re-orthogonalise
      basis.push_back(r.normalized());
      simplex.push_back(arg);
    }
  }
  out.full_rank = true;

  Vec6 interior = Vec6::Zero();
  for (int i : simplex) interior += w[static_cast<std::size_t>(i)];
  interior /= 7.0;

  std::vector<detail::HullFacet> facets;
  for (int skip = 0; skip < 7; ++skip) {
    std::array<int, 6> idx{};
    int k = 0;
    for (int j = 0; j < 7; ++j)
      if (j != skip) idx[static_cast<std::size_t>(k++)] = simplex[static_cast<std::size_t>(j)];
    detail::HullFacet f;
    if (!detail::facet_plane(w, idx, interior, f))
      throw NumericalError("hull distance: degenerate initial simplex");
    facets.push_back(f);
  }
  std::vector<bool> used(w.size(), false);
  for (int i : simplex) used[static_cast<std::size_t>(i)] = true;

  const double eps = 1e-12 * scale;
  for (int it = 0; it < max_iter; ++it) {
    out.iterations = it + 1;
    std::size_t nearest = facets.size();
    for (std::size_t f = 0; f < facets.size(); ++f)
      if (facets[f].alive && (nearest == facets.size() || facets[f].offset < facets[nearest].offset))
        nearest = f;
    const detail::HullFacet& nf = facets[nearest];

    int support = -1;
    double s = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double d = nf.normal.dot(w[i]);
      if (d > s) {
        s = d;
        support = static_cast<int>(i);
      }
    }
    if (s - nf.offset <= tol || used[static_cast<std::size_t>(support)]) {
      out.inside = nf.offset > 0.0;
      out.distance = out.inside ? nf.offset : 0.0;
      return out;
    }

    // Replace every facet that sees the support point by a cone from its horizon.
    const Vec6& p = w[static_cast<std::size_t>(support)];
    std::map<detail::Ridge, int> ridge_count;
    std::vector<detail::Ridge> ridges_in_order;
    for (auto& f : facets) {
      if (!f.alive || f.normal.dot(p) - f.offset <= eps) continue;
      f.alive = false;
      for (int skip = 0; skip < 6; ++skip) {
        detail::Ridge r{};
        int k = 0;
        for (int j = 0; j < 6; ++j)
          if (j != skip) r[static_cast<std::size_t>(k++)] = f.v[static_cast<std::size_t>(j)];
        std::sort(r.begin(), r.end());
        if (ridge_count[r]++ == 0) ridges_in_order.push_back(r);
      }
    }
    used[static_cast<std::size_t>(support)] = true;
    for (const auto& r : ridges_in_order) {
      if (ridge_count[r] != 1) continue;
      std::array<int, 6> idx{};
      std::copy(r.begin(), r.end(), idx.begin());
      idx[5] = support;
      detail::HullFacet f;
      if (detail::facet_plane(w, idx, interior, f)) facets.push_back(f);
    }
    // compact occasionally
    if (facets.size() > 4096) {
      facets.erase(std::remove_if(facets.begin(), facets.end(), [](const auto& f) { return !f.alive; }),
                   facets.end());
    }
  }
  throw NumericalError("hull distance did not converge");
}

}  // namespace vhf
