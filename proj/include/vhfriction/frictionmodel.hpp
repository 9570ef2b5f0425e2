#pragma once

// Joint visuo-haptic Gaussian mixture over (RGB, c.o.f.) with one fixed
// background component, and Gaussian mixture regression of c.o.f. given RGB.

#include "vhfriction/core.hpp"
#include "vhfriction/haptics.hpp"
#include "vhfriction/pointcloud.hpp"
#include "vhfriction/segmentation.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <vector>

namespace vhf {

inline constexpr int kVisualDim = 3;
inline constexpr int kHapticDim = 1;

struct VisuoHapticSample {
  Vec3 visual = Vec3::Zero();
  std::optional<double> haptic;  // absent for visual-only samples
  int region_id = -1;

  bool is_full() const { return haptic.has_value(); }
  Vec4 joint() const { return Vec4(visual.x(), visual.y(), visual.z(), haptic.value_or(0.0)); }
};

struct VisuoHapticDataset {
  std::vector<VisuoHapticSample> samples;
  std::vector<bool> region_explored;  // indexed by region id

  std::size_t full_count() const {
    return static_cast<std::size_t>(
        std::count_if(samples.begin(), samples.end(), [](const auto& s) { return s.is_full(); }));
  }
};

struct GaussianComponent {
  double prior = 1.0;
  Vec4 mean = Vec4::Zero();        // (V : 3, H : 1)
  Mat4 covariance = Mat4::Identity();
  bool is_background = false;

  Vec3 mean_v() const { return mean.head<3>(); }
  double mean_h() const { return mean(3); }
  Mat3 cov_v() const { return covariance.topLeftCorner<3, 3>(); }
  Vec3 cov_vh() const { return covariance.block<3, 1>(0, 3); }
  Eigen::RowVector3d cov_hv() const { return covariance.block<1, 3>(3, 0); }
  double cov_h() const { return covariance(3, 3); }
};

struct VhGmm {
  std::vector<GaussianComponent> components;
  int n_materials = 0;

  std::size_t size() const { return components.size(); }

  const GaussianComponent& background() const {
    for (const auto& c : components)
      if (c.is_background) return c;
    throw InvalidArgument("model has no background component");
  }

  /// Checks structure, prior normalisation and covariance validity.
  void validate() const {
    require(!components.empty(), "model has no components");
    require(n_materials >= 0, "n_materials must be non-negative");
    int backgrounds = 0;
    double total = 0.0;
    for (std::size_t c = 0; c < components.size(); ++c) {
      const auto& g = components[c];
      backgrounds += g.is_background;
      require(g.prior > 0.0 && g.prior <= 1.0 && std::isfinite(g.prior),
              "component " + std::to_string(c) + " prior outside (0, 1]");
      require(g.mean.allFinite() && g.covariance.allFinite(),
              "component " + std::to_string(c) + " has non-finite parameters");
      require((g.covariance - g.covariance.transpose()).cwiseAbs().maxCoeff() <= 1e-9,
              "component " + std::to_string(c) + " covariance is not symmetric");
      require(Eigen::LLT<Mat4>(g.covariance).info() == Eigen::Success,
              "component " + std::to_string(c) + " covariance is not positive definite");
      total += g.prior;
    }
    require(backgrounds == 1, "model must have exactly one background component");
    require(std::abs(total - 1.0) <= 1e-9, "component priors must sum to 1");
  }
};

/// Symmetrises and raises every eigenvalue below `floor` to `floor`.
template <int N>
Eigen::Matrix<double, N, N> floor_eigenvalues(const Eigen::Matrix<double, N, N>& m, double floor) {
  const Eigen::Matrix<double, N, N> sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, N, N>> es(sym);
  if (es.eigenvalues().minCoeff() >= floor) return sym;
  const Eigen::Matrix<double, N, 1> lam = es.eigenvalues().cwiseMax(floor);
  Eigen::Matrix<double, N, N> out = es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
  return 0.5 * (out + out.transpose());
}

namespace detail {

inline constexpr double kLog2Pi = 1.8378770664093454835606594728112;

// log N(x | mean, cov) via Cholesky.
template <int N>
double log_gaussian(const Eigen::Matrix<double, N, 1>& x, const Eigen::Matrix<double, N, 1>& mean,
                    const Eigen::LLT<Eigen::Matrix<double, N, N>>& llt) {
  const Eigen::Matrix<double, N, 1> z = llt.matrixL().solve(x - mean);
  double log_det = 0.0;
  for (int i = 0; i < N; ++i) log_det += std::log(llt.matrixL()(i, i));
  return -0.5 * (N * kLog2Pi + z.squaredNorm()) - log_det;
}

inline double log_sum_exp(const Eigen::VectorXd& a) {
  const double m = a.maxCoeff();
  if (!std::isfinite(m)) return m;
  return m + std::log((a.array() - m).exp().sum());
}

}  // namespace detail

/// Mahalanobis distance of a colour from a component's visual block.
inline double visual_mahalanobis(const GaussianComponent& c, const Vec3& v) {
  Eigen::LLT<Mat3> llt(c.cov_v());
  return llt.matrixL().solve(v - c.mean_v()).norm();
}

// ---------------------------------------------------------------------------
// Dataset assembly

/// One full sample per annotation (a point touched twice yields two), plus
/// one visual-only sample for each untouched point, grouped by region.
inline VisuoHapticDataset build_dataset(const Partition& partition, const PointCloud& cloud,
                                        const std::vector<PointAnnotation>& annotations) {
  require(partition.source_point_count == cloud.size(), "partition does not match cloud");
  std::map<std::size_t, std::vector<double>> touched;
  for (const auto& a : annotations) {
    require(a.point_index < cloud.size(),
            "annotation index " + std::to_string(a.point_index) + " out of range");
    require(a.friction >= 0.0 && std::isfinite(a.friction), "annotation friction must be >= 0");
    touched[a.point_index].push_back(a.friction);
  }
  VisuoHapticDataset ds;
  ds.region_explored.assign(partition.regions.size(), false);
  for (const auto& region : partition.regions) {
    for (auto i : region.member_indices) {
      const Vec3& color = cloud.points[i].color;
      auto it = touched.find(i);
      if (it == touched.end()) {
        ds.samples.push_back({color, std::nullopt, region.id});
        continue;
      }
      ds.region_explored[static_cast<std::size_t>(region.id)] = true;
      for (double h : it->second) ds.samples.push_back({color, h, region.id});
    }
  }
  return ds;
}

// ---------------------------------------------------------------------------
// Background component

struct BackgroundPrior {
  double h_mean = 0.5;
  double h_var = 0.25;
};

inline constexpr double kDefaultCovFloor = 1e-6;

/// Whole-scene colour statistics paired with a broad haptic prior.
inline GaussianComponent make_background(const PointCloud& scene, const BackgroundPrior& prior = {},
                                         double cov_floor = kDefaultCovFloor) {
  require(scene.size() >= 2, "background needs at least 2 scene points");
  require(prior.h_var > 0.0, "h_prior_var must be positive");
  Vec3 mean = Vec3::Zero();
  for (const auto& p : scene.points) mean += p.color;
  mean /= static_cast<double>(scene.size());
  Mat3 cov = Mat3::Zero();
  for (const auto& p : scene.points) {
    const Vec3 d = p.color - mean;
    cov += d * d.transpose();
  }
  cov /= static_cast<double>(scene.size() - 1);

  GaussianComponent g;
  g.is_background = true;
  g.prior = 1.0;
  g.mean << mean, prior.h_mean;
  g.covariance.setZero();
  g.covariance.topLeftCorner<3, 3>() = floor_eigenvalues<3>(cov, cov_floor);
  g.covariance(3, 3) = std::max(prior.h_var, cov_floor);
  return g;
}

// ---------------------------------------------------------------------------
// Responsibilities and regression

/// h_c(v): posterior weight of each component given only the colour.
inline Eigen::VectorXd responsibilities(const VhGmm& model, const Vec3& v) {
  const auto C = static_cast<Eigen::Index>(model.size());
  Eigen::VectorXd logw(C);
  for (Eigen::Index c = 0; c < C; ++c) {
    const auto& g = model.components[static_cast<std::size_t>(c)];
    Eigen::LLT<Mat3> llt(g.cov_v());
    logw(c) = std::log(g.prior) + detail::log_gaussian<3>(v, g.mean_v(), llt);
  }
  const double lse = detail::log_sum_exp(logw);
  return (logw.array() - lse).exp().matrix();
}

struct GmrEstimate {
  double mean = 0.0;
  double variance = 0.0;
};

/// Conditional c.o.f. mean and variance given colour v.
inline GmrEstimate gmr_infer(const VhGmm& model, const Vec3& v) {
  const Eigen::VectorXd h = responsibilities(model, v);
  const std::size_t C = model.size();
  std::vector<double> mu(C), var(C);
  for (std::size_t c = 0; c < C; ++c) {
    const auto& g = model.components[c];
    Eigen::LLT<Mat3> llt(g.cov_v());
    // gain = Sigma_HV Sigma_V^-1
    const Vec3 gain = llt.solve(g.cov_vh());
    mu[c] = g.mean_h() + gain.dot(v - g.mean_v());
    var[c] = std::max(0.0, g.cov_h() - gain.dot(g.cov_vh()));
  }
  GmrEstimate out;
  for (std::size_t c = 0; c < C; ++c) out.mean += h(static_cast<Eigen::Index>(c)) * mu[c];
  // sum_c h_c (var_c + mu_c^2) - mean^2, written as a sum of non-negative terms
  for (std::size_t c = 0; c < C; ++c) {
    const double d = mu[c] - out.mean;
    out.variance += h(static_cast<Eigen::Index>(c)) * (var[c] + d * d);
  }
  return out;
}

// ---------------------------------------------------------------------------
// EM fit

struct FitOptions {
  int max_iter = 200;
  double log_lik_tol = 1e-9;  // on the mean per-sample log-likelihood
  double cov_floor = kDefaultCovFloor;
  double min_background_prior = 0.05;
  std::uint64_t seed = 0;
  int kmeans_rounds = 10;
};

struct FitResult {
  VhGmm model;
  std::vector<double> log_likelihood;  // total, one entry per E-step
  int iterations = 0;
  bool converged = false;
};

namespace detail {

struct Weighted4 {
  double weight = 0.0;
  Vec4 mean = Vec4::Zero();
  Mat4 cov = Mat4::Zero();
};

inline Weighted4 weighted_stats(const std::vector<Vec4>& x, const Eigen::VectorXd& w) {
  Weighted4 s;
  s.weight = w.sum();
  if (s.weight <= 0.0) return s;
  for (std::size_t i = 0; i < x.size(); ++i) s.mean += w(static_cast<Eigen::Index>(i)) * x[i];
  s.mean /= s.weight;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const Vec4 d = x[i] - s.mean;
    s.cov += w(static_cast<Eigen::Index>(i)) * d * d.transpose();
  }
  s.cov /= s.weight;
  return s;
}

// k-means++ seeding followed by a few Lloyd rounds; returns hard labels.
inline std::vector<int> kmeans_pp(const std::vector<Vec4>& x, int k, Rng& rng, int rounds) {
  const std::size_t n = x.size();
  std::vector<Vec4> centers;
  centers.reserve(static_cast<std::size_t>(k));
  std::uniform_int_distribution<std::size_t> first(0, n - 1);
  centers.push_back(x[first(rng)]);
  std::vector<double> d2(n);
  while (static_cast<int>(centers.size()) < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& c : centers) best = std::min(best, (x[i] - c).squaredNorm());
      d2[i] = best;
      total += best;
    }
    if (total <= 0.0) {
      centers.push_back(x[first(rng)]);
      continue;
    }
    std::uniform_real_distribution<double> u(0.0, total);
    double r = u(rng), acc = 0.0;
    std::size_t pick = n - 1;
    for (std::size_t i = 0; i < n; ++i) {
      acc += d2[i];
      if (acc >= r) {
        pick = i;
        break;
      }
    }
    centers.push_back(x[pick]);
  }
  std::vector<int> label(n, 0);
  for (int round = 0; round <= rounds; ++round) {
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double d = (x[i] - centers[static_cast<std::size_t>(c)]).squaredNorm();
        if (d < best) {
          best = d;
          label[i] = c;
        }
      }
    }
    if (round == rounds) break;
    std::vector<Vec4> sum(static_cast<std::size_t>(k), Vec4::Zero());
    std::vector<std::size_t> count(static_cast<std::size_t>(k), 0);
    for (std::size_t i = 0; i < n; ++i) {
      sum[static_cast<std::size_t>(label[i])] += x[i];
      ++count[static_cast<std::size_t>(label[i])];
    }
    for (int c = 0; c < k; ++c)
      if (count[static_cast<std::size_t>(c)] > 0)
        centers[static_cast<std::size_t>(c)] = sum[static_cast<std::size_t>(c)] /
                                               static_cast<double>(count[static_cast<std::size_t>(c)]);
  }
  return label;
}

// Maximises sum_c N_c log pi_c subject to pi_bg >= floor.
inline void update_priors(VhGmm& m, const Eigen::VectorXd& nk, double floor) {
  const double total = nk.sum();
  std::size_t bg = m.size();
  for (std::size_t c = 0; c < m.size(); ++c)
    if (m.components[c].is_background) bg = c;
  const double bg_share = bg < m.size() ? nk(static_cast<Eigen::Index>(bg)) / total : 0.0;
  const bool clamp = bg < m.size() && bg_share < floor;
  const double rest = clamp ? total - nk(static_cast<Eigen::Index>(bg)) : total;
  for (std::size_t c = 0; c < m.size(); ++c) {
    double p;
    if (clamp)
      p = c == bg ? floor : (1.0 - floor) * nk(static_cast<Eigen::Index>(c)) / rest;
    else
      p = nk(static_cast<Eigen::Index>(c)) / total;
    m.components[c].prior = std::max(p, 1e-300);
  }
}

}  // namespace detail

/// EM over the full (colour + c.o.f.) samples with the background held fixed
/// apart from its prior, then a re-estimate of each material's visual block
/// from every sample (full or visual-only) weighted by visual responsibility.
inline FitResult fit(const VisuoHapticDataset& dataset, int n_materials,
                     const GaussianComponent& background, const FitOptions& opt = {}) {
  require(n_materials >= 1, "n_materials must be >= 1");
  require(opt.max_iter >= 1, "max_iter must be >= 1");
  require(opt.cov_floor > 0.0, "cov_floor must be positive");
  require(opt.min_background_prior >= 0.0 && opt.min_background_prior < 1.0,
          "min_background_prior must be in [0, 1)");
  require(background.is_background, "background component must be flagged");

  std::vector<Vec4> x;
  for (const auto& s : dataset.samples)
    if (s.is_full()) x.push_back(s.joint());
  require(!x.empty(), "dataset has no full (visual + haptic) samples");
  const std::size_t n = x.size();
  const auto C = static_cast<std::size_t>(n_materials) + 1;

  // Initialisation from a hard clustering.
  Rng rng(opt.seed);
  const std::vector<int> label = detail::kmeans_pp(x, n_materials, rng, opt.kmeans_rounds);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n));
  const detail::Weighted4 global = detail::weighted_stats(x, ones);

  FitResult result;
  VhGmm& m = result.model;
  m.n_materials = n_materials;
  m.components.resize(C);
  Eigen::VectorXd nk = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(C));
  for (int c = 0; c < n_materials; ++c) {
    Eigen::VectorXd w(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) w(static_cast<Eigen::Index>(i)) = label[i] == c ? 1.0 : 0.0;
    const auto s = detail::weighted_stats(x, w);
    auto& g = m.components[static_cast<std::size_t>(c)];
    g.mean = s.weight > 0 ? s.mean : global.mean;
    g.covariance = floor_eigenvalues<4>(s.weight >= 2 ? s.cov : global.cov, opt.cov_floor);
    nk(c) = std::max(s.weight, 1e-12);
  }
  m.components[C - 1] = background;
  nk(static_cast<Eigen::Index>(C - 1)) = 0.0;
  detail::update_priors(m, nk, opt.min_background_prior);

  Eigen::MatrixXd resp(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(C));
  double prev = -std::numeric_limits<double>::infinity();
  for (int it = 0; it < opt.max_iter; ++it) {
    // E-step
    std::vector<Eigen::LLT<Mat4>> llt;
    llt.reserve(C);
    for (const auto& g : m.components) llt.emplace_back(g.covariance);
    double ll = 0.0;
    Eigen::VectorXd row(static_cast<Eigen::Index>(C));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t c = 0; c < C; ++c)
        row(static_cast<Eigen::Index>(c)) =
            std::log(m.components[c].prior) +
            detail::log_gaussian<4>(x[i], m.components[c].mean, llt[c]);
      const double lse = detail::log_sum_exp(row);
      ll += lse;
      resp.row(static_cast<Eigen::Index>(i)) = (row.array() - lse).exp().matrix().transpose();
    }
    if (!std::isfinite(ll))
      throw NumericalError("EM produced a non-finite log-likelihood at iteration " +
                           std::to_string(it));
    result.log_likelihood.push_back(ll);
    result.iterations = it + 1;
    if (it > 0 && (ll - prev) / static_cast<double>(n) < opt.log_lik_tol) {
      result.converged = true;
      break;
    }
    prev = ll;
    if (it + 1 == opt.max_iter) break;

    // M-step
    nk = resp.colwise().sum().transpose();
    for (std::size_t c = 0; c + 1 < C; ++c) {
      const Eigen::VectorXd w = resp.col(static_cast<Eigen::Index>(c));
      if (w.sum() < 1e-12) continue;  // parameters do not affect the objective
      const auto s = detail::weighted_stats(x, w);
      m.components[c].mean = s.mean;
      m.components[c].covariance = floor_eigenvalues<4>(s.cov, opt.cov_floor);
    }
    detail::update_priors(m, nk, opt.min_background_prior);
    for (const auto& g : m.components)
      if (!g.mean.allFinite() || !g.covariance.allFinite() || !std::isfinite(g.prior))
        throw NumericalError("EM produced non-finite parameters at iteration " +
                             std::to_string(it));
  }

  // Visual blocks from every sample, weighted by visual responsibility.
  {
    const VhGmm em_model = m;
    std::vector<double> wsum(C, 0.0);
    std::vector<Vec3> vmean(C, Vec3::Zero());
    std::vector<Eigen::VectorXd> weights;
    std::vector<Vec3> all_v;
    all_v.reserve(dataset.samples.size());
    for (const auto& s : dataset.samples) all_v.push_back(s.visual);
    Eigen::MatrixXd h(static_cast<Eigen::Index>(all_v.size()), static_cast<Eigen::Index>(C));
    for (std::size_t i = 0; i < all_v.size(); ++i)
      h.row(static_cast<Eigen::Index>(i)) = responsibilities(em_model, all_v[i]).transpose();
    for (std::size_t c = 0; c + 1 < C; ++c) {
      const Eigen::VectorXd w = h.col(static_cast<Eigen::Index>(c));
      const double total = w.sum();
      if (total < 1e-9) continue;
      Vec3 mv = Vec3::Zero();
      for (std::size_t i = 0; i < all_v.size(); ++i) mv += w(static_cast<Eigen::Index>(i)) * all_v[i];
      mv /= total;
      Mat3 cv = Mat3::Zero();
      for (std::size_t i = 0; i < all_v.size(); ++i) {
        const Vec3 d = all_v[i] - mv;
        cv += w(static_cast<Eigen::Index>(i)) * d * d.transpose();
      }
      cv /= total;
      auto& g = m.components[c];
      g.mean.head<3>() = mv;
      const Mat3 sv = floor_eigenvalues<3>(cv, opt.cov_floor);
      g.covariance.topLeftCorner<3, 3>() = sv;
      // keep the Schur complement Sigma_H - Sigma_HV Sigma_V^-1 Sigma_VH >= floor
      const Vec3 vh = g.cov_vh();
      const double explained = vh.dot(Eigen::LLT<Mat3>(sv).solve(vh));
      if (g.covariance(3, 3) - explained < opt.cov_floor)
        g.covariance(3, 3) = explained + opt.cov_floor;
      g.covariance = floor_eigenvalues<4>(g.covariance, opt.cov_floor);
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Field inference

struct FrictionField {
  struct Entry {
    int region_id = 0;
    double mean = 0.0;
    double variance = 0.0;
    bool explored = false;
  };
  std::vector<Entry> regions;
  std::vector<double> point_mean;
  std::vector<double> point_variance;

  FrictionAnnotations annotations() const { return {point_mean, point_variance}; }
};

/// GMR at each region's mean colour. With per_point set, the per-point
/// expansion evaluates each point's own colour instead of inheriting.
inline FrictionField infer_field(const VhGmm& model, const Partition& partition,
                                 const PointCloud& cloud, bool per_point = false,
                                 const std::vector<bool>* explored = nullptr) {
  require(partition.source_point_count == cloud.size(), "partition does not match cloud");
  FrictionField f;
  f.point_mean.assign(cloud.size(), 0.0);
  f.point_variance.assign(cloud.size(), 0.0);
  for (const auto& r : partition.regions) {
    const GmrEstimate e = gmr_infer(model, r.mean_color);
    FrictionField::Entry entry{r.id, e.mean, e.variance, false};
    if (explored && static_cast<std::size_t>(r.id) < explored->size())
      entry.explored = (*explored)[static_cast<std::size_t>(r.id)];
    f.regions.push_back(entry);
    for (auto i : r.member_indices) {
      if (per_point) {
        const GmrEstimate pe = gmr_infer(model, cloud.points[i].color);
        f.point_mean[i] = pe.mean;
        f.point_variance[i] = pe.variance;
      } else {
        f.point_mean[i] = e.mean;
        f.point_variance[i] = e.variance;
      }
    }
  }
  return f;
}

// ---------------------------------------------------------------------------
// Density histogram

struct Histogram {
  double bin_width = 0.0;
  std::vector<std::size_t> counts;

  std::size_t total() const { return std::accumulate(counts.begin(), counts.end(), std::size_t{0}); }
  double bin_low(std::size_t k) const { return bin_width * static_cast<double>(k); }
  double bin_high(std::size_t k) const { return bin_width * static_cast<double>(k + 1); }
  double bin_center(std::size_t k) const { return bin_width * (static_cast<double>(k) + 0.5); }
};

/// Region counts per c.o.f. bin over [0, max observed].
inline Histogram density_histogram(const std::vector<double>& values, double bin_width) {
  require(bin_width > 0.0, "bin_width must be positive");
  Histogram h;
  h.bin_width = bin_width;
  double hi = 0.0;
  for (double v : values) hi = std::max(hi, v);
  // values on a bin edge belong to the upper bin despite rounding in v / bin_width
  auto bin_of = [&](double v) {
    return static_cast<std::size_t>(std::floor(std::max(v, 0.0) / bin_width + 1e-9));
  };
  h.counts.assign(bin_of(hi) + 1, 0);
  for (double v : values) {
    const std::size_t k = bin_of(v);
    ++h.counts[std::min(k, h.counts.size() - 1)];
  }
  return h;
}

inline Histogram density_histogram(const FrictionField& field, double bin_width) {
  std::vector<double> v;
  v.reserve(field.regions.size());
  for (const auto& e : field.regions) v.push_back(e.mean);
  return density_histogram(v, bin_width);
}

struct Peak {
  std::size_t bin = 0;
  double location = 0.0;  // bin centre
  std::size_t count = 0;
};

/// Local maxima holding more than `min_fraction` of all counts. On a plateau
/// the leftmost bin is reported.
inline std::vector<Peak> detect_peaks(const Histogram& h, double min_fraction = 0.05) {
  std::vector<Peak> peaks;
  const double threshold = min_fraction * static_cast<double>(h.total());
  for (std::size_t k = 0; k < h.counts.size(); ++k) {
    const std::size_t c = h.counts[k];
    const bool rises = k == 0 || c > h.counts[k - 1];
    const bool holds = k + 1 == h.counts.size() || c >= h.counts[k + 1];
    if (rises && holds && static_cast<double>(c) > threshold)
      peaks.push_back({k, h.bin_center(k), c});
  }
  return peaks;
}

}  // namespace vhf
