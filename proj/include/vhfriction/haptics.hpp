#pragma once

#include "vhfriction/core.hpp"
#include "vhfriction/kdtree.hpp"
#include "vhfriction/pointcloud.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace vhf {

struct ContactSample {
  double time = 0.0;                    // seconds
  Vec3 contact_position = Vec3::Zero();  // meters, cloud frame
  Vec3 force = Vec3::Zero();             // newtons, contact frame: (tangential x, y, normal)
};

struct HapticTrace {
  std::vector<ContactSample> samples;

  std::size_t size() const { return samples.size(); }

  /// Throws unless timestamps are finite, non-negative and strictly increasing.
  void validate() const {
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const double t = samples[i].time;
      require(std::isfinite(t) && t >= 0.0, "sample " + std::to_string(i) + " has invalid time");
      require(i == 0 || t > samples[i - 1].time,
              "timestamps must be strictly increasing at sample " + std::to_string(i));
    }
  }
};

/// Raised when a sample's normal force is too small to define a c.o.f.
struct DegenerateContact : InvalidArgument {
  using InvalidArgument::InvalidArgument;
};

inline constexpr double kDefaultMinNormalForce = 0.5;  // N

/// Coulomb coefficient of friction: |f_t| / |f_n|.
inline double coulomb_cof(const ContactSample& sample,
                          double min_normal_force = kDefaultMinNormalForce) {
  const double fn = std::abs(sample.force.z());
  if (!(fn >= min_normal_force))
    throw DegenerateContact("normal force " + std::to_string(fn) + " N below gate " +
                            std::to_string(min_normal_force) + " N");
  return std::hypot(sample.force.x(), sample.force.y()) / fn;
}

struct CofEstimate {
  std::size_t sample_index = 0;
  double cof = 0.0;
};

/// Pointwise Coulomb estimates; samples failing the normal-force gate are skipped.
inline std::vector<CofEstimate> estimate_trace(const HapticTrace& trace,
                                               double min_normal_force = kDefaultMinNormalForce) {
  std::vector<CofEstimate> out;
  out.reserve(trace.size());
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const double fn = std::abs(trace.samples[i].force.z());
    if (!(fn >= min_normal_force)) continue;
    out.push_back({i, coulomb_cof(trace.samples[i], min_normal_force)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// LuGre simulation

struct LuGreParams {
  double sigma0 = 1e5;   // bristle stiffness, N/m
  double sigma1 = 316.0; // bristle damping, N s/m
  double sigma2 = 0.4;   // viscous coefficient, N s/m
  double mu_c = 0.2;     // Coulomb level
  double mu_s = 0.4;     // static level
  double v_s = 0.01;     // Stribeck velocity, m/s

  void validate() const {
    require(sigma0 > 0 && mu_c > 0 && mu_s > 0 && v_s > 0,
            "LuGre sigma0, mu_c, mu_s and v_s must be positive");
    require(sigma1 >= 0 && sigma2 >= 0, "LuGre damping terms must be non-negative");
    require(mu_s >= mu_c, "LuGre requires mu_s >= mu_c");
  }

  /// Stribeck curve g(v) in newtons for the given normal load.
  double stribeck(double v, double normal_force) const {
    const double fc = mu_c * normal_force, fs = mu_s * normal_force;
    const double r = v / v_s;
    return fc + (fs - fc) * std::exp(-r * r);
  }

  /// Bristle-state derivative dz/dt.
  double zdot(double z, double v, double normal_force) const {
    return v - sigma0 * std::abs(v) * z / stribeck(v, normal_force);
  }

  double tangential_force(double z, double v, double normal_force) const {
    return sigma0 * z + sigma1 * zdot(z, v, normal_force) + sigma2 * v;
  }
};

inline constexpr double kDefaultLuGreStep = 1e-4;  // s

/// Integrates the LuGre bristle state with classical RK4. Sample k is taken
/// at t = k*dt with velocity profile[k]; velocity is linearly interpolated
/// inside each step. The slide runs along +x of the contact frame.
inline HapticTrace simulate_lugre(const LuGreParams& params, const std::vector<double>& profile,
                                  double normal_force, double dt = kDefaultLuGreStep) {
  params.validate();
  require(dt > 0.0, "dt must be positive");
  require(normal_force > 0.0, "normal_force must be positive");
  require(!profile.empty(), "velocity profile must not be empty");

  HapticTrace trace;
  trace.samples.reserve(profile.size());
  double z = 0.0, x = 0.0;
  for (std::size_t k = 0; k < profile.size(); ++k) {
    const double v0 = profile[k];
    const double v1 = k + 1 < profile.size() ? profile[k + 1] : v0;
    const double ft = params.tangential_force(z, v0, normal_force);
    if (!std::isfinite(ft) || !std::isfinite(z))
      throw NumericalError("LuGre integration unstable at step " + std::to_string(k) +
                           "; use a smaller dt");
    ContactSample s;
    s.time = static_cast<double>(k) * dt;
    s.contact_position = Vec3(x, 0.0, 0.0);
    s.force = Vec3(ft, 0.0, normal_force);
    trace.samples.push_back(s);

    const double vm = 0.5 * (v0 + v1);
    const double k1 = params.zdot(z, v0, normal_force);
    const double k2 = params.zdot(z + 0.5 * dt * k1, vm, normal_force);
    const double k3 = params.zdot(z + 0.5 * dt * k2, vm, normal_force);
    const double k4 = params.zdot(z + dt * k3, v1, normal_force);
    z += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    x += dt * vm;
  }
  return trace;
}

// ---------------------------------------------------------------------------
// Association to the cloud

struct PointAnnotation {
  std::size_t point_index = 0;
  double friction = 0.0;
};

/// Maps each estimate to the closest cloud point (ties -> lowest index).
inline std::vector<PointAnnotation> associate(
    const std::vector<std::pair<ContactSample, double>>& estimates, const PointCloud& cloud) {
  require(!cloud.empty(), "cannot associate against an empty cloud");
  const KdTree tree(cloud.positions());
  std::vector<PointAnnotation> out;
  out.reserve(estimates.size());
  for (const auto& [sample, cof] : estimates)
    out.push_back({tree.nearest(sample.contact_position), cof});
  return out;
}

inline std::vector<PointAnnotation> associate(const HapticTrace& trace,
                                              const std::vector<CofEstimate>& estimates,
                                              const PointCloud& cloud) {
  std::vector<std::pair<ContactSample, double>> pairs;
  pairs.reserve(estimates.size());
  for (const auto& e : estimates) pairs.emplace_back(trace.samples.at(e.sample_index), e.cof);
  return associate(pairs, cloud);
}

// ---------------------------------------------------------------------------
// Synthetic sliding trace

struct SlideParams {
  double normal_force = 5.0;  // N
  double speed = 0.02;        // m/s
  double noise_std = 0.0;     // c.o.f. units
  double rate = 100.0;        // Hz
};

/// Straight slide from start to end over a cloud with known per-point c.o.f.
inline HapticTrace synth_trace(const PointCloud& cloud, const Vec3& start, const Vec3& end,
                               const std::vector<double>& friction_map, const SlideParams& slide,
                               std::uint64_t seed = 0) {
  require(!cloud.empty(), "synth_trace needs a non-empty cloud");
  require(friction_map.size() == cloud.size(), "friction map must be index-aligned with cloud");
  require((end - start).norm() > 0.0, "path endpoints must be distinct");
  require(slide.speed > 0.0 && slide.rate > 0.0 && slide.normal_force > 0.0,
          "slide speed, rate and normal force must be positive");
  require(slide.noise_std >= 0.0, "noise_std must be non-negative");

  const double length = (end - start).norm();
  const Vec3 dir = (end - start) / length;
  const double step = slide.speed / slide.rate;
  const auto count = static_cast<std::size_t>(std::floor(length / step + 1e-9)) + 1;

  const KdTree tree(cloud.positions());
  Rng rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  HapticTrace trace;
  trace.samples.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    ContactSample s;
    s.time = static_cast<double>(k) / slide.rate;
    s.contact_position = start + dir * (step * static_cast<double>(k));
    const double mu = friction_map[tree.nearest(s.contact_position)];
    const double eps = slide.noise_std > 0.0 ? slide.noise_std * noise(rng) : 0.0;
    s.force = Vec3(mu * slide.normal_force + eps * slide.normal_force, 0.0, slide.normal_force);
    trace.samples.push_back(s);
  }
  return trace;
}

// ---------------------------------------------------------------------------
// Trace CSV: time,x,y,z,fx,fy,fz

inline constexpr const char* kTraceHeader = "time,x,y,z,fx,fy,fz";

inline void write_trace_csv(std::ostream& os, const HapticTrace& trace) {
  os << kTraceHeader << '\n';
  char buf[64];
  for (const auto& s : trace.samples) {
    const double v[7] = {s.time,      s.contact_position.x(), s.contact_position.y(),
                         s.contact_position.z(), s.force.x(), s.force.y(), s.force.z()};
    for (int i = 0; i < 7; ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", v[i]);
      os << buf << (i < 6 ? ',' : '\n');
    }
  }
}

inline void save_trace_csv(const HapticTrace& trace, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write '" + path + "'");
  write_trace_csv(os, trace);
  if (!os) throw IoError("write failed for '" + path + "'");
}

inline HapticTrace read_trace_csv(std::istream& in, const std::string& source = "") {
  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(in, line)) throw ParseError("empty trace file", 1, source);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kTraceHeader)
    throw ParseError(std::string("expected header '") + kTraceHeader + "'", 1, source);
  HapticTrace trace;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    double v[7];
    std::size_t pos = 0;
    for (int i = 0; i < 7; ++i) {
      const std::size_t end = i < 6 ? line.find(',', pos) : line.size();
      if (end == std::string::npos) throw ParseError("expected 7 columns", lineno, source);
      const char* b = line.data() + pos;
      const char* e = line.data() + end;
      while (b < e && *b == ' ') ++b;
      auto [ptr, ec] = std::from_chars(b, e, v[i]);
      if (ec != std::errc() || ptr != e || !std::isfinite(v[i]))
        throw ParseError("invalid number in column " + std::to_string(i + 1), lineno, source);
      pos = end + 1;
    }
    ContactSample s{v[0], Vec3(v[1], v[2], v[3]), Vec3(v[4], v[5], v[6])};
    if (s.time < 0.0) throw ParseError("negative timestamp", lineno, source);
    if (!trace.samples.empty() && s.time <= trace.samples.back().time)
      throw ParseError("timestamps must be strictly increasing", lineno, source);
    trace.samples.push_back(s);
  }
  return trace;
}

inline HapticTrace load_trace_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  return read_trace_csv(in, path);
}

}  // namespace vhf
