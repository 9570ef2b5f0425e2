#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace vhf {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;
using Vec6 = Eigen::Matrix<double, 6, 1>;

// Error hierarchy. The CLI maps each family to a distinct exit code.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad arguments or configuration (exit 1).
struct InvalidArgument : Error {
  using Error::Error;
};

// File system or format problems (exit 2).
struct IoError : Error {
  using Error::Error;
};

struct ParseError : IoError {
  ParseError(const std::string& detail, std::size_t line, const std::string& source = "")
      : IoError((source.empty() ? "line " : source + ":") + std::to_string(line) + ": " +
                detail),
        line_(line),
        detail_(detail) {}
  std::size_t line() const noexcept { return line_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::size_t line_;
  std::string detail_;
};

// Non-finite state or failed numerical procedure (exit 3).
struct NumericalError : Error {
  using Error::Error;
};

// Sampling could not produce any feasible result (exit 4).
struct InfeasibleError : Error {
  using Error::Error;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw InvalidArgument(msg);
}

using Rng = std::mt19937_64;

inline bool all_finite(const Vec3& v) { return v.allFinite(); }

// Any unit vector orthogonal to n (n must be unit length).
inline Vec3 any_orthogonal(const Vec3& n) {
  const Vec3 helper = std::abs(n.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  return n.cross(helper).normalized();
}

// 64-bit FNV-1a, used for manifest checksums.
inline std::uint64_t fnv1a64(const std::string& bytes,
                             std::uint64_t h = 14695981039346656037ull) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] = digits[v & 0xf];
    v >>= 4;
  }
  return s;
}

}  // namespace vhf
