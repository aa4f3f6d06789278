#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace graphlap {

enum class ErrorKind {
  InvalidArgument,
  UnsupportedGeometry,
  DomainError,
  ManifoldMismatch,
  EmptySample,
  NonpositiveBandwidth,
  QuadratureNotConverged,
  EmptyInput,
  RegimeError,
  DegenerateInput,
  TooFewSamples,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
  case ErrorKind::InvalidArgument:
    return "InvalidArgument";
  case ErrorKind::UnsupportedGeometry:
    return "UnsupportedGeometry";
  case ErrorKind::DomainError:
    return "DomainError";
  case ErrorKind::ManifoldMismatch:
    return "ManifoldMismatch";
  case ErrorKind::EmptySample:
    return "EmptySample";
  case ErrorKind::NonpositiveBandwidth:
    return "NonpositiveBandwidth";
  case ErrorKind::QuadratureNotConverged:
    return "QuadratureNotConverged";
  case ErrorKind::EmptyInput:
    return "EmptyInput";
  case ErrorKind::RegimeError:
    return "RegimeError";
  case ErrorKind::DegenerateInput:
    return "DegenerateInput";
  case ErrorKind::TooFewSamples:
    return "TooFewSamples";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the kinds above so
/// callers (the CLI in particular) can map it onto a structured report.
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string &message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  std::string_view kind_name() const noexcept { return to_string(kind_); }

private:
  ErrorKind kind_;
};

// Ambient coordinates are always stored in R^3; planar manifolds keep z = 0,
// which leaves every Euclidean distance unchanged.
using Vec3 = Eigen::Vector3d;

struct ManifoldPoint {
  Vec3 ambient = Vec3::Zero();
  // circle: {theta, 0}; sphere: {azimuth, polar}; torus: {u, v}
  std::array<double, 2> intrinsic{0.0, 0.0};
};

struct TangentVector {
  ManifoldPoint base;
  Vec3 components = Vec3::Zero();
};

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

/// Wraps an angle to [0, 2pi).
inline double wrap_angle(double a) {
  double w = std::fmod(a, two_pi);
  if (w < 0.0)
    w += two_pi;
  if (w >= two_pi)
    w = 0.0;
  return w;
}

} // namespace graphlap
