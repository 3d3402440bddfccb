#ifndef GTF_TYPES_HPP
#define GTF_TYPES_HPP

#include <Eigen/Dense>
#include <Eigen/Geometry>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "gtf/errors.hpp"

namespace gtf {

using Point3 = Eigen::Vector3d;

// Microseconds on a named clock. Kept integral so long logs never lose
// resolution to float accumulation.
struct Timestamp {
  std::int64_t micros = 0;

  constexpr Timestamp() = default;
  constexpr explicit Timestamp(std::int64_t us) : micros(us) {}

  static constexpr Timestamp from_seconds(double s) {
    return Timestamp(static_cast<std::int64_t>(s * 1e6 + (s >= 0 ? 0.5 : -0.5)));
  }
  constexpr double seconds() const { return static_cast<double>(micros) * 1e-6; }

  constexpr bool operator==(const Timestamp&) const = default;
  constexpr auto operator<=>(const Timestamp&) const = default;

  constexpr Timestamp operator+(std::int64_t us) const { return Timestamp(micros + us); }
  constexpr Timestamp operator-(std::int64_t us) const { return Timestamp(micros - us); }
  // Difference between two stamps of the same clock, in microseconds.
  constexpr std::int64_t operator-(const Timestamp& other) const { return micros - other.micros; }
};

enum class FrameId : std::uint8_t {
  Station1 = 1,
  Station2 = 2,
  Station3 = 3,
  Robot = 4,
  Common = 1,  // the common frame is station 1's frame
};

inline std::string frame_name(FrameId f) {
  switch (f) {
    case FrameId::Station1: return "station1";
    case FrameId::Station2: return "station2";
    case FrameId::Station3: return "station3";
    case FrameId::Robot: return "robot";
  }
  return "unknown";
}

// Station index 1..3 <-> FrameId.
inline FrameId station_frame(int index) {
  switch (index) {
    case 1: return FrameId::Station1;
    case 2: return FrameId::Station2;
    case 3: return FrameId::Station3;
  }
  throw ConfigError("station index out of range: " + std::to_string(index));
}

inline int station_index(FrameId f) {
  return static_cast<int>(f);
}

enum class Status : std::uint8_t {
  Ok = 0,
  PrismNotDetected = 1,
  PrismTooClose = 2,
  NotLevelled = 3,
  Invalid = 255,  // catch-all for unknown codes; treated as an error status
};

inline std::string status_name(Status s) {
  switch (s) {
    case Status::Ok: return "ok";
    case Status::PrismNotDetected: return "prism_not_detected";
    case Status::PrismTooClose: return "prism_too_close";
    case Status::NotLevelled: return "not_levelled";
    case Status::Invalid: return "invalid";
  }
  return "invalid";
}

Status status_from_name(const std::string& name);

// One total-station observation: polar coordinates of the tracked prism plus
// the client-side timestamp and instrument status.
struct RawMeasurement {
  FrameId station = FrameId::Station1;
  double ha = 0.0;     // horizontal angle, rad, [0, 2pi)
  double va = 0.0;     // vertical (zenith) angle, rad, [0, pi]
  double range = 0.0;  // meters
  Timestamp t_client;  // client clock
  Status status = Status::Ok;

  bool ok() const { return status == Status::Ok; }
};

// SE(3) element. Rotation kept as a unit quaternion; Euler angles appear only
// at reporting boundaries.
struct RigidTransform {
  Eigen::Quaterniond rotation = Eigen::Quaterniond::Identity();
  Point3 translation = Point3::Zero();

  RigidTransform() = default;
  RigidTransform(const Eigen::Quaterniond& q, const Point3& t)
      : rotation(q.normalized()), translation(t) {}

  static RigidTransform identity() { return {}; }

  Point3 apply(const Point3& p) const { return rotation * p + translation; }
  Point3 operator*(const Point3& p) const { return apply(p); }

  RigidTransform inverse() const {
    Eigen::Quaterniond qi = rotation.conjugate();
    return {qi, qi * (-translation)};
  }

  Eigen::Matrix4d matrix() const {
    Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
    m.topLeftCorner<3, 3>() = rotation.toRotationMatrix();
    m.topRightCorner<3, 1>() = translation;
    return m;
  }
};

// a*b maps x to a(b(x)). Renormalizes to keep unit-norm under long chains.
RigidTransform compose(const RigidTransform& a, const RigidTransform& b);

inline RigidTransform operator*(const RigidTransform& a, const RigidTransform& b) {
  return compose(a, b);
}

double distance(const Point3& a, const Point3& b);

// Geodesic rotation angle between two orientations, radians in [0, pi].
double rotation_angle(const Eigen::Quaterniond& a, const Eigen::Quaterniond& b);

// Z-Y-X (yaw, pitch, roll) angles used at reporting boundaries only.
// R = Rz(yaw) * Ry(pitch) * Rx(roll).
struct EulerZyx {
  double yaw = 0.0;
  double pitch = 0.0;
  double roll = 0.0;
};

EulerZyx to_euler_zyx(const Eigen::Quaterniond& q);
Eigen::Quaterniond from_euler_zyx(const EulerZyx& e);

// Wrap an angle difference to (-pi, pi] (shortest arc).
double wrap_angle(double rad);

// The three prisms expressed in the robot frame, with the lab-measured
// pairwise separations kept alongside as the precision reference.
struct PrismLayout {
  std::array<Point3, 3> points;
  double d12 = 0.0;
  double d13 = 0.0;
  double d23 = 0.0;

  PrismLayout() = default;
  // Distances are derived from the points; throws if the triangle is
  // degenerate (area <= 1e-4 m^2).
  explicit PrismLayout(const std::array<Point3, 3>& pts);

  const Point3& p1() const { return points[0]; }
  const Point3& p2() const { return points[1]; }
  const Point3& p3() const { return points[2]; }

  double reference_distance(int a, int b) const;  // a,b in 1..3
  Point3 centroid() const { return (points[0] + points[1] + points[2]) / 3.0; }
  double triangle_area() const;
};

// Mounting used by the bundled configs: the published inter-prism separations
// (0.987 / 0.681 / 0.815 m) placed flat at a small offset from the body origin.
PrismLayout default_prism_layout();

// Timestamped 6-DOF robot pose (robot -> common frame). When valid = false
// the pose fields are NaN-tagged and only the timestamp is meaningful.
struct PoseSample {
  Timestamp t;  // master clock
  RigidTransform pose;
  double residual_rms = 0.0;
  bool valid = false;

  static PoseSample invalid_at(Timestamp t) {
    PoseSample s;
    s.t = t;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    s.pose.rotation = Eigen::Quaterniond(nan, nan, nan, nan);
    s.pose.translation = Point3::Constant(nan);
    s.residual_rms = nan;
    s.valid = false;
    return s;
  }
};

}  // namespace gtf

#endif  // GTF_TYPES_HPP
