#include "gtf/types.hpp"

namespace gtf {

Status status_from_name(const std::string& name) {
  if (name == "ok") return Status::Ok;
  if (name == "prism_not_detected") return Status::PrismNotDetected;
  if (name == "prism_too_close") return Status::PrismTooClose;
  if (name == "not_levelled") return Status::NotLevelled;
  return Status::Invalid;
}

RigidTransform compose(const RigidTransform& a, const RigidTransform& b) {
  Eigen::Quaterniond q = a.rotation * b.rotation;
  q.normalize();
  return {q, a.rotation * b.translation + a.translation};
}

double distance(const Point3& a, const Point3& b) {
  return (a - b).norm();
}

double rotation_angle(const Eigen::Quaterniond& a, const Eigen::Quaterniond& b) {
  // atan2 form stays accurate for tiny angles where acos loses precision.
  const Eigen::Quaterniond d = a.normalized().conjugate() * b.normalized();
  return 2.0 * std::atan2(d.vec().norm(), std::abs(d.w()));
}

EulerZyx to_euler_zyx(const Eigen::Quaterniond& q) {
  const Eigen::Matrix3d r = q.normalized().toRotationMatrix();
  EulerZyx e;
  // Guard asin against roundoff just outside [-1, 1].
  const double sp = std::clamp(-r(2, 0), -1.0, 1.0);
  e.pitch = std::asin(sp);
  if (std::abs(sp) < 1.0 - 1e-12) {
    e.yaw = std::atan2(r(1, 0), r(0, 0));
    e.roll = std::atan2(r(2, 1), r(2, 2));
  } else {
    // Gimbal lock: fold everything into yaw.
    e.yaw = std::atan2(-r(0, 1), r(1, 1));
    e.roll = 0.0;
  }
  return e;
}

Eigen::Quaterniond from_euler_zyx(const EulerZyx& e) {
  return Eigen::Quaterniond(Eigen::AngleAxisd(e.yaw, Eigen::Vector3d::UnitZ()) *
                            Eigen::AngleAxisd(e.pitch, Eigen::Vector3d::UnitY()) *
                            Eigen::AngleAxisd(e.roll, Eigen::Vector3d::UnitX()));
}

double wrap_angle(double rad) {
  double a = std::fmod(rad, 2.0 * M_PI);
  if (a <= -M_PI) a += 2.0 * M_PI;
  if (a > M_PI) a -= 2.0 * M_PI;
  return a;
}

PrismLayout::PrismLayout(const std::array<Point3, 3>& pts) : points(pts) {
  d12 = (points[0] - points[1]).norm();
  d13 = (points[0] - points[2]).norm();
  d23 = (points[1] - points[2]).norm();
  if (triangle_area() <= 1e-4) {
    throw DegenerateGeometryError("prism layout is (near-)collinear");
  }
}

double PrismLayout::reference_distance(int a, int b) const {
  const int lo = std::min(a, b);
  const int hi = std::max(a, b);
  if (lo == 1 && hi == 2) return d12;
  if (lo == 1 && hi == 3) return d13;
  if (lo == 2 && hi == 3) return d23;
  throw ConfigError("prism pair out of range");
}

double PrismLayout::triangle_area() const {
  return 0.5 * (points[1] - points[0]).cross(points[2] - points[0]).norm();
}

PrismLayout default_prism_layout() {
  // Triangle with sides d12/d13/d23 constructed in a canonical plane, then
  // shifted so the prism centroid sits at (0.05, 0, 0.15) in the body frame
  // (prism plate slightly above and ahead of the body origin).
  const double d12 = 0.987;
  const double d13 = 0.681;
  const double d23 = 0.815;
  const double x3 = (d12 * d12 + d13 * d13 - d23 * d23) / (2.0 * d12);
  const double y3 = std::sqrt(d13 * d13 - x3 * x3);
  const Point3 a(0.0, 0.0, 0.0);
  const Point3 b(d12, 0.0, 0.0);
  const Point3 c(x3, y3, 0.0);
  const Point3 centroid = (a + b + c) / 3.0;
  const Point3 target(0.05, 0.0, 0.15);
  const Point3 shift = target - centroid;
  return PrismLayout({a + shift, b + shift, c + shift});
}

}  // namespace gtf
