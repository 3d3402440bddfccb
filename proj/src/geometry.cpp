#include "gtf/geometry.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <set>

namespace gtf {

Point3 spherical_to_cartesian(const RawMeasurement& m, VerticalAngleConvention convention) {
  if (!m.ok()) {
    throw RejectedMeasurementError("measurement rejected: status " + status_name(m.status));
  }
  const double zenith =
      convention == VerticalAngleConvention::Zenith ? m.va : M_PI / 2.0 - m.va;
  const double s = std::sin(zenith);
  return Point3(m.range * s * std::cos(m.ha),
                m.range * s * std::sin(m.ha),
                m.range * std::cos(zenith));
}

namespace {

// Collinearity check: largest point-to-line cross product over the best-fit
// direction. Cheap version: compare second singular value of the centered set.
bool is_degenerate(const std::vector<Point3>& pts) {
  Point3 centroid = Point3::Zero();
  for (const auto& p : pts) centroid += p;
  centroid /= static_cast<double>(pts.size());
  Eigen::MatrixXd centered(3, pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) centered.col(i) = pts[i] - centroid;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(centered);
  const auto& sv = svd.singularValues();
  return sv(1) < 1e-9 * std::max(1.0, sv(0));
}

}  // namespace

RigidTransform align_point_sets(const PointCorrespondences& c) {
  if (c.reference.size() != c.moving.size()) {
    throw CorrespondenceError("point lists differ in length");
  }
  const std::size_t n = c.reference.size();
  if (n < 3) {
    throw InsufficientPointsError("need at least 3 correspondences, got " + std::to_string(n));
  }
  if (is_degenerate(c.reference) || is_degenerate(c.moving)) {
    throw DegenerateGeometryError("correspondences are (near-)collinear");
  }

  Point3 ref_centroid = Point3::Zero();
  Point3 mov_centroid = Point3::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    ref_centroid += c.reference[i];
    mov_centroid += c.moving[i];
  }
  ref_centroid /= static_cast<double>(n);
  mov_centroid /= static_cast<double>(n);

  Eigen::Matrix3d h = Eigen::Matrix3d::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    h += (c.moving[i] - mov_centroid) * (c.reference[i] - ref_centroid).transpose();
  }

  Eigen::JacobiSVD<Eigen::Matrix3d> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d u = svd.matrixU();
  Eigen::Matrix3d v = svd.matrixV();
  Eigen::Matrix3d r = v * u.transpose();
  if (r.determinant() < 0) {
    // Reflection: flip the direction of least constraint.
    v.col(2) *= -1.0;
    r = v * u.transpose();
  }

  Eigen::Quaterniond q(r);
  q.normalize();
  return {q, ref_centroid - q * mov_centroid};
}

double alignment_rms(const PointCorrespondences& c, const RigidTransform& t) {
  double ss = 0.0;
  for (std::size_t i = 0; i < c.reference.size(); ++i) {
    ss += (c.reference[i] - t.apply(c.moving[i])).squaredNorm();
  }
  return std::sqrt(ss / static_cast<double>(c.reference.size()));
}

const RigidTransform& CalibrationResult::station_to_common(int station) const {
  static const RigidTransform kIdentity;
  switch (station) {
    case 1: return kIdentity;
    case 2: return t12;
    case 3: return t13;
  }
  throw ConfigError("station index out of range: " + std::to_string(station));
}

CalibrationResult calibrate_stations(const std::vector<MarkerObservation>& markers) {
  std::map<std::string, std::array<std::pair<bool, Point3>, 3>> by_id;
  for (const auto& m : markers) {
    if (m.station < 1 || m.station > 3) {
      throw ConfigError("marker station index out of range");
    }
    auto& slot = by_id[m.marker_id][m.station - 1];
    if (slot.first) {
      throw CorrespondenceError("duplicate observation of marker '" + m.marker_id +
                                "' by station " + std::to_string(m.station));
    }
    slot = {true, m.position};
  }

  std::vector<std::string> ids;
  for (const auto& [id, obs] : by_id) {
    for (int s = 0; s < 3; ++s) {
      if (!obs[s].first) {
        throw CorrespondenceError("marker '" + id + "' missing from station " +
                                  std::to_string(s + 1));
      }
    }
    ids.push_back(id);
  }
  if (ids.size() < 3) {
    throw InsufficientPointsError("need at least 3 matched markers, got " +
                                  std::to_string(ids.size()));
  }
  std::sort(ids.begin(), ids.end());

  PointCorrespondences c12, c13;
  for (const auto& id : ids) {
    const auto& obs = by_id[id];
    c12.reference.push_back(obs[0].second);
    c12.moving.push_back(obs[1].second);
    c13.reference.push_back(obs[0].second);
    c13.moving.push_back(obs[2].second);
  }

  CalibrationResult result;
  result.t12 = align_point_sets(c12);
  result.t13 = align_point_sets(c13);

  double ss = 0.0;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const double r2 = (c12.reference[i] - result.t12.apply(c12.moving[i])).norm();
    const double r3 = (c13.reference[i] - result.t13.apply(c13.moving[i])).norm();
    result.residuals.push_back(r2);
    result.residuals.push_back(r3);
    ss += r2 * r2 + r3 * r3;
  }
  result.rms = std::sqrt(ss / static_cast<double>(result.residuals.size()));
  return result;
}

PrismLayout calibrate_prism_layout(const std::array<Point3, 3>& measured,
                                   const RigidTransform& robot_in_station) {
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      if ((measured[i] - measured[j]).norm() < 1e-9) {
        throw DegenerateGeometryError("duplicate prism measurement");
      }
    }
  }
  const RigidTransform station_to_robot = robot_in_station.inverse();
  std::array<Point3, 3> in_robot;
  for (int i = 0; i < 3; ++i) in_robot[i] = station_to_robot.apply(measured[i]);
  return PrismLayout(in_robot);
}

}  // namespace gtf
