#ifndef GTF_GEOMETRY_HPP
#define GTF_GEOMETRY_HPP

#include <map>
#include <string>
#include <vector>

#include "gtf/types.hpp"

namespace gtf {

// How the vertical angle of a measurement is interpreted. Surveying
// instruments report a zenith angle; some foreign logs carry elevation.
enum class VerticalAngleConvention {
  Zenith,     // 0 = up, pi/2 = horizontal
  Elevation,  // 0 = horizontal, pi/2 = up
};

// Polar measurement -> Cartesian point in the station's own frame.
// Throws RejectedMeasurementError for non-Ok statuses.
Point3 spherical_to_cartesian(const RawMeasurement& m,
                              VerticalAngleConvention convention = VerticalAngleConvention::Zenith);

// Matched point pairs for rigid registration: `reference` holds the target
// points, `moving` the points to be transformed onto them.
struct PointCorrespondences {
  std::vector<Point3> reference;
  std::vector<Point3> moving;
};

// Least-squares rigid transform T minimizing sum_k |reference_k - T moving_k|^2
// (closed form via SVD of the cross-covariance; reflections corrected by the
// determinant sign fix so the rotation is always proper).
RigidTransform align_point_sets(const PointCorrespondences& c);

// Residual metrics of a fitted transform.
double alignment_rms(const PointCorrespondences& c, const RigidTransform& t);

// One marker as seen by one station, in that station's local frame.
struct MarkerObservation {
  std::string marker_id;
  int station = 1;  // 1..3
  Point3 position = Point3::Zero();
};

struct CalibrationResult {
  RigidTransform t12;  // station 2 frame -> station 1 (common) frame
  RigidTransform t13;  // station 3 frame -> station 1 (common) frame
  std::vector<double> residuals;  // per marker, both alignments concatenated
  double rms = 0.0;

  const RigidTransform& station_to_common(int station) const;
};

// Aligns stations 2 and 3 onto station 1 using markers matched by id.
// Every marker must be observed by all three stations.
CalibrationResult calibrate_stations(const std::vector<MarkerObservation>& markers);

// Express three prism measurements (taken in one station frame) in the robot
// frame. `robot_in_station` is the pose of the robot frame in that station's
// frame at measurement time.
PrismLayout calibrate_prism_layout(const std::array<Point3, 3>& measured,
                                   const RigidTransform& robot_in_station);

}  // namespace gtf

#endif  // GTF_GEOMETRY_HPP
