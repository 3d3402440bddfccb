#ifndef GTF_STATIONS_HPP
#define GTF_STATIONS_HPP

#include <array>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "gtf/types.hpp"

namespace gtf {

// Piecewise-constant velocity segment of the ground-truth trajectory
// (unicycle model: forward speed + yaw rate). Stop intervals are segments
// with both speeds zero.
struct TrajectorySegment {
  double duration_s = 0.0;
  double linear_mps = 0.0;
  double angular_radps = 0.0;
  std::string gnss_regime = "open";  // "open" or "forest"
};

// Ground-truth robot trajectory: a start pose plus speed segments. Waypoints
// (the poses at segment boundaries) are derived, not stored.
struct TrajectorySpec {
  Point3 start_position = Point3::Zero();
  double start_yaw = 0.0;
  std::vector<TrajectorySegment> segments;

  static constexpr double kMaxLinearMps = 2.0;
  static constexpr double kMaxAngularRadps = 1.5;

  double duration_s() const;
  void validate() const;  // speed limits, segment durations, regime labels

  // Exact analytic pose (robot -> common) at t since trajectory start.
  // Throws RangeError outside [0, duration].
  RigidTransform pose_at_seconds(double t_s) const;
  RigidTransform pose_at(Timestamp t) const { return pose_at_seconds(t.seconds()); }

  const TrajectorySegment& segment_at(double t_s) const;
  double linear_speed_at(double t_s) const { return std::abs(segment_at(t_s).linear_mps); }
  double angular_speed_at(double t_s) const { return std::abs(segment_at(t_s).angular_radps); }
  const std::string& regime_at(double t_s) const { return segment_at(t_s).gnss_regime; }

  // Segment boundary times including 0 and the total duration.
  std::vector<double> boundary_times() const;

  struct Waypoint {
    double t_s;
    Point3 position;
    double yaw;
  };
  std::vector<Waypoint> waypoints() const;

  // Copy with a trailing stop segment so the span covers `duration_s`.
  TrajectorySpec extended_to(double duration_s) const;
};

// One total station: placement, measurement rates and noise, tracking-loss
// and pointing-lag behavior, plus the clock of the client computer wired to
// it. Station k tracks prism k.
struct StationModel {
  int index = 1;  // 1..3
  Point3 position = Point3::Zero();  // common frame; station 1 sits at the origin
  double yaw_rad = 0.0;              // local frame yaw within the common frame
  double rate_hz = 2.5;
  std::int64_t rate_jitter_us = 3000;
  double range_sigma_m = 0.002;
  double angle_sigma_rad = 4.848137e-6;  // 1 arcsecond
  double min_range_m = 2.0;
  double max_range_m = 800.0;
  double loss_probability = 0.0;  // per-sample chance of dropping lock
  double reacquisition_s = 0.5;   // outage length after a lost lock
  double lag_tau_s = 0.08;        // first-order pointing lag; 0 disables
  std::int64_t clock_offset_us = 0;
  double clock_drift_ppm = 0.0;

  void validate() const;

  RigidTransform local_to_common() const;
  Timestamp client_clock(std::int64_t sim_us) const;
};

// True prism position in the common frame at t.
Point3 prism_world_position(const TrajectorySpec& traj, const PrismLayout& layout,
                            int prism_index, double t_s);

// Prism position as seen by a tracker whose pointing follows the prism with a
// first-order lag of time constant tau. tau <= 0 returns the true position.
Point3 lagged_prism_position(const TrajectorySpec& traj, const PrismLayout& layout,
                             int prism_index, double t_s, double tau_s);

// One station observation of its prism at sim time t: true geometry, pointing
// lag, seeded Gaussian noise per sigma, range gating. The tracking-loss state
// machine lives with the caller (it spans samples); `lost_lock` forces the
// not-detected status.
RawMeasurement observe(const StationModel& station, const TrajectorySpec& traj,
                       const PrismLayout& layout, int prism_index, std::int64_t sim_us,
                       std::mt19937_64& rng, bool lost_lock = false);

// GNSS receiver pair riding on the robot, position noise per sky regime.
struct GnssConfig {
  bool enabled = false;
  double rate_hz = 5.0;
  std::array<Point3, 2> antenna_offsets = {Point3(-0.405, 0.0, 0.30),
                                           Point3(0.405, 0.0, 0.30)};
  double sigma_open_m = 0.00904;
  double sigma_forest_m = 0.417;
};

struct GnssEpoch {
  Timestamp t;  // master clock
  Point3 receiver1 = Point3::Zero();
  Point3 receiver2 = Point3::Zero();
  std::string regime = "open";
};

std::vector<GnssEpoch> simulate_gnss_pair(const TrajectorySpec& traj, const GnssConfig& config,
                                          double duration_s, std::mt19937_64 rng);

}  // namespace gtf

#endif  // GTF_STATIONS_HPP
