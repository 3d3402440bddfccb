#include "gtf/stations.hpp"

#include <cmath>

namespace gtf {

double TrajectorySpec::duration_s() const {
  double d = 0.0;
  for (const auto& s : segments) d += s.duration_s;
  return d;
}

void TrajectorySpec::validate() const {
  if (segments.empty()) throw ConfigError("trajectory has no segments");
  for (const auto& s : segments) {
    if (s.duration_s <= 0.0) throw ConfigError("trajectory segment duration must be positive");
    if (std::abs(s.linear_mps) > kMaxLinearMps) {
      throw ConfigError("trajectory linear speed exceeds the robot limit");
    }
    if (std::abs(s.angular_radps) > kMaxAngularRadps) {
      throw ConfigError("trajectory angular speed exceeds the robot limit");
    }
    if (s.gnss_regime != "open" && s.gnss_regime != "forest") {
      throw ConfigError("unknown gnss regime '" + s.gnss_regime + "'");
    }
  }
}

namespace {

struct PlanarPose {
  double x, y, yaw;
};

// Advance a unicycle by tau seconds within one constant-velocity segment.
PlanarPose advance(const PlanarPose& p, double v, double w, double tau) {
  if (std::abs(w) < 1e-12) {
    return {p.x + v * tau * std::cos(p.yaw), p.y + v * tau * std::sin(p.yaw), p.yaw};
  }
  const double yaw1 = p.yaw + w * tau;
  return {p.x + v / w * (std::sin(yaw1) - std::sin(p.yaw)),
          p.y - v / w * (std::cos(yaw1) - std::cos(p.yaw)), yaw1};
}

}  // namespace

RigidTransform TrajectorySpec::pose_at_seconds(double t_s) const {
  const double total = duration_s();
  if (t_s < -1e-9 || t_s > total + 1e-9) {
    throw RangeError("trajectory query at " + std::to_string(t_s) + " s outside [0, " +
                     std::to_string(total) + "]");
  }
  t_s = std::clamp(t_s, 0.0, total);

  PlanarPose p{start_position.x(), start_position.y(), start_yaw};
  double remaining = t_s;
  for (const auto& seg : segments) {
    const double tau = std::min(remaining, seg.duration_s);
    p = advance(p, seg.linear_mps, seg.angular_radps, tau);
    remaining -= tau;
    if (remaining <= 0.0) break;
  }
  Eigen::Quaterniond q(Eigen::AngleAxisd(p.yaw, Eigen::Vector3d::UnitZ()));
  return {q, Point3(p.x, p.y, start_position.z())};
}

const TrajectorySegment& TrajectorySpec::segment_at(double t_s) const {
  if (segments.empty()) throw ConfigError("trajectory has no segments");
  double acc = 0.0;
  for (const auto& seg : segments) {
    acc += seg.duration_s;
    if (t_s < acc) return seg;
  }
  return segments.back();
}

std::vector<double> TrajectorySpec::boundary_times() const {
  std::vector<double> times{0.0};
  double acc = 0.0;
  for (const auto& seg : segments) {
    acc += seg.duration_s;
    times.push_back(acc);
  }
  return times;
}

std::vector<TrajectorySpec::Waypoint> TrajectorySpec::waypoints() const {
  std::vector<Waypoint> wps;
  PlanarPose p{start_position.x(), start_position.y(), start_yaw};
  double t = 0.0;
  wps.push_back({t, Point3(p.x, p.y, start_position.z()), p.yaw});
  for (const auto& seg : segments) {
    p = advance(p, seg.linear_mps, seg.angular_radps, seg.duration_s);
    t += seg.duration_s;
    wps.push_back({t, Point3(p.x, p.y, start_position.z()), p.yaw});
  }
  return wps;
}

TrajectorySpec TrajectorySpec::extended_to(double duration_s_target) const {
  TrajectorySpec out = *this;
  const double total = duration_s();
  if (duration_s_target > total) {
    TrajectorySegment stop;
    stop.duration_s = duration_s_target - total;
    stop.gnss_regime = segments.empty() ? "open" : segments.back().gnss_regime;
    out.segments.push_back(stop);
  }
  return out;
}

void StationModel::validate() const {
  if (index < 1 || index > 3) throw ConfigError("station index must be 1..3");
  if (rate_hz <= 0.0) throw ConfigError("station rate must be positive");
  if (range_sigma_m < 0.0 || angle_sigma_rad < 0.0) {
    throw ConfigError("station noise sigmas must be non-negative");
  }
  if (loss_probability < 0.0 || loss_probability > 1.0) {
    throw ConfigError("loss probability must be in [0, 1]");
  }
  if (max_range_m <= min_range_m) throw ConfigError("max range must exceed min range");
}

RigidTransform StationModel::local_to_common() const {
  Eigen::Quaterniond q(Eigen::AngleAxisd(yaw_rad, Eigen::Vector3d::UnitZ()));
  return {q, position};
}

Timestamp StationModel::client_clock(std::int64_t sim_us) const {
  const double drift = clock_drift_ppm * 1e-6 * static_cast<double>(sim_us);
  return Timestamp(sim_us + clock_offset_us + std::llround(drift));
}

Point3 prism_world_position(const TrajectorySpec& traj, const PrismLayout& layout,
                            int prism_index, double t_s) {
  if (prism_index < 1 || prism_index > 3) throw ConfigError("prism index must be 1..3");
  return traj.pose_at_seconds(t_s).apply(layout.points[prism_index - 1]);
}

Point3 lagged_prism_position(const TrajectorySpec& traj, const PrismLayout& layout,
                             int prism_index, double t_s, double tau_s) {
  if (tau_s <= 0.0) return prism_world_position(traj, layout, prism_index, t_s);

  // First-order tracker: integrate x' = (target - x) / tau over the window
  // where the exponential weight is non-negligible, with midpoint sampling.
  const double window = 12.0 * tau_s;
  const double t0 = std::max(0.0, t_s - window);
  Point3 x = prism_world_position(traj, layout, prism_index, t0);
  const double h = std::min(0.002, tau_s / 10.0);
  double s = t0;
  while (s + 1e-12 < t_s) {
    const double step = std::min(h, t_s - s);
    const double alpha = 1.0 - std::exp(-step / tau_s);
    const Point3 target = prism_world_position(traj, layout, prism_index, s + step / 2.0);
    x += alpha * (target - x);
    s += step;
  }
  return x;
}

RawMeasurement observe(const StationModel& station, const TrajectorySpec& traj,
                       const PrismLayout& layout, int prism_index, std::int64_t sim_us,
                       std::mt19937_64& rng, bool lost_lock) {
  RawMeasurement m;
  m.station = station_frame(station.index);
  m.t_client = station.client_clock(sim_us);

  const double t_s = static_cast<double>(sim_us) * 1e-6;
  const Point3 world =
      lagged_prism_position(traj, layout, prism_index, t_s, station.lag_tau_s);
  const Point3 local = station.local_to_common().inverse().apply(world);
  const double true_range = local.norm();

  if (lost_lock || true_range > station.max_range_m) {
    m.status = Status::PrismNotDetected;
    return m;
  }
  if (true_range < station.min_range_m) {
    m.status = Status::PrismTooClose;
    return m;
  }

  const double zenith = std::acos(std::clamp(local.z() / true_range, -1.0, 1.0));
  double ha = std::atan2(local.y(), local.x());

  std::normal_distribution<double> angle_noise(0.0, station.angle_sigma_rad);
  std::normal_distribution<double> range_noise(0.0, station.range_sigma_m);
  ha += angle_noise(rng);
  double va = zenith + angle_noise(rng);
  double range = true_range + range_noise(rng);

  if (ha < 0.0) ha += 2.0 * M_PI;
  if (ha >= 2.0 * M_PI) ha -= 2.0 * M_PI;
  va = std::clamp(va, 0.0, M_PI);

  m.status = Status::Ok;
  m.ha = ha;
  m.va = va;
  m.range = range;
  return m;
}

std::vector<GnssEpoch> simulate_gnss_pair(const TrajectorySpec& traj, const GnssConfig& config,
                                          double duration_s, std::mt19937_64 rng) {
  if ((config.antenna_offsets[0] - config.antenna_offsets[1]).norm() < 1e-9) {
    throw ConfigError("gnss antenna offsets must be distinct");
  }
  std::vector<GnssEpoch> epochs;
  const std::int64_t period_us = std::llround(1e6 / config.rate_hz);
  const std::int64_t end_us = std::llround(duration_s * 1e6);
  std::normal_distribution<double> unit(0.0, 1.0);
  for (std::int64_t t = 0; t <= end_us; t += period_us) {
    const double t_s = static_cast<double>(t) * 1e-6;
    const RigidTransform pose = traj.pose_at_seconds(t_s);
    GnssEpoch e;
    e.t = Timestamp(t);
    e.regime = traj.regime_at(std::min(t_s, traj.duration_s() - 1e-9));
    const double sigma =
        e.regime == "forest" ? config.sigma_forest_m : config.sigma_open_m;
    auto noisy = [&](const Point3& offset) {
      Point3 p = pose.apply(offset);
      return Point3(p.x() + sigma * unit(rng), p.y() + sigma * unit(rng),
                    p.z() + sigma * unit(rng));
    };
    e.receiver1 = noisy(config.antenna_offsets[0]);
    e.receiver2 = noisy(config.antenna_offsets[1]);
    epochs.push_back(e);
  }
  return epochs;
}

}  // namespace gtf
