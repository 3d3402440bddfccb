#ifndef GTF_IO_HPP
#define GTF_IO_HPP

#include <array>
#include <string>
#include <vector>

#include "gtf/analysis.hpp"
#include "gtf/geometry.hpp"
#include "gtf/pipeline.hpp"
#include "gtf/radio.hpp"
#include "gtf/rig.hpp"
#include "gtf/stations.hpp"
#include "gtf/timesync.hpp"
#include "gtf/types.hpp"

namespace gtf::io {

// File formats. All CSVs carry a header row; timestamps are integer
// microseconds, angles are radians printed with 9 decimals, meters with 6.
// JSON documents carry a "schema" field.

// columns: station,t_client_us,ha_rad,va_rad,range_m,status
void write_measurement_log(const std::string& path, const std::vector<RawMeasurement>& log);
std::vector<RawMeasurement> read_measurement_log(const std::string& path);

// columns: sim_time_us,event_kind,src,dst,bytes,dropped
void write_event_log(const std::string& path, const std::vector<ChannelEvent>& events);
std::vector<ChannelEvent> read_event_log(const std::string& path);

// columns: marker_id,station,x,y,z
void write_marker_file(const std::string& path, const std::vector<MarkerObservation>& markers);
std::vector<MarkerObservation> read_marker_file(const std::string& path);

// columns: t_us,valid,x,y,z,qw,qx,qy,qz,residual_rms_m
void write_pose_log(const std::string& path, const std::vector<PoseSample>& poses);
std::vector<PoseSample> read_pose_log(const std::string& path);

// columns: t_us,x,y,z,regime
void write_gnss_log(const std::string& path, const std::vector<GnssFix>& fixes);
std::vector<GnssFix> read_gnss_log(const std::string& path);

// calibration document: t12/t13 as quaternion+translation plus residuals
void write_calibration(const std::string& path, const CalibrationResult& calib);
CalibrationResult read_calibration(const std::string& path);

// per-station skew estimates and correction timelines
void write_sync_state(const std::string& path, const std::array<SkewEstimate, 3>& skews,
                      const std::array<std::vector<SkewTimelineEntry>, 3>& timelines);
struct SyncState {
  std::array<SkewEstimate, 3> skews;
  std::array<std::vector<SkewTimelineEntry>, 3> timelines;
};
SyncState read_sync_state(const std::string& path);

// trajectory document: start pose + speed segments (+ derived waypoints)
void write_trajectory(const std::string& path, const TrajectorySpec& traj);
TrajectorySpec read_trajectory(const std::string& path);

// report CSVs (figure analogs)
void write_inter_prism_histograms(const std::string& path, const ErrorSeries& series,
                                  int bins, double half_width_m);
void write_inter_prism_stats(const std::string& path, const ErrorSeries& series,
                             const PrismLayout& layout);
void write_dynamics_grid(const std::string& path, const BinnedGrid& grid,
                         const std::string& x_name);
void write_perturbation_curves(const std::string& path, const PerturbationCurve& curve);

struct GnssSummaryRow {
  std::string regime;
  std::string sensor;  // "total_station" or "gnss"
  double mu_m = 0.0;
  double sigma_m = 0.0;
  std::size_t count = 0;
};
void write_gnss_summary(const std::string& path, const std::vector<GnssSummaryRow>& rows);

}  // namespace gtf::io

#endif  // GTF_IO_HPP
