#ifndef GTF_CONFIG_HPP
#define GTF_CONFIG_HPP

#include <array>
#include <string>

#include "gtf/analysis.hpp"
#include "gtf/geometry.hpp"
#include "gtf/pipeline.hpp"
#include "gtf/radio.hpp"
#include "gtf/rig.hpp"
#include "gtf/stations.hpp"

namespace gtf {

struct MarkersConfig {
  int count = 6;
  double radius_m = 50.0;
  double sigma_m = 0.0;  // single-measurement mode treated as exact by default
};

struct AnalysisConfig {
  std::string mode = "static";  // static | dynamic | perturb | gnss
  double speed_threshold_mps = 0.01;
  double angular_threshold_radps = 0.01;
  BinAxis speed_axis{0.0, 1.0, 8};
  BinAxis accel_axis{-1.0, 1.0, 8};
  BinAxis angular_axis{0.0, 0.8, 8};
  int histogram_bins = 40;
  double histogram_half_width_m = 0.02;
  PerturbationParams perturbation;
};

// Input locations consumed by calibrate/solve/analyze. Relative paths resolve
// against the working directory; `gtf simulate --out DIR` writes these exact
// basenames into DIR.
struct PathsConfig {
  std::string measurements = "out/measurements.csv";
  std::string events = "out/events.csv";
  std::string gt_poses = "out/gt_poses.csv";
  std::string sync_state = "out/sync_state.json";
  std::string markers = "out/markers.csv";
  std::string calibration = "out/calibration.json";
  std::string poses = "out/poses.csv";
  std::string gnss1 = "out/gnss1.csv";
  std::string gnss2 = "out/gnss2.csv";
};

struct RunConfig {
  int schema = 1;
  std::uint64_t seed = 1;
  double duration_s = 600.0;
  TrajectorySpec trajectory;
  PrismLayout layout = default_prism_layout();
  std::array<StationModel, 3> stations;
  ChannelConfig radio;
  SyncParameters sync;
  InterpolationConfig interpolation;
  MarkersConfig markers;
  GnssConfig gnss;
  AnalysisConfig analysis;
  PathsConfig paths;
  VerticalAngleConvention va_convention = VerticalAngleConvention::Zenith;

  void validate() const;
};

// Built-in defaults: the documented field setup with a start-stop demo
// trajectory.
RunConfig default_run_config();

// Loads and validates a config document. The "trajectory" entry may be an
// inline object or a path to a trajectory JSON (resolved against the config
// file's directory).
RunConfig load_run_config(const std::string& path);

// Serializes a config (used to generate the bundled examples).
void write_run_config(const std::string& path, const RunConfig& config);

}  // namespace gtf

#endif  // GTF_CONFIG_HPP
