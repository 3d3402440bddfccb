#ifndef GTF_ANALYSIS_HPP
#define GTF_ANALYSIS_HPP

#include <map>
#include <string>
#include <vector>

#include "gtf/pipeline.hpp"
#include "gtf/stations.hpp"
#include "gtf/types.hpp"

namespace gtf {

// Inter-prism distance errors (measured minus lab reference) per timestamp.
// Defined only where all three prisms are available.
struct ErrorSeries {
  std::vector<Timestamp> t;
  std::vector<double> e12;
  std::vector<double> e13;
  std::vector<double> e23;

  std::size_t size() const { return t.size(); }
};

struct SeriesStats {
  double mean = 0.0;
  double stddev = 0.0;
  std::size_t count = 0;
};

SeriesStats series_stats(const std::vector<double>& values);

struct TimeInterval {
  double start_s = 0.0;
  double end_s = 0.0;
};

// Maximal intervals where both |v| and |omega| stay below the thresholds.
std::vector<TimeInterval> static_segments(const TrajectorySpec& traj,
                                          double speed_threshold_mps = 0.01,
                                          double angular_threshold_radps = 0.01);
// Sampled-signal variant for odometry-style inputs.
std::vector<TimeInterval> static_segments(const std::vector<double>& t_s,
                                          const std::vector<double>& linear_speed,
                                          const std::vector<double>& angular_speed,
                                          double speed_threshold_mps = 0.01,
                                          double angular_threshold_radps = 0.01);

// Errors from interpolated triplets (only valid ones contribute).
ErrorSeries inter_prism_errors(const std::vector<InterpolatedTriplet>& triplets,
                               const PrismLayout& layout);

// Raw-track variant used for stationary intervals: samples are paired by
// index, so it is only meaningful while the robot stands still.
ErrorSeries inter_prism_errors(const std::array<PrismTrack, 3>& tracks,
                               const PrismLayout& layout);

struct BinAxis {
  double lo = 0.0;
  double hi = 1.0;
  int bins = 8;
};

// Mean error per (x, y) cell. Samples outside an axis range land in the edge
// bin so the extremes stay visible.
struct BinnedGrid {
  BinAxis x_axis;
  BinAxis y_axis;
  std::vector<double> mean;  // row-major [iy * nx + ix]; NaN for empty cells
  std::vector<int> count;

  double cell_mean(int ix, int iy) const { return mean[iy * x_axis.bins + ix]; }
  int cell_count(int ix, int iy) const { return count[iy * x_axis.bins + ix]; }
};

BinnedGrid bin_by_dynamics(const std::vector<double>& errors, const std::vector<double>& x,
                           const std::vector<double>& y, const BinAxis& x_axis,
                           const BinAxis& y_axis);

// Pose-uncertainty sweep: Gaussian noise on the measured prism positions over
// a sigma grid, 1000 alignments per sigma. Euler errors are Z-Y-X, shortest
// arc. Signed per-axis statistics keep the bias visible; the norm/angle means
// summarize each sigma.
struct PerturbationCurve {
  std::vector<double> sigma_m;
  std::array<std::vector<double>, 3> mean_position;  // x, y, z (signed)
  std::array<std::vector<double>, 3> std_position;
  std::array<std::vector<double>, 3> mean_euler;  // yaw, pitch, roll (signed)
  std::array<std::vector<double>, 3> std_euler;
  std::vector<double> mean_norm;       // mean |translation error|
  std::vector<double> mean_angle;      // mean geodesic rotation error
  std::vector<double> mean_abs_euler;  // mean |euler error| averaged over the axes
};

struct PerturbationParams {
  double sigma_max_m = 0.400;
  double sigma_step_m = 0.004;
  int trials = 1000;
  int parallel = 1;
};

PerturbationCurve perturbation_study(const PrismLayout& layout, std::uint64_t seed,
                                     const PerturbationParams& params = {});

// One GNSS position fix as read from a receiver log.
struct GnssFix {
  Timestamp t;
  Point3 position = Point3::Zero();
  std::string regime = "open";
};

struct GnssCompareResult {
  std::vector<Timestamp> t;        // matched epochs
  std::vector<double> abs_errors;  // | |r1 - r2| - reference |
  std::vector<std::string> regimes;
  std::map<std::string, SeriesStats> by_regime;
  SeriesStats overall;
  int dropped_epochs = 0;  // unpaired timestamps across the two logs
};

GnssCompareResult gnss_compare(const std::vector<GnssFix>& log1, const std::vector<GnssFix>& log2,
                               double reference_m);

// Uniform histogram of a sample set (for the report CSVs).
struct Histogram {
  double lo = 0.0;
  double hi = 1.0;
  std::vector<int> counts;
};

Histogram histogram(const std::vector<double>& values, double lo, double hi, int bins);

}  // namespace gtf

#endif  // GTF_ANALYSIS_HPP
