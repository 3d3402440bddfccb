#ifndef GTF_PIPELINE_HPP
#define GTF_PIPELINE_HPP

#include <array>
#include <vector>

#include "gtf/geometry.hpp"
#include "gtf/timesync.hpp"
#include "gtf/types.hpp"

namespace gtf {

// Time-ordered positions of one prism in the common frame, master clock.
struct PrismTrack {
  int prism_index = 1;
  std::vector<std::pair<Timestamp, Point3>> samples;  // strictly increasing t

  bool empty() const { return samples.empty(); }
  std::size_t size() const { return samples.size(); }
};

struct InterpolationConfig {
  double step_s = 0.050;            // 20 Hz reference grid
  double outage_threshold_s = 1.0;  // gaps longer than this invalidate the interval

  std::int64_t step_us() const { return std::llround(step_s * 1e6); }
  std::int64_t outage_threshold_us() const { return std::llround(outage_threshold_s * 1e6); }

  void validate() const {
    if (step_s <= 0.0) throw ConfigError("interpolation step must be positive");
    if (outage_threshold_s <= step_s) {
      throw ConfigError("outage threshold must exceed the interpolation step");
    }
  }
};

// Prism positions resampled onto one grid timestamp. Invalid when any track
// had no bracketing samples or a bracketing gap above the outage threshold.
struct InterpolatedTriplet {
  Timestamp t;
  std::array<Point3, 3> prisms;
  bool valid = false;
};

// Drops every measurement whose status is not Ok; order preserved.
std::vector<RawMeasurement> gate(const std::vector<RawMeasurement>& measurements);

// Converts gated measurements to Cartesian points in the common frame and
// maps client timestamps onto the master clock, one track per prism.
std::array<PrismTrack, 3> unify_frames(
    const std::vector<RawMeasurement>& gated, const CalibrationResult& calib,
    const std::array<SkewEstimate, 3>& skews,
    VerticalAngleConvention convention = VerticalAngleConvention::Zenith);

// Per-axis linear interpolation of all three tracks onto the uniform grid
// t0 + k*step, where t0 is the latest first-sample time snapped up to the
// step grid. Every track needs at least two samples.
std::vector<InterpolatedTriplet> interpolate(const std::array<PrismTrack, 3>& tracks,
                                             const InterpolationConfig& cfg);

// Least-squares pose of the robot (robot -> common) from one prism triplet.
// Unsolvable triplets yield an invalid sample rather than throwing.
PoseSample solve_pose(Timestamp t, const std::array<Point3, 3>& triplet,
                      const PrismLayout& layout);

// Full chain: gate -> unify -> interpolate -> solve. Grid points flagged
// invalid come out as invalid pose samples so downstream alignment stays
// index-stable. Tracks with under two samples are treated as permanently in
// outage instead of failing the run.
struct PipelineResult {
  std::vector<PoseSample> poses;
  std::vector<InterpolatedTriplet> triplets;
  std::array<PrismTrack, 3> tracks;
};

PipelineResult run_pipeline(const std::vector<RawMeasurement>& log,
                            const CalibrationResult& calib,
                            const std::array<SkewEstimate, 3>& skews, const PrismLayout& layout,
                            const InterpolationConfig& cfg,
                            VerticalAngleConvention convention = VerticalAngleConvention::Zenith);

}  // namespace gtf

#endif  // GTF_PIPELINE_HPP
