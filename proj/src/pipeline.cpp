#include "gtf/pipeline.hpp"

#include <algorithm>
#include <cmath>

namespace gtf {

std::vector<RawMeasurement> gate(const std::vector<RawMeasurement>& measurements) {
  std::vector<RawMeasurement> out;
  out.reserve(measurements.size());
  for (const auto& m : measurements) {
    if (m.ok()) out.push_back(m);
  }
  return out;
}

std::array<PrismTrack, 3> unify_frames(const std::vector<RawMeasurement>& gated,
                                       const CalibrationResult& calib,
                                       const std::array<SkewEstimate, 3>& skews,
                                       VerticalAngleConvention convention) {
  std::array<PrismTrack, 3> tracks;
  for (int k = 0; k < 3; ++k) tracks[k].prism_index = k + 1;

  for (const auto& m : gated) {
    const int k = station_index(m.station);
    const Point3 local = spherical_to_cartesian(m, convention);
    const Point3 common = calib.station_to_common(k).apply(local);
    const Timestamp t = apply_correction(m.t_client, skews[k - 1]);
    tracks[k - 1].samples.emplace_back(t, common);
  }

  for (auto& track : tracks) {
    std::stable_sort(track.samples.begin(), track.samples.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    // Enforce strictly increasing timestamps; equal stamps keep the first.
    auto last = std::unique(track.samples.begin(), track.samples.end(),
                            [](const auto& a, const auto& b) { return a.first == b.first; });
    track.samples.erase(last, track.samples.end());
  }
  return tracks;
}

namespace {

struct BracketResult {
  bool found = false;
  std::int64_t gap_us = 0;
  Point3 value = Point3::Zero();
};

BracketResult sample_track(const PrismTrack& track, std::int64_t t_us) {
  const auto& s = track.samples;
  BracketResult r;
  if (s.empty()) return r;

  auto it = std::lower_bound(s.begin(), s.end(), t_us, [](const auto& sample, std::int64_t t) {
    return sample.first.micros < t;
  });
  if (it == s.end()) return r;
  if (it->first.micros == t_us) {
    r.found = true;
    r.gap_us = 0;
    r.value = it->second;
    return r;
  }
  if (it == s.begin()) return r;

  const auto& hi = *it;
  const auto& lo = *(it - 1);
  r.found = true;
  r.gap_us = hi.first.micros - lo.first.micros;
  const double alpha = static_cast<double>(t_us - lo.first.micros) /
                       static_cast<double>(hi.first.micros - lo.first.micros);
  r.value = lo.second + alpha * (hi.second - lo.second);
  return r;
}

std::vector<InterpolatedTriplet> interpolate_lenient(const std::array<PrismTrack, 3>& tracks,
                                                     const InterpolationConfig& cfg) {
  cfg.validate();
  const std::int64_t step = cfg.step_us();
  const std::int64_t threshold = cfg.outage_threshold_us();

  // Grid span from the tracks that do carry data.
  bool any = false;
  std::int64_t latest_first = 0;
  std::int64_t earliest_last = 0;
  for (const auto& track : tracks) {
    if (track.samples.size() < 2) continue;
    const std::int64_t first = track.samples.front().first.micros;
    const std::int64_t last = track.samples.back().first.micros;
    if (!any) {
      latest_first = first;
      earliest_last = last;
      any = true;
    } else {
      latest_first = std::max(latest_first, first);
      earliest_last = std::min(earliest_last, last);
    }
  }
  if (!any) return {};

  // Grid origin: latest first sample, snapped up to the step grid.
  const std::int64_t t0 = ((latest_first + step - 1) / step) * step;

  std::vector<InterpolatedTriplet> out;
  for (std::int64_t t = t0; t <= earliest_last; t += step) {
    InterpolatedTriplet triplet;
    triplet.t = Timestamp(t);
    triplet.valid = true;
    for (int k = 0; k < 3; ++k) {
      const BracketResult r = sample_track(tracks[k], t);
      if (!r.found || r.gap_us > threshold) {
        triplet.valid = false;
        triplet.prisms[k] = Point3::Constant(std::numeric_limits<double>::quiet_NaN());
      } else {
        triplet.prisms[k] = r.value;
      }
    }
    out.push_back(triplet);
  }
  return out;
}

}  // namespace

std::vector<InterpolatedTriplet> interpolate(const std::array<PrismTrack, 3>& tracks,
                                             const InterpolationConfig& cfg) {
  for (const auto& track : tracks) {
    if (track.samples.size() < 2) {
      throw InsufficientDataError("prism track " + std::to_string(track.prism_index) +
                                  " has fewer than 2 samples");
    }
  }
  return interpolate_lenient(tracks, cfg);
}

PoseSample solve_pose(Timestamp t, const std::array<Point3, 3>& triplet,
                      const PrismLayout& layout) {
  for (const auto& p : triplet) {
    if (!p.allFinite()) return PoseSample::invalid_at(t);
  }
  PointCorrespondences c;
  c.reference.assign(triplet.begin(), triplet.end());
  c.moving.assign(layout.points.begin(), layout.points.end());
  PoseSample sample;
  sample.t = t;
  try {
    sample.pose = align_point_sets(c);
  } catch (const NumericalError&) {
    return PoseSample::invalid_at(t);
  }
  sample.residual_rms = alignment_rms(c, sample.pose);
  sample.valid = true;
  return sample;
}

PipelineResult run_pipeline(const std::vector<RawMeasurement>& log,
                            const CalibrationResult& calib,
                            const std::array<SkewEstimate, 3>& skews, const PrismLayout& layout,
                            const InterpolationConfig& cfg, VerticalAngleConvention convention) {
  PipelineResult result;
  result.tracks = unify_frames(gate(log), calib, skews, convention);
  result.triplets = interpolate_lenient(result.tracks, cfg);
  result.poses.reserve(result.triplets.size());
  for (const auto& triplet : result.triplets) {
    if (!triplet.valid) {
      result.poses.push_back(PoseSample::invalid_at(triplet.t));
    } else {
      result.poses.push_back(solve_pose(triplet.t, triplet.prisms, layout));
    }
  }
  return result;
}

}  // namespace gtf
