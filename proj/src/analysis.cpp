#include "gtf/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "gtf/rng.hpp"

namespace gtf {

SeriesStats series_stats(const std::vector<double>& values) {
  SeriesStats s;
  s.count = values.size();
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.stddev = values.size() > 1 ? std::sqrt(ss / static_cast<double>(values.size() - 1)) : 0.0;
  return s;
}

std::vector<TimeInterval> static_segments(const TrajectorySpec& traj, double speed_threshold_mps,
                                          double angular_threshold_radps) {
  std::vector<TimeInterval> out;
  double t = 0.0;
  for (const auto& seg : traj.segments) {
    const bool still = std::abs(seg.linear_mps) < speed_threshold_mps &&
                       std::abs(seg.angular_radps) < angular_threshold_radps;
    if (still) {
      if (!out.empty() && std::abs(out.back().end_s - t) < 1e-12) {
        out.back().end_s = t + seg.duration_s;  // merge adjacent stops
      } else {
        out.push_back({t, t + seg.duration_s});
      }
    }
    t += seg.duration_s;
  }
  return out;
}

std::vector<TimeInterval> static_segments(const std::vector<double>& t_s,
                                          const std::vector<double>& linear_speed,
                                          const std::vector<double>& angular_speed,
                                          double speed_threshold_mps,
                                          double angular_threshold_radps) {
  if (t_s.size() != linear_speed.size() || t_s.size() != angular_speed.size()) {
    throw AlignmentError("speed signals differ in length");
  }
  std::vector<TimeInterval> out;
  bool open = false;
  for (std::size_t i = 0; i < t_s.size(); ++i) {
    const bool still = std::abs(linear_speed[i]) < speed_threshold_mps &&
                       std::abs(angular_speed[i]) < angular_threshold_radps;
    if (still && !open) {
      out.push_back({t_s[i], t_s[i]});
      open = true;
    } else if (still && open) {
      out.back().end_s = t_s[i];
    } else {
      open = false;
    }
  }
  return out;
}

namespace {

void push_errors(ErrorSeries& series, Timestamp t, const std::array<Point3, 3>& prisms,
                 const PrismLayout& layout) {
  series.t.push_back(t);
  series.e12.push_back((prisms[0] - prisms[1]).norm() - layout.d12);
  series.e13.push_back((prisms[0] - prisms[2]).norm() - layout.d13);
  series.e23.push_back((prisms[1] - prisms[2]).norm() - layout.d23);
}

}  // namespace

ErrorSeries inter_prism_errors(const std::vector<InterpolatedTriplet>& triplets,
                               const PrismLayout& layout) {
  ErrorSeries series;
  for (const auto& triplet : triplets) {
    if (!triplet.valid) continue;
    push_errors(series, triplet.t, triplet.prisms, layout);
  }
  return series;
}

ErrorSeries inter_prism_errors(const std::array<PrismTrack, 3>& tracks,
                               const PrismLayout& layout) {
  ErrorSeries series;
  const std::size_t n = std::min({tracks[0].size(), tracks[1].size(), tracks[2].size()});
  for (std::size_t i = 0; i < n; ++i) {
    push_errors(series, tracks[0].samples[i].first,
                {tracks[0].samples[i].second, tracks[1].samples[i].second,
                 tracks[2].samples[i].second},
                layout);
  }
  return series;
}

BinnedGrid bin_by_dynamics(const std::vector<double>& errors, const std::vector<double>& x,
                           const std::vector<double>& y, const BinAxis& x_axis,
                           const BinAxis& y_axis) {
  if (errors.size() != x.size() || errors.size() != y.size()) {
    throw AlignmentError("error and dynamics signals differ in length");
  }
  if (x_axis.bins < 1 || y_axis.bins < 1 || x_axis.hi <= x_axis.lo || y_axis.hi <= y_axis.lo) {
    throw ConfigError("bad bin axis specification");
  }

  BinnedGrid grid;
  grid.x_axis = x_axis;
  grid.y_axis = y_axis;
  grid.mean.assign(static_cast<std::size_t>(x_axis.bins) * y_axis.bins, 0.0);
  grid.count.assign(grid.mean.size(), 0);

  auto bin_of = [](double v, const BinAxis& axis) {
    const double w = (axis.hi - axis.lo) / axis.bins;
    int b = static_cast<int>(std::floor((v - axis.lo) / w));
    return std::clamp(b, 0, axis.bins - 1);  // out-of-range values keep the edge bins
  };

  for (std::size_t i = 0; i < errors.size(); ++i) {
    const std::size_t cell =
        static_cast<std::size_t>(bin_of(y[i], y_axis)) * x_axis.bins + bin_of(x[i], x_axis);
    grid.mean[cell] += errors[i];
    grid.count[cell] += 1;
  }
  for (std::size_t c = 0; c < grid.mean.size(); ++c) {
    grid.mean[c] = grid.count[c] > 0 ? grid.mean[c] / grid.count[c]
                                     : std::numeric_limits<double>::quiet_NaN();
  }
  return grid;
}

namespace {

struct SigmaPointResult {
  std::array<double, 3> mean_pos{}, std_pos{};
  std::array<double, 3> mean_euler{}, std_euler{};
  double mean_norm = 0.0;
  double mean_angle = 0.0;
  double mean_abs_euler = 0.0;
};

SigmaPointResult run_sigma_point(const PrismLayout& layout, double sigma, int trials,
                                 std::mt19937_64 rng) {
  std::normal_distribution<double> unit(0.0, 1.0);
  std::array<std::vector<double>, 3> pos, euler;
  for (auto& v : pos) v.reserve(trials);
  for (auto& v : euler) v.reserve(trials);
  double norm_sum = 0.0;
  double angle_sum = 0.0;
  double abs_euler_sum = 0.0;

  for (int trial = 0; trial < trials; ++trial) {
    std::array<Point3, 3> measured;
    for (int k = 0; k < 3; ++k) {
      measured[k] = layout.points[k] + sigma * Point3(unit(rng), unit(rng), unit(rng));
    }
    const PoseSample sample = solve_pose(Timestamp(0), measured, layout);
    // The true pose is the identity, so the pose itself is the error.
    const Point3& dt = sample.pose.translation;
    const EulerZyx e = to_euler_zyx(sample.pose.rotation);
    for (int a = 0; a < 3; ++a) pos[a].push_back(dt[a]);
    euler[0].push_back(wrap_angle(e.yaw));
    euler[1].push_back(wrap_angle(e.pitch));
    euler[2].push_back(wrap_angle(e.roll));
    norm_sum += dt.norm();
    angle_sum += rotation_angle(sample.pose.rotation, Eigen::Quaterniond::Identity());
    abs_euler_sum += (std::abs(euler[0].back()) + std::abs(euler[1].back()) +
                      std::abs(euler[2].back())) /
                     3.0;
  }

  SigmaPointResult r;
  for (int a = 0; a < 3; ++a) {
    const SeriesStats ps = series_stats(pos[a]);
    const SeriesStats es = series_stats(euler[a]);
    r.mean_pos[a] = ps.mean;
    r.std_pos[a] = ps.stddev;
    r.mean_euler[a] = es.mean;
    r.std_euler[a] = es.stddev;
  }
  r.mean_norm = norm_sum / trials;
  r.mean_angle = angle_sum / trials;
  r.mean_abs_euler = abs_euler_sum / trials;
  return r;
}

}  // namespace

PerturbationCurve perturbation_study(const PrismLayout& layout, std::uint64_t seed,
                                     const PerturbationParams& params) {
  if (params.trials < 1) throw ConfigError("perturbation trials must be positive");
  if (params.sigma_step_m <= 0.0 || params.sigma_max_m < 0.0) {
    throw ConfigError("bad perturbation sigma grid");
  }
  const int n_points = static_cast<int>(std::llround(params.sigma_max_m / params.sigma_step_m)) + 1;

  PerturbationCurve curve;
  curve.sigma_m.resize(n_points);
  for (auto& v : curve.mean_position) v.resize(n_points);
  for (auto& v : curve.std_position) v.resize(n_points);
  for (auto& v : curve.mean_euler) v.resize(n_points);
  for (auto& v : curve.std_euler) v.resize(n_points);
  curve.mean_norm.resize(n_points);
  curve.mean_angle.resize(n_points);
  curve.mean_abs_euler.resize(n_points);

  std::vector<SigmaPointResult> results(n_points);
  auto work = [&](int begin, int stride) {
    for (int i = begin; i < n_points; i += stride) {
      const double sigma = i * params.sigma_step_m;
      // Sigma = 0 stays exactly at the identity; no sampling noise at the origin.
      results[i] = sigma == 0.0
                       ? SigmaPointResult{}
                       : run_sigma_point(layout, sigma, params.trials,
                                         make_rng(seed, "perturb", static_cast<std::uint64_t>(i)));
    }
  };

  const int threads = std::max(1, params.parallel);
  if (threads == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
    for (auto& th : pool) th.join();
  }

  for (int i = 0; i < n_points; ++i) {
    curve.sigma_m[i] = i * params.sigma_step_m;
    for (int a = 0; a < 3; ++a) {
      curve.mean_position[a][i] = results[i].mean_pos[a];
      curve.std_position[a][i] = results[i].std_pos[a];
      curve.mean_euler[a][i] = results[i].mean_euler[a];
      curve.std_euler[a][i] = results[i].std_euler[a];
    }
    curve.mean_norm[i] = results[i].mean_norm;
    curve.mean_angle[i] = results[i].mean_angle;
    curve.mean_abs_euler[i] = results[i].mean_abs_euler;
  }
  return curve;
}

GnssCompareResult gnss_compare(const std::vector<GnssFix>& log1, const std::vector<GnssFix>& log2,
                               double reference_m) {
  if (reference_m <= 0.0) throw ConfigError("reference separation must be positive");

  GnssCompareResult result;
  std::map<std::string, std::vector<double>> regime_errors;
  std::size_t i = 0, j = 0;
  while (i < log1.size() && j < log2.size()) {
    if (log1[i].t < log2[j].t) {
      ++i;
      ++result.dropped_epochs;
    } else if (log2[j].t < log1[i].t) {
      ++j;
      ++result.dropped_epochs;
    } else {
      const double err = std::abs((log1[i].position - log2[j].position).norm() - reference_m);
      result.t.push_back(log1[i].t);
      result.abs_errors.push_back(err);
      result.regimes.push_back(log1[i].regime);
      regime_errors[log1[i].regime].push_back(err);
      ++i;
      ++j;
    }
  }
  result.dropped_epochs += static_cast<int>((log1.size() - i) + (log2.size() - j));

  result.overall = series_stats(result.abs_errors);
  for (const auto& [regime, errors] : regime_errors) {
    result.by_regime[regime] = series_stats(errors);
  }
  return result;
}

Histogram histogram(const std::vector<double>& values, double lo, double hi, int bins) {
  if (bins < 1 || hi <= lo) throw ConfigError("bad histogram specification");
  Histogram h;
  h.lo = lo;
  h.hi = hi;
  h.counts.assign(bins, 0);
  const double w = (hi - lo) / bins;
  for (double v : values) {
    int b = static_cast<int>(std::floor((v - lo) / w));
    b = std::clamp(b, 0, bins - 1);
    h.counts[b] += 1;
  }
  return h;
}

}  // namespace gtf
