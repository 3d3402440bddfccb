#include "gtf/cli.hpp"

#include <cmath>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "gtf/analysis.hpp"
#include "gtf/io.hpp"
#include "gtf/pipeline.hpp"
#include "gtf/rig.hpp"
#include "gtf/rng.hpp"

namespace gtf {

namespace {

namespace fs = std::filesystem;

std::string join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

void require_readable(const std::string& path, const std::string& what) {
  if (!fs::exists(path)) {
    throw ConfigError(what + " not found: '" + path + "'");
  }
}

int map_exception(const std::function<int()>& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return 1;
  }
}

std::vector<PoseSample> ground_truth_poses(const TrajectorySpec& traj, double duration_s,
                                           std::int64_t step_us) {
  std::vector<PoseSample> poses;
  const std::int64_t end = std::llround(duration_s * 1e6);
  const TrajectorySpec extended = traj.extended_to(duration_s);
  for (std::int64_t t = 0; t <= end; t += step_us) {
    PoseSample s;
    s.t = Timestamp(t);
    s.pose = extended.pose_at_seconds(static_cast<double>(t) * 1e-6);
    s.residual_rms = 0.0;
    s.valid = true;
    poses.push_back(s);
  }
  return poses;
}

// Inputs for the measurement-side analyses.
struct SolvedRun {
  PipelineResult pipeline;
  TrajectorySpec trajectory;
};

SolvedRun solve_from_files(const RunConfig& config) {
  require_readable(config.paths.measurements, "measurement log");
  require_readable(config.paths.calibration, "calibration file");
  require_readable(config.paths.sync_state, "sync state file");

  SolvedRun run;
  const auto log = io::read_measurement_log(config.paths.measurements);
  const auto calib = io::read_calibration(config.paths.calibration);
  const auto sync = io::read_sync_state(config.paths.sync_state);
  run.pipeline = run_pipeline(log, calib, sync.skews, config.layout, config.interpolation,
                              config.va_convention);
  run.trajectory = config.trajectory.extended_to(config.duration_s);
  return run;
}

}  // namespace

int cmd_simulate(const RunConfig& config, const std::string& out_dir) {
  return map_exception([&] {
    config.validate();
    Rig rig(config.stations, config.trajectory, config.layout, config.radio, config.sync,
            config.seed, config.duration_s);
    rig.run();

    std::vector<RawMeasurement> log;
    log.reserve(rig.measurements().size());
    for (const auto& dm : rig.measurements()) log.push_back(dm.m);
    io::write_measurement_log(join(out_dir, "measurements.csv"), log);
    io::write_event_log(join(out_dir, "events.csv"), rig.events());
    io::write_sync_state(join(out_dir, "sync_state.json"), rig.skews(), rig.skew_timelines());

    const auto markers = generate_marker_observations(
        config.stations, config.markers.count, config.markers.radius_m, config.markers.sigma_m,
        make_rng(config.seed, "markers"));
    io::write_marker_file(join(out_dir, "markers.csv"), markers);

    io::write_pose_log(join(out_dir, "gt_poses.csv"),
                       ground_truth_poses(config.trajectory, config.duration_s,
                                          config.interpolation.step_us()));

    if (config.gnss.enabled) {
      const auto epochs =
          simulate_gnss_pair(config.trajectory.extended_to(config.duration_s), config.gnss,
                             config.duration_s, make_rng(config.seed, "gnss"));
      std::vector<GnssFix> log1, log2;
      for (const auto& e : epochs) {
        log1.push_back({e.t, e.receiver1, e.regime});
        log2.push_back({e.t, e.receiver2, e.regime});
      }
      io::write_gnss_log(join(out_dir, "gnss1.csv"), log1);
      io::write_gnss_log(join(out_dir, "gnss2.csv"), log2);
    }

    const double rate =
        config.duration_s > 0 ? static_cast<double>(log.size()) / config.duration_s : 0.0;
    std::cout << "simulated " << config.duration_s << " s: " << log.size()
              << " measurements delivered (" << rate << " Hz aggregate), "
              << rig.events().size() << " channel events\n";
    return 0;
  });
}

int cmd_calibrate(const RunConfig& config, const std::string& out_dir) {
  return map_exception([&] {
    require_readable(config.paths.markers, "marker file");
    const auto markers = io::read_marker_file(config.paths.markers);
    const CalibrationResult calib = calibrate_stations(markers);
    io::write_calibration(join(out_dir, "calibration.json"), calib);
    std::cout << "calibrated from " << markers.size() / 3 << " markers, rms "
              << calib.rms * 1e3 << " mm\n";
    return 0;
  });
}

int cmd_solve(const RunConfig& config, const std::string& out_dir) {
  return map_exception([&] {
    const SolvedRun run = solve_from_files(config);
    io::write_pose_log(join(out_dir, "poses.csv"), run.pipeline.poses);
    std::size_t valid = 0;
    for (const auto& p : run.pipeline.poses) valid += p.valid ? 1 : 0;
    std::cout << "solved " << run.pipeline.poses.size() << " grid poses (" << valid
              << " valid)\n";
    return 0;
  });
}

namespace {

int analyze_static(const RunConfig& config, const std::string& out_dir) {
  const SolvedRun run = solve_from_files(config);
  const auto intervals =
      static_segments(run.trajectory, config.analysis.speed_threshold_mps,
                      config.analysis.angular_threshold_radps);

  // Raw (non-interpolated) samples inside stationary intervals, paired by
  // index per interval.
  ErrorSeries series;
  for (const auto& iv : intervals) {
    std::array<PrismTrack, 3> sliced;
    for (int k = 0; k < 3; ++k) {
      sliced[k].prism_index = k + 1;
      for (const auto& s : run.pipeline.tracks[k].samples) {
        const double t = s.first.seconds();
        if (t >= iv.start_s && t <= iv.end_s) sliced[k].samples.push_back(s);
      }
    }
    const ErrorSeries part = inter_prism_errors(sliced, config.layout);
    series.t.insert(series.t.end(), part.t.begin(), part.t.end());
    series.e12.insert(series.e12.end(), part.e12.begin(), part.e12.end());
    series.e13.insert(series.e13.end(), part.e13.begin(), part.e13.end());
    series.e23.insert(series.e23.end(), part.e23.begin(), part.e23.end());
  }

  io::write_inter_prism_histograms(join(out_dir, "fig5_hist.csv"), series,
                                   config.analysis.histogram_bins,
                                   config.analysis.histogram_half_width_m);
  io::write_inter_prism_stats(join(out_dir, "fig5_stats.csv"), series, config.layout);
  std::cout << "static analysis: " << series.size() << " stationary samples over "
            << intervals.size() << " intervals\n";
  return 0;
}

int analyze_dynamic(const RunConfig& config, const std::string& out_dir) {
  const SolvedRun run = solve_from_files(config);
  const ErrorSeries series = inter_prism_errors(run.pipeline.triplets, config.layout);

  // Pool the three pairs; each sample carries the robot dynamics at its time.
  std::vector<double> errors, v, w, a;
  const double h = config.interpolation.step_s / 2.0;
  const double span = run.trajectory.duration_s();
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double t = series.t[i].seconds();
    if (t < 0.0 || t > span) continue;
    const double v_t = run.trajectory.linear_speed_at(t);
    const double w_t = run.trajectory.angular_speed_at(t);
    const double t_lo = std::max(0.0, t - h);
    const double t_hi = std::min(span, t + h);
    const double a_t = (run.trajectory.linear_speed_at(t_hi) -
                        run.trajectory.linear_speed_at(t_lo)) /
                       (t_hi - t_lo);
    for (const double e : {series.e12[i], series.e13[i], series.e23[i]}) {
      errors.push_back(std::abs(e));
      v.push_back(v_t);
      w.push_back(w_t);
      a.push_back(a_t);
    }
  }

  const BinnedGrid grid_vw =
      bin_by_dynamics(errors, v, w, config.analysis.speed_axis, config.analysis.angular_axis);
  const BinnedGrid grid_aw =
      bin_by_dynamics(errors, a, w, config.analysis.accel_axis, config.analysis.angular_axis);
  io::write_dynamics_grid(join(out_dir, "fig6_grid_v_w.csv"), grid_vw, "speed_mps");
  io::write_dynamics_grid(join(out_dir, "fig6_grid_a_w.csv"), grid_aw, "accel_mps2");
  std::cout << "dynamic analysis: " << errors.size() << " samples binned\n";
  return 0;
}

int analyze_perturb(const RunConfig& config, const std::string& out_dir, int parallel) {
  PerturbationParams params = config.analysis.perturbation;
  params.parallel = parallel;
  const PerturbationCurve curve =
      perturbation_study(config.layout, config.seed, params);
  io::write_perturbation_curves(join(out_dir, "fig7_curves.csv"), curve);
  std::cout << "perturbation study: " << curve.sigma_m.size() << " sigma points, "
            << params.trials << " trials each\n";
  return 0;
}

int analyze_gnss(const RunConfig& config, const std::string& out_dir) {
  require_readable(config.paths.gnss1, "gnss log");
  require_readable(config.paths.gnss2, "gnss log");
  const auto log1 = io::read_gnss_log(config.paths.gnss1);
  const auto log2 = io::read_gnss_log(config.paths.gnss2);
  const double reference =
      (config.gnss.antenna_offsets[0] - config.gnss.antenna_offsets[1]).norm();
  const GnssCompareResult gnss = gnss_compare(log1, log2, reference);

  const SolvedRun run = solve_from_files(config);
  const ErrorSeries series = inter_prism_errors(run.pipeline.triplets, config.layout);
  std::map<std::string, std::vector<double>> theo_by_regime;
  const double span = run.trajectory.duration_s();
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double t = std::clamp(series.t[i].seconds(), 0.0, span - 1e-9);
    auto& bucket = theo_by_regime[run.trajectory.regime_at(t)];
    bucket.push_back(std::abs(series.e12[i]));
    bucket.push_back(std::abs(series.e13[i]));
    bucket.push_back(std::abs(series.e23[i]));
  }

  std::vector<io::GnssSummaryRow> rows;
  for (const auto& regime : {std::string("open"), std::string("forest")}) {
    if (auto it = theo_by_regime.find(regime); it != theo_by_regime.end()) {
      const SeriesStats s = series_stats(it->second);
      rows.push_back({regime, "total_station", s.mean, s.stddev, s.count});
    }
    if (auto it = gnss.by_regime.find(regime); it != gnss.by_regime.end()) {
      rows.push_back({regime, "gnss", it->second.mean, it->second.stddev, it->second.count});
    }
  }
  io::write_gnss_summary(join(out_dir, "fig8_summary.csv"), rows);
  if (gnss.dropped_epochs > 0) {
    std::cout << "dropped " << gnss.dropped_epochs << " unpaired gnss epochs\n";
  }
  std::cout << "gnss comparison: " << rows.size() << " summary rows\n";
  return 0;
}

}  // namespace

int cmd_analyze(const RunConfig& config, const std::string& out_dir, int parallel) {
  return map_exception([&] {
    config.validate();
    if (config.analysis.mode == "static") return analyze_static(config, out_dir);
    if (config.analysis.mode == "dynamic") return analyze_dynamic(config, out_dir);
    if (config.analysis.mode == "perturb") return analyze_perturb(config, out_dir, parallel);
    if (config.analysis.mode == "gnss") return analyze_gnss(config, out_dir);
    throw ConfigError("unknown analysis mode '" + config.analysis.mode + "'");
  });
}

int run_cli(int argc, char** argv) {
  CLI::App app{"total-station ground-truth simulator and processing pipeline"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int parallel = 1;
  std::string mode_override;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "run configuration (JSON)")->required();
    cmd->add_option("--out", out_dir, "output directory")->required();
    cmd->add_option("--seed", seed, "override the config seed")->each([&](const std::string&) {
      seed_set = true;
    });
    cmd->add_option("--parallel", parallel, "worker threads for independent trials")
        ->check(CLI::PositiveNumber);
  };

  CLI::App* simulate = app.add_subcommand("simulate", "run the field simulation");
  CLI::App* calibrate = app.add_subcommand("calibrate", "align station frames from markers");
  CLI::App* solve = app.add_subcommand("solve", "measurement log -> 6-DOF pose log");
  CLI::App* analyze = app.add_subcommand("analyze", "produce the report CSVs");
  for (CLI::App* cmd : {simulate, calibrate, solve, analyze}) add_common(cmd);
  analyze->add_option("--mode", mode_override, "static | dynamic | perturb | gnss");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  return map_exception([&] {
    RunConfig config = load_run_config(config_path);
    if (seed_set) config.seed = seed;
    if (!mode_override.empty()) config.analysis.mode = mode_override;

    if (simulate->parsed()) return cmd_simulate(config, out_dir);
    if (calibrate->parsed()) return cmd_calibrate(config, out_dir);
    if (solve->parsed()) return cmd_solve(config, out_dir);
    return cmd_analyze(config, out_dir, parallel);
  });
}

}  // namespace gtf
