#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "gtf/cli.hpp"
#include "gtf/io.hpp"

using namespace gtf;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("gtf_test_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string str(const std::string& name = "") const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

RunConfig small_config(const TempDir& dir, double duration = 30.0) {
  RunConfig c = default_run_config();
  c.duration_s = duration;
  c.seed = 7;
  c.gnss.enabled = true;
  c.paths.measurements = dir.str("out/measurements.csv");
  c.paths.events = dir.str("out/events.csv");
  c.paths.gt_poses = dir.str("out/gt_poses.csv");
  c.paths.sync_state = dir.str("out/sync_state.json");
  c.paths.markers = dir.str("out/markers.csv");
  c.paths.calibration = dir.str("cal/calibration.json");
  c.paths.poses = dir.str("sol/poses.csv");
  c.paths.gnss1 = dir.str("out/gnss1.csv");
  c.paths.gnss2 = dir.str("out/gnss2.csv");
  return c;
}

}  // namespace

TEST_CASE("defaults carry the documented field parameters") {
  const RunConfig c = default_run_config();
  CHECK(c.radio.byte_rate_bps == doctest::Approx(366.0));
  CHECK(c.radio.measurement_msg_len == 34);
  CHECK(c.sync.filter_weight == doctest::Approx(0.1));
  CHECK(c.sync.initial_cycles == 50);
  CHECK(c.sync.resync_cycles == 5);
  CHECK(c.interpolation.step_s == doctest::Approx(0.050));
  CHECK(c.interpolation.outage_threshold_s == doctest::Approx(1.0));
  CHECK(c.stations[0].rate_hz == doctest::Approx(2.5));
  CHECK(c.stations[0].range_sigma_m == doctest::Approx(0.002));
  CHECK(c.stations[0].angle_sigma_rad == doctest::Approx(4.848137e-6));
  CHECK(c.stations[0].max_range_m == doctest::Approx(800.0));
  CHECK(c.layout.d12 == doctest::Approx(0.987));
  CHECK(c.layout.d13 == doctest::Approx(0.681));
  CHECK(c.layout.d23 == doctest::Approx(0.815));
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("config round-trips through JSON") {
  TempDir dir;
  RunConfig c = default_run_config();
  c.seed = 31337;
  c.radio.drop_probability = 0.125;
  c.stations[1].clock_drift_ppm = 12.5;
  c.analysis.mode = "dynamic";
  write_run_config(dir.str("config.json"), c);

  const RunConfig back = load_run_config(dir.str("config.json"));
  CHECK(back.seed == 31337);
  CHECK(back.radio.drop_probability == doctest::Approx(0.125));
  CHECK(back.stations[1].clock_drift_ppm == doctest::Approx(12.5));
  CHECK(back.analysis.mode == "dynamic");
  CHECK(back.trajectory.segments.size() == c.trajectory.segments.size());
}

TEST_CASE("malformed or missing configs are rejected") {
  TempDir dir;
  CHECK_THROWS_AS(load_run_config(dir.str("absent.json")), ConfigError);

  std::ofstream(dir.str("bad.json")) << "{ not json";
  CHECK_THROWS_AS(load_run_config(dir.str("bad.json")), ConfigError);

  std::ofstream(dir.str("station1.json"))
      << R"({"stations": [{"position": [1, 0, 0]}, {}, {}]})";
  CHECK_THROWS_AS(load_run_config(dir.str("station1.json")), ConfigError);
}

TEST_CASE("trajectory documents round-trip and validate") {
  TempDir dir;
  TrajectorySpec traj;
  traj.start_position = Point3(1, 2, -1.5);
  traj.start_yaw = 0.4;
  traj.segments = {{5.0, 0.5, 0.0, "open"}, {3.0, 0.2, 0.3, "forest"}};
  io::write_trajectory(dir.str("traj.json"), traj);

  const TrajectorySpec back = io::read_trajectory(dir.str("traj.json"));
  CHECK((back.start_position - traj.start_position).norm() < 1e-12);
  CHECK(back.segments.size() == 2);
  CHECK(back.segments[1].gnss_regime == "forest");

  // config can reference the trajectory by path
  RunConfig c = default_run_config();
  write_run_config(dir.str("config.json"), c);
  std::ifstream in(dir.str("config.json"));
  std::string text((std::istreambuf_iterator<char>(in)), {});
  in.close();
  const std::string needle = "\"trajectory\": {";
  const auto at = text.find(needle);
  REQUIRE(at != std::string::npos);
  // splice in a file reference instead of the inline object
  std::string patched = text.substr(0, at) + "\"trajectory\": \"traj.json\",";
  const auto rest = text.find("\"va_convention\"");
  patched += text.substr(rest - 2);  // keep the tail from the next key onward
  std::ofstream(dir.str("config2.json")) << patched;
  const RunConfig c2 = load_run_config(dir.str("config2.json"));
  CHECK(c2.trajectory.segments.size() == 2);
  CHECK(c2.trajectory.segments[1].gnss_regime == "forest");
}

TEST_CASE("measurement and pose logs round-trip through CSV") {
  TempDir dir;
  std::vector<RawMeasurement> log;
  for (int i = 0; i < 10; ++i) {
    RawMeasurement m;
    m.station = station_frame(1 + i % 3);
    m.ha = 0.1 * i;
    m.va = 1.5;
    m.range = 42.5 + i;
    m.t_client = Timestamp(1000 + i);
    m.status = i % 4 == 0 ? Status::PrismNotDetected : Status::Ok;
    log.push_back(m);
  }
  io::write_measurement_log(dir.str("m.csv"), log);
  const auto back = io::read_measurement_log(dir.str("m.csv"));
  REQUIRE(back.size() == log.size());
  for (std::size_t i = 0; i < log.size(); ++i) {
    CHECK(back[i].station == log[i].station);
    CHECK(back[i].t_client.micros == log[i].t_client.micros);
    CHECK(back[i].status == log[i].status);
    CHECK(std::abs(back[i].range - log[i].range) < 1e-6);
  }

  std::vector<PoseSample> poses;
  PoseSample valid;
  valid.t = Timestamp(50'000);
  valid.pose = RigidTransform(Eigen::Quaterniond(0.9, 0.1, 0.2, 0.3).normalized(),
                              Point3(1, 2, 3));
  valid.residual_rms = 0.0025;
  valid.valid = true;
  poses.push_back(valid);
  poses.push_back(PoseSample::invalid_at(Timestamp(100'000)));
  io::write_pose_log(dir.str("p.csv"), poses);
  const auto poses_back = io::read_pose_log(dir.str("p.csv"));
  REQUIRE(poses_back.size() == 2);
  CHECK(poses_back[0].valid);
  CHECK((poses_back[0].pose.translation - Point3(1, 2, 3)).norm() < 1e-5);
  CHECK_FALSE(poses_back[1].valid);
  CHECK(poses_back[1].t.micros == 100'000);
}

TEST_CASE("simulate writes the full product set") {
  TempDir dir;
  const RunConfig c = small_config(dir);
  REQUIRE(cmd_simulate(c, dir.str("out")) == 0);
  for (const char* name : {"measurements.csv", "events.csv", "gt_poses.csv", "sync_state.json",
                           "markers.csv", "gnss1.csv", "gnss2.csv"}) {
    CHECK(fs::exists(dir.path / "out" / name));
  }
  const auto measurements = io::read_measurement_log(dir.str("out/measurements.csv"));
  CHECK(!measurements.empty());
  const auto sync = io::read_sync_state(dir.str("out/sync_state.json"));
  for (int k = 0; k < 3; ++k) CHECK(sync.skews[k].initialized);
}

TEST_CASE("simulate then calibrate then solve produce a usable pose log") {
  TempDir dir;
  const RunConfig c = small_config(dir, 60.0);
  REQUIRE(cmd_simulate(c, dir.str("out")) == 0);
  REQUIRE(cmd_calibrate(c, dir.str("cal")) == 0);
  REQUIRE(cmd_solve(c, dir.str("sol")) == 0);

  const auto calib = io::read_calibration(dir.str("cal/calibration.json"));
  CHECK(calib.rms < 1e-5);  // exact markers, micrometer CSV quantization

  const auto poses = io::read_pose_log(dir.str("sol/poses.csv"));
  CHECK(!poses.empty());
  // default channel pacing: per-station gaps exceed the outage threshold, so
  // grid points are invalid by construction
  for (std::size_t i = 1; i < poses.size(); ++i) {
    CHECK(poses[i].t.micros - poses[i - 1].t.micros == 50'000);
  }
}

TEST_CASE("calibrate with too few markers exits 3") {
  TempDir dir;
  RunConfig c = small_config(dir);
  std::vector<MarkerObservation> two;
  for (int i = 0; i < 2; ++i) {
    for (int s = 1; s <= 3; ++s) {
      two.push_back({"m" + std::to_string(i), s, Point3(i, 2.0 * i + s, 0)});
    }
  }
  fs::create_directories(dir.path / "out");
  io::write_marker_file(c.paths.markers, two);
  CHECK(cmd_calibrate(c, dir.str("cal")) == 3);
}

TEST_CASE("solve with a missing input exits 2") {
  TempDir dir;
  const RunConfig c = small_config(dir);
  CHECK(cmd_solve(c, dir.str("sol")) == 2);
}

TEST_CASE("commands are byte-identical across reruns with one seed") {
  TempDir dir1, dir2;
  RunConfig c1 = small_config(dir1, 20.0);
  RunConfig c2 = small_config(dir2, 20.0);

  REQUIRE(cmd_simulate(c1, dir1.str("out")) == 0);
  REQUIRE(cmd_simulate(c2, dir2.str("out")) == 0);
  for (const char* name :
       {"measurements.csv", "events.csv", "gt_poses.csv", "sync_state.json", "markers.csv",
        "gnss1.csv", "gnss2.csv"}) {
    CHECK(slurp(dir1.str(std::string("out/") + name)) ==
          slurp(dir2.str(std::string("out/") + name)));
  }

  REQUIRE(cmd_calibrate(c1, dir1.str("cal")) == 0);
  REQUIRE(cmd_calibrate(c2, dir2.str("cal")) == 0);
  CHECK(slurp(dir1.str("cal/calibration.json")) == slurp(dir2.str("cal/calibration.json")));

  REQUIRE(cmd_solve(c1, dir1.str("sol")) == 0);
  REQUIRE(cmd_solve(c2, dir2.str("sol")) == 0);
  CHECK(slurp(dir1.str("sol/poses.csv")) == slurp(dir2.str("sol/poses.csv")));
}

TEST_CASE("analyze perturb emits the 101-point curve file") {
  TempDir dir;
  RunConfig c = small_config(dir);
  c.analysis.mode = "perturb";
  c.analysis.perturbation.trials = 50;  // keep the unit test light
  REQUIRE(cmd_analyze(c, dir.str("rep"), 2) == 0);
  const std::string text = slurp(dir.str("rep/fig7_curves.csv"));
  // header + 101 sigma rows
  CHECK(std::count(text.begin(), text.end(), '\n') == 102);
  CHECK(text.find("sigma_m") == 0);
  CHECK(text.find("std_yaw_zyx_rad") != std::string::npos);
}

TEST_CASE("analyze static and gnss emit their report files") {
  TempDir dir;
  RunConfig c = small_config(dir, 120.0);
  // keep the robot parked so the static analysis has samples, and poll fast
  // enough that the interpolation grid has valid points
  c.trajectory.segments = {{120.0, 0.0, 0.0, "open"}};
  c.radio.data_reply_delay_us = 100'000;
  REQUIRE(cmd_simulate(c, dir.str("out")) == 0);
  REQUIRE(cmd_calibrate(c, dir.str("cal")) == 0);

  c.analysis.mode = "static";
  REQUIRE(cmd_analyze(c, dir.str("rep")) == 0);
  CHECK(fs::exists(dir.path / "rep" / "fig5_hist.csv"));
  CHECK(fs::exists(dir.path / "rep" / "fig5_stats.csv"));

  c.analysis.mode = "gnss";
  REQUIRE(cmd_analyze(c, dir.str("rep")) == 0);
  const std::string summary = slurp(dir.str("rep/fig8_summary.csv"));
  CHECK(summary.find("total_station") != std::string::npos);
  CHECK(summary.find("gnss") != std::string::npos);

  c.analysis.mode = "dynamic";
  REQUIRE(cmd_analyze(c, dir.str("rep")) == 0);
  CHECK(fs::exists(dir.path / "rep" / "fig6_grid_v_w.csv"));
  CHECK(fs::exists(dir.path / "rep" / "fig6_grid_a_w.csv"));
}

TEST_CASE("marker files round-trip") {
  TempDir dir;
  std::vector<MarkerObservation> markers = {{"a", 1, Point3(1.123456, -2, 0.5)},
                                            {"a", 2, Point3(0, 1, 2)},
                                            {"a", 3, Point3(3, 4, 5)}};
  io::write_marker_file(dir.str("markers.csv"), markers);
  const auto back = io::read_marker_file(dir.str("markers.csv"));
  REQUIRE(back.size() == 3);
  CHECK(back[0].marker_id == "a");
  CHECK(back[0].station == 1);
  CHECK(std::abs(back[0].position.x() - 1.123456) < 1e-9);
}
