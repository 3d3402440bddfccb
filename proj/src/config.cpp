#include "gtf/config.hpp"

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "gtf/io.hpp"

namespace gtf {

using nlohmann::json;

void RunConfig::validate() const {
  if (schema != 1) throw ConfigError("unsupported config schema " + std::to_string(schema));
  if (duration_s <= 0.0) throw ConfigError("duration must be positive");
  trajectory.validate();
  radio.validate();
  sync.validate();
  interpolation.validate();
  for (int k = 0; k < 3; ++k) {
    stations[k].validate();
    if (stations[k].index != k + 1) throw ConfigError("stations must be listed in order 1..3");
  }
  // Station 1 defines the common frame; its placement is the origin by
  // construction.
  if (stations[0].position.norm() > 1e-12 || std::abs(stations[0].yaw_rad) > 1e-12) {
    throw ConfigError("station 1 defines the common frame and must sit at the origin");
  }
  if (markers.count < 3) throw ConfigError("need at least 3 calibration markers");
  if (markers.sigma_m < 0.0) throw ConfigError("marker sigma must be non-negative");
  if (analysis.mode != "static" && analysis.mode != "dynamic" && analysis.mode != "perturb" &&
      analysis.mode != "gnss") {
    throw ConfigError("unknown analysis mode '" + analysis.mode + "'");
  }
  if (gnss.rate_hz <= 0.0) throw ConfigError("gnss rate must be positive");
  if ((gnss.antenna_offsets[0] - gnss.antenna_offsets[1]).norm() < 1e-9) {
    throw ConfigError("gnss antenna offsets must be distinct");
  }
}

RunConfig default_run_config() {
  RunConfig c;

  // Robot drives on the ground plane ~1.7 m below the station-1 instrument.
  c.trajectory.start_position = Point3(35.0, 20.0, -1.7);
  c.trajectory.start_yaw = 0.5;
  c.trajectory.segments = {
      {10.0, 0.0, 0.0, "open"},  {20.0, 0.5, 0.0, "open"},  {8.0, 0.0, 0.0, "open"},
      {15.0, 0.4, 0.25, "open"}, {20.0, 0.8, 0.0, "open"},  {6.0, 0.0, 0.0, "open"},
      {15.0, 0.3, -0.3, "open"}, {25.0, 0.6, 0.0, "open"},  {10.0, 0.0, 0.0, "open"},
      {20.0, 0.5, 0.15, "open"}, {25.0, 0.7, 0.0, "open"},  {8.0, 0.0, 0.0, "open"},
  };

  for (int k = 0; k < 3; ++k) c.stations[k].index = k + 1;
  c.stations[0].position = Point3(0.0, 0.0, 0.0);
  c.stations[0].yaw_rad = 0.0;
  c.stations[0].clock_offset_us = 37'000'000;
  c.stations[1].position = Point3(62.0, -18.0, 0.3);
  c.stations[1].yaw_rad = 2.1;
  c.stations[1].clock_offset_us = 12'400'000;
  c.stations[2].position = Point3(-41.0, 55.0, -0.4);
  c.stations[2].yaw_rad = -0.7;
  c.stations[2].clock_offset_us = 91'000'000;

  return c;
}

namespace {

Point3 point_from_json(const json& j) {
  const auto v = j.get<std::vector<double>>();
  if (v.size() != 3) throw ConfigError("expected a 3-component point");
  return Point3(v[0], v[1], v[2]);
}

json point_to_json(const Point3& p) {
  return json::array({p.x(), p.y(), p.z()});
}

BinAxis axis_from_json(const json& j, const BinAxis& fallback) {
  BinAxis a = fallback;
  a.lo = j.value("lo", a.lo);
  a.hi = j.value("hi", a.hi);
  a.bins = j.value("bins", a.bins);
  return a;
}

TrajectorySpec trajectory_from_json(const json& j) {
  TrajectorySpec traj;
  const auto& start = j.at("start");
  traj.start_position = point_from_json(start.at("position"));
  traj.start_yaw = start.at("yaw_rad").get<double>();
  for (const auto& s : j.at("segments")) {
    TrajectorySegment seg;
    seg.duration_s = s.at("duration_s").get<double>();
    seg.linear_mps = s.at("linear_mps").get<double>();
    seg.angular_radps = s.at("angular_radps").get<double>();
    seg.gnss_regime = s.value("gnss_regime", "open");
    traj.segments.push_back(seg);
  }
  return traj;
}

}  // namespace

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("malformed JSON in '" + path + "': " + e.what());
  }

  RunConfig c = default_run_config();
  try {
    c.schema = j.value("schema", c.schema);
    c.seed = j.value("seed", c.seed);
    c.duration_s = j.value("duration_s", c.duration_s);

    if (j.contains("trajectory")) {
      const auto& tj = j.at("trajectory");
      if (tj.is_string()) {
        auto tpath = std::filesystem::path(tj.get<std::string>());
        if (tpath.is_relative()) {
          tpath = std::filesystem::path(path).parent_path() / tpath;
        }
        c.trajectory = io::read_trajectory(tpath.string());
      } else {
        c.trajectory = trajectory_from_json(tj);
      }
    }

    if (j.contains("layout")) {
      const auto& lj = j.at("layout").at("points");
      if (lj.size() != 3) throw ConfigError("layout needs exactly 3 points");
      c.layout = PrismLayout(
          {point_from_json(lj[0]), point_from_json(lj[1]), point_from_json(lj[2])});
    }

    if (j.contains("stations")) {
      const auto& sj = j.at("stations");
      if (sj.size() != 3) throw ConfigError("exactly 3 stations are required");
      for (int k = 0; k < 3; ++k) {
        StationModel& st = c.stations[k];
        const auto& s = sj[k];
        st.index = s.value("index", k + 1);
        if (s.contains("position")) st.position = point_from_json(s.at("position"));
        st.yaw_rad = s.value("yaw_rad", st.yaw_rad);
        st.rate_hz = s.value("rate_hz", st.rate_hz);
        st.rate_jitter_us = s.value("rate_jitter_us", st.rate_jitter_us);
        st.range_sigma_m = s.value("range_sigma_m", st.range_sigma_m);
        st.angle_sigma_rad = s.value("angle_sigma_rad", st.angle_sigma_rad);
        st.min_range_m = s.value("min_range_m", st.min_range_m);
        st.max_range_m = s.value("max_range_m", st.max_range_m);
        st.loss_probability = s.value("loss_probability", st.loss_probability);
        st.reacquisition_s = s.value("reacquisition_s", st.reacquisition_s);
        st.lag_tau_s = s.value("lag_tau_s", st.lag_tau_s);
        st.clock_offset_us = s.value("clock_offset_us", st.clock_offset_us);
        st.clock_drift_ppm = s.value("clock_drift_ppm", st.clock_drift_ppm);
      }
    }

    if (j.contains("radio")) {
      const auto& r = j.at("radio");
      c.radio.byte_rate_bps = r.value("byte_rate_bps", c.radio.byte_rate_bps);
      c.radio.measurement_msg_len = r.value("measurement_msg_len_bytes", c.radio.measurement_msg_len);
      c.radio.jitter_us = r.value("jitter_us", c.radio.jitter_us);
      c.radio.drop_probability = r.value("drop_probability", c.radio.drop_probability);
      c.radio.control_reply_delay_us =
          r.value("control_reply_delay_us", c.radio.control_reply_delay_us);
      c.radio.data_reply_delay_us = r.value("data_reply_delay_us", c.radio.data_reply_delay_us);
      c.radio.reply_timeout_us = r.value("reply_timeout_us", c.radio.reply_timeout_us);
    }

    if (j.contains("sync")) {
      const auto& s = j.at("sync");
      c.sync.filter_weight = s.value("filter_weight", c.sync.filter_weight);
      c.sync.initial_cycles = s.value("initial_cycles", c.sync.initial_cycles);
      c.sync.resync_cycles = s.value("resync_cycles", c.sync.resync_cycles);
      c.sync.resync_period_s = s.value("resync_period_s", c.sync.resync_period_s);
    }

    if (j.contains("interpolation")) {
      const auto& s = j.at("interpolation");
      c.interpolation.step_s = s.value("step_s", c.interpolation.step_s);
      c.interpolation.outage_threshold_s =
          s.value("outage_threshold_s", c.interpolation.outage_threshold_s);
    }

    if (j.contains("markers")) {
      const auto& m = j.at("markers");
      c.markers.count = m.value("count", c.markers.count);
      c.markers.radius_m = m.value("radius_m", c.markers.radius_m);
      c.markers.sigma_m = m.value("sigma_m", c.markers.sigma_m);
    }

    if (j.contains("gnss")) {
      const auto& g = j.at("gnss");
      c.gnss.enabled = g.value("enabled", c.gnss.enabled);
      c.gnss.rate_hz = g.value("rate_hz", c.gnss.rate_hz);
      if (g.contains("antenna_offsets")) {
        const auto& offs = g.at("antenna_offsets");
        if (offs.size() != 2) throw ConfigError("gnss needs exactly 2 antenna offsets");
        c.gnss.antenna_offsets = {point_from_json(offs[0]), point_from_json(offs[1])};
      }
      c.gnss.sigma_open_m = g.value("sigma_open_m", c.gnss.sigma_open_m);
      c.gnss.sigma_forest_m = g.value("sigma_forest_m", c.gnss.sigma_forest_m);
    }

    if (j.contains("analysis")) {
      const auto& a = j.at("analysis");
      c.analysis.mode = a.value("mode", c.analysis.mode);
      c.analysis.speed_threshold_mps =
          a.value("speed_threshold_mps", c.analysis.speed_threshold_mps);
      c.analysis.angular_threshold_radps =
          a.value("angular_threshold_radps", c.analysis.angular_threshold_radps);
      if (a.contains("speed_axis")) {
        c.analysis.speed_axis = axis_from_json(a.at("speed_axis"), c.analysis.speed_axis);
      }
      if (a.contains("accel_axis")) {
        c.analysis.accel_axis = axis_from_json(a.at("accel_axis"), c.analysis.accel_axis);
      }
      if (a.contains("angular_axis")) {
        c.analysis.angular_axis = axis_from_json(a.at("angular_axis"), c.analysis.angular_axis);
      }
      c.analysis.histogram_bins = a.value("histogram_bins", c.analysis.histogram_bins);
      c.analysis.histogram_half_width_m =
          a.value("histogram_half_width_m", c.analysis.histogram_half_width_m);
      if (a.contains("perturbation")) {
        const auto& p = a.at("perturbation");
        c.analysis.perturbation.sigma_max_m =
            p.value("sigma_max_m", c.analysis.perturbation.sigma_max_m);
        c.analysis.perturbation.sigma_step_m =
            p.value("sigma_step_m", c.analysis.perturbation.sigma_step_m);
        c.analysis.perturbation.trials = p.value("trials", c.analysis.perturbation.trials);
      }
    }

    if (j.contains("paths")) {
      const auto& p = j.at("paths");
      c.paths.measurements = p.value("measurements", c.paths.measurements);
      c.paths.events = p.value("events", c.paths.events);
      c.paths.gt_poses = p.value("gt_poses", c.paths.gt_poses);
      c.paths.sync_state = p.value("sync_state", c.paths.sync_state);
      c.paths.markers = p.value("markers", c.paths.markers);
      c.paths.calibration = p.value("calibration", c.paths.calibration);
      c.paths.poses = p.value("poses", c.paths.poses);
      c.paths.gnss1 = p.value("gnss1", c.paths.gnss1);
      c.paths.gnss2 = p.value("gnss2", c.paths.gnss2);
    }

    if (j.contains("va_convention")) {
      const auto s = j.at("va_convention").get<std::string>();
      if (s == "zenith") {
        c.va_convention = VerticalAngleConvention::Zenith;
      } else if (s == "elevation") {
        c.va_convention = VerticalAngleConvention::Elevation;
      } else {
        throw ConfigError("va_convention must be 'zenith' or 'elevation'");
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError("bad config '" + path + "': " + e.what());
  }

  c.validate();
  return c;
}

void write_run_config(const std::string& path, const RunConfig& c) {
  json j;
  j["schema"] = c.schema;
  j["seed"] = c.seed;
  j["duration_s"] = c.duration_s;

  json tj;
  tj["start"] = {{"position", point_to_json(c.trajectory.start_position)},
                 {"yaw_rad", c.trajectory.start_yaw}};
  json segs = json::array();
  for (const auto& s : c.trajectory.segments) {
    segs.push_back({{"duration_s", s.duration_s},
                    {"linear_mps", s.linear_mps},
                    {"angular_radps", s.angular_radps},
                    {"gnss_regime", s.gnss_regime}});
  }
  tj["segments"] = segs;
  j["trajectory"] = tj;

  j["layout"] = {{"points", json::array({point_to_json(c.layout.p1()),
                                         point_to_json(c.layout.p2()),
                                         point_to_json(c.layout.p3())})}};

  json stations = json::array();
  for (const auto& st : c.stations) {
    stations.push_back({{"index", st.index},
                        {"position", point_to_json(st.position)},
                        {"yaw_rad", st.yaw_rad},
                        {"rate_hz", st.rate_hz},
                        {"rate_jitter_us", st.rate_jitter_us},
                        {"range_sigma_m", st.range_sigma_m},
                        {"angle_sigma_rad", st.angle_sigma_rad},
                        {"min_range_m", st.min_range_m},
                        {"max_range_m", st.max_range_m},
                        {"loss_probability", st.loss_probability},
                        {"reacquisition_s", st.reacquisition_s},
                        {"lag_tau_s", st.lag_tau_s},
                        {"clock_offset_us", st.clock_offset_us},
                        {"clock_drift_ppm", st.clock_drift_ppm}});
  }
  j["stations"] = stations;

  j["radio"] = {{"byte_rate_bps", c.radio.byte_rate_bps},
                {"measurement_msg_len_bytes", c.radio.measurement_msg_len},
                {"jitter_us", c.radio.jitter_us},
                {"drop_probability", c.radio.drop_probability},
                {"control_reply_delay_us", c.radio.control_reply_delay_us},
                {"data_reply_delay_us", c.radio.data_reply_delay_us},
                {"reply_timeout_us", c.radio.reply_timeout_us}};

  j["sync"] = {{"filter_weight", c.sync.filter_weight},
               {"initial_cycles", c.sync.initial_cycles},
               {"resync_cycles", c.sync.resync_cycles},
               {"resync_period_s", c.sync.resync_period_s}};

  j["interpolation"] = {{"step_s", c.interpolation.step_s},
                        {"outage_threshold_s", c.interpolation.outage_threshold_s}};

  j["markers"] = {{"count", c.markers.count},
                  {"radius_m", c.markers.radius_m},
                  {"sigma_m", c.markers.sigma_m}};

  j["gnss"] = {{"enabled", c.gnss.enabled},
               {"rate_hz", c.gnss.rate_hz},
               {"antenna_offsets", json::array({point_to_json(c.gnss.antenna_offsets[0]),
                                                point_to_json(c.gnss.antenna_offsets[1])})},
               {"sigma_open_m", c.gnss.sigma_open_m},
               {"sigma_forest_m", c.gnss.sigma_forest_m}};

  j["analysis"] = {
      {"mode", c.analysis.mode},
      {"speed_threshold_mps", c.analysis.speed_threshold_mps},
      {"angular_threshold_radps", c.analysis.angular_threshold_radps},
      {"speed_axis",
       {{"lo", c.analysis.speed_axis.lo}, {"hi", c.analysis.speed_axis.hi},
        {"bins", c.analysis.speed_axis.bins}}},
      {"accel_axis",
       {{"lo", c.analysis.accel_axis.lo}, {"hi", c.analysis.accel_axis.hi},
        {"bins", c.analysis.accel_axis.bins}}},
      {"angular_axis",
       {{"lo", c.analysis.angular_axis.lo}, {"hi", c.analysis.angular_axis.hi},
        {"bins", c.analysis.angular_axis.bins}}},
      {"histogram_bins", c.analysis.histogram_bins},
      {"histogram_half_width_m", c.analysis.histogram_half_width_m},
      {"perturbation",
       {{"sigma_max_m", c.analysis.perturbation.sigma_max_m},
        {"sigma_step_m", c.analysis.perturbation.sigma_step_m},
        {"trials", c.analysis.perturbation.trials}}}};

  j["paths"] = {{"measurements", c.paths.measurements}, {"events", c.paths.events},
                {"gt_poses", c.paths.gt_poses},         {"sync_state", c.paths.sync_state},
                {"markers", c.paths.markers},           {"calibration", c.paths.calibration},
                {"poses", c.paths.poses},               {"gnss1", c.paths.gnss1},
                {"gnss2", c.paths.gnss2}};

  j["va_convention"] =
      c.va_convention == VerticalAngleConvention::Zenith ? "zenith" : "elevation";

  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  out << j.dump(2) << '\n';
}

}  // namespace gtf
