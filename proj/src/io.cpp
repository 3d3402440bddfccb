#include "gtf/io.hpp"

#include <cinttypes>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace gtf::io {

using nlohmann::json;

namespace {

std::ofstream open_out(const std::string& path) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "' for reading");
  return in;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  return fields;
}

// Reads rows, skipping the header; throws when a row has the wrong arity.
std::vector<std::vector<std::string>> read_rows(const std::string& path, std::size_t arity) {
  auto in = open_in(path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    auto fields = split_csv(line);
    if (fields.size() != arity) {
      throw ConfigError("bad row in '" + path + "': expected " + std::to_string(arity) +
                        " fields, got " + std::to_string(fields.size()));
    }
    rows.push_back(std::move(fields));
  }
  return rows;
}

double to_double(const std::string& s) { return std::stod(s); }
std::int64_t to_i64(const std::string& s) { return std::stoll(s); }

std::string fmt(const char* format, ...) {
  char buf[256];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof(buf), format, args);
  va_end(args);
  return buf;
}

json transform_to_json(const RigidTransform& t) {
  return json{{"qw", t.rotation.w()}, {"qx", t.rotation.x()}, {"qy", t.rotation.y()},
              {"qz", t.rotation.z()}, {"tx", t.translation.x()}, {"ty", t.translation.y()},
              {"tz", t.translation.z()}};
}

RigidTransform transform_from_json(const json& j) {
  Eigen::Quaterniond q(j.at("qw").get<double>(), j.at("qx").get<double>(),
                       j.at("qy").get<double>(), j.at("qz").get<double>());
  return {q, Point3(j.at("tx").get<double>(), j.at("ty").get<double>(), j.at("tz").get<double>())};
}

json parse_json_file(const std::string& path) {
  auto in = open_in(path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("malformed JSON in '" + path + "': " + e.what());
  }
  return j;
}

}  // namespace

void write_measurement_log(const std::string& path, const std::vector<RawMeasurement>& log) {
  auto out = open_out(path);
  out << "station,t_client_us,ha_rad,va_rad,range_m,status\n";
  for (const auto& m : log) {
    out << station_index(m.station) << ',' << m.t_client.micros << ','
        << fmt("%.9f", m.ha) << ',' << fmt("%.9f", m.va) << ',' << fmt("%.6f", m.range) << ','
        << status_name(m.status) << '\n';
  }
}

std::vector<RawMeasurement> read_measurement_log(const std::string& path) {
  std::vector<RawMeasurement> log;
  for (const auto& row : read_rows(path, 6)) {
    RawMeasurement m;
    m.station = station_frame(static_cast<int>(to_i64(row[0])));
    m.t_client = Timestamp(to_i64(row[1]));
    m.ha = to_double(row[2]);
    m.va = to_double(row[3]);
    m.range = to_double(row[4]);
    m.status = status_from_name(row[5]);
    log.push_back(m);
  }
  return log;
}

void write_event_log(const std::string& path, const std::vector<ChannelEvent>& events) {
  auto out = open_out(path);
  out << "sim_time_us,event_kind,src,dst,bytes,dropped\n";
  for (const auto& e : events) {
    out << e.t_us << ',' << e.kind << ',' << e.src << ',' << e.dst << ',' << e.bytes << ','
        << (e.dropped ? 1 : 0) << '\n';
  }
}

std::vector<ChannelEvent> read_event_log(const std::string& path) {
  std::vector<ChannelEvent> events;
  for (const auto& row : read_rows(path, 6)) {
    ChannelEvent e;
    e.t_us = to_i64(row[0]);
    e.kind = row[1];
    e.src = row[2];
    e.dst = row[3];
    e.bytes = static_cast<int>(to_i64(row[4]));
    e.dropped = to_i64(row[5]) != 0;
    events.push_back(e);
  }
  return events;
}

void write_marker_file(const std::string& path, const std::vector<MarkerObservation>& markers) {
  auto out = open_out(path);
  out << "marker_id,station,x,y,z\n";
  for (const auto& m : markers) {
    out << m.marker_id << ',' << m.station << ',' << fmt("%.6f", m.position.x()) << ','
        << fmt("%.6f", m.position.y()) << ',' << fmt("%.6f", m.position.z()) << '\n';
  }
}

std::vector<MarkerObservation> read_marker_file(const std::string& path) {
  std::vector<MarkerObservation> markers;
  for (const auto& row : read_rows(path, 5)) {
    MarkerObservation m;
    m.marker_id = row[0];
    m.station = static_cast<int>(to_i64(row[1]));
    m.position = Point3(to_double(row[2]), to_double(row[3]), to_double(row[4]));
    markers.push_back(m);
  }
  return markers;
}

void write_pose_log(const std::string& path, const std::vector<PoseSample>& poses) {
  auto out = open_out(path);
  out << "t_us,valid,x,y,z,qw,qx,qy,qz,residual_rms_m\n";
  for (const auto& p : poses) {
    // Canonical quaternion sign keeps outputs byte-stable.
    Eigen::Quaterniond q = p.pose.rotation;
    if (q.w() < 0) q.coeffs() *= -1.0;
    out << p.t.micros << ',' << (p.valid ? 1 : 0) << ',' << fmt("%.6f", p.pose.translation.x())
        << ',' << fmt("%.6f", p.pose.translation.y()) << ','
        << fmt("%.6f", p.pose.translation.z()) << ',' << fmt("%.9f", q.w()) << ','
        << fmt("%.9f", q.x()) << ',' << fmt("%.9f", q.y()) << ',' << fmt("%.9f", q.z()) << ','
        << fmt("%.9f", p.residual_rms) << '\n';
  }
}

std::vector<PoseSample> read_pose_log(const std::string& path) {
  std::vector<PoseSample> poses;
  for (const auto& row : read_rows(path, 10)) {
    PoseSample p;
    p.t = Timestamp(to_i64(row[0]));
    p.valid = to_i64(row[1]) != 0;
    if (p.valid) {
      p.pose.translation = Point3(to_double(row[2]), to_double(row[3]), to_double(row[4]));
      p.pose.rotation = Eigen::Quaterniond(to_double(row[5]), to_double(row[6]),
                                           to_double(row[7]), to_double(row[8]));
      p.residual_rms = to_double(row[9]);
    } else {
      p = PoseSample::invalid_at(p.t);
    }
    poses.push_back(p);
  }
  return poses;
}

void write_gnss_log(const std::string& path, const std::vector<GnssFix>& fixes) {
  auto out = open_out(path);
  out << "t_us,x,y,z,regime\n";
  for (const auto& f : fixes) {
    out << f.t.micros << ',' << fmt("%.6f", f.position.x()) << ',' << fmt("%.6f", f.position.y())
        << ',' << fmt("%.6f", f.position.z()) << ',' << f.regime << '\n';
  }
}

std::vector<GnssFix> read_gnss_log(const std::string& path) {
  std::vector<GnssFix> fixes;
  for (const auto& row : read_rows(path, 5)) {
    GnssFix f;
    f.t = Timestamp(to_i64(row[0]));
    f.position = Point3(to_double(row[1]), to_double(row[2]), to_double(row[3]));
    f.regime = row[4];
    fixes.push_back(f);
  }
  return fixes;
}

void write_calibration(const std::string& path, const CalibrationResult& calib) {
  json j;
  j["schema"] = 1;
  j["t12"] = transform_to_json(calib.t12);
  j["t13"] = transform_to_json(calib.t13);
  j["rms_m"] = calib.rms;
  j["residuals_m"] = calib.residuals;
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

CalibrationResult read_calibration(const std::string& path) {
  const json j = parse_json_file(path);
  CalibrationResult calib;
  calib.t12 = transform_from_json(j.at("t12"));
  calib.t13 = transform_from_json(j.at("t13"));
  calib.rms = j.at("rms_m").get<double>();
  if (j.contains("residuals_m")) {
    calib.residuals = j.at("residuals_m").get<std::vector<double>>();
  }
  return calib;
}

void write_sync_state(const std::string& path, const std::array<SkewEstimate, 3>& skews,
                      const std::array<std::vector<SkewTimelineEntry>, 3>& timelines) {
  json j;
  j["schema"] = 1;
  json stations = json::array();
  for (int k = 0; k < 3; ++k) {
    json s;
    s["station"] = k + 1;
    s["delta_us"] = skews[k].delta_us;
    s["resync_count"] = skews[k].resync_count;
    s["filter_weight"] = skews[k].filter_weight;
    s["history_us"] = skews[k].history;
    s["initialized"] = skews[k].initialized;
    json tl = json::array();
    for (const auto& e : timelines[k]) {
      tl.push_back({{"t_us", e.t_us}, {"delta_us", e.delta_us}});
    }
    s["timeline"] = tl;
    stations.push_back(s);
  }
  j["stations"] = stations;
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

SyncState read_sync_state(const std::string& path) {
  const json j = parse_json_file(path);
  SyncState state;
  for (const auto& s : j.at("stations")) {
    const int k = s.at("station").get<int>() - 1;
    if (k < 0 || k > 2) throw ConfigError("sync state station index out of range");
    state.skews[k].delta_us = s.at("delta_us").get<double>();
    state.skews[k].resync_count = s.at("resync_count").get<int>();
    state.skews[k].filter_weight = s.at("filter_weight").get<double>();
    state.skews[k].history = s.at("history_us").get<std::vector<double>>();
    state.skews[k].initialized = s.at("initialized").get<bool>();
    if (s.contains("timeline")) {
      for (const auto& e : s.at("timeline")) {
        state.timelines[k].push_back(
            {e.at("t_us").get<std::int64_t>(), e.at("delta_us").get<double>()});
      }
    }
  }
  return state;
}

void write_trajectory(const std::string& path, const TrajectorySpec& traj) {
  json j;
  j["schema"] = 1;
  j["start"] = {{"position", {traj.start_position.x(), traj.start_position.y(),
                              traj.start_position.z()}},
                {"yaw_rad", traj.start_yaw}};
  json segs = json::array();
  for (const auto& s : traj.segments) {
    segs.push_back({{"duration_s", s.duration_s},
                    {"linear_mps", s.linear_mps},
                    {"angular_radps", s.angular_radps},
                    {"gnss_regime", s.gnss_regime}});
  }
  j["segments"] = segs;
  json wps = json::array();
  for (const auto& w : traj.waypoints()) {
    wps.push_back({{"t_s", w.t_s},
                   {"position", {w.position.x(), w.position.y(), w.position.z()}},
                   {"yaw_rad", w.yaw}});
  }
  j["waypoints"] = wps;  // derived; informational
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

TrajectorySpec read_trajectory(const std::string& path) {
  const json j = parse_json_file(path);
  TrajectorySpec traj;
  try {
    const auto& start = j.at("start");
    const auto pos = start.at("position").get<std::vector<double>>();
    if (pos.size() != 3) throw ConfigError("start position needs 3 components");
    traj.start_position = Point3(pos[0], pos[1], pos[2]);
    traj.start_yaw = start.at("yaw_rad").get<double>();
    for (const auto& s : j.at("segments")) {
      TrajectorySegment seg;
      seg.duration_s = s.at("duration_s").get<double>();
      seg.linear_mps = s.at("linear_mps").get<double>();
      seg.angular_radps = s.at("angular_radps").get<double>();
      seg.gnss_regime = s.value("gnss_regime", "open");
      traj.segments.push_back(seg);
    }
  } catch (const json::exception& e) {
    throw ConfigError("bad trajectory document '" + path + "': " + e.what());
  }
  traj.validate();
  return traj;
}

void write_inter_prism_histograms(const std::string& path, const ErrorSeries& series, int bins,
                                  double half_width_m) {
  auto out = open_out(path);
  out << "pair,bin_lo_m,bin_hi_m,count\n";
  const std::array<std::pair<const char*, const std::vector<double>*>, 3> pairs = {
      std::make_pair("1-2", &series.e12), std::make_pair("1-3", &series.e13),
      std::make_pair("2-3", &series.e23)};
  for (const auto& [name, errors] : pairs) {
    const Histogram h = histogram(*errors, -half_width_m, half_width_m, bins);
    const double w = (h.hi - h.lo) / bins;
    for (int b = 0; b < bins; ++b) {
      out << name << ',' << fmt("%.6f", h.lo + b * w) << ',' << fmt("%.6f", h.lo + (b + 1) * w)
          << ',' << h.counts[b] << '\n';
    }
  }
}

void write_inter_prism_stats(const std::string& path, const ErrorSeries& series,
                             const PrismLayout& layout) {
  auto out = open_out(path);
  out << "pair,reference_m,mean_error_m,std_m,count\n";
  const auto s12 = series_stats(series.e12);
  const auto s13 = series_stats(series.e13);
  const auto s23 = series_stats(series.e23);
  out << "1-2," << fmt("%.6f", layout.d12) << ',' << fmt("%.6f", s12.mean) << ','
      << fmt("%.6f", s12.stddev) << ',' << s12.count << '\n';
  out << "1-3," << fmt("%.6f", layout.d13) << ',' << fmt("%.6f", s13.mean) << ','
      << fmt("%.6f", s13.stddev) << ',' << s13.count << '\n';
  out << "2-3," << fmt("%.6f", layout.d23) << ',' << fmt("%.6f", s23.mean) << ','
      << fmt("%.6f", s23.stddev) << ',' << s23.count << '\n';
}

void write_dynamics_grid(const std::string& path, const BinnedGrid& grid,
                         const std::string& x_name) {
  auto out = open_out(path);
  out << x_name << "_lo," << x_name << "_hi,angular_lo_radps,angular_hi_radps,"
      << "mean_abs_error_m,count\n";
  const double wx = (grid.x_axis.hi - grid.x_axis.lo) / grid.x_axis.bins;
  const double wy = (grid.y_axis.hi - grid.y_axis.lo) / grid.y_axis.bins;
  for (int iy = 0; iy < grid.y_axis.bins; ++iy) {
    for (int ix = 0; ix < grid.x_axis.bins; ++ix) {
      const double mean = grid.cell_mean(ix, iy);
      out << fmt("%.4f", grid.x_axis.lo + ix * wx) << ','
          << fmt("%.4f", grid.x_axis.lo + (ix + 1) * wx) << ','
          << fmt("%.4f", grid.y_axis.lo + iy * wy) << ','
          << fmt("%.4f", grid.y_axis.lo + (iy + 1) * wy) << ','
          << (std::isnan(mean) ? std::string("nan") : fmt("%.6f", mean)) << ','
          << grid.cell_count(ix, iy) << '\n';
    }
  }
}

void write_perturbation_curves(const std::string& path, const PerturbationCurve& curve) {
  auto out = open_out(path);
  // Euler columns are Z-Y-X (yaw, pitch, roll).
  out << "sigma_m,mean_x_m,mean_y_m,mean_z_m,std_x_m,std_y_m,std_z_m,"
         "mean_yaw_zyx_rad,mean_pitch_zyx_rad,mean_roll_zyx_rad,"
         "std_yaw_zyx_rad,std_pitch_zyx_rad,std_roll_zyx_rad,"
         "mean_position_norm_m,mean_rotation_angle_rad,mean_abs_euler_rad\n";
  for (std::size_t i = 0; i < curve.sigma_m.size(); ++i) {
    out << fmt("%.3f", curve.sigma_m[i]);
    for (int a = 0; a < 3; ++a) out << ',' << fmt("%.7f", curve.mean_position[a][i]);
    for (int a = 0; a < 3; ++a) out << ',' << fmt("%.7f", curve.std_position[a][i]);
    for (int a = 0; a < 3; ++a) out << ',' << fmt("%.7f", curve.mean_euler[a][i]);
    for (int a = 0; a < 3; ++a) out << ',' << fmt("%.7f", curve.std_euler[a][i]);
    out << ',' << fmt("%.7f", curve.mean_norm[i]) << ',' << fmt("%.7f", curve.mean_angle[i])
        << ',' << fmt("%.7f", curve.mean_abs_euler[i]) << '\n';
  }
}

void write_gnss_summary(const std::string& path, const std::vector<GnssSummaryRow>& rows) {
  auto out = open_out(path);
  out << "regime,sensor,mu_m,sigma_m,count\n";
  for (const auto& r : rows) {
    out << r.regime << ',' << r.sensor << ',' << fmt("%.6f", r.mu_m) << ','
        << fmt("%.6f", r.sigma_m) << ',' << r.count << '\n';
  }
}

}  // namespace gtf::io
