#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gtf/analysis.hpp"
#include "gtf/cli.hpp"
#include "gtf/config.hpp"
#include "gtf/geometry.hpp"
#include "gtf/pipeline.hpp"
#include "gtf/stations.hpp"
#include "gtf/timesync.hpp"
#include "gtf/types.hpp"

namespace py = pybind11;
using namespace gtf;

namespace {

RigidTransform make_transform(const Eigen::Vector4d& q_wxyz, const Point3& t) {
  return {Eigen::Quaterniond(q_wxyz[0], q_wxyz[1], q_wxyz[2], q_wxyz[3]), t};
}

Eigen::Vector4d quat_wxyz(const RigidTransform& t) {
  return {t.rotation.w(), t.rotation.x(), t.rotation.y(), t.rotation.z()};
}

PrismLayout layout_from_points(const Eigen::Matrix3d& rows) {
  return PrismLayout({Point3(rows.row(0)), Point3(rows.row(1)), Point3(rows.row(2))});
}

}  // namespace

PYBIND11_MODULE(_gtf, m) {
  m.doc() = "total-station ground-truth toolkit (native core)";

  py::register_exception<ConfigError>(m, "ConfigError");
  py::register_exception<NumericalError>(m, "NumericalError");

  py::enum_<Status>(m, "Status")
      .value("Ok", Status::Ok)
      .value("PrismNotDetected", Status::PrismNotDetected)
      .value("PrismTooClose", Status::PrismTooClose)
      .value("NotLevelled", Status::NotLevelled)
      .value("Invalid", Status::Invalid);

  py::class_<RigidTransform>(m, "RigidTransform")
      .def(py::init([](const Eigen::Vector4d& q, const Point3& t) {
             return make_transform(q, t);
           }),
           py::arg("quaternion_wxyz"), py::arg("translation"))
      .def_static("identity", &RigidTransform::identity)
      .def_property_readonly("quaternion_wxyz", &quat_wxyz)
      .def_property_readonly("translation",
                             [](const RigidTransform& t) { return t.translation; })
      .def("apply", &RigidTransform::apply, py::arg("point"))
      .def("inverse", &RigidTransform::inverse)
      .def("matrix", &RigidTransform::matrix)
      .def("__mul__",
           [](const RigidTransform& a, const RigidTransform& b) { return compose(a, b); });

  py::class_<RawMeasurement>(m, "RawMeasurement")
      .def(py::init([](int station, double ha, double va, double range, std::int64_t t_client_us,
                       Status status) {
             RawMeasurement mm;
             mm.station = station_frame(station);
             mm.ha = ha;
             mm.va = va;
             mm.range = range;
             mm.t_client = Timestamp(t_client_us);
             mm.status = status;
             return mm;
           }),
           py::arg("station"), py::arg("ha"), py::arg("va"), py::arg("range"),
           py::arg("t_client_us"), py::arg("status") = Status::Ok)
      .def_property_readonly("station",
                             [](const RawMeasurement& mm) { return station_index(mm.station); })
      .def_readonly("ha", &RawMeasurement::ha)
      .def_readonly("va", &RawMeasurement::va)
      .def_readonly("range", &RawMeasurement::range)
      .def_property_readonly("t_client_us",
                             [](const RawMeasurement& mm) { return mm.t_client.micros; })
      .def_readonly("status", &RawMeasurement::status);

  py::class_<PrismLayout>(m, "PrismLayout")
      .def(py::init(&layout_from_points), py::arg("points"))
      .def_property_readonly("points",
                             [](const PrismLayout& l) {
                               Eigen::Matrix3d p;
                               for (int k = 0; k < 3; ++k) p.row(k) = l.points[k];
                               return p;
                             })
      .def_readonly("d12", &PrismLayout::d12)
      .def_readonly("d13", &PrismLayout::d13)
      .def_readonly("d23", &PrismLayout::d23);
  m.def("default_prism_layout", &default_prism_layout);

  py::class_<SkewEstimate>(m, "SkewEstimate")
      .def(py::init<>())
      .def_readonly("delta_us", &SkewEstimate::delta_us)
      .def_readonly("resync_count", &SkewEstimate::resync_count)
      .def_readonly("filter_weight", &SkewEstimate::filter_weight)
      .def_readonly("history", &SkewEstimate::history)
      .def_readonly("initialized", &SkewEstimate::initialized);

  py::class_<PoseSample>(m, "PoseSample")
      .def_property_readonly("t_us", [](const PoseSample& p) { return p.t.micros; })
      .def_property_readonly("translation",
                             [](const PoseSample& p) { return p.pose.translation; })
      .def_property_readonly("quaternion_wxyz",
                             [](const PoseSample& p) { return quat_wxyz(p.pose); })
      .def_readonly("residual_rms", &PoseSample::residual_rms)
      .def_readonly("valid", &PoseSample::valid);

  m.def("distance", &distance, py::arg("a"), py::arg("b"));
  m.def("compose", &compose, py::arg("a"), py::arg("b"));
  m.def(
      "rotation_angle",
      [](const Eigen::Vector4d& a, const Eigen::Vector4d& b) {
        return rotation_angle(Eigen::Quaterniond(a[0], a[1], a[2], a[3]),
                              Eigen::Quaterniond(b[0], b[1], b[2], b[3]));
      },
      py::arg("a_wxyz"), py::arg("b_wxyz"));

  m.def(
      "spherical_to_cartesian",
      [](const RawMeasurement& mm, bool zenith) {
        return spherical_to_cartesian(mm, zenith ? VerticalAngleConvention::Zenith
                                                 : VerticalAngleConvention::Elevation);
      },
      py::arg("measurement"), py::arg("zenith") = true);

  m.def(
      "align_point_sets",
      [](const Eigen::MatrixX3d& reference, const Eigen::MatrixX3d& moving) {
        PointCorrespondences c;
        for (Eigen::Index i = 0; i < reference.rows(); ++i) c.reference.push_back(reference.row(i));
        for (Eigen::Index i = 0; i < moving.rows(); ++i) c.moving.push_back(moving.row(i));
        return align_point_sets(c);
      },
      py::arg("reference"), py::arg("moving"),
      "Least-squares rigid transform mapping `moving` onto `reference`.");

  m.def(
      "solve_pose",
      [](const Eigen::Matrix3d& triplet, const PrismLayout& layout, std::int64_t t_us) {
        return solve_pose(Timestamp(t_us),
                          {Point3(triplet.row(0)), Point3(triplet.row(1)), Point3(triplet.row(2))},
                          layout);
      },
      py::arg("triplet"), py::arg("layout"), py::arg("t_us") = 0);

  m.def(
      "midpoint",
      [](std::int64_t t_b, std::int64_t t_e) {
        return midpoint(Timestamp(t_b), Timestamp(t_e)).micros;
      },
      py::arg("t_b_us"), py::arg("t_e_us"));

  m.def(
      "mean_skew",
      [](const std::vector<std::array<std::int64_t, 3>>& cycles) {
        std::vector<SyncCycle> cs;
        for (const auto& c : cycles) {
          cs.push_back({Timestamp(c[0]), Timestamp(c[1]), Timestamp(c[2])});
        }
        return mean_skew(cs);
      },
      py::arg("cycles"), "Cycles are (t_b_us, t_e_us, t_i_us) triples.");

  m.def("update_correction", &update_correction, py::arg("d_bar_us"), py::arg("previous"));
  m.def(
      "apply_correction",
      [](std::int64_t t_us, const SkewEstimate& e) {
        return apply_correction(Timestamp(t_us), e).micros;
      },
      py::arg("t_client_us"), py::arg("estimate"));

  py::class_<PerturbationCurve>(m, "PerturbationCurve")
      .def_readonly("sigma_m", &PerturbationCurve::sigma_m)
      .def_readonly("mean_position", &PerturbationCurve::mean_position)
      .def_readonly("std_position", &PerturbationCurve::std_position)
      .def_readonly("mean_euler", &PerturbationCurve::mean_euler)
      .def_readonly("std_euler", &PerturbationCurve::std_euler)
      .def_readonly("mean_norm", &PerturbationCurve::mean_norm)
      .def_readonly("mean_angle", &PerturbationCurve::mean_angle)
      .def_readonly("mean_abs_euler", &PerturbationCurve::mean_abs_euler);

  m.def(
      "perturbation_study",
      [](const PrismLayout& layout, std::uint64_t seed, double sigma_max_m, double sigma_step_m,
         int trials, int parallel) {
        PerturbationParams params;
        params.sigma_max_m = sigma_max_m;
        params.sigma_step_m = sigma_step_m;
        params.trials = trials;
        params.parallel = parallel;
        return perturbation_study(layout, seed, params);
      },
      py::arg("layout"), py::arg("seed"), py::arg("sigma_max_m") = 0.400,
      py::arg("sigma_step_m") = 0.004, py::arg("trials") = 1000, py::arg("parallel") = 1);

  // Config-driven commands (same behavior as the gtf binary).
  m.def(
      "simulate",
      [](const std::string& config_path, const std::string& out_dir) {
        return cmd_simulate(load_run_config(config_path), out_dir);
      },
      py::arg("config_path"), py::arg("out_dir"));
  m.def(
      "calibrate",
      [](const std::string& config_path, const std::string& out_dir) {
        return cmd_calibrate(load_run_config(config_path), out_dir);
      },
      py::arg("config_path"), py::arg("out_dir"));
  m.def(
      "solve",
      [](const std::string& config_path, const std::string& out_dir) {
        return cmd_solve(load_run_config(config_path), out_dir);
      },
      py::arg("config_path"), py::arg("out_dir"));
  m.def(
      "analyze",
      [](const std::string& config_path, const std::string& out_dir, const std::string& mode,
         int parallel) {
        RunConfig config = load_run_config(config_path);
        if (!mode.empty()) config.analysis.mode = mode;
        return cmd_analyze(config, out_dir, parallel);
      },
      py::arg("config_path"), py::arg("out_dir"), py::arg("mode") = "", py::arg("parallel") = 1);

  m.def("write_default_config", [](const std::string& path) {
    write_run_config(path, default_run_config());
  });

  m.attr("__version__") = "0.1.0";
}
