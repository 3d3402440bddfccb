#include "helpers.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <array>

namespace gtf::test {

namespace {

using Vec6 = Eigen::Matrix<double, 6, 1>;

RigidTransform transform_from_vec(const Vec6& v) {
  const Point3 rot = v.head<3>();
  const double angle = rot.norm();
  Eigen::Quaterniond q = Eigen::Quaterniond::Identity();
  if (angle > 1e-300) {
    q = Eigen::Quaterniond(Eigen::AngleAxisd(angle, rot / angle));
  }
  return {q, v.tail<3>()};
}

double cost_of(const Vec6& v, const PointCorrespondences& c) {
  return alignment_cost(c, transform_from_vec(v));
}

// Plain Nelder-Mead on a 6-dimensional parameter vector.
Vec6 nelder_mead(const PointCorrespondences& c, const Vec6& start, int max_iter) {
  constexpr int n = 6;
  std::array<Vec6, n + 1> simplex;
  std::array<double, n + 1> f;
  simplex[0] = start;
  for (int i = 0; i < n; ++i) {
    simplex[i + 1] = start;
    simplex[i + 1][i] += (i < 3 ? 0.25 : 0.5);
  }
  for (int i = 0; i <= n; ++i) f[i] = cost_of(simplex[i], c);

  auto order = [&] {
    std::array<int, n + 1> idx;
    for (int i = 0; i <= n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return f[a] < f[b]; });
    std::array<Vec6, n + 1> s2;
    std::array<double, n + 1> f2;
    for (int i = 0; i <= n; ++i) {
      s2[i] = simplex[idx[i]];
      f2[i] = f[idx[i]];
    }
    simplex = s2;
    f = f2;
  };

  for (int iter = 0; iter < max_iter; ++iter) {
    order();
    if (f[n] - f[0] < 1e-16 * (1.0 + std::abs(f[0]))) break;

    Vec6 centroid = Vec6::Zero();
    for (int i = 0; i < n; ++i) centroid += simplex[i];
    centroid /= n;

    const Vec6 reflected = centroid + (centroid - simplex[n]);
    const double fr = cost_of(reflected, c);
    if (fr < f[0]) {
      const Vec6 expanded = centroid + 2.0 * (centroid - simplex[n]);
      const double fe = cost_of(expanded, c);
      if (fe < fr) {
        simplex[n] = expanded;
        f[n] = fe;
      } else {
        simplex[n] = reflected;
        f[n] = fr;
      }
    } else if (fr < f[n - 1]) {
      simplex[n] = reflected;
      f[n] = fr;
    } else {
      const Vec6 contracted = centroid + 0.5 * (simplex[n] - centroid);
      const double fc = cost_of(contracted, c);
      if (fc < f[n]) {
        simplex[n] = contracted;
        f[n] = fc;
      } else {
        for (int i = 1; i <= n; ++i) {
          simplex[i] = simplex[0] + 0.5 * (simplex[i] - simplex[0]);
          f[i] = cost_of(simplex[i], c);
        }
      }
    }
  }
  order();
  return simplex[0];
}

}  // namespace

RigidTransform nelder_mead_align(const PointCorrespondences& c, std::mt19937_64& rng,
                                 int restarts) {
  std::uniform_real_distribution<double> rot(-M_PI, M_PI);
  std::uniform_real_distribution<double> trans(-12.0, 12.0);

  Vec6 best = Vec6::Zero();
  double best_cost = cost_of(best, c);
  for (int r = 0; r < restarts; ++r) {
    Vec6 start;
    if (r == 0) {
      start = Vec6::Zero();
    } else if (r == 1) {
      start = best;
    } else {
      start << rot(rng), rot(rng), rot(rng), trans(rng), trans(rng), trans(rng);
    }
    const Vec6 candidate = nelder_mead(c, start, 4000);
    const double cost = cost_of(candidate, c);
    if (cost < best_cost) {
      best = candidate;
      best_cost = cost;
    }
  }
  // Polish the winner.
  best = nelder_mead(c, best, 8000);
  return transform_from_vec(best);
}

RigidTransform horn_align(const PointCorrespondences& c) {
  const std::size_t n = c.reference.size();
  Point3 ref_centroid = Point3::Zero(), mov_centroid = Point3::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    ref_centroid += c.reference[i];
    mov_centroid += c.moving[i];
  }
  ref_centroid /= static_cast<double>(n);
  mov_centroid /= static_cast<double>(n);

  Eigen::Matrix3d s = Eigen::Matrix3d::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    s += (c.moving[i] - mov_centroid) * (c.reference[i] - ref_centroid).transpose();
  }

  Eigen::Matrix4d nmat;
  nmat << s(0, 0) + s(1, 1) + s(2, 2), s(1, 2) - s(2, 1), s(2, 0) - s(0, 2), s(0, 1) - s(1, 0),
      s(1, 2) - s(2, 1), s(0, 0) - s(1, 1) - s(2, 2), s(0, 1) + s(1, 0), s(2, 0) + s(0, 2),
      s(2, 0) - s(0, 2), s(0, 1) + s(1, 0), s(1, 1) - s(0, 0) - s(2, 2), s(1, 2) + s(2, 1),
      s(0, 1) - s(1, 0), s(2, 0) + s(0, 2), s(1, 2) + s(2, 1), s(2, 2) - s(0, 0) - s(1, 1);

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> eig(nmat);
  const Eigen::Vector4d q = eig.eigenvectors().col(3);  // largest eigenvalue
  Eigen::Quaterniond rotation(q[0], q[1], q[2], q[3]);
  rotation.normalize();
  return {rotation, ref_centroid - rotation * mov_centroid};
}

}  // namespace gtf::test
