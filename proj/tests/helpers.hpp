#ifndef GTF_TESTS_HELPERS_HPP
#define GTF_TESTS_HELPERS_HPP

#include <Eigen/Geometry>
#include <functional>
#include <random>
#include <vector>

#include "gtf/geometry.hpp"
#include "gtf/types.hpp"

namespace gtf::test {

inline Eigen::Quaterniond random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
  q.normalize();
  return q;
}

inline RigidTransform random_transform(std::mt19937_64& rng, double translation_scale = 10.0) {
  std::uniform_real_distribution<double> u(-translation_scale, translation_scale);
  return {random_rotation(rng), Point3(u(rng), u(rng), u(rng))};
}

inline Point3 random_point(std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  return Point3(u(rng), u(rng), u(rng));
}

// A well-spread random point set (rejects near-collinear triangles).
inline std::vector<Point3> random_point_set(std::mt19937_64& rng, int n, double scale = 1.0) {
  while (true) {
    std::vector<Point3> pts;
    for (int i = 0; i < n; ++i) pts.push_back(random_point(rng, scale));
    const Point3 a = pts[1] - pts[0];
    const Point3 b = pts[2] - pts[0];
    if (a.cross(b).norm() > 0.2 * scale * scale) return pts;
  }
}

// Point-to-point cost of Eq-style rigid registration.
inline double alignment_cost(const PointCorrespondences& c, const RigidTransform& t) {
  double cost = 0.0;
  for (std::size_t i = 0; i < c.reference.size(); ++i) {
    cost += (c.reference[i] - t.apply(c.moving[i])).squaredNorm();
  }
  return cost;
}

// Gradient-free Nelder-Mead over SE(3), parameterized as (rotation vector,
// translation). Independent of the SVD solver; used as the registration
// oracle.
RigidTransform nelder_mead_align(const PointCorrespondences& c, std::mt19937_64& rng,
                                 int restarts = 24);

// Second independent closed-form route: Horn's quaternion eigenvector method.
RigidTransform horn_align(const PointCorrespondences& c);

}  // namespace gtf::test

#endif  // GTF_TESTS_HELPERS_HPP
