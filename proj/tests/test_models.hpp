#pragma once

// Small hand-built models shared by the unit tests and the acceptance suite.

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "stackik/model.hpp"
#include "stackik/solver.hpp"

namespace stackik::testing {

inline JointSpec revolute(std::string name, Vector3 axis, Transform origin, std::ptrdiff_t parent,
                          double limit = M_PI, double velocity = 10.0) {
  JointSpec j;
  j.name = std::move(name);
  j.kind = JointKind::kRevolute;
  j.axis = axis;
  j.origin = origin;
  j.position_limits = {-limit, limit};
  j.velocity_limit = velocity;
  j.parent = parent;
  return j;
}

inline JointSpec prismatic(std::string name, Vector3 axis, Transform origin, std::ptrdiff_t parent,
                           double limit = 10.0, double velocity = 10.0) {
  JointSpec j = revolute(std::move(name), axis, origin, parent, limit, velocity);
  j.kind = JointKind::kPrismatic;
  return j;
}

inline Transform offset(double x, double y, double z) {
  return Transform::from_xyz_rpy({x, y, z}, Vector3::Zero());
}

/// Planar arm in the xy plane: two z-joints, links along x.
inline ChainModel planar_two_link(double l1 = 1.0, double l2 = 1.0) {
  return ChainModel("planar2",
                    {revolute("shoulder", Vector3::UnitZ(), Transform::identity(), kRootParent),
                     revolute("elbow", Vector3::UnitZ(), offset(l1, 0, 0), 0)},
                    {{"end_effector", 1, offset(l2, 0, 0)}});
}

/// k prismatic joints stacked along x with coincident origins.
inline ChainModel prismatic_x(int k) {
  std::vector<JointSpec> joints;
  for (int i = 0; i < k; ++i) {
    joints.push_back(prismatic("slide_" + std::to_string(i), Vector3::UnitX(), Transform::identity(),
                               i == 0 ? kRootParent : i - 1));
  }
  return ChainModel("slides", std::move(joints), {{"end_effector", static_cast<std::size_t>(k - 1), Transform::identity()}});
}

/// Limits wide enough never to bind.
inline LimitSet wide_limits(std::size_t n) {
  LimitSet l;
  l.position_lo = JointVector::Constant(static_cast<Eigen::Index>(n), -1e9);
  l.position_hi = JointVector::Constant(static_cast<Eigen::Index>(n), 1e9);
  l.velocity_max = JointVector::Constant(static_cast<Eigen::Index>(n), 1e9);
  return l;
}

/// Random tree: mixed joint kinds, random unit axes, random origins, and
/// parents drawn from any earlier joint. Frames on a few joints.
inline ChainModel random_tree(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<JointSpec> joints;
  for (int i = 0; i < n; ++i) {
    Vector3 axis(u(rng), u(rng), u(rng));
    while (axis.norm() < 0.1) axis = Vector3(u(rng), u(rng), u(rng));
    axis.normalize();
    const Transform origin = Transform::from_xyz_rpy({u(rng), u(rng), u(rng)}, {u(rng), u(rng), u(rng)});
    const std::ptrdiff_t parent = i == 0 ? kRootParent : std::uniform_int_distribution<int>(-1, i - 1)(rng);
    const std::string name = "j" + std::to_string(i);
    joints.push_back(u(rng) > -0.5 ? revolute(name, axis, origin, parent) : prismatic(name, axis, origin, parent));
  }
  std::vector<FrameSpec> frames{{"end_effector", static_cast<std::size_t>(n - 1),
                                 Transform::from_xyz_rpy({u(rng), u(rng), u(rng)}, {u(rng), u(rng), u(rng)})},
                                {"mid", static_cast<std::size_t>(n / 2), offset(0.3, 0, 0)}};
  return ChainModel("random", std::move(joints), std::move(frames));
}

inline JointVector random_q(std::mt19937_64& rng, const LimitSet& limits) {
  JointVector q(static_cast<Eigen::Index>(limits.size()));
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    q[i] = std::uniform_real_distribution<double>(limits.position_lo[i], limits.position_hi[i])(rng);
  }
  return q;
}

}  // namespace stackik::testing
