#include <doctest.h>

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <limits>
#include <random>

#include "stackik/kinematics.hpp"
#include "stackik/scenario.hpp"
#include "stackik/solver.hpp"
#include "test_models.hpp"

using namespace stackik;

namespace {

SolverConfig undamped() {
  SolverConfig c;
  c.damping = 0.0;
  return c;
}

Task pose_at(const Vector3& target, int priority, PoseComponents comp = PoseComponents::kFull, double gain = 1.0) {
  return Task{PoseTask{"end_effector", Transform::from_xyz_rpy(target, Vector3::Zero()), gain, comp}, priority};
}

Task posture(std::vector<std::size_t> joints, JointVector target, int priority, double gain = 1.0) {
  return Task{PostureTask{std::move(joints), std::move(target), gain}, priority};
}

}  // namespace

TEST_CASE("1-DOF prismatic, square invertible case") {
  const ChainModel m = testing::prismatic_x(1);
  const TaskStack stack({pose_at({0.5, 0, 0}, 1)});
  const VelocityResult r = solve_velocity_step(m, JointVector::Zero(1), stack, testing::wide_limits(1), undamped());
  CHECK(r.qdot[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(r.scale_factor == 1.0);
  CHECK_FALSE(r.saturated);
  CHECK(r.rank_per_level == std::vector<int>{1});
}

TEST_CASE("priority-2 posture has no null space to act in") {
  const ChainModel m = testing::prismatic_x(1);
  const TaskStack stack({pose_at({0.5, 0, 0}, 1), posture({0}, JointVector::Constant(1, 9.0), 2)});
  const VelocityResult r = solve_velocity_step(m, JointVector::Zero(1), stack, testing::wide_limits(1), undamped());
  CHECK(r.qdot[0] == doctest::Approx(0.5).epsilon(1e-15));
  REQUIRE(r.residual_per_level.size() == 2);
  CHECK(r.residual_per_level[0] == doctest::Approx(0.0));
  CHECK(r.residual_per_level[1] == doctest::Approx(8.5));
  CHECK(r.rank_per_level == std::vector<int>{1, 0});
}

TEST_CASE("two prismatic joints: minimum norm, then the secondary task in the null space") {
  const ChainModel m = testing::prismatic_x(2);
  const LimitSet lim = testing::wide_limits(2);
  const VelocityResult one =
      solve_velocity_step(m, JointVector::Zero(2), TaskStack({pose_at({1, 0, 0}, 1)}), lim, undamped());
  CHECK((one.qdot - Eigen::Vector2d(0.5, 0.5)).norm() < 1e-14);

  const TaskStack both({pose_at({1, 0, 0}, 1), posture({0, 1}, Eigen::Vector2d(1, 0), 2)});
  const VelocityResult two = solve_velocity_step(m, JointVector::Zero(2), both, lim, undamped());
  CHECK((two.qdot - Eigen::Vector2d(1, 0)).norm() < 1e-14);
  CHECK(std::abs(two.qdot.sum() - 1.0) < 1e-14);
  CHECK(two.residual_per_level[0] < 1e-14);
}

TEST_CASE("scale factor examples") {
  LimitSet lim = testing::wide_limits(2);
  lim.velocity_max = Eigen::Vector2d(1, 1);
  SUBCASE("tightest velocity ratio") {
    const ScaleResult s = compute_scale_factor(Eigen::Vector2d(2, -4), Eigen::Vector2d::Zero(), lim, 0.01);
    CHECK(s.scale == 0.25);
    CHECK_FALSE(s.saturated);
  }
  SUBCASE("nothing binds") {
    const ScaleResult s = compute_scale_factor(Eigen::Vector2d(0.5, -0.9), Eigen::Vector2d::Zero(), lim, 0.01);
    CHECK(s.scale == 1.0);
  }
  SUBCASE("at the upper bound pushing outward") {
    lim.position_hi = Eigen::Vector2d(1, 1);
    const ScaleResult s = compute_scale_factor(Eigen::Vector2d(0.1, 0.0), Eigen::Vector2d(1, 0), lim, 0.01);
    CHECK(s.scale == 0.0);
    CHECK(s.saturated);
  }
  SUBCASE("position room limits the step") {
    lim.position_hi = Eigen::Vector2d(1, 1);
    const ScaleResult s = compute_scale_factor(Eigen::Vector2d(0.5, 0.0), Eigen::Vector2d(0.998, 0), lim, 0.01);
    CHECK(s.scale == doctest::Approx(0.4));
  }
  SUBCASE("zero components impose nothing") {
    lim.velocity_max = Eigen::Vector2d(0, 1);
    const ScaleResult s = compute_scale_factor(Eigen::Vector2d(0, 0.5), Eigen::Vector2d::Zero(), lim, 0.01);
    CHECK(s.scale == 1.0);
  }
}

TEST_CASE("a joint pinned at its bound is locked and the rest take over") {
  const ChainModel m = testing::prismatic_x(2);
  LimitSet lim = testing::wide_limits(2);
  lim.position_hi[0] = 0.0;
  const VelocityResult r =
      solve_velocity_step(m, JointVector::Zero(2), TaskStack({pose_at({1, 0, 0}, 1)}), lim, undamped());
  CHECK(r.qdot[0] == 0.0);
  CHECK(r.qdot[1] == doctest::Approx(1.0));
  CHECK(r.locked_joints == 1);
  CHECK(r.saturated);
  CHECK(r.scale_factor == 1.0);
}

TEST_CASE("every joint pinned: zero step, saturated") {
  const ChainModel m = testing::prismatic_x(1);
  LimitSet lim = testing::wide_limits(1);
  lim.position_hi[0] = 0.0;
  const VelocityResult r =
      solve_velocity_step(m, JointVector::Zero(1), TaskStack({pose_at({1, 0, 0}, 1)}), lim, undamped());
  CHECK(r.qdot[0] == 0.0);
  CHECK(r.saturated);
  CHECK(r.residual_per_level[0] == doctest::Approx(1.0));
}

TEST_CASE("input validation") {
  const ChainModel m = testing::prismatic_x(2);
  const TaskStack stack({pose_at({1, 0, 0}, 1)});
  LimitSet lim = testing::wide_limits(2);
  CHECK_THROWS_AS(solve_velocity_step(m, JointVector::Zero(3), stack, lim, {}), std::invalid_argument);
  lim.position_hi[1] = -1.0;
  lim.position_lo[1] = -2.0;
  CHECK_THROWS_AS(solve_velocity_step(m, JointVector::Zero(2), stack, lim, {}), std::invalid_argument);
  CHECK_THROWS_AS(solve_velocity_step(m, JointVector::Zero(2), stack, testing::wide_limits(3), {}),
                  std::invalid_argument);
  SolverConfig bad;
  bad.dt = 0.0;
  CHECK_THROWS_AS(TaskStackSolver(m, testing::wide_limits(2), bad), std::invalid_argument);
  const TaskStack bad_frame({Task{PoseTask{"hand", Transform::identity(), 1.0, PoseComponents::kFull}, 1}});
  CHECK_THROWS_AS(solve_velocity_step(m, JointVector::Zero(2), bad_frame, testing::wide_limits(2), {}), TaskError);
}

TEST_CASE("non-finite targets are reported, not clamped") {
  const ChainModel m = testing::prismatic_x(1);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const TaskStack stack({pose_at({nan, 0, 0}, 1)});
  CHECK_THROWS_AS(solve_velocity_step(m, JointVector::Zero(1), stack, testing::wide_limits(1), {}), NumericalError);
}

TEST_CASE("position IK: already at the target") {
  const ChainModel m = testing::planar_two_link();
  const JointVector q0 = Eigen::Vector2d(0.3, -0.4);
  const Transform t = forward_kinematics(m, q0, "end_effector");
  const TaskStack stack({Task{PoseTask{"end_effector", t, 1.0, PoseComponents::kFull}, 1}});
  const IkResult r = solve_position_ik(m, q0, stack, m.limits(), {});
  CHECK(r.converged);
  CHECK(r.iterations == 0);
  CHECK(r.q_final == q0);
  REQUIRE(r.final_error.size() == 1);
  CHECK(r.final_error[0] == Vector6::Zero());
  CHECK(r.solve_time_us >= 0.0);
}

TEST_CASE("position IK: planar two-link reaches (1, 1) at the analytic solution") {
  const ChainModel m = testing::planar_two_link();
  // gain·dt = 0.5: the default gain of 1/s halves nothing in 200 steps of 10 ms.
  const TaskStack stack({pose_at({1, 1, 0}, 1, PoseComponents::kPosition, 50.0)});
  const IkResult r = solve_position_ik(m, Eigen::Vector2d(0.1, 0.1), stack, m.limits(), {});
  CHECK(r.converged);
  CHECK(r.iterations < SolverConfig{}.max_iterations);
  const Vector3 tip = forward_kinematics(m, r.q_final, "end_effector").translation;
  CHECK((tip - Vector3(1, 1, 0)).norm() <= SolverConfig{}.tol_position);

  // Closed-form: c2 = (x² + y² − l1² − l2²) / (2 l1 l2), two elbow branches.
  const double x = 1.0;
  const double y = 1.0;
  const double c2 = (x * x + y * y - 2.0) / 2.0;
  double best = std::numeric_limits<double>::infinity();
  for (double sign : {1.0, -1.0}) {
    const double q2 = sign * std::acos(c2);
    const double q1 = std::atan2(y, x) - std::atan2(std::sin(q2), 1.0 + std::cos(q2));
    best = std::min(best, (r.q_final - Eigen::Vector2d(q1, q2)).norm());
  }
  CHECK(best < 1e-3);
}

TEST_CASE("position IK: unreachable target ends at the best approach") {
  const ChainModel m = testing::planar_two_link();
  const Vector3 target(3.0 / std::sqrt(2.0), 3.0 / std::sqrt(2.0), 0);
  // Near the stretched singularity a light damping with a high gain
  // saturates the velocity limits and chatters; λ = 0.1 tracks smoothly.
  const TaskStack stack({pose_at(target, 1, PoseComponents::kPosition, 10.0)});
  SolverConfig c;
  c.damping = 0.1;
  const IkResult r = solve_position_ik(m, Eigen::Vector2d(0.1, 0.1), stack, m.limits(), c);
  CHECK_FALSE(r.converged);
  CHECK(r.iterations == SolverConfig{}.max_iterations);
  const Vector3 err = r.final_error[0].head<3>();
  CHECK(err.norm() == doctest::Approx(1.0).epsilon(1e-2));
  CHECK(err.normalized().dot(target.normalized()) > 0.999);
}

TEST_CASE("property: priority invariance on random full-rank instances") {
  const ScenarioBundle b = build_default_scenario();
  const LimitSet lim = testing::wide_limits(b.model.n());
  TaskStackSolver solver(b.model, lim, undamped());
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-1, 1);
  double worst = 0.0;
  for (int draw = 0; draw < 100; ++draw) {
    const JointVector q = testing::random_q(rng, b.limits);
    const Transform target = sample_reachable_target(b, rng);
    const TaskStack primary({Task{PoseTask{"end_effector", target, 1.0, PoseComponents::kFull}, 1}});
    std::vector<std::size_t> joints;
    JointVector ref(18);
    for (std::size_t j = 0; j < 18; ++j) {
      if (u(rng) > 0.0) joints.push_back(j);
    }
    if (joints.empty()) joints.push_back(0);
    ref.resize(static_cast<Eigen::Index>(joints.size()));
    for (Eigen::Index k = 0; k < ref.size(); ++k) ref[k] = 3.0 * u(rng);
    const TaskStack dual({primary.task(0), Task{PostureTask{joints, ref, 5.0 * (u(rng) + 1.1)}, 2}});

    const double alone = solver.step(q, primary).residual_per_level[0];
    const VelocityResult& r = solver.step(q, dual);
    REQUIRE(r.scale_factor == 1.0);
    REQUIRE(r.rank_per_level[0] == 6);
    worst = std::max(worst, std::abs(r.residual_per_level[0] - alone));
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("property: single undamped task gives the minimum-norm solution") {
  std::mt19937_64 rng(32);
  double worst = 0.0;
  for (int draw = 0; draw < 100; ++draw) {
    const ChainModel m = testing::random_tree(rng, 7 + draw % 5);
    const LimitSet lim = testing::wide_limits(m.n());
    const JointVector q = testing::random_q(rng, m.limits());
    const Transform target = forward_kinematics(m, testing::random_q(rng, m.limits()), "end_effector");
    const TaskStack stack({Task{PoseTask{"end_effector", target, 0.7, PoseComponents::kFull}, 1}});
    const Eigen::MatrixXd j = geometric_jacobian(m, q, "end_effector");
    // Skip draws where the frame's path is too short or too close to singular.
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(j);
    if (svd.singularValues()(5) < 1e-2) continue;
    const Vector6 xdot = 0.7 * pose_error(target, forward_kinematics(m, q, "end_effector"));
    const JointVector oracle = j.transpose() * (j * j.transpose()).ldlt().solve(xdot);
    const VelocityResult r = solve_velocity_step(m, q, stack, lim, undamped());
    worst = std::max(worst, (r.qdot - oracle).cwiseAbs().maxCoeff());
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("property: damping bounds the step at the extended singularity") {
  const ChainModel m = testing::planar_two_link();
  const LimitSet lim = testing::wide_limits(2);
  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> u(-3, 3);
  for (double lambda : {1e-3, 1e-2, 0.1, 0.5}) {
    SolverConfig c;
    c.damping = lambda;
    const Eigen::MatrixXd j = geometric_jacobian(m, Eigen::Vector2d::Zero(), "end_effector");
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(j);
    double gain_max = 0.0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
      const double s = svd.singularValues()(i);
      gain_max = std::max(gain_max, s / (s * s + lambda * lambda));
    }
    for (int draw = 0; draw < 50; ++draw) {
      const Vector3 target(u(rng), u(rng), u(rng));
      const Transform t = Transform::from_xyz_rpy(target, {u(rng), u(rng), u(rng)});
      const TaskStack stack({Task{PoseTask{"end_effector", t, 1.0, PoseComponents::kFull}, 1}});
      const VelocityResult r = solve_velocity_step(m, Eigen::Vector2d::Zero(), stack, lim, c);
      const Vector6 xdot = pose_error(t, forward_kinematics(m, Eigen::Vector2d::Zero(), "end_effector"));
      CHECK(r.qdot.allFinite());
      CHECK(r.qdot.norm() <= xdot.norm() * gain_max * (1 + 1e-12));
    }
  }
}

TEST_CASE("property: limits hold along random scenario solves") {
  const ScenarioBundle b = build_default_scenario();
  LimitSet lim = b.limits;
  lim.velocity_max.setConstant(0.4);
  TaskStackSolver solver(b.model, lim, b.config);
  std::mt19937_64 rng(34);
  for (int draw = 0; draw < 10; ++draw) {
    const TaskStack stack = make_task_stack(b, sample_reachable_target(b, rng));
    JointVector q = b.q_nominal;
    for (int it = 0; it < 60; ++it) {
      const VelocityResult& r = solver.step(q, stack);
      CHECK(((r.qdot.cwiseAbs() - lim.velocity_max).array() <= 1e-9).all());
      q = (q + b.config.dt * r.qdot).cwiseMax(lim.position_lo).cwiseMin(lim.position_hi);
      CHECK(((q - lim.position_lo).array() >= 0.0).all());
      CHECK(((lim.position_hi - q).array() >= 0.0).all());
    }
  }
}

TEST_CASE("position IK matches a hand-rolled step loop bit for bit") {
  const ScenarioBundle b = build_default_scenario();
  TaskStackSolver solver(b.model, b.limits, b.config);
  TaskStackSolver stepper(b.model, b.limits, b.config);
  std::mt19937_64 rng(35);
  const std::size_t ee = b.model.frame_index("end_effector");
  KinematicsCache cache(b.model);
  for (int draw = 0; draw < 5; ++draw) {
    const TaskStack stack = make_task_stack(b, sample_reachable_target(b, rng));
    const IkResult r = solver.solve_position_ik(b.q_nominal, stack);
    JointVector q = b.q_nominal;
    const auto& target = std::get<PoseTask>(stack.task(0).spec).target;
    int iterations = 0;
    for (; iterations < b.config.max_iterations; ++iterations) {
      cache.update(q);
      const Vector6 e = pose_error(target, cache.frame_pose(ee));
      if (e.head<3>().norm() <= b.config.tol_position && e.tail<3>().norm() <= b.config.tol_rotation) break;
      q += (b.config.step_scale * b.config.dt) * stepper.step(q, stack).qdot;
      q = q.cwiseMax(b.limits.position_lo).cwiseMin(b.limits.position_hi);
    }
    CHECK(r.iterations == iterations);
    CHECK(r.q_final == q);
  }
}

TEST_CASE("property: repeated calls are bitwise identical") {
  const ScenarioBundle b = build_default_scenario();
  TaskStackSolver a(b.model, b.limits, b.config);
  TaskStackSolver fresh(b.model, b.limits, b.config);
  std::mt19937_64 rng(36);
  for (int draw = 0; draw < 20; ++draw) {
    const JointVector q = sample_configuration(b.limits, rng);
    const TaskStack stack = make_task_stack(b, sample_reachable_target(b, rng));
    const JointVector first = a.step(q, stack).qdot;
    CHECK(a.step(q, stack).qdot == first);
    CHECK(fresh.step(q, stack).qdot == first);
  }
}
