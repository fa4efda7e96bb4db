#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include <Eigen/Core>

#include "stackik/kinematics.hpp"
#include "stackik/linalg.hpp"
#include "stackik/model.hpp"
#include "stackik/task.hpp"

namespace stackik {

struct SolverConfig {
  double damping = 1e-2;
  /// Relative singular-value cutoff used for rank decisions.
  double sv_threshold = 1e-8;
  double dt = 0.01;
  int max_iterations = 200;
  double tol_position = 1e-4;
  double tol_rotation = 1e-3;
  double step_scale = 1.0;

  /// Throws std::invalid_argument on out-of-range fields.
  void validate() const;
};

struct ScaleResult {
  double scale = 1.0;
  /// A joint sits on a bound with velocity pushing outward (scale == 0).
  bool saturated = false;
};

/// Largest s ≤ 1 such that s·qdot respects velocity limits and the
/// position box over one step of length dt.
ScaleResult compute_scale_factor(const JointVector& qdot, const JointVector& q, const LimitSet& limits, double dt);

struct VelocityResult {
  JointVector qdot;
  std::vector<double> residual_per_level;
  std::vector<int> rank_per_level;
  double scale_factor = 1.0;
  /// Some joint was pinned at a bound (locked) or the final scale is zero.
  bool saturated = false;
  /// Joints held still because they sat on a bound with the solution
  /// pushing outward.
  int locked_joints = 0;
};

struct IkResult {
  JointVector q_final;
  int iterations = 0;
  bool converged = false;
  /// Pose error at q_final, one entry per pose task in stack order.
  std::vector<Vector6> final_error;
  double solve_time_us = 0.0;
};

/// Prioritized differential IK solver bound to one model, limit set and
/// configuration.
///
/// Workspaces are sized from the model and from the level structure of the
/// last stack seen; once sized, `step` and the iteration loop of
/// `solve_position_ik` perform no heap allocation. A solver instance is
/// not thread-safe; use one per thread.
class TaskStackSolver {
 public:
  TaskStackSolver(ChainModel model, LimitSet limits, SolverConfig config = {});

  const ChainModel& model() const { return *model_; }
  const LimitSet& limits() const { return limits_; }
  const SolverConfig& config() const { return config_; }

  /// Sizes the per-level workspaces for the stack's level structure. Called
  /// implicitly by the solve functions when the structure changes.
  void prepare(const TaskStack& stack);

  /// One velocity step. The returned reference stays valid until the next
  /// call on this solver.
  const VelocityResult& step(const JointVector& q, const TaskStack& stack);

  VelocityResult solve_velocity_step(const JointVector& q, const TaskStack& stack) { return step(q, stack); }

  IkResult solve_position_ik(const JointVector& q0, const TaskStack& stack);

 private:
  struct Level {
    Eigen::MatrixXd jac;
    Eigen::MatrixXd projected;
    Eigen::VectorXd desired;
    Eigen::VectorXd work_rows;
    Eigen::VectorXd work_sv;
    SmallSvd svd;
  };

  void check_configuration(const JointVector& q) const;
  bool structure_matches(const TaskStack& stack) const;
  /// Updates kinematics and fills every level's Jacobian and desired rates.
  void evaluate_tasks(const JointVector& q, const TaskStack& stack);
  bool pose_tasks_within_tolerance(const TaskStack& stack) const;
  /// Priority resolution over the joints left free by free_mask_.
  void resolve();
  /// resolve() plus joint locking and the uniform limit scale.
  void resolve_within_limits(const JointVector& q);

  std::shared_ptr<const ChainModel> model_;
  LimitSet limits_;
  SolverConfig config_;
  KinematicsCache kinematics_;

  std::vector<std::size_t> prepared_rows_;
  std::vector<Level> levels_;
  std::vector<Vector6> pose_errors_;
  Eigen::MatrixXd frame_jac_;
  Eigen::MatrixXd projector_;
  Eigen::VectorXd q_work_;
  Eigen::VectorXd step_;
  Eigen::VectorXd free_mask_;
  VelocityResult result_;
};

/// Convenience wrappers that build a solver for one call.
VelocityResult solve_velocity_step(const ChainModel& model, const JointVector& q, const TaskStack& stack,
                                   const LimitSet& limits, const SolverConfig& config);
IkResult solve_position_ik(const ChainModel& model, const JointVector& q0, const TaskStack& stack,
                           const LimitSet& limits, const SolverConfig& config);

}  // namespace stackik
