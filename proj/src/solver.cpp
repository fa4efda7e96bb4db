#include "stackik/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace stackik {

void SolverConfig::validate() const {
  if (!(damping >= 0.0) || !std::isfinite(damping)) throw std::invalid_argument("solver: damping must be >= 0");
  if (!(sv_threshold > 0.0)) throw std::invalid_argument("solver: sv_threshold must be > 0");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("solver: dt must be > 0");
  if (max_iterations < 1) throw std::invalid_argument("solver: max_iterations must be >= 1");
  if (!(tol_position > 0.0)) throw std::invalid_argument("solver: tol_position must be > 0");
  if (!(tol_rotation > 0.0)) throw std::invalid_argument("solver: tol_rotation must be > 0");
  if (!(step_scale > 0.0 && step_scale <= 1.0)) throw std::invalid_argument("solver: step_scale must be in (0, 1]");
}

ScaleResult compute_scale_factor(const JointVector& qdot, const JointVector& q, const LimitSet& limits, double dt) {
  ScaleResult out;
  for (Eigen::Index i = 0; i < qdot.size(); ++i) {
    const double v = qdot[i];
    if (v == 0.0) continue;
    double bound = limits.velocity_max[i] / std::abs(v);
    const double room = v > 0.0 ? limits.position_hi[i] - q[i] : limits.position_lo[i] - q[i];
    // room has the sign of v unless the joint is already at (or past) the bound.
    const double pos_bound = (room / v > 0.0) ? room / (v * dt) : 0.0;
    bound = std::min(bound, pos_bound);
    out.scale = std::min(out.scale, bound);
  }
  out.scale = std::max(out.scale, 0.0);
  out.saturated = out.scale == 0.0;
  return out;
}

TaskStackSolver::TaskStackSolver(ChainModel model, LimitSet limits, SolverConfig config)
    : model_(std::make_shared<const ChainModel>(std::move(model))),
      limits_(std::move(limits)),
      config_(config),
      kinematics_(*model_) {
  config_.validate();
  limits_.validate();
  if (limits_.size() != model_->n()) throw std::invalid_argument("solver: limit set size differs from model");
  const auto n = static_cast<Eigen::Index>(model_->n());
  frame_jac_.setZero(6, n);
  projector_.setIdentity(n, n);
  q_work_.setZero(n);
  step_.setZero(n);
  free_mask_.setOnes(n);
  result_.qdot.setZero(n);
}

bool TaskStackSolver::structure_matches(const TaskStack& stack) const {
  return stack.level_rows() == prepared_rows_ && pose_errors_.size() == stack.size();
}

void TaskStackSolver::prepare(const TaskStack& stack) {
  if (structure_matches(stack)) return;
  stack.validate(*model_);
  const auto n = static_cast<Eigen::Index>(model_->n());
  levels_.clear();
  levels_.reserve(stack.level_rows().size());
  for (std::size_t rows_u : stack.level_rows()) {
    const auto rows = static_cast<Eigen::Index>(rows_u);
    Level level;
    level.jac.setZero(rows, n);
    level.projected.setZero(rows, n);
    level.desired.setZero(rows);
    level.work_rows.setZero(rows);
    level.work_sv.setZero(std::min(rows, n));
    level.svd = SmallSvd(rows, n);
    levels_.push_back(std::move(level));
  }
  prepared_rows_ = stack.level_rows();
  pose_errors_.assign(stack.size(), Vector6::Zero());
  result_.residual_per_level.assign(levels_.size(), 0.0);
  result_.rank_per_level.assign(levels_.size(), 0);
}

void TaskStackSolver::check_configuration(const JointVector& q) const {
  if (static_cast<std::size_t>(q.size()) != model_->n()) {
    throw std::invalid_argument("joint vector has length " + std::to_string(q.size()) + ", model has " +
                                std::to_string(model_->n()) + " joints");
  }
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    if (!(q[i] >= limits_.position_lo[i] && q[i] <= limits_.position_hi[i])) {
      throw std::invalid_argument("joint '" + model_->joint(static_cast<std::size_t>(i)).name +
                                  "' is outside its position limits");
    }
  }
}

void TaskStackSolver::evaluate_tasks(const JointVector& q, const TaskStack& stack) {
  kinematics_.update(q);
  for (std::size_t l = 0; l < levels_.size(); ++l) {
    Level& level = levels_[l];
    Eigen::Index row = 0;
    for (std::size_t ti : stack.levels()[l]) {
      const Task& task = stack.task(ti);
      if (const auto* pose = std::get_if<PoseTask>(&task.spec)) {
        const std::size_t frame = model_->frame_index(pose->frame);
        kinematics_.jacobian(frame, frame_jac_);
        const Vector6 err = pose_error(pose->target, kinematics_.frame_pose(frame));
        pose_errors_[ti] = err;
        switch (pose->components) {
          case PoseComponents::kFull:
            level.jac.middleRows(row, 6) = frame_jac_;
            level.desired.segment(row, 6) = pose->gain * err;
            row += 6;
            break;
          case PoseComponents::kPosition:
            level.jac.middleRows(row, 3) = frame_jac_.topRows(3);
            level.desired.segment(row, 3) = pose->gain * err.head<3>();
            row += 3;
            break;
          case PoseComponents::kOrientation:
            level.jac.middleRows(row, 3) = frame_jac_.bottomRows(3);
            level.desired.segment(row, 3) = pose->gain * err.tail<3>();
            row += 3;
            break;
        }
      } else {
        const auto& posture = std::get<PostureTask>(task.spec);
        for (std::size_t k = 0; k < posture.joints.size(); ++k) {
          const auto j = static_cast<Eigen::Index>(posture.joints[k]);
          level.jac.row(row).setZero();
          level.jac(row, j) = 1.0;
          level.desired(row) = posture.gain * (posture.target[static_cast<Eigen::Index>(k)] - q[j]);
          ++row;
        }
      }
    }
  }
}

bool TaskStackSolver::pose_tasks_within_tolerance(const TaskStack& stack) const {
  for (std::size_t ti = 0; ti < stack.size(); ++ti) {
    const auto* pose = std::get_if<PoseTask>(&stack.task(ti).spec);
    if (!pose) continue;
    const Vector6& err = pose_errors_[ti];
    const bool pos_ok = err.head<3>().norm() <= config_.tol_position;
    const bool rot_ok = err.tail<3>().norm() <= config_.tol_rotation;
    switch (pose->components) {
      case PoseComponents::kFull:
        if (!(pos_ok && rot_ok)) return false;
        break;
      case PoseComponents::kPosition:
        if (!pos_ok) return false;
        break;
      case PoseComponents::kOrientation:
        if (!rot_ok) return false;
        break;
    }
  }
  return true;
}

void TaskStackSolver::resolve() {
  JointVector& qdot = result_.qdot;
  qdot.setZero();
  projector_.setZero();
  projector_.diagonal() = free_mask_;
  const double lambda = config_.damping;
  for (std::size_t l = 0; l < levels_.size(); ++l) {
    Level& level = levels_[l];
    level.work_rows = level.desired;
    level.work_rows.noalias() -= level.jac * qdot;
    level.projected.noalias() = level.jac * projector_;
    if (!level.projected.allFinite()) {
      throw NumericalError("non-finite projected Jacobian at priority level " + std::to_string(l + 1));
    }
    level.svd.compute(level.projected);
    const auto& sigma = level.svd.singular_values();
    const auto& u = level.svd.matrix_u();
    const auto& v = level.svd.matrix_v();
    // Rank cutoff is relative to the unprojected task Jacobian so that a level
    // fully absorbed by higher priorities reads as rank zero.
    const double cutoff = config_.sv_threshold * level.jac.norm();

    level.work_sv.noalias() = u.transpose() * level.work_rows;
    int rank = 0;
    for (Eigen::Index i = 0; i < sigma.size(); ++i) {
      level.work_sv(i) *= damped_inverse_gain(sigma(i), lambda, cutoff);
      if (sigma(i) > 0.0 && sigma(i) >= cutoff) ++rank;
    }
    // V already lies in range(P) in exact arithmetic; projecting the
    // increment again removes the rounding leak into higher levels, which
    // otherwise grows like eps/σ² for small projected singular values.
    step_.noalias() = v * level.work_sv;
    qdot.noalias() += projector_ * step_;
    if (!qdot.allFinite()) {
      throw NumericalError("non-finite joint velocity at priority level " + std::to_string(l + 1));
    }
    result_.rank_per_level[l] = rank;

    if (l + 1 < levels_.size() && rank > 0) {
      projector_.noalias() -= v.leftCols(rank) * v.leftCols(rank).transpose();
    }
  }
}

void TaskStackSolver::resolve_within_limits(const JointVector& q) {
  free_mask_.setOnes();
  result_.locked_joints = 0;
  resolve();
  ScaleResult s = compute_scale_factor(result_.qdot, q, limits_, config_.dt);
  // A joint pinned at a bound (or with zero velocity allowance) would force
  // s = 0 for the whole stack; lock it out of every level and resolve again.
  while (s.saturated) {
    bool locked_any = false;
    for (Eigen::Index i = 0; i < q.size(); ++i) {
      const double v = result_.qdot[i];
      if (free_mask_[i] == 0.0 || v == 0.0) continue;
      const double room = v > 0.0 ? limits_.position_hi[i] - q[i] : limits_.position_lo[i] - q[i];
      if (room / v <= 0.0 || limits_.velocity_max[i] == 0.0) {
        free_mask_[i] = 0.0;
        ++result_.locked_joints;
        locked_any = true;
      }
    }
    if (!locked_any) break;
    resolve();
    s = compute_scale_factor(result_.qdot, q, limits_, config_.dt);
  }
  result_.scale_factor = s.scale;
  result_.saturated = s.saturated || result_.locked_joints > 0;
  if (s.scale < 1.0) result_.qdot *= s.scale;
  for (std::size_t l = 0; l < levels_.size(); ++l) {
    Level& level = levels_[l];
    level.work_rows = level.desired;
    level.work_rows.noalias() -= level.jac * result_.qdot;
    result_.residual_per_level[l] = level.work_rows.norm();
  }
}

const VelocityResult& TaskStackSolver::step(const JointVector& q, const TaskStack& stack) {
  check_configuration(q);
  prepare(stack);
  evaluate_tasks(q, stack);
  resolve_within_limits(q);
  return result_;
}

IkResult TaskStackSolver::solve_position_ik(const JointVector& q0, const TaskStack& stack) {
  const auto start = std::chrono::steady_clock::now();
  check_configuration(q0);
  prepare(stack);

  IkResult out;
  out.q_final.resize(q0.size());
  q_work_ = q0;
  const double step_length = config_.step_scale * config_.dt;
  while (true) {
    evaluate_tasks(q_work_, stack);
    if (pose_tasks_within_tolerance(stack)) {
      out.converged = true;
      break;
    }
    if (out.iterations >= config_.max_iterations) break;
    resolve_within_limits(q_work_);
    q_work_.noalias() += step_length * result_.qdot;
    q_work_ = q_work_.cwiseMax(limits_.position_lo).cwiseMin(limits_.position_hi);
    ++out.iterations;
  }

  out.q_final = q_work_;
  for (std::size_t ti = 0; ti < stack.size(); ++ti) {
    if (stack.task(ti).is_pose()) out.final_error.push_back(pose_errors_[ti]);
  }
  out.solve_time_us =
      std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - start).count();
  return out;
}

VelocityResult solve_velocity_step(const ChainModel& model, const JointVector& q, const TaskStack& stack,
                                   const LimitSet& limits, const SolverConfig& config) {
  TaskStackSolver solver(model, limits, config);
  return solver.solve_velocity_step(q, stack);
}

IkResult solve_position_ik(const ChainModel& model, const JointVector& q0, const TaskStack& stack,
                           const LimitSet& limits, const SolverConfig& config) {
  TaskStackSolver solver(model, limits, config);
  return solver.solve_position_ik(q0, stack);
}

}  // namespace stackik
