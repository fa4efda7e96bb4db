#include "stackik/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace stackik {

namespace {

Vector3 vee_of_skew_part(const Matrix3& r) {
  return {r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1)};
}

constexpr double kNearPi = 1e-3;

}  // namespace

KinematicsCache::KinematicsCache(const ChainModel& model)
    : model_(&model), poses_(model.n()), world_axes_(model.n()) {}

void KinematicsCache::update(const Eigen::Ref<const JointVector>& q) {
  const auto& joints = model_->joints();
  if (static_cast<std::size_t>(q.size()) != joints.size()) {
    throw std::invalid_argument("joint vector has length " + std::to_string(q.size()) + ", model has " +
                                std::to_string(joints.size()) + " joints");
  }
  for (std::size_t i = 0; i < joints.size(); ++i) {
    const JointSpec& j = joints[i];
    Transform pose = j.parent == kRootParent ? j.origin : poses_[static_cast<std::size_t>(j.parent)] * j.origin;
    const double qi = q[static_cast<Eigen::Index>(i)];
    if (j.kind == JointKind::kRevolute) {
      pose.rotation = pose.rotation * rotation_about_axis(j.axis, qi);
    } else {
      pose.translation += pose.rotation * (j.axis * qi);
    }
    world_axes_[i] = pose.rotation * j.axis;
    poses_[i] = pose;
  }
}

Transform KinematicsCache::frame_pose(std::size_t frame_index) const {
  const FrameSpec& f = model_->frames()[frame_index];
  return poses_[f.joint] * f.offset;
}

void KinematicsCache::jacobian(std::size_t frame_index, Eigen::Ref<Eigen::MatrixXd> out) const {
  const auto n = static_cast<Eigen::Index>(model_->n());
  if (out.rows() != 6 || out.cols() != n) {
    throw std::invalid_argument("jacobian output must be 6 x n");
  }
  out.setZero();
  const FrameSpec& f = model_->frames()[frame_index];
  const Vector3 tip = frame_pose(frame_index).translation;
  std::ptrdiff_t cur = static_cast<std::ptrdiff_t>(f.joint);
  while (cur != kRootParent) {
    const auto i = static_cast<std::size_t>(cur);
    const Vector3& axis = world_axes_[i];
    auto col = out.col(static_cast<Eigen::Index>(i));
    if (model_->joint(i).kind == JointKind::kRevolute) {
      col.head<3>() = axis.cross(tip - poses_[i].translation);
      col.tail<3>() = axis;
    } else {
      col.head<3>() = axis;
    }
    cur = model_->joint(i).parent;
  }
}

Transform forward_kinematics(const ChainModel& model, const JointVector& q, std::string_view frame) {
  const std::size_t idx = model.frame_index(frame);
  KinematicsCache cache(model);
  cache.update(q);
  return cache.frame_pose(idx);
}

Eigen::MatrixXd geometric_jacobian(const ChainModel& model, const JointVector& q, std::string_view frame) {
  const std::size_t idx = model.frame_index(frame);
  KinematicsCache cache(model);
  cache.update(q);
  Eigen::MatrixXd jac(6, static_cast<Eigen::Index>(model.n()));
  cache.jacobian(idx, jac);
  return jac;
}

Vector3 rotation_log(const Matrix3& r) {
  const Vector3 v = vee_of_skew_part(r);  // 2 sin(θ) a
  const double sin_part = 0.5 * v.norm();
  const double cos_part = std::clamp(0.5 * (r.trace() - 1.0), -1.0, 1.0);
  const double angle = std::atan2(sin_part, cos_part);

  if (angle < 1e-8) {
    return 0.5 * v;
  }
  if (std::numbers::pi - angle > kNearPi) {
    return (angle / (2.0 * std::sin(angle))) * v;
  }

  // Near the half turn: recover the axis from the symmetric part,
  // a aᵀ = (sym(R) − cos θ I) / (1 − cos θ).
  const Matrix3 outer = (0.5 * (r + r.transpose()) - cos_part * Matrix3::Identity()) / (1.0 - cos_part);
  Eigen::Index k = 0;
  outer.diagonal().maxCoeff(&k);
  Vector3 axis = outer.col(k);
  axis.normalize();
  const double orient = axis.dot(v);
  if (std::abs(orient) > 1e-12) {
    if (orient < 0.0) axis = -axis;
  } else {
    for (int i = 0; i < 3; ++i) {
      if (std::abs(axis[i]) > 1e-12) {
        if (axis[i] < 0.0) axis = -axis;
        break;
      }
    }
  }
  return angle * axis;
}

Vector6 pose_error(const Transform& target, const Transform& current) {
  Vector6 err;
  err.head<3>() = target.translation - current.translation;
  if (target.rotation == current.rotation) {
    err.tail<3>().setZero();
  } else {
    err.tail<3>() = rotation_log(target.rotation * current.rotation.transpose());
  }
  return err;
}

}  // namespace stackik
