#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "stackik/model.hpp"
#include "stackik/transform.hpp"

namespace stackik {

/// Preallocated forward-kinematics cache for one model. `update` and the
/// queries that follow never touch the heap. The model must outlive the
/// cache; one cache per thread.
class KinematicsCache {
 public:
  explicit KinematicsCache(const ChainModel& model);

  const ChainModel& model() const { return *model_; }

  /// Recomputes every joint pose for configuration q. Throws
  /// std::invalid_argument on a length mismatch.
  void update(const Eigen::Ref<const JointVector>& q);

  /// Pose of joint i's frame after applying its motion.
  const Transform& joint_pose(std::size_t i) const { return poses_[i]; }
  Transform frame_pose(std::size_t frame_index) const;

  /// Writes the 6×n geometric Jacobian of the frame (linear rows first).
  void jacobian(std::size_t frame_index, Eigen::Ref<Eigen::MatrixXd> out) const;

 private:
  const ChainModel* model_;
  std::vector<Transform> poses_;
  std::vector<Vector3> world_axes_;
};

/// Pose of `frame` in the root frame. Throws std::out_of_range for an
/// unknown frame and std::invalid_argument for a length mismatch.
Transform forward_kinematics(const ChainModel& model, const JointVector& q, std::string_view frame);

/// 6×n geometric Jacobian, rows (vx, vy, vz, wx, wy, wz) in the root frame.
Eigen::MatrixXd geometric_jacobian(const ChainModel& model, const JointVector& q, std::string_view frame);

/// Rotation vector (axis · angle, angle in [0, π]) of a rotation matrix.
/// At exactly π the axis is the dominant column of the half-turn set,
/// sign-normalized so its first nonzero component is positive.
Vector3 rotation_log(const Matrix3& rotation);

/// (target.t − current.t, log(target.R · current.Rᵀ)).
Vector6 pose_error(const Transform& target, const Transform& current);

}  // namespace stackik
