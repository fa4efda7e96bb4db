#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace stackik {

using Vector3 = Eigen::Vector3d;
using Matrix3 = Eigen::Matrix3d;
using Vector6 = Eigen::Matrix<double, 6, 1>;
using JointVector = Eigen::VectorXd;

/// Rigid transform stored as a rotation matrix and a translation (meters).
struct Transform {
  Matrix3 rotation = Matrix3::Identity();
  Vector3 translation = Vector3::Zero();

  static Transform identity() { return {}; }

  static Transform from_xyz_rpy(const Vector3& xyz, const Vector3& rpy);

  Transform operator*(const Transform& rhs) const {
    return {rotation * rhs.rotation, rotation * rhs.translation + translation};
  }

  Vector3 apply(const Vector3& p) const { return rotation * p + translation; }

  Transform inverse() const {
    Matrix3 rt = rotation.transpose();
    return {rt, -(rt * translation)};
  }

  /// Roll-pitch-yaw (fixed-axis x, y, z) of the rotation.
  Vector3 rpy() const;

  bool operator==(const Transform&) const = default;
};

/// R = Rz(yaw) * Ry(pitch) * Rx(roll).
Matrix3 rotation_from_rpy(const Vector3& rpy);

/// Rotation about a unit axis.
Matrix3 rotation_about_axis(const Vector3& axis, double angle);

/// Largest elementwise deviation of RᵀR from identity.
double orthonormality_error(const Matrix3& rotation);

}  // namespace stackik
