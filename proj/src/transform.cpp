#include "stackik/transform.hpp"

#include <cmath>

namespace stackik {

Matrix3 rotation_from_rpy(const Vector3& rpy) {
  return (Eigen::AngleAxisd(rpy.z(), Vector3::UnitZ()) *
          Eigen::AngleAxisd(rpy.y(), Vector3::UnitY()) *
          Eigen::AngleAxisd(rpy.x(), Vector3::UnitX()))
      .toRotationMatrix();
}

Matrix3 rotation_about_axis(const Vector3& axis, double angle) {
  return Eigen::AngleAxisd(angle, axis).toRotationMatrix();
}

Transform Transform::from_xyz_rpy(const Vector3& xyz, const Vector3& rpy) {
  return {rotation_from_rpy(rpy), xyz};
}

Vector3 Transform::rpy() const {
  const Matrix3& r = rotation;
  double pitch = std::atan2(-r(2, 0), std::hypot(r(0, 0), r(1, 0)));
  double roll;
  double yaw;
  if (std::abs(std::cos(pitch)) > 1e-12) {
    roll = std::atan2(r(2, 1), r(2, 2));
    yaw = std::atan2(r(1, 0), r(0, 0));
  } else {
    // Gimbal lock: fold everything into yaw.
    roll = 0.0;
    yaw = std::atan2(-r(0, 1), r(1, 1));
  }
  return {roll, pitch, yaw};
}

double orthonormality_error(const Matrix3& rotation) {
  return (rotation.transpose() * rotation - Matrix3::Identity()).cwiseAbs().maxCoeff();
}

}  // namespace stackik
