#include <doctest.h>

#include <random>

#include "stackik/transform.hpp"

using namespace stackik;

TEST_CASE("rpy round-trips away from gimbal lock") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> angle(-1.5, 1.5);
  for (int i = 0; i < 200; ++i) {
    const Vector3 rpy(angle(rng), angle(rng), angle(rng));
    const Transform t = Transform::from_xyz_rpy(Vector3::Zero(), rpy);
    CHECK((t.rpy() - rpy).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("rpy at gimbal lock still reproduces the rotation") {
  const Transform t = Transform::from_xyz_rpy(Vector3::Zero(), {0.3, M_PI / 2, -0.4});
  const Matrix3 back = rotation_from_rpy(t.rpy());
  CHECK((back - t.rotation).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("composition and inverse") {
  const Transform a = Transform::from_xyz_rpy({1, 2, 3}, {0.1, 0.2, 0.3});
  const Transform b = Transform::from_xyz_rpy({-0.5, 0.4, 0}, {-0.7, 0.0, 1.1});
  const Vector3 p(0.3, -0.2, 0.9);
  CHECK(((a * b).apply(p) - a.apply(b.apply(p))).norm() < 1e-12);

  const Transform i = a * a.inverse();
  CHECK((i.rotation - Matrix3::Identity()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(i.translation.norm() < 1e-12);
  CHECK(orthonormality_error((a * b).rotation) < 1e-12);
}

TEST_CASE("rotation about z by a quarter turn") {
  const Matrix3 r = rotation_about_axis(Vector3::UnitZ(), M_PI / 2);
  CHECK((r * Vector3::UnitX() - Vector3::UnitY()).norm() < 1e-15);
}
