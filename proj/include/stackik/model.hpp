#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "stackik/transform.hpp"

namespace stackik {

/// Raised for malformed or inconsistent robot descriptions. The message
/// always names the offending joint or frame.
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class JointKind { kRevolute, kPrismatic };

std::string_view to_string(JointKind kind);
std::optional<JointKind> joint_kind_from_string(std::string_view text);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool operator==(const Interval&) const = default;
};

inline constexpr std::ptrdiff_t kRootParent = -1;

struct JointSpec {
  std::string name;
  JointKind kind = JointKind::kRevolute;
  Vector3 axis = Vector3::UnitZ();
  /// Pose of the joint frame in the parent joint frame (or root).
  Transform origin;
  Interval position_limits;
  double velocity_limit = 0.0;
  std::ptrdiff_t parent = kRootParent;

  bool operator==(const JointSpec&) const = default;
};

/// Named attachment point rigidly bound to a joint.
struct FrameSpec {
  std::string name;
  std::size_t joint = 0;
  Transform offset;

  bool operator==(const FrameSpec&) const = default;
};

/// Per-joint position and velocity bounds, in joint order.
struct LimitSet {
  JointVector position_lo;
  JointVector position_hi;
  JointVector velocity_max;

  std::size_t size() const { return static_cast<std::size_t>(position_lo.size()); }
  /// Throws std::invalid_argument if sizes disagree or bounds are inverted.
  void validate() const;
};

/// Immutable kinematic tree. Joints are ordered so that parents precede
/// children; the constructor enforces every structural invariant.
class ChainModel {
 public:
  ChainModel() = default;
  ChainModel(std::string name, std::vector<JointSpec> joints, std::vector<FrameSpec> frames);

  const std::string& name() const { return name_; }
  std::size_t n() const { return joints_.size(); }
  const std::vector<JointSpec>& joints() const { return joints_; }
  const std::vector<FrameSpec>& frames() const { return frames_; }
  const JointSpec& joint(std::size_t i) const { return joints_.at(i); }

  std::optional<std::size_t> find_joint(std::string_view name) const;
  std::optional<std::size_t> find_frame(std::string_view name) const;
  /// Throws std::out_of_range naming the frame if absent.
  std::size_t frame_index(std::string_view name) const;

  /// True when joint `ancestor` lies on the path from the root to `joint`
  /// (a joint is its own ancestor).
  bool is_ancestor(std::size_t ancestor, std::size_t joint) const;

  LimitSet limits() const;

  bool operator==(const ChainModel&) const = default;

 private:
  std::string name_;
  std::vector<JointSpec> joints_;
  std::vector<FrameSpec> frames_;
};

}  // namespace stackik
