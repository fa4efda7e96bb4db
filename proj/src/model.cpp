#include "stackik/model.hpp"

#include <cmath>
#include <unordered_set>

namespace stackik {

namespace {

constexpr double kAxisTolerance = 1e-9;

void validate_joint(const JointSpec& joint, std::size_t index) {
  const std::string label = "joint '" + joint.name + "'";
  if (joint.name.empty()) {
    throw ModelError("joint #" + std::to_string(index) + ": empty name");
  }
  if (!joint.axis.allFinite() || std::abs(joint.axis.norm() - 1.0) > kAxisTolerance) {
    throw ModelError(label + ": axis is not a unit vector");
  }
  if (orthonormality_error(joint.origin.rotation) > 1e-9 || joint.origin.rotation.determinant() < 0.0) {
    throw ModelError(label + ": origin rotation is not a proper rotation");
  }
  if (!joint.origin.translation.allFinite()) {
    throw ModelError(label + ": origin translation is not finite");
  }
  const auto& lim = joint.position_limits;
  if (!std::isfinite(lim.lo) || !std::isfinite(lim.hi)) {
    throw ModelError(label + ": position limits must be finite");
  }
  if (lim.lo > lim.hi) {
    throw ModelError(label + ": lower limit exceeds upper limit");
  }
  if (!(joint.velocity_limit >= 0.0) || !std::isfinite(joint.velocity_limit)) {
    throw ModelError(label + ": velocity limit must be finite and nonnegative");
  }
  if (joint.parent != kRootParent &&
      (joint.parent < 0 || static_cast<std::size_t>(joint.parent) >= index)) {
    throw ModelError(label + ": parent must precede the joint in the ordering");
  }
}

}  // namespace

std::string_view to_string(JointKind kind) {
  return kind == JointKind::kRevolute ? "revolute" : "prismatic";
}

std::optional<JointKind> joint_kind_from_string(std::string_view text) {
  if (text == "revolute") return JointKind::kRevolute;
  if (text == "prismatic") return JointKind::kPrismatic;
  return std::nullopt;
}

void LimitSet::validate() const {
  if (position_hi.size() != position_lo.size() || velocity_max.size() != position_lo.size()) {
    throw std::invalid_argument("LimitSet: vector sizes disagree");
  }
  for (Eigen::Index i = 0; i < position_lo.size(); ++i) {
    if (position_lo[i] > position_hi[i]) {
      throw std::invalid_argument("LimitSet: position_lo > position_hi at joint " + std::to_string(i));
    }
    if (!(velocity_max[i] >= 0.0)) {
      throw std::invalid_argument("LimitSet: negative velocity_max at joint " + std::to_string(i));
    }
  }
}

ChainModel::ChainModel(std::string name, std::vector<JointSpec> joints, std::vector<FrameSpec> frames)
    : name_(std::move(name)), joints_(std::move(joints)), frames_(std::move(frames)) {
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < joints_.size(); ++i) {
    validate_joint(joints_[i], i);
    if (!seen.insert(joints_[i].name).second) {
      throw ModelError("joint '" + joints_[i].name + "': duplicate joint name");
    }
  }
  std::unordered_set<std::string> frame_names;
  for (const auto& frame : frames_) {
    if (frame.joint >= joints_.size()) {
      throw ModelError("frame '" + frame.name + "': bound to unknown joint");
    }
    if (!frame_names.insert(frame.name).second) {
      throw ModelError("frame '" + frame.name + "': duplicate frame name");
    }
  }
}

std::optional<std::size_t> ChainModel::find_joint(std::string_view name) const {
  for (std::size_t i = 0; i < joints_.size(); ++i) {
    if (joints_[i].name == name) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> ChainModel::find_frame(std::string_view name) const {
  for (std::size_t i = 0; i < frames_.size(); ++i) {
    if (frames_[i].name == name) return i;
  }
  return std::nullopt;
}

std::size_t ChainModel::frame_index(std::string_view name) const {
  auto idx = find_frame(name);
  if (!idx) throw std::out_of_range("unknown frame '" + std::string(name) + "'");
  return *idx;
}

bool ChainModel::is_ancestor(std::size_t ancestor, std::size_t joint) const {
  std::ptrdiff_t cur = static_cast<std::ptrdiff_t>(joint);
  while (cur != kRootParent) {
    if (static_cast<std::size_t>(cur) == ancestor) return true;
    cur = joints_[static_cast<std::size_t>(cur)].parent;
  }
  return false;
}

LimitSet ChainModel::limits() const {
  const auto count = static_cast<Eigen::Index>(n());
  LimitSet out{JointVector(count), JointVector(count), JointVector(count)};
  for (Eigen::Index i = 0; i < count; ++i) {
    const auto& j = joints_[static_cast<std::size_t>(i)];
    out.position_lo[i] = j.position_limits.lo;
    out.position_hi[i] = j.position_limits.hi;
    out.velocity_max[i] = j.velocity_limit;
  }
  return out;
}

}  // namespace stackik
