#include "stackik/scenario.hpp"

#include <array>
#include <stdexcept>

#include "stackik/kinematics.hpp"
#include "stackik/model_io.hpp"
#include "stackik/task_io.hpp"

namespace stackik {

namespace {

constexpr std::array<char, 3> kTorsoAxes = {'z', 'y', 'x'};
constexpr std::array<char, 6> kArmAxes = {'z', 'y', 'y', 'z', 'y', 'z'};

Vector3 unit(char axis) {
  switch (axis) {
    case 'x':
      return Vector3::UnitX();
    case 'y':
      return Vector3::UnitY();
    default:
      return Vector3::UnitZ();
  }
}

// Nominal posture: a gently bent torso (keeps the chain off the fully
// stretched singular line) and a straight arm.
double nominal_torso(char axis, int k) {
  if (axis == 'z') return 0.0;
  return (k % 2 == 0) ? 0.15 : -0.1;
}

}  // namespace

ScenarioBundle build_default_scenario(const ScenarioSpec& spec) {
  if (spec.torso_joint_count < 1) {
    throw std::invalid_argument("scenario: torso group must have at least one joint (posture task selection)");
  }
  if (spec.arm_joint_count < 1) throw std::invalid_argument("scenario: arm group must have at least one joint");
  if (!(spec.torso_link_length > 0.0) || !(spec.arm_link_length > 0.0)) {
    throw std::invalid_argument("scenario: link lengths must be positive");
  }

  const int n = spec.torso_joint_count + spec.arm_joint_count;
  std::vector<JointSpec> joints;
  joints.reserve(static_cast<std::size_t>(n));
  JointVector q_nominal(n);
  double previous_link = 0.0;
  for (int i = 0; i < n; ++i) {
    const bool torso = i < spec.torso_joint_count;
    const int k = torso ? i : i - spec.torso_joint_count;
    const char axis = torso ? kTorsoAxes[static_cast<std::size_t>(k) % kTorsoAxes.size()]
                            : kArmAxes[static_cast<std::size_t>(k) % kArmAxes.size()];
    JointSpec j;
    j.name = (torso ? "torso_" : "arm_") + std::to_string(k);
    j.kind = JointKind::kRevolute;
    j.axis = unit(axis);
    j.origin = Transform::from_xyz_rpy({0.0, 0.0, previous_link}, Vector3::Zero());
    j.position_limits = {-kScenarioPositionLimit, kScenarioPositionLimit};
    j.velocity_limit = kScenarioVelocityLimit;
    j.parent = i == 0 ? kRootParent : i - 1;
    joints.push_back(std::move(j));
    q_nominal[i] = torso ? nominal_torso(axis, k) : 0.0;
    previous_link = torso ? spec.torso_link_length : spec.arm_link_length;
  }
  std::vector<FrameSpec> frames{
      {kEndEffectorFrame, static_cast<std::size_t>(n - 1),
       Transform::from_xyz_rpy({0.0, 0.0, spec.arm_link_length}, Vector3::Zero())}};

  ScenarioBundle b{ChainModel("spot18", std::move(joints), std::move(frames)), {}, {}, q_nominal, {}, 0, {}, {}};
  b.limits = b.model.limits();
  b.torso_joint_count = spec.torso_joint_count;
  b.config.dt = kScenarioDt;
  b.config.damping = kScenarioDamping;

  PoseTask pose{kEndEffectorFrame, forward_kinematics(b.model, q_nominal, kEndEffectorFrame), kScenarioPoseGain,
                PoseComponents::kFull};
  PostureTask posture;
  for (int i = 0; i < spec.torso_joint_count; ++i) posture.joints.push_back(static_cast<std::size_t>(i));
  posture.target = q_nominal.head(spec.torso_joint_count);
  posture.gain = kScenarioPostureGain;
  b.stack_template = TaskStack({Task{pose, 1}, Task{posture, 2}});

  b.model_document = emit_model_document(b.model);
  b.tasks_document = emit_task_document(TaskDocument{b.stack_template, b.config, q_nominal}, b.model);
  return b;
}

double uniform_draw(std::mt19937_64& rng, double lo, double hi) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + u * (hi - lo);
}

JointVector sample_configuration(const LimitSet& limits, std::mt19937_64& rng) {
  const auto n = static_cast<Eigen::Index>(limits.size());
  JointVector q(n);
  for (Eigen::Index i = 0; i < n; ++i) q[i] = uniform_draw(rng, limits.position_lo[i], limits.position_hi[i]);
  return q;
}

Transform sample_reachable_target(const ScenarioBundle& bundle, std::mt19937_64& rng) {
  return forward_kinematics(bundle.model, sample_configuration(bundle.limits, rng), kEndEffectorFrame);
}

TaskStack make_task_stack(const ScenarioBundle& bundle, const Transform& target) {
  TaskStack stack = bundle.stack_template;
  stack.set_pose_target(*stack.primary_pose_task(), target);
  return stack;
}

}  // namespace stackik
