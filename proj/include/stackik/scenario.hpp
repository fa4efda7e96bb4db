#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "stackik/model.hpp"
#include "stackik/solver.hpp"
#include "stackik/task.hpp"

namespace stackik {

/// Parameters of the whole-body stand-in: a serial torso group followed by
/// an arm group, 18 joints by default.
struct ScenarioSpec {
  int torso_joint_count = 12;
  int arm_joint_count = 6;
  double torso_link_length = 0.15;
  double arm_link_length = 0.25;
  std::uint64_t seed = 42;
};

struct ScenarioBundle {
  ChainModel model;
  LimitSet limits;
  /// Priority 1: end-effector pose (target placeholder = FK(q_nominal)).
  /// Priority 2: torso posture toward q_nominal.
  TaskStack stack_template;
  JointVector q_nominal;
  SolverConfig config;
  int torso_joint_count = 0;

  std::string model_document;
  std::string tasks_document;
};

inline constexpr const char* kEndEffectorFrame = "end_effector";
inline constexpr double kScenarioPositionLimit = 2.0;
inline constexpr double kScenarioVelocityLimit = 2.0;
/// Solver settings shipped in the scenario's task document. With gain 1/s
/// the pose error contracts by (1 - dt) per iteration.
inline constexpr double kScenarioDt = 0.3;
inline constexpr double kScenarioDamping = 0.1;
inline constexpr double kScenarioPoseGain = 1.0;
inline constexpr double kScenarioPostureGain = 0.1;

/// Throws std::invalid_argument for an invalid spec (including a torso
/// group too small to carry the posture task).
ScenarioBundle build_default_scenario(const ScenarioSpec& spec = {});

/// Uniform draw on [lo, hi] built from raw 64-bit engine output, so the
/// sequence is identical on every standard library.
double uniform_draw(std::mt19937_64& rng, double lo, double hi);

/// Configuration drawn uniformly inside the bundle's position limits.
JointVector sample_configuration(const LimitSet& limits, std::mt19937_64& rng);

/// FK of a uniformly sampled in-limits configuration, so always reachable.
Transform sample_reachable_target(const ScenarioBundle& bundle, std::mt19937_64& rng);

/// The template stack retargeted to `target`.
TaskStack make_task_stack(const ScenarioBundle& bundle, const Transform& target);

}  // namespace stackik
