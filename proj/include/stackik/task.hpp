#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "stackik/model.hpp"
#include "stackik/transform.hpp"

namespace stackik {

class TaskError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Which rows of the 6D pose error a pose task constrains.
enum class PoseComponents { kFull, kPosition, kOrientation };

std::string_view to_string(PoseComponents c);

/// Drives a frame toward a target pose: desired twist = gain · pose_error.
struct PoseTask {
  std::string frame;
  Transform target;
  double gain = 1.0;
  PoseComponents components = PoseComponents::kFull;
};

/// Regulates selected joints toward reference positions:
/// desired velocity = gain · (target − q_selected).
struct PostureTask {
  std::vector<std::size_t> joints;
  JointVector target;
  double gain = 1.0;
};

struct Task {
  std::variant<PoseTask, PostureTask> spec;
  int priority = 1;

  std::size_t rows() const;
  bool is_pose() const { return std::holds_alternative<PoseTask>(spec); }
};

/// Tasks grouped into priority levels (ascending priority number).
/// Level order and membership are fixed at construction; targets may be
/// edited in place afterwards.
class TaskStack {
 public:
  TaskStack() = default;
  explicit TaskStack(std::vector<Task> tasks);

  const std::vector<Task>& tasks() const { return tasks_; }
  const Task& task(std::size_t i) const { return tasks_.at(i); }
  std::size_t size() const { return tasks_.size(); }

  /// Indices into tasks(), one group per priority level.
  const std::vector<std::vector<std::size_t>>& levels() const { return levels_; }
  const std::vector<std::size_t>& level_rows() const { return level_rows_; }
  std::size_t max_level_rows() const;

  /// Checks frames, joint indices and row bounds against a model.
  void validate(const ChainModel& model) const;

  /// Index of the first pose task in priority order, if any.
  std::optional<std::size_t> primary_pose_task() const;

  void set_pose_target(std::size_t task_index, const Transform& target);
  void set_posture_target(std::size_t task_index, const JointVector& target);

  /// Copy of the stack without the given priority level(s).
  TaskStack without_priority(int priority) const;

 private:
  std::vector<Task> tasks_;
  std::vector<std::vector<std::size_t>> levels_;
  std::vector<std::size_t> level_rows_;
};

}  // namespace stackik
