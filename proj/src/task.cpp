#include "stackik/task.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_set>

namespace stackik {

std::string_view to_string(PoseComponents c) {
  switch (c) {
    case PoseComponents::kFull:
      return "full";
    case PoseComponents::kPosition:
      return "position";
    case PoseComponents::kOrientation:
      return "orientation";
  }
  return "full";
}

std::size_t Task::rows() const {
  if (const auto* pose = std::get_if<PoseTask>(&spec)) {
    return pose->components == PoseComponents::kFull ? 6 : 3;
  }
  return std::get<PostureTask>(spec).joints.size();
}

TaskStack::TaskStack(std::vector<Task> tasks) : tasks_(std::move(tasks)) {
  if (tasks_.empty()) throw TaskError("task stack must contain at least one task");
  std::map<int, std::vector<std::size_t>> by_priority;
  for (std::size_t i = 0; i < tasks_.size(); ++i) {
    const Task& t = tasks_[i];
    if (t.priority < 1) throw TaskError("task #" + std::to_string(i) + ": priority must be >= 1");
    const double gain = t.is_pose() ? std::get<PoseTask>(t.spec).gain : std::get<PostureTask>(t.spec).gain;
    if (!(gain > 0.0) || !std::isfinite(gain)) {
      throw TaskError("task #" + std::to_string(i) + ": gain must be positive");
    }
    if (const auto* posture = std::get_if<PostureTask>(&t.spec)) {
      if (posture->joints.empty()) throw TaskError("task #" + std::to_string(i) + ": posture selection is empty");
      if (static_cast<std::size_t>(posture->target.size()) != posture->joints.size()) {
        throw TaskError("task #" + std::to_string(i) + ": posture target size differs from selection");
      }
      std::unordered_set<std::size_t> distinct(posture->joints.begin(), posture->joints.end());
      if (distinct.size() != posture->joints.size()) {
        throw TaskError("task #" + std::to_string(i) + ": posture selection has repeated joints");
      }
    }
    by_priority[t.priority].push_back(i);
  }
  for (auto& [priority, members] : by_priority) {
    std::size_t rows = 0;
    for (std::size_t i : members) rows += tasks_[i].rows();
    levels_.push_back(std::move(members));
    level_rows_.push_back(rows);
  }
}

std::size_t TaskStack::max_level_rows() const {
  return level_rows_.empty() ? 0 : *std::max_element(level_rows_.begin(), level_rows_.end());
}

void TaskStack::validate(const ChainModel& model) const {
  for (std::size_t i = 0; i < tasks_.size(); ++i) {
    const Task& t = tasks_[i];
    if (const auto* pose = std::get_if<PoseTask>(&t.spec)) {
      if (!model.find_frame(pose->frame)) {
        throw TaskError("task #" + std::to_string(i) + ": unknown frame '" + pose->frame + "'");
      }
    } else {
      for (std::size_t j : std::get<PostureTask>(t.spec).joints) {
        if (j >= model.n()) {
          throw TaskError("task #" + std::to_string(i) + ": joint index " + std::to_string(j) + " out of range");
        }
      }
    }
  }
  for (std::size_t l = 0; l < level_rows_.size(); ++l) {
    if (level_rows_[l] > 6 + model.n()) {
      throw TaskError("priority level " + std::to_string(l + 1) + " has too many rows");
    }
  }
}

std::optional<std::size_t> TaskStack::primary_pose_task() const {
  for (const auto& level : levels_) {
    for (std::size_t i : level) {
      if (tasks_[i].is_pose()) return i;
    }
  }
  return std::nullopt;
}

void TaskStack::set_pose_target(std::size_t task_index, const Transform& target) {
  auto* pose = std::get_if<PoseTask>(&tasks_.at(task_index).spec);
  if (!pose) throw TaskError("task #" + std::to_string(task_index) + " is not a pose task");
  pose->target = target;
}

void TaskStack::set_posture_target(std::size_t task_index, const JointVector& target) {
  auto* posture = std::get_if<PostureTask>(&tasks_.at(task_index).spec);
  if (!posture) throw TaskError("task #" + std::to_string(task_index) + " is not a posture task");
  if (target.size() != posture->target.size()) throw TaskError("posture target size mismatch");
  posture->target = target;
}

TaskStack TaskStack::without_priority(int priority) const {
  std::vector<Task> kept;
  for (const auto& t : tasks_) {
    if (t.priority != priority) kept.push_back(t);
  }
  return TaskStack(std::move(kept));
}

}  // namespace stackik
