#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "stackik/model.hpp"
#include "stackik/solver.hpp"
#include "stackik/task.hpp"

namespace stackik {

/// Contents of a task-stack document: the stack, solver overrides applied
/// on top of the defaults, and an optional start configuration.
struct TaskDocument {
  TaskStack stack;
  SolverConfig config;
  std::optional<JointVector> start;
};

/// Parses a task-stack document against a model (joint names and frames are
/// resolved here). Throws TaskError.
TaskDocument parse_task_document(std::string_view text, const ChainModel& model);

std::string emit_task_document(const TaskDocument& doc, const ChainModel& model);

}  // namespace stackik
