#include "stackik/task_io.hpp"

#include <json.hpp>

namespace stackik {

using nlohmann::json;

namespace {

double number(const json& v, const std::string& where) {
  if (!v.is_number()) throw TaskError(where + ": expected a number");
  return v.get<double>();
}

Vector3 vec3(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 3) throw TaskError(where + ": expected an array of 3 numbers");
  return {number(v[0], where), number(v[1], where), number(v[2], where)};
}

std::size_t resolve_joint(const json& v, const ChainModel& model, const std::string& where) {
  if (v.is_string()) {
    auto idx = model.find_joint(v.get<std::string>());
    if (!idx) throw TaskError(where + ": unknown joint '" + v.get<std::string>() + "'");
    return *idx;
  }
  if (v.is_number_unsigned()) {
    auto idx = v.get<std::size_t>();
    if (idx >= model.n()) throw TaskError(where + ": joint index " + std::to_string(idx) + " out of range");
    return idx;
  }
  throw TaskError(where + ": joints must be names or indices");
}

PoseComponents components_from(const std::string& s, const std::string& where) {
  if (s == "full") return PoseComponents::kFull;
  if (s == "position") return PoseComponents::kPosition;
  if (s == "orientation") return PoseComponents::kOrientation;
  throw TaskError(where + ": unknown components '" + s + "'");
}

void apply_solver_overrides(const json& s, SolverConfig& cfg) {
  if (!s.is_object()) throw TaskError("solver: section must be an object");
  for (const auto& [key, value] : s.items()) {
    const std::string where = "solver." + key;
    if (key == "damping") {
      cfg.damping = number(value, where);
    } else if (key == "sv_threshold") {
      cfg.sv_threshold = number(value, where);
    } else if (key == "dt") {
      cfg.dt = number(value, where);
    } else if (key == "max_iterations") {
      if (!value.is_number_integer()) throw TaskError(where + ": expected an integer");
      cfg.max_iterations = value.get<int>();
    } else if (key == "tol_position") {
      cfg.tol_position = number(value, where);
    } else if (key == "tol_rotation") {
      cfg.tol_rotation = number(value, where);
    } else if (key == "step_scale") {
      cfg.step_scale = number(value, where);
    } else {
      throw TaskError(where + ": unknown solver field");
    }
  }
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw TaskError(e.what());
  }
}

}  // namespace

TaskDocument parse_task_document(std::string_view text, const ChainModel& model) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw TaskError(std::string("task document: ") + e.what());
  }
  // A bare array is accepted as the task list.
  const json* tasks_doc = &doc;
  if (doc.is_object()) {
    if (!doc.contains("tasks")) throw TaskError("task document: missing field 'tasks'");
    tasks_doc = &doc.at("tasks");
  }
  if (!tasks_doc->is_array()) throw TaskError("task document: 'tasks' must be an array");

  std::vector<Task> tasks;
  for (std::size_t i = 0; i < tasks_doc->size(); ++i) {
    const json& td = (*tasks_doc)[i];
    const std::string where = "task #" + std::to_string(i);
    if (!td.is_object()) throw TaskError(where + ": must be an object");
    if (!td.contains("kind") || !td.at("kind").is_string()) throw TaskError(where + ": missing field 'kind'");
    if (!td.contains("priority") || !td.at("priority").is_number_integer()) {
      throw TaskError(where + ": missing integer field 'priority'");
    }
    const std::string kind = td.at("kind").get<std::string>();
    const double gain = td.contains("gain") ? number(td.at("gain"), where + ": gain") : 1.0;
    Task task;
    task.priority = td.at("priority").get<int>();
    if (kind == "pose_tracking") {
      PoseTask pose;
      if (!td.contains("frame") || !td.at("frame").is_string()) throw TaskError(where + ": missing field 'frame'");
      pose.frame = td.at("frame").get<std::string>();
      if (!model.find_frame(pose.frame)) throw TaskError(where + ": unknown frame '" + pose.frame + "'");
      if (td.contains("target")) {
        const json& t = td.at("target");
        if (!t.is_object()) throw TaskError(where + ": pose target must be {xyz, rpy}");
        Vector3 xyz = t.contains("xyz") ? vec3(t.at("xyz"), where + ": target.xyz") : Vector3::Zero();
        Vector3 rpy = t.contains("rpy") ? vec3(t.at("rpy"), where + ": target.rpy") : Vector3::Zero();
        pose.target = Transform::from_xyz_rpy(xyz, rpy);
      }
      if (td.contains("components")) {
        if (!td.at("components").is_string()) throw TaskError(where + ": components must be a string");
        pose.components = components_from(td.at("components").get<std::string>(), where);
      }
      pose.gain = gain;
      task.spec = std::move(pose);
    } else if (kind == "joint_posture") {
      PostureTask posture;
      if (!td.contains("joints") || !td.at("joints").is_array()) throw TaskError(where + ": missing array 'joints'");
      for (const auto& j : td.at("joints")) posture.joints.push_back(resolve_joint(j, model, where));
      if (!td.contains("target") || !td.at("target").is_array()) throw TaskError(where + ": missing array 'target'");
      const json& t = td.at("target");
      if (t.size() != posture.joints.size()) throw TaskError(where + ": target length differs from joints");
      posture.target.resize(static_cast<Eigen::Index>(t.size()));
      for (std::size_t k = 0; k < t.size(); ++k) {
        posture.target[static_cast<Eigen::Index>(k)] = number(t[k], where + ": target");
      }
      posture.gain = gain;
      task.spec = std::move(posture);
    } else {
      throw TaskError(where + ": unknown task kind '" + kind + "'");
    }
    tasks.push_back(std::move(task));
  }

  TaskDocument out{TaskStack(std::move(tasks)), SolverConfig{}, std::nullopt};
  out.stack.validate(model);
  if (doc.is_object() && doc.contains("solver")) apply_solver_overrides(doc.at("solver"), out.config);
  if (doc.is_object() && doc.contains("start")) {
    const json& s = doc.at("start");
    if (!s.is_array() || s.size() != model.n()) throw TaskError("start: expected one value per joint");
    JointVector q(static_cast<Eigen::Index>(s.size()));
    for (std::size_t k = 0; k < s.size(); ++k) q[static_cast<Eigen::Index>(k)] = number(s[k], "start");
    out.start = std::move(q);
  }
  return out;
}

std::string emit_task_document(const TaskDocument& doc, const ChainModel& model) {
  json tasks = json::array();
  for (const auto& task : doc.stack.tasks()) {
    if (const auto* pose = std::get_if<PoseTask>(&task.spec)) {
      const Vector3 rpy = pose->target.rpy();
      const Vector3& xyz = pose->target.translation;
      tasks.push_back({{"kind", "pose_tracking"},
                       {"priority", task.priority},
                       {"frame", pose->frame},
                       {"components", std::string(to_string(pose->components))},
                       {"target", {{"xyz", {xyz.x(), xyz.y(), xyz.z()}}, {"rpy", {rpy.x(), rpy.y(), rpy.z()}}}},
                       {"gain", pose->gain}});
    } else {
      const auto& posture = std::get<PostureTask>(task.spec);
      json joints = json::array();
      json target = json::array();
      for (std::size_t k = 0; k < posture.joints.size(); ++k) {
        joints.push_back(model.joint(posture.joints[k]).name);
        target.push_back(posture.target[static_cast<Eigen::Index>(k)]);
      }
      tasks.push_back({{"kind", "joint_posture"},
                       {"priority", task.priority},
                       {"joints", joints},
                       {"target", target},
                       {"gain", posture.gain}});
    }
  }
  const SolverConfig& c = doc.config;
  json out = {{"tasks", tasks},
              {"solver",
               {{"damping", c.damping},
                {"sv_threshold", c.sv_threshold},
                {"dt", c.dt},
                {"max_iterations", c.max_iterations},
                {"tol_position", c.tol_position},
                {"tol_rotation", c.tol_rotation},
                {"step_scale", c.step_scale}}}};
  if (doc.start) {
    json start = json::array();
    for (Eigen::Index i = 0; i < doc.start->size(); ++i) start.push_back((*doc.start)[i]);
    out["start"] = start;
  }
  return out.dump(2) + "\n";
}

}  // namespace stackik
