// Python bindings for the IK kernel. Arrays cross as numpy buffers; solves
// release the GIL.
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <string>

#include "stackik/bench.hpp"
#include "stackik/kinematics.hpp"
#include "stackik/linalg.hpp"
#include "stackik/model_io.hpp"
#include "stackik/scenario.hpp"
#include "stackik/solver.hpp"
#include "stackik/task_io.hpp"

namespace py = pybind11;
using namespace stackik;

namespace {

// Parsed documents plus a solver with preallocated workspaces. The pose
// task that receives targets is the stack's primary pose task.
class BoundSolver {
 public:
  BoundSolver(const std::string& model_text, const std::string& tasks_text)
      : model_(parse_model(model_text)),
        doc_(parse_task_document(tasks_text, model_)),
        solver_(model_, model_.limits(), doc_.config) {
    auto target = doc_.stack.primary_pose_task();
    if (!target) throw TaskError("task document has no pose_tracking task");
    target_task_ = *target;
    solver_.prepare(doc_.stack);
  }

  py::dict solve(const JointVector& q0, const Vector3& xyz, const Vector3& rpy) {
    IkResult r;
    {
      py::gil_scoped_release release;
      doc_.stack.set_pose_target(target_task_, Transform::from_xyz_rpy(xyz, rpy));
      r = solver_.solve_position_ik(q0, doc_.stack);
    }
    py::dict out;
    out["q_final"] = r.q_final;
    out["iterations"] = r.iterations;
    out["converged"] = r.converged;
    out["solve_time_us"] = r.solve_time_us;
    std::vector<Vector6> errors = r.final_error;
    out["final_error"] = errors;
    return out;
  }

  py::dict step(const JointVector& q, const Vector3& xyz, const Vector3& rpy) {
    VelocityResult r;
    {
      py::gil_scoped_release release;
      doc_.stack.set_pose_target(target_task_, Transform::from_xyz_rpy(xyz, rpy));
      r = solver_.step(q, doc_.stack);
    }
    py::dict out;
    out["qdot"] = r.qdot;
    out["residual_per_level"] = r.residual_per_level;
    out["rank_per_level"] = r.rank_per_level;
    out["scale_factor"] = r.scale_factor;
    out["saturated"] = r.saturated;
    out["locked_joints"] = r.locked_joints;
    return out;
  }

  std::size_t n() const { return model_.n(); }
  JointVector start() const {
    if (doc_.start) return *doc_.start;
    return JointVector::Zero(static_cast<Eigen::Index>(model_.n()))
        .cwiseMax(solver_.limits().position_lo)
        .cwiseMin(solver_.limits().position_hi);
  }

 private:
  ChainModel model_;
  TaskDocument doc_;
  TaskStackSolver solver_;
  std::size_t target_task_ = 0;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Prioritized task-stack inverse kinematics kernel";

  py::register_exception<ModelError>(m, "ModelError", PyExc_ValueError);
  py::register_exception<TaskError>(m, "TaskError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<BenchError>(m, "BenchError", PyExc_RuntimeError);

  py::class_<Transform>(m, "Transform")
      .def(py::init<>())
      .def_static("from_xyz_rpy", &Transform::from_xyz_rpy, py::arg("xyz"), py::arg("rpy"))
      .def_readwrite("rotation", &Transform::rotation)
      .def_readwrite("translation", &Transform::translation)
      .def("rpy", &Transform::rpy)
      .def("inverse", &Transform::inverse)
      .def("__mul__", &Transform::operator*);

  py::class_<LimitSet>(m, "LimitSet")
      .def(py::init([](JointVector lo, JointVector hi, JointVector vmax) {
             LimitSet l{std::move(lo), std::move(hi), std::move(vmax)};
             l.validate();
             return l;
           }),
           py::arg("position_lo"), py::arg("position_hi"), py::arg("velocity_max"))
      .def_readonly("position_lo", &LimitSet::position_lo)
      .def_readonly("position_hi", &LimitSet::position_hi)
      .def_readonly("velocity_max", &LimitSet::velocity_max);

  py::class_<ChainModel>(m, "ChainModel")
      .def_property_readonly("name", &ChainModel::name)
      .def_property_readonly("n", &ChainModel::n)
      .def_property_readonly("joint_names",
                             [](const ChainModel& c) {
                               std::vector<std::string> out;
                               for (const auto& j : c.joints()) out.push_back(j.name);
                               return out;
                             })
      .def_property_readonly("frame_names",
                             [](const ChainModel& c) {
                               std::vector<std::string> out;
                               for (const auto& f : c.frames()) out.push_back(f.name);
                               return out;
                             })
      .def("limits", &ChainModel::limits)
      .def("to_document", [](const ChainModel& c) { return emit_model_document(c); });

  m.def("parse_model", [](const std::string& text) { return parse_model(text); }, py::arg("text"));
  m.def("forward_kinematics",
        [](const ChainModel& model, const JointVector& q, const std::string& frame) {
          return forward_kinematics(model, q, frame);
        },
        py::arg("model"), py::arg("q"), py::arg("frame") = kEndEffectorFrame);
  m.def("geometric_jacobian",
        [](const ChainModel& model, const JointVector& q, const std::string& frame) {
          return geometric_jacobian(model, q, frame);
        },
        py::arg("model"), py::arg("q"), py::arg("frame") = kEndEffectorFrame);
  m.def("pose_error", &pose_error, py::arg("target"), py::arg("current"));
  m.def("damped_pinv", &damped_pinv, py::arg("m"), py::arg("damping"), py::arg("sv_threshold") = 1e-8);
  m.def("compute_scale_factor",
        [](const JointVector& qdot, const JointVector& q, const LimitSet& limits, double dt) {
          const ScaleResult s = compute_scale_factor(qdot, q, limits, dt);
          return py::make_tuple(s.scale, s.saturated);
        },
        py::arg("qdot"), py::arg("q"), py::arg("limits"), py::arg("dt"));

  py::class_<BoundSolver>(m, "Solver")
      .def(py::init<const std::string&, const std::string&>(), py::arg("model_document"),
           py::arg("tasks_document"))
      .def_property_readonly("n", &BoundSolver::n)
      .def_property_readonly("start", &BoundSolver::start)
      .def("solve", &BoundSolver::solve, py::arg("q0"), py::arg("xyz"), py::arg("rpy"))
      .def("step", &BoundSolver::step, py::arg("q"), py::arg("xyz"), py::arg("rpy"));

  m.def(
      "build_default_scenario",
      [](int torso, int arm) {
        ScenarioSpec spec;
        spec.torso_joint_count = torso;
        spec.arm_joint_count = arm;
        const ScenarioBundle b = build_default_scenario(spec);
        py::dict out;
        out["model_document"] = b.model_document;
        out["tasks_document"] = b.tasks_document;
        out["q_nominal"] = b.q_nominal;
        out["torso_joint_count"] = b.torso_joint_count;
        return out;
      },
      py::arg("torso_joint_count") = 12, py::arg("arm_joint_count") = 6);

  m.def(
      "summarize",
      [](const std::vector<double>& times, const std::vector<bool>& converged) {
        if (times.size() != converged.size()) throw BenchError("times and converged differ in length");
        std::vector<SampleRecord> records;
        for (std::size_t i = 0; i < times.size(); ++i) {
          records.push_back({static_cast<int>(i), times[i], 0, converged[i], 0.0});
        }
        const Summary s = summarize(records);
        py::dict out;
        out["median_us"] = s.median_us;
        out["p10_us"] = s.p10_us;
        out["p90_us"] = s.p90_us;
        out["mean_us"] = s.mean_us;
        out["std_us"] = s.std_us;
        out["success_rate"] = s.success_rate;
        out["samples"] = s.samples;
        return out;
      },
      py::arg("times_us"), py::arg("converged"));
}
