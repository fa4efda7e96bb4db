#include "stackik/model_io.hpp"

#include <fstream>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

namespace stackik {

using nlohmann::json;

namespace {

const json& require(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ModelError(where + ": missing field '" + key + "'");
  }
  return obj.at(key);
}

double number(const json& value, const std::string& where) {
  if (!value.is_number()) throw ModelError(where + ": expected a number");
  return value.get<double>();
}

Vector3 vec3(const json& value, const std::string& where) {
  if (!value.is_array() || value.size() != 3) {
    throw ModelError(where + ": expected an array of 3 numbers");
  }
  return {number(value[0], where), number(value[1], where), number(value[2], where)};
}

Transform origin_from(const json& obj, const std::string& where) {
  if (!obj.is_object()) throw ModelError(where + ": origin must be an object");
  Vector3 xyz = obj.contains("xyz") ? vec3(obj.at("xyz"), where + ": origin.xyz") : Vector3::Zero();
  Vector3 rpy = obj.contains("rpy") ? vec3(obj.at("rpy"), where + ": origin.rpy") : Vector3::Zero();
  return Transform::from_xyz_rpy(xyz, rpy);
}

json origin_to(const Transform& t) {
  Vector3 rpy = t.rpy();
  return {{"xyz", {t.translation.x(), t.translation.y(), t.translation.z()}},
          {"rpy", {rpy.x(), rpy.y(), rpy.z()}}};
}

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

bool near(const Transform& a, const Transform& b, double tol) {
  return (a.rotation - b.rotation).cwiseAbs().maxCoeff() <= tol &&
         (a.translation - b.translation).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace

ChainModel parse_model(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ModelError(std::string("model document: ") + e.what());
  }
  if (!doc.is_object()) throw ModelError("model document: top level must be an object");

  std::string name = doc.value("name", std::string{});
  const json& joints_doc = require(doc, "joints", "model document");
  if (!joints_doc.is_array()) throw ModelError("model document: 'joints' must be an array");

  std::vector<JointSpec> joints;
  std::unordered_map<std::string, std::size_t> index_of;
  joints.reserve(joints_doc.size());
  for (std::size_t i = 0; i < joints_doc.size(); ++i) {
    const json& jd = joints_doc[i];
    const json& name_field = require(jd, "name", "joint #" + std::to_string(i));
    if (!name_field.is_string()) throw ModelError("joint #" + std::to_string(i) + ": name must be a string");
    JointSpec joint;
    joint.name = name_field.get<std::string>();
    const std::string where = "joint '" + joint.name + "'";

    const json& kind_field = require(jd, "kind", where);
    auto kind = kind_field.is_string() ? joint_kind_from_string(kind_field.get<std::string>()) : std::nullopt;
    if (!kind) throw ModelError(where + ": unknown joint kind " + kind_field.dump());
    joint.kind = *kind;

    joint.axis = vec3(require(jd, "axis", where), where + ": axis");
    joint.origin = origin_from(require(jd, "origin", where), where);

    const json& limits = require(jd, "limits", where);
    joint.position_limits.lo = number(require(limits, "lo", where + ": limits"), where + ": limits.lo");
    joint.position_limits.hi = number(require(limits, "hi", where + ": limits"), where + ": limits.hi");
    joint.velocity_limit = number(require(limits, "velocity", where + ": limits"), where + ": limits.velocity");

    const json& parent = require(jd, "parent", where);
    if (parent.is_null()) {
      joint.parent = kRootParent;
    } else if (parent.is_string()) {
      auto it = index_of.find(parent.get<std::string>());
      if (it == index_of.end()) {
        throw ModelError(where + ": parent '" + parent.get<std::string>() +
                         "' is not defined before this joint (cyclic or forward reference)");
      }
      joint.parent = static_cast<std::ptrdiff_t>(it->second);
    } else {
      throw ModelError(where + ": parent must be a joint name or null");
    }

    if (index_of.contains(joint.name)) throw ModelError(where + ": duplicate joint name");
    index_of.emplace(joint.name, i);
    joints.push_back(std::move(joint));
  }

  std::vector<FrameSpec> frames;
  if (doc.contains("frames")) {
    const json& frames_doc = doc.at("frames");
    if (!frames_doc.is_array()) throw ModelError("model document: 'frames' must be an array");
    for (std::size_t i = 0; i < frames_doc.size(); ++i) {
      const json& fd = frames_doc[i];
      const json& name_field = require(fd, "name", "frame #" + std::to_string(i));
      if (!name_field.is_string()) throw ModelError("frame #" + std::to_string(i) + ": name must be a string");
      FrameSpec frame;
      frame.name = name_field.get<std::string>();
      const std::string where = "frame '" + frame.name + "'";
      const json& joint_field = require(fd, "joint", where);
      if (!joint_field.is_string()) throw ModelError(where + ": joint must be a joint name");
      auto it = index_of.find(joint_field.get<std::string>());
      if (it == index_of.end()) {
        throw ModelError(where + ": bound to unknown joint '" + joint_field.get<std::string>() + "'");
      }
      frame.joint = it->second;
      frame.offset = fd.contains("origin") ? origin_from(fd.at("origin"), where) : Transform::identity();
      frames.push_back(std::move(frame));
    }
  }

  return ChainModel(std::move(name), std::move(joints), std::move(frames));
}

std::string emit_model_document(const ChainModel& model) {
  json joints = json::array();
  for (const auto& j : model.joints()) {
    joints.push_back({
        {"name", j.name},
        {"kind", std::string(to_string(j.kind))},
        {"axis", {j.axis.x(), j.axis.y(), j.axis.z()}},
        {"origin", origin_to(j.origin)},
        {"limits", {{"lo", j.position_limits.lo}, {"hi", j.position_limits.hi}, {"velocity", j.velocity_limit}}},
        {"parent", j.parent == kRootParent ? json(nullptr)
                                           : json(model.joint(static_cast<std::size_t>(j.parent)).name)},
    });
  }
  json frames = json::array();
  for (const auto& f : model.frames()) {
    frames.push_back({{"name", f.name}, {"joint", model.joint(f.joint).name}, {"origin", origin_to(f.offset)}});
  }
  json doc = {{"name", model.name()}, {"joints", joints}, {"frames", frames}};
  return doc.dump(2) + "\n";
}

bool structurally_equal(const ChainModel& a, const ChainModel& b, double tol) {
  if (a.name() != b.name() || a.n() != b.n() || a.frames().size() != b.frames().size()) return false;
  for (std::size_t i = 0; i < a.n(); ++i) {
    const auto& x = a.joint(i);
    const auto& y = b.joint(i);
    if (x.name != y.name || x.kind != y.kind || x.parent != y.parent) return false;
    if ((x.axis - y.axis).cwiseAbs().maxCoeff() > tol || !near(x.origin, y.origin, tol)) return false;
    if (!near(x.position_limits.lo, y.position_limits.lo, tol) ||
        !near(x.position_limits.hi, y.position_limits.hi, tol) || !near(x.velocity_limit, y.velocity_limit, tol)) {
      return false;
    }
  }
  for (std::size_t i = 0; i < a.frames().size(); ++i) {
    const auto& x = a.frames()[i];
    const auto& y = b.frames()[i];
    if (x.name != y.name || x.joint != y.joint || !near(x.offset, y.offset, tol)) return false;
  }
  return true;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace stackik
