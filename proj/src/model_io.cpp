#include "askin/model_io.hpp"

#include <json.hpp>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <fstream>
#include <sstream>

#include "askin/errors.hpp"

namespace askin {

using nlohmann::json;

namespace {

const json& require(const json& node, const std::string& key, const std::string& path) {
  if (!node.is_object() || !node.contains(key)) throw ConfigError(path + "." + key + ": missing");
  return node.at(key);
}

double number(const json& node, const std::string& path) {
  if (!node.is_number()) throw ConfigError(path + ": expected a number");
  const double v = node.get<double>();
  if (!std::isfinite(v)) throw ConfigError(path + ": not finite");
  return v;
}

Eigen::Vector3d vec3(const json& node, const std::string& path) {
  if (!node.is_array() || node.size() != 3) throw ConfigError(path + ": expected an array of 3 numbers");
  Eigen::Vector3d v;
  for (int i = 0; i < 3; ++i) v(i) = number(node[static_cast<std::size_t>(i)], path + "[" + std::to_string(i) + "]");
  return v;
}

// {"xyz": [m], "rpy": [rad]}; rpy is fixed-axis roll about X, pitch about Y, yaw about Z.
Transform<double> transform(const json& node, const std::string& path) {
  Transform<double> t;
  if (node.contains("xyz")) t.translation = vec3(node.at("xyz"), path + ".xyz");
  if (node.contains("rpy")) {
    const auto rpy = vec3(node.at("rpy"), path + ".rpy");
    t.rotation = rpy_to_rotation(rpy.x(), rpy.y(), rpy.z());
  }
  return t;
}

Eigen::Matrix3d inertia_tensor(const json& node, const std::string& path) {
  auto get = [&](const char* key) { return number(require(node, key, path), path + "." + key); };
  Eigen::Matrix3d m;
  m << get("ixx"), get("ixy"), get("ixz"),  //
      get("ixy"), get("iyy"), get("iyz"),   //
      get("ixz"), get("iyz"), get("izz");
  return m;
}

void check_inertia(const LinkInertia<double>& inertia, const std::string& path) {
  if (!(inertia.mass > 0.0)) throw ConfigError(path + ".mass: must be positive");
  const Eigen::Matrix3d& m = inertia.inertia;
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12) throw ConfigError(path + ".inertia: not symmetric");
  const Eigen::Vector3d principal = Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(m).eigenvalues();
  const double tol = 1e-12 * std::max(1.0, principal.cwiseAbs().maxCoeff());
  if (principal.minCoeff() < -tol) throw ConfigError(path + ".inertia: not positive semidefinite");
  for (int i = 0; i < 3; ++i) {
    if (principal(i) > principal((i + 1) % 3) + principal((i + 2) % 3) + tol) {
      throw ConfigError(path + ".inertia: principal moments violate the triangle inequality");
    }
  }
}

SkinPad parse_pad(const json& node, const std::string& path) {
  SkinPad pad;
  const auto& id = require(node, "id", path);
  if (!id.is_number_integer()) throw ConfigError(path + ".id: expected an integer");
  pad.id = id.get<int>();
  const auto& link = require(node, "link", path);
  if (!link.is_number_unsigned()) throw ConfigError(path + ".link: expected a non-negative integer");
  pad.link = link.get<std::size_t>();
  pad.center = vec3(require(node, "center", path), path + ".center");
  const Eigen::Vector3d normal = vec3(require(node, "normal", path), path + ".normal");
  if (normal.norm() < 1e-9) throw ConfigError(path + ".normal: zero vector");
  pad.normal = normal.normalized();
  const auto& part = require(node, "body_part", path);
  if (!part.is_string()) throw ConfigError(path + ".body_part: expected a string");
  try {
    pad.part = parse_body_part(part.get<std::string>());
  } catch (const InvalidInput& e) {
    throw ConfigError(path + ".body_part: " + e.what());
  }
  return pad;
}

}  // namespace

void validate_model(const RobotModel& model) {
  if (!model.base.is_proper()) throw ConfigError("base: rotation is not proper orthonormal");
  if (!model.tool.is_proper()) throw ConfigError("tool: rotation is not proper orthonormal");
  for (std::size_t i = 0; i < model.links.size(); ++i) {
    const auto& link = model.links[i];
    const std::string path = "joints[" + std::to_string(i) + "]";
    if (std::abs(link.joint.axis.norm() - 1.0) > 1e-12) throw ConfigError(path + ".axis: not a unit vector");
    if (!link.joint.origin.is_proper()) throw ConfigError(path + ".origin: rotation is not proper orthonormal");
    if (!(link.joint.velocity_limit > 0.0)) throw ConfigError(path + ".limits.velocity: must be positive");
    if (!(link.joint.lower < link.joint.upper)) throw ConfigError(path + ".limits: lower must be below upper");
    check_inertia(link.inertia, path + ".link");
  }
}

RobotConfig parse_robot_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("robot config: ") + e.what());
  }

  RobotConfig config;
  config.model.name = root.value("name", "robot");
  config.source = root.value("source", "");
  if (root.contains("base")) config.model.base = transform(root.at("base"), "base");
  if (root.contains("tool")) config.model.tool = transform(root.at("tool"), "tool");

  const auto& joints = require(root, "joints", "");
  if (!joints.is_array()) throw ConfigError("joints: expected an array");
  for (std::size_t i = 0; i < joints.size(); ++i) {
    const std::string path = "joints[" + std::to_string(i) + "]";
    const auto& node = joints[i];
    Link<double> link;
    if (node.value("type", "revolute") != "revolute") throw ConfigError(path + ".type: only revolute joints are supported");
    const Eigen::Vector3d axis = vec3(require(node, "axis", path), path + ".axis");
    if (std::abs(axis.norm() - 1.0) > 1e-12) throw ConfigError(path + ".axis: not a unit vector");
    link.joint.axis = axis;
    if (node.contains("origin")) link.joint.origin = transform(node.at("origin"), path + ".origin");
    const auto& limits = require(node, "limits", path);
    link.joint.lower = number(require(limits, "lower", path + ".limits"), path + ".limits.lower");
    link.joint.upper = number(require(limits, "upper", path + ".limits"), path + ".limits.upper");
    link.joint.velocity_limit = number(require(limits, "velocity", path + ".limits"), path + ".limits.velocity");

    const auto& body = require(node, "link", path);
    link.name = body.value("name", "link" + std::to_string(i));
    link.inertia.mass = number(require(body, "mass", path + ".link"), path + ".link.mass");
    link.inertia.com = vec3(require(body, "com", path + ".link"), path + ".link.com");
    link.inertia.inertia = inertia_tensor(require(body, "inertia", path + ".link"), path + ".link.inertia");
    config.model.links.push_back(std::move(link));
  }
  validate_model(config.model);

  if (root.contains("pads")) {
    const auto& pads = root.at("pads");
    if (!pads.is_array()) throw ConfigError("pads: expected an array");
    for (std::size_t i = 0; i < pads.size(); ++i) {
      config.pads.push_back(parse_pad(pads[i], "pads[" + std::to_string(i) + "]"));
    }
    validate_pad_layout(config.pads, config.model.dof());
  }
  return config;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("failed reading " + path.string());
  return buf.str();
}

RobotConfig load_robot_config(const std::filesystem::path& path) {
  try {
    return parse_robot_config(read_text_file(path));
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

}  // namespace askin
