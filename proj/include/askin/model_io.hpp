#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "askin/kinematics.hpp"
#include "askin/skin.hpp"

namespace askin {

/// Robot description plus its skin layout, as read from one config file.
struct RobotConfig {
  RobotModel model;
  std::vector<SkinPad> pads;
  std::string source;  // provenance note from the file
};

/// Parses a robot config (JSON, `//` comments allowed). Validates every
/// invariant and throws ConfigError naming the path of the first violation.
RobotConfig parse_robot_config(const std::string& text);
RobotConfig load_robot_config(const std::filesystem::path& path);

void validate_model(const RobotModel& model);

/// Reads a whole file; IoError on failure.
std::string read_text_file(const std::filesystem::path& path);

}  // namespace askin
