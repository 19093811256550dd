#include "askin/skin.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "askin/errors.hpp"

namespace askin {

std::string_view to_string(BodyPart part) {
  switch (part) {
    case BodyPart::Upper: return "upper";
    case BodyPart::Lower: return "lower";
    case BodyPart::Hand: return "hand";
  }
  return "?";
}

BodyPart parse_body_part(std::string_view text) {
  for (auto part : kAllBodyParts) {
    if (to_string(part) == text) return part;
  }
  throw InvalidInput("unknown body part '" + std::string(text) + "' (expected upper|lower|hand)");
}

void validate_pad_layout(const std::vector<SkinPad>& pads, std::size_t chain_length) {
  for (std::size_t i = 0; i < pads.size(); ++i) {
    const auto& pad = pads[i];
    const std::string path = "pads[" + std::to_string(i) + "]";
    if (pad.id != static_cast<int>(i)) {
      throw ConfigError(path + ".id: expected " + std::to_string(i) + " (ids must be unique and dense)");
    }
    if (pad.link >= chain_length) throw ConfigError(path + ".link: outside the kinematic chain");
    if (!pad.center.allFinite()) throw ConfigError(path + ".center: non-finite");
    if (std::abs(pad.normal.norm() - 1.0) > 1e-9) throw ConfigError(path + ".normal: not a unit vector");
  }
  for (auto part : kAllBodyParts) {
    if (pads_of_part(pads, part).empty()) {
      throw ConfigError("pads: body part '" + std::string(to_string(part)) + "' has no pads");
    }
  }
}

std::vector<int> pads_of_part(const std::vector<SkinPad>& pads, BodyPart part) {
  std::vector<int> out;
  for (const auto& pad : pads) {
    if (pad.part == part) out.push_back(pad.id);
  }
  return out;
}

void TriggerTable::validate() const {
  if (!(pressure[0] > 0.0 && pressure[0] < pressure[1] && pressure[1] < pressure[2] &&
        pressure[2] <= 1.0)) {
    throw InvalidInput("trigger table must satisfy 0 < p0 < p1 < p2 <= 1");
  }
}

double pressure_from_contact(double effort, double elapsed, double ramp_time) {
  if (!(effort >= 0.0 && effort <= 1.0)) throw InvalidInput("contact effort must lie in [0, 1]");
  if (!(ramp_time > 0.0)) throw InvalidInput("pressure ramp time must be positive");
  if (elapsed <= 0.0) return 0.0;
  return effort * std::min(1.0, elapsed / ramp_time);
}

std::optional<int> detect(const PressureSample& sample, const ThresholdAssignment& assignment,
                          const TriggerTable& triggers) {
  const auto idx = static_cast<std::size_t>(sample.pad);
  if (sample.pad < 0 || idx >= assignment.levels.size()) {
    throw InvalidInput("threshold assignment does not cover pad " + std::to_string(sample.pad));
  }
  if (sample.value > 0.0 && sample.value >= triggers.trigger(assignment.levels[idx])) return sample.pad;
  return std::nullopt;
}

}  // namespace askin
