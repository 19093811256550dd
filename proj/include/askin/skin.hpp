#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "askin/levels.hpp"

namespace askin {

enum class BodyPart { Upper, Lower, Hand };

inline constexpr BodyPart kAllBodyParts[] = {BodyPart::Upper, BodyPart::Lower, BodyPart::Hand};

std::string_view to_string(BodyPart part);
BodyPart parse_body_part(std::string_view text);

struct SkinPad {
  int id = 0;
  std::size_t link = 0;
  Eigen::Vector3d center = Eigen::Vector3d::Zero();  // link frame, m
  Eigen::Vector3d normal = Eigen::Vector3d::UnitZ();  // outward, link frame
  BodyPart part = BodyPart::Upper;
};

/// Pads must be stored with pad id == index; every lookup relies on it.
void validate_pad_layout(const std::vector<SkinPad>& pads, std::size_t chain_length);

std::vector<int> pads_of_part(const std::vector<SkinPad>& pads, BodyPart part);

inline constexpr double kSkinRateHz = 30.0;
inline constexpr double kSkinSamplePeriod = 1.0 / kSkinRateHz;

struct PressureSample {
  int pad = 0;
  double value = 0.0;  // normalized to the pad's pressure range
  double time = 0.0;
};

/// Normalized pressure required to trigger at each sensitivity level.
struct TriggerTable {
  std::array<double, kLevelCount> pressure{0.05, 0.75, 0.95};

  double trigger(SensitivityLevel level) const { return pressure[static_cast<std::size_t>(level)]; }
  void validate() const;
};

/// Pressure of a held contact `elapsed` seconds after onset: a linear rise to
/// `effort` over `ramp_time`, then constant. Zero before onset.
double pressure_from_contact(double effort, double elapsed, double ramp_time = kSkinSamplePeriod);

/// Pad id when the sample reaches the trigger for the pad's latched level.
std::optional<int> detect(const PressureSample& sample, const ThresholdAssignment& assignment,
                          const TriggerTable& triggers);

}  // namespace askin
