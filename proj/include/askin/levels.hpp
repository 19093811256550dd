#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace askin {

/// Pad trigger sensitivity. Numerically smaller is more sensitive.
enum class SensitivityLevel : std::uint8_t { Most = 0, Medium = 1, Least = 2 };

inline constexpr int kLevelCount = 3;

inline int to_int(SensitivityLevel level) { return static_cast<int>(level); }

enum class PolicyKind { Uniform, BodyParts, LinkVelocity, EffectiveMass };

inline constexpr PolicyKind kAllPolicies[] = {PolicyKind::Uniform, PolicyKind::BodyParts,
                                              PolicyKind::LinkVelocity, PolicyKind::EffectiveMass};

std::string_view to_string(PolicyKind policy);
PolicyKind parse_policy(std::string_view text);

inline bool is_dynamic(PolicyKind policy) {
  return policy == PolicyKind::LinkVelocity || policy == PolicyKind::EffectiveMass;
}

/// Per-pad levels latched at one threshold update.
struct ThresholdAssignment {
  std::vector<SensitivityLevel> levels;  // indexed by pad id
  double time = 0.0;
  PolicyKind policy = PolicyKind::Uniform;
};

}  // namespace askin
