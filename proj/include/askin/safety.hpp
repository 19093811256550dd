#pragma once

#include <vector>

#include "askin/dynamics.hpp"
#include "askin/kinematics.hpp"
#include "askin/levels.hpp"
#include "askin/skin.hpp"

namespace askin {

/// Transient-contact parameters of the mass-spring-mass PFL model.
struct PflParams {
  double stiffness = 75000.0;       // N/m, back of the non-dominant hand
  double force_limit = 280.0;       // N, transient contact
  double force_mid = 140.0;         // N
  double human_mass = 5.6;          // kg
  double commanded_speed = 0.5;     // m/s, end-effector

  void validate() const;
};

/// Largest contact force for a robot moving at speed v:  F = v sqrt(k) / sqrt(1/m_R + 1/m_H).
double pfl_max_force(double speed, double stiffness, double robot_mass, double human_mass);

/// Largest speed keeping the contact force at or below `max_force`; inverse of pfl_max_force.
double pfl_max_velocity(double max_force, double stiffness, double robot_mass, double human_mass);

/// 0 if F >= F_limit, 1 if F_mid <= F < F_limit, 2 otherwise.
SensitivityLevel force_to_threshold(double force, const PflParams& params);

/// BODY_PARTS assignment: hand and lower arm most sensitive, upper arm medium.
SensitivityLevel body_part_level(BodyPart part);

inline constexpr double kStillPadSpeed = 1e-4;  // m/s; below this the velocity direction is undefined

/// Eq. (4) ingredients and result for one pad at one state.
struct PadForceEstimate {
  double speed = 0.0;       // m/s, pad center
  double robot_mass = 0.0;  // kg, m_R actually used
  bool mass_unbounded = false;
  double force = 0.0;       // N
  SensitivityLevel level = SensitivityLevel::Least;
};

/// Force estimates for every pad. EFFECTIVE_MASS uses the effective mass along
/// the pad velocity (total chain mass when unbounded or when the pad is still);
/// every other policy uses half the moving mass up to the pad's link.
std::vector<PadForceEstimate> estimate_pad_forces(PolicyKind policy, const RobotModel& model,
                                                  const JointState& state,
                                                  const std::vector<SkinPad>& pads,
                                                  const PflParams& params);

ThresholdAssignment compute_thresholds(PolicyKind policy, const RobotModel& model,
                                       const JointState& state, const std::vector<SkinPad>& pads,
                                       const PflParams& params);

}  // namespace askin
