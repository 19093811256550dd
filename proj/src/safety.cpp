#include "askin/safety.hpp"

#include <cmath>
#include <string>

#include "askin/errors.hpp"

namespace askin {

std::string_view to_string(PolicyKind policy) {
  switch (policy) {
    case PolicyKind::Uniform: return "uniform";
    case PolicyKind::BodyParts: return "body_parts";
    case PolicyKind::LinkVelocity: return "link_velocity";
    case PolicyKind::EffectiveMass: return "effective_mass";
  }
  return "?";
}

PolicyKind parse_policy(std::string_view text) {
  for (auto policy : kAllPolicies) {
    if (to_string(policy) == text) return policy;
  }
  throw InvalidInput("unknown policy '" + std::string(text) +
                     "' (expected uniform|body_parts|link_velocity|effective_mass)");
}

void PflParams::validate() const {
  if (!(stiffness > 0 && force_limit > 0 && force_mid > 0 && human_mass > 0 && commanded_speed > 0)) {
    throw InvalidInput("PFL parameters must all be strictly positive");
  }
  if (!(force_mid < force_limit)) throw InvalidInput("PFL mid force must be below the force limit");
}

namespace {

void check_masses(double stiffness, double robot_mass, double human_mass) {
  if (!(stiffness > 0.0)) throw InvalidInput("spring constant must be positive");
  if (!(robot_mass > 0.0) || !(human_mass > 0.0)) throw InvalidInput("masses must be positive");
}

}  // namespace

double pfl_max_force(double speed, double stiffness, double robot_mass, double human_mass) {
  check_masses(stiffness, robot_mass, human_mass);
  if (!(speed >= 0.0)) throw InvalidInput("speed must be non-negative");
  // 1 / inf == 0, so an unbounded robot mass degrades to v sqrt(k m_H).
  return speed * std::sqrt(stiffness) / std::sqrt(1.0 / robot_mass + 1.0 / human_mass);
}

double pfl_max_velocity(double max_force, double stiffness, double robot_mass, double human_mass) {
  check_masses(stiffness, robot_mass, human_mass);
  if (!(max_force >= 0.0)) throw InvalidInput("force must be non-negative");
  return max_force / std::sqrt(stiffness) * std::sqrt(1.0 / robot_mass + 1.0 / human_mass);
}

SensitivityLevel force_to_threshold(double force, const PflParams& params) {
  if (!(force >= 0.0)) throw InvalidInput("force must be non-negative");
  if (force >= params.force_limit) return SensitivityLevel::Most;
  if (force >= params.force_mid) return SensitivityLevel::Medium;
  return SensitivityLevel::Least;
}

SensitivityLevel body_part_level(BodyPart part) {
  return part == BodyPart::Upper ? SensitivityLevel::Medium : SensitivityLevel::Most;
}

std::vector<PadForceEstimate> estimate_pad_forces(PolicyKind policy, const RobotModel& model,
                                                  const JointState& state,
                                                  const std::vector<SkinPad>& pads,
                                                  const PflParams& params) {
  const auto poses = forward_kinematics(model, state.q);
  if (state.qdot.size() != state.q.size()) throw InvalidInput("joint rate vector size mismatch");

  const bool use_effective_mass = policy == PolicyKind::EffectiveMass;
  Eigen::LLT<Eigen::MatrixXd> inertia_factor;
  if (use_effective_mass) inertia_factor = factor_inertia(joint_space_inertia(model, poses));

  std::vector<PadForceEstimate> out;
  out.reserve(pads.size());
  for (const auto& pad : pads) {
    const auto jac = point_jacobian(model, poses, pad.link, pad.center);
    const Eigen::Vector3d velocity = jac.topRows<3>() * state.qdot;
    PadForceEstimate est;
    est.speed = velocity.norm();
    if (!use_effective_mass) {
      est.robot_mass = 0.5 * moving_mass_up_to(model, pad.link);
    } else if (est.speed < kStillPadSpeed) {
      est.robot_mass = model.total_mass();
    } else {
      const auto mass = effective_mass(cartesian_ke_inverse(jac, inertia_factor),
                                       Eigen::Vector3d(velocity / est.speed));
      est.mass_unbounded = !mass.bounded;
      est.robot_mass = mass.bounded ? mass.value : model.total_mass();
    }
    est.force = pfl_max_force(est.speed, params.stiffness, est.robot_mass, params.human_mass);
    est.level = force_to_threshold(est.force, params);
    out.push_back(est);
  }
  return out;
}

ThresholdAssignment compute_thresholds(PolicyKind policy, const RobotModel& model,
                                       const JointState& state, const std::vector<SkinPad>& pads,
                                       const PflParams& params) {
  ThresholdAssignment out;
  out.policy = policy;
  out.time = state.time;
  out.levels.reserve(pads.size());
  switch (policy) {
    case PolicyKind::Uniform:
      out.levels.assign(pads.size(), SensitivityLevel::Most);
      break;
    case PolicyKind::BodyParts:
      for (const auto& pad : pads) out.levels.push_back(body_part_level(pad.part));
      break;
    case PolicyKind::LinkVelocity:
    case PolicyKind::EffectiveMass:
      for (const auto& est : estimate_pad_forces(policy, model, state, pads, params)) {
        out.levels.push_back(est.level);
      }
      break;
  }
  return out;
}

}  // namespace askin
