#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <string_view>
#include <vector>

#include "askin/kinematics.hpp"
#include "askin/skin.hpp"

namespace askin {

enum class ReactionPolicy { Stop, Avoid };

std::string_view to_string(ReactionPolicy reaction);
ReactionPolicy parse_reaction(std::string_view text);

/// Straight Cartesian move of the end-effector, directions in the base frame.
struct TaskSegment {
  Eigen::Vector3d direction = Eigen::Vector3d::UnitY();
  double length = 0.1;  // m
  double speed = 0.5;   // m/s
};

/// Lengths of the four pick-and-place moves: +y, -z, +z, -x.
struct TaskGeometry {
  std::array<double, 4> lengths{0.35, 0.30, 0.30, 0.60};
  double speed = 0.5;
};

std::vector<TaskSegment> task_plan(const TaskGeometry& geometry = {});

/// Segment index of the moves used for contacts: +y -> 0, -z -> 1, -x -> 3.
enum class TaskAxis { PlusY, MinusZ, MinusX };

inline constexpr TaskAxis kContactAxes[] = {TaskAxis::PlusY, TaskAxis::MinusZ, TaskAxis::MinusX};

std::string_view to_string(TaskAxis axis);
TaskAxis parse_axis(std::string_view text);
std::size_t segment_index(TaskAxis axis);

struct VelocityCommand {
  Eigen::VectorXd qdot;
  double time = 0.0;
  bool clamped = false;
  double residual = 0.0;  // |J qdot - xdot| of the tracked task, before clamping
};

/// End-effector point on the last link.
Eigen::Vector3d tool_point(const RobotModel& model);

/// Resolved-rate tracking of a 6D end-effector twist [v; w] via the pseudoinverse.
VelocityCommand rrmc_track(const RobotModel& model, const JointState& state,
                           const Vector6<double>& xdot);

VelocityCommand stop_reaction(const JointState& state);

/// Retreat of the pad point along `retract_direction` (world, unit) at `speed`
/// with zero angular velocity of the pad's link.
VelocityCommand avoid_reaction(const RobotModel& model, const JointState& state, const SkinPad& pad,
                               const Eigen::Vector3d& retract_direction, double speed);

/// Scales the command uniformly so every joint respects its velocity limit.
void clamp_to_limits(const RobotModel& model, VelocityCommand& command);

struct TrackerParams {
  double ramp_time = 0.1;              // s, speed ramp after a (re)start
  double approach_time_constant = 0.04;  // s, final approach speed = distance / tau
  double endpoint_tolerance = 1e-3;    // m
  double orientation_gain = 5.0;       // 1/s, holds the initial tool orientation
};

/// Waypoint follower over a task plan. Each segment ends at a fixed endpoint
/// computed from the start pose, so after an interruption the tool heads in a
/// straight line back to the endpoint of the interrupted segment.
class TaskTracker {
 public:
  TaskTracker(const RobotModel& model, std::vector<TaskSegment> plan, const Eigen::VectorXd& q_start,
              TrackerParams params = {});

  /// Task command for this step; switches segments inside the endpoint tolerance.
  VelocityCommand command(const JointState& state, double dt);

  /// Marks the task as paused; motion resumes with a fresh speed ramp.
  void interrupt();

  bool done() const { return segment_ >= plan_.size(); }
  std::size_t segment() const { return segment_; }
  const std::vector<TaskSegment>& plan() const { return plan_; }
  const std::vector<Eigen::Vector3d>& endpoints() const { return endpoints_; }
  /// Time each segment became active (NaN until reached).
  const std::vector<double>& segment_start_times() const { return start_times_; }
  double completion_time() const { return completion_time_; }

 private:
  const RobotModel* model_;
  std::vector<TaskSegment> plan_;
  TrackerParams params_;
  std::vector<Eigen::Vector3d> endpoints_;
  std::vector<double> start_times_;
  Eigen::Matrix3d orientation_;
  std::size_t segment_ = 0;
  bool restart_ = true;
  double ramp_start_ = 0.0;
  double completion_time_ = 0.0;
};

enum class ReactionPhase { Idle, Stopped, Retreating };

/// Collision reaction state. Engages on a detection, stays engaged while the
/// contact is still felt by the skin, then holds for `hold` seconds.
class ReactionMachine {
 public:
  ReactionMachine(ReactionPolicy policy, double hold = 0.0) : policy_(policy), hold_(hold) {}

  /// Latches the reaction for `pad`; `normal_world` is the pad's outward normal now.
  void engage(int pad, const Eigen::Vector3d& normal_world, double time);

  /// Feeds one skin reading of the engaged pad; returns true when the reaction releases.
  bool on_sample(double pressure, double time);

  /// Releases a pending hold once its time has passed.
  bool update(double time);

  ReactionPhase phase() const { return phase_; }
  bool active() const { return phase_ != ReactionPhase::Idle; }
  int pad() const { return pad_; }
  const Eigen::Vector3d& retract_direction() const { return retract_; }
  int engagements() const { return engagements_; }

 private:
  ReactionPolicy policy_;
  double hold_;
  ReactionPhase phase_ = ReactionPhase::Idle;
  int pad_ = -1;
  Eigen::Vector3d retract_ = Eigen::Vector3d::Zero();
  double release_at_ = -1.0;
  int engagements_ = 0;
};

}  // namespace askin
