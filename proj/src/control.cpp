#include "askin/control.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "askin/errors.hpp"

namespace askin {

std::string_view to_string(ReactionPolicy reaction) {
  return reaction == ReactionPolicy::Stop ? "stop" : "avoid";
}

ReactionPolicy parse_reaction(std::string_view text) {
  if (text == "stop") return ReactionPolicy::Stop;
  if (text == "avoid") return ReactionPolicy::Avoid;
  throw InvalidInput("unknown reaction '" + std::string(text) + "' (expected stop|avoid)");
}

std::string_view to_string(TaskAxis axis) {
  switch (axis) {
    case TaskAxis::PlusY: return "+y";
    case TaskAxis::MinusZ: return "-z";
    case TaskAxis::MinusX: return "-x";
  }
  return "?";
}

TaskAxis parse_axis(std::string_view text) {
  for (auto axis : kContactAxes) {
    if (to_string(axis) == text) return axis;
  }
  if (text == "y") return TaskAxis::PlusY;
  if (text == "z") return TaskAxis::MinusZ;
  if (text == "x") return TaskAxis::MinusX;
  throw InvalidInput("unknown task axis '" + std::string(text) + "' (expected +y|-z|-x)");
}

std::size_t segment_index(TaskAxis axis) {
  switch (axis) {
    case TaskAxis::PlusY: return 0;
    case TaskAxis::MinusZ: return 1;
    case TaskAxis::MinusX: return 3;
  }
  return 0;
}

std::vector<TaskSegment> task_plan(const TaskGeometry& geometry) {
  static const Eigen::Vector3d kDirections[4] = {
      Eigen::Vector3d::UnitY(), -Eigen::Vector3d::UnitZ(), Eigen::Vector3d::UnitZ(), -Eigen::Vector3d::UnitX()};
  if (!(geometry.speed > 0.0)) throw InvalidInput("task speed must be positive");
  std::vector<TaskSegment> plan;
  for (std::size_t i = 0; i < 4; ++i) {
    if (!(geometry.lengths[i] > 0.0)) throw InvalidInput("task segment lengths must be positive");
    plan.push_back({kDirections[i], geometry.lengths[i], geometry.speed});
  }
  return plan;
}

Eigen::Vector3d tool_point(const RobotModel& model) { return model.tool.translation; }

VelocityCommand rrmc_track(const RobotModel& model, const JointState& state, const Vector6<double>& xdot) {
  if (!xdot.allFinite()) throw InvalidInput("target twist contains non-finite entries");
  if (model.dof() == 0) throw InvalidInput("cannot track with an empty chain");
  const auto jac = point_jacobian(model, state.q, model.dof() - 1, tool_point(model));
  VelocityCommand cmd;
  cmd.time = state.time;
  cmd.qdot = pseudoinverse(jac) * xdot;
  cmd.residual = (jac * cmd.qdot - xdot).norm();
  return cmd;
}

VelocityCommand stop_reaction(const JointState& state) {
  VelocityCommand cmd;
  cmd.time = state.time;
  cmd.qdot = Eigen::VectorXd::Zero(state.q.size());
  return cmd;
}

VelocityCommand avoid_reaction(const RobotModel& model, const JointState& state, const SkinPad& pad,
                               const Eigen::Vector3d& retract_direction, double speed) {
  const auto jac = point_jacobian(model, state.q, pad.link, pad.center);
  Vector6<double> twist;
  twist << retract_direction * speed, Eigen::Vector3d::Zero();
  // Distal columns are zero; solving over the proximal ones keeps distal joints exactly still.
  const auto n = static_cast<Eigen::Index>(pad.link) + 1;
  VelocityCommand cmd;
  cmd.time = state.time;
  cmd.qdot = Eigen::VectorXd::Zero(jac.cols());
  cmd.qdot.head(n) = pseudoinverse(jac.leftCols(n)) * twist;
  cmd.residual = (jac * cmd.qdot - twist).norm();
  return cmd;
}

void clamp_to_limits(const RobotModel& model, VelocityCommand& command) {
  double scale = 1.0;
  for (std::size_t i = 0; i < model.dof(); ++i) {
    const double rate = std::abs(command.qdot(static_cast<Eigen::Index>(i)));
    const double limit = model.links[i].joint.velocity_limit;
    if (rate > limit) scale = std::min(scale, limit / rate);
  }
  if (scale < 1.0) {
    command.qdot *= scale;
    command.clamped = true;
  }
}

TaskTracker::TaskTracker(const RobotModel& model, std::vector<TaskSegment> plan,
                         const Eigen::VectorXd& q_start, TrackerParams params)
    : model_(&model), plan_(std::move(plan)), params_(params) {
  const auto start = tool_pose(model, q_start);
  orientation_ = start.rotation;
  Eigen::Vector3d point = start.translation;
  for (const auto& seg : plan_) {
    if (!(seg.speed > 0.0) || !(seg.length > 0.0)) throw InvalidInput("task segments need positive speed and length");
    point += seg.direction.normalized() * seg.length;
    endpoints_.push_back(point);
  }
  start_times_.assign(plan_.size(), std::numeric_limits<double>::quiet_NaN());
}

void TaskTracker::interrupt() { restart_ = true; }

VelocityCommand TaskTracker::command(const JointState& state, double dt) {
  const auto pose = tool_pose(*model_, state.q);
  while (!done() && (endpoints_[segment_] - pose.translation).norm() < params_.endpoint_tolerance) {
    ++segment_;
    restart_ = true;
    if (done()) completion_time_ = state.time;
  }
  if (done()) return stop_reaction(state);
  if (restart_) {
    ramp_start_ = state.time;
    restart_ = false;
    if (std::isnan(start_times_[segment_])) start_times_[segment_] = state.time;
  }

  const auto& seg = plan_[segment_];
  const Eigen::Vector3d to_go = endpoints_[segment_] - pose.translation;
  const double distance = to_go.norm();
  const double ramp = std::min(1.0, (state.time - ramp_start_ + dt) / params_.ramp_time);
  const double speed = std::min(seg.speed * ramp, distance / params_.approach_time_constant);

  Vector6<double> twist;
  twist << to_go / distance * speed, params_.orientation_gain * rotation_error(pose.rotation, orientation_);
  return rrmc_track(*model_, state, twist);
}

void ReactionMachine::engage(int pad, const Eigen::Vector3d& normal_world, double time) {
  (void)time;
  if (active()) return;
  pad_ = pad;
  retract_ = -normal_world.normalized();
  phase_ = policy_ == ReactionPolicy::Stop ? ReactionPhase::Stopped : ReactionPhase::Retreating;
  release_at_ = -1.0;
  ++engagements_;
}

bool ReactionMachine::on_sample(double pressure, double time) {
  if (!active() || release_at_ >= 0.0 || pressure > 0.0) return false;
  release_at_ = time + hold_;
  return update(time);
}

bool ReactionMachine::update(double time) {
  if (!active() || release_at_ < 0.0 || time < release_at_) return false;
  phase_ = ReactionPhase::Idle;
  pad_ = -1;
  release_at_ = -1.0;
  return true;
}

}  // namespace askin
