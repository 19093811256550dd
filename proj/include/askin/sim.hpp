#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <vector>

#include "askin/control.hpp"
#include "askin/levels.hpp"
#include "askin/model_io.hpp"
#include "askin/safety.hpp"
#include "askin/skin.hpp"
#include "askin/timing.hpp"

namespace askin {

struct SimConfig {
  double dt = 0.002;              // s
  std::uint64_t seed = 0;
  bool real_time_paced = false;   // pacing changes wall-clock time only
  double max_duration = 60.0;     // s of simulated time before a run is aborted
  double retract_hold = 0.0;      // s the AVOID retreat continues after the contact clears
  double pressure_ramp = kSkinSamplePeriod;  // s for a pad to reach the contact effort
  // When positive, the ramp is instead the time the pad needs to travel this
  // far at its speed at onset (capped at the contact's max dwell).
  double indentation_depth = 0.0;  // m

  void validate() const;
};

enum class DwellRule { FixedMax, UntilDetected };

inline DwellRule dwell_rule_for(ReactionPolicy reaction) {
  return reaction == ReactionPolicy::Stop ? DwellRule::FixedMax : DwellRule::UntilDetected;
}

/// One transient contact. When `pad` is empty the pad of `part` is chosen at onset.
struct ContactEvent {
  std::optional<int> pad;
  BodyPart part = BodyPart::Hand;
  double onset = 0.0;  // s, scheduled
  double effort = 0.8;
  DwellRule dwell = DwellRule::FixedMax;
  double max_dwell = 1.0;  // s

  // Filled in by the simulation.
  std::optional<double> start_time;
  std::optional<double> end_time;
  std::optional<double> detection_time;
  double ramp = 0.0;  // s, pressure rise time used for this contact
};

struct TickLog {
  double time = 0.0;
  Eigen::VectorXd q;
  Eigen::VectorXd qdot;  // command applied over the step
  std::vector<SensitivityLevel> levels;
  std::vector<double> pressures;  // latest skin sample per pad
  bool contact_active = false;
  bool reacting = false;
  bool clamped = false;
  bool threshold_update = false;
  bool skin_sample = false;
  Eigen::Vector3d ee_position = Eigen::Vector3d::Zero();
  Eigen::Quaterniond ee_orientation = Eigen::Quaterniond::Identity();
};

struct SampleLogLine {
  int pad = 0;
  double time = 0.0;
  double value = 0.0;
  SensitivityLevel level = SensitivityLevel::Most;
  bool detected = false;
};

/// Everything a single simulated run needs besides the robot.
struct RunSetup {
  PolicyKind policy = PolicyKind::Uniform;
  ReactionPolicy reaction = ReactionPolicy::Stop;
  PflParams pfl;
  TriggerTable triggers;
  SimConfig sim;
  std::vector<TaskSegment> plan = task_plan();
  TrackerParams tracking;
  Eigen::VectorXd q_start;
};

/// Pad of `part` whose world velocity direction is closest to the end-effector's.
/// Ties go to the lowest id.
int select_pad(const RobotModel& model, const std::vector<SkinPad>& pads, BodyPart part,
               const Eigen::Vector3d& ee_velocity, const JointState& state);

/// Fixed-step world: integrates joint commands, runs the 25 Hz threshold
/// update and 30 Hz skin sampling, and plays back at most one contact.
class World {
 public:
  World(const RobotConfig& robot, RunSetup setup);

  /// Schedules the run's contact; throws if a contact was already injected.
  void inject_contact(ContactEvent event);

  /// One step: threshold update, skin sampling and detection, reaction,
  /// control, Euler integration, logging.
  void step();

  /// Steps until the task completes; RunAborted on timeout or a joint-limit violation.
  void run();

  bool finished() const;
  const JointState& state() const { return state_; }
  std::int64_t steps() const { return steps_; }
  const std::vector<TickLog>& ticks() const { return ticks_; }
  const std::vector<ThresholdAssignment>& assignments() const { return assignments_; }
  const std::vector<SampleLogLine>& samples() const { return samples_; }
  const std::optional<ContactEvent>& contact() const { return contact_; }
  const TaskTracker& tracker() const { return tracker_; }
  const ReactionMachine& reaction() const { return reaction_; }
  const ThresholdAssignment& current_assignment() const { return assignment_; }
  const RunSetup& setup() const { return setup_; }
  const RobotConfig& robot() const { return *robot_; }

  /// Path length of the contacted pad point while retreating.
  double retreat_distance() const { return retreat_distance_; }
  /// Threshold level of the contacted pad when the contact started.
  std::optional<SensitivityLevel> level_at_onset() const { return level_at_onset_; }
  std::optional<SensitivityLevel> level_at_detection() const { return level_at_detection_; }
  std::optional<PadForceEstimate> force_at_onset() const { return force_at_onset_; }
  /// Number of (update, pad) pairs at each level over the whole run.
  const std::array<std::int64_t, kLevelCount>& level_counts() const { return level_counts_; }

  std::int64_t threshold_updates() const { return threshold_timer_.firings(); }
  std::int64_t skin_samples() const { return skin_timer_.firings(); }

  /// Keep per-step logs (default on). Matrix runs switch this off.
  void set_logging(bool enabled) { logging_ = enabled; }

 private:
  double time_now() const;
  void update_contact(double t);
  void sample_skin(double t, std::vector<int>& detections);

  const RobotConfig* robot_;
  RunSetup setup_;
  JointState state_;
  PeriodicTimer threshold_timer_;
  PeriodicTimer skin_timer_;
  ThresholdAssignment assignment_;
  TaskTracker tracker_;
  ReactionMachine reaction_;
  std::optional<ContactEvent> contact_;
  bool contact_active_ = false;
  std::vector<double> pressures_;
  std::int64_t steps_ = 0;
  bool logging_ = true;
  bool last_clamped_ = false;
  double retreat_distance_ = 0.0;
  std::optional<SensitivityLevel> level_at_onset_;
  std::optional<SensitivityLevel> level_at_detection_;
  std::optional<PadForceEstimate> force_at_onset_;
  std::array<std::int64_t, kLevelCount> level_counts_{};
  std::vector<TickLog> ticks_;
  std::vector<ThresholdAssignment> assignments_;
  std::vector<SampleLogLine> samples_;
};

/// Newline-delimited tick records. Column order:
/// time, q[0..n), qdot[0..n), level[0..p), pressure[0..p), contact, reacting,
/// clamped, threshold_update, skin_sample, ee_x, ee_y, ee_z, ee_qw, ee_qx, ee_qy, ee_qz
void write_tick_log_csv(std::ostream& out, const std::vector<TickLog>& ticks);

/// Compact little-endian binary variant: "ASKTICK1", u32 joints, u32 pads,
/// u64 count, then per tick: f64 time, f64 q[n], f64 qdot[n], u8 level[p],
/// f64 pressure[p], u8 flags (bit0 contact, bit1 reacting, bit2 clamped,
/// bit3 threshold_update, bit4 skin_sample), f64 ee position[3], f64 quaternion wxyz[4].
void write_tick_log_binary(std::ostream& out, const std::vector<TickLog>& ticks);
std::vector<TickLog> read_tick_log_binary(std::istream& in);

/// Pad x update-time grid of levels (one row per pad, one column per update).
void write_threshold_timeline(std::ostream& out, const std::vector<ThresholdAssignment>& assignments);

}  // namespace askin
