#pragma once

#include <array>
#include <limits>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "askin/sim.hpp"

namespace askin {

/// Everything that defines an experiment matrix. Loaded from an experiment
/// JSON file and then overridden by CLI flags.
struct ExperimentConfig {
  std::filesystem::path robot_path;
  TaskGeometry task;
  Eigen::VectorXd q_start;
  PflParams pfl;
  TriggerTable triggers;
  SimConfig sim;
  TrackerParams tracking;
  double effort = 0.8;
  double onset_fraction = 0.4;  // of the target segment's nominal duration
  double onset_jitter = 0.05;   // s, uniform +-
  double penalty = 5.0;         // s added per reacted run
  int reps = 10;
  std::uint64_t seed = 1;
  unsigned threads = 0;  // 0: hardware concurrency

  // Matrix axes; `run` narrows these to single values.
  std::vector<PolicyKind> policies{std::begin(kAllPolicies), std::end(kAllPolicies)};
  std::vector<ReactionPolicy> reactions{ReactionPolicy::Stop, ReactionPolicy::Avoid};
  std::vector<TaskAxis> axes{std::begin(kContactAxes), std::end(kContactAxes)};
  std::vector<BodyPart> parts{std::begin(kAllBodyParts), std::end(kAllBodyParts)};

  void validate() const;
};

std::filesystem::path default_robot_path();
std::filesystem::path default_experiment_path();

/// Applies the keys present in a JSON experiment/scenario document.
/// Scenario keys: policy, reaction, body_part, axis, effort, onset, reps, seed.
void apply_experiment_json(ExperimentConfig& config, const std::string& text);
ExperimentConfig load_experiment(const std::filesystem::path& path);
/// JSON echo of every setting, for run manifests.
std::string experiment_manifest(const ExperimentConfig& config);

struct ScenarioSpec {
  PolicyKind policy = PolicyKind::Uniform;
  ReactionPolicy reaction = ReactionPolicy::Stop;
  TaskAxis axis = TaskAxis::PlusY;
  BodyPart part = BodyPart::Upper;
  int rep = 0;
};

/// Matrix order: policy, reaction, axis, body part, repetition (slowest to fastest).
std::vector<ScenarioSpec> enumerate_matrix(const ExperimentConfig& config);

/// Per-run seed derived from the master seed and the run index only.
std::uint64_t run_seed(std::uint64_t master_seed, std::size_t run_index);

/// Segment start times and durations of the undisturbed task.
struct Timetable {
  std::vector<double> segment_start;
  std::vector<double> segment_duration;
  double task_time = 0.0;
};

Timetable nominal_timetable(const RobotConfig& robot, const ExperimentConfig& config);

struct RunRecord {
  std::size_t run_index = 0;
  ScenarioSpec scenario;
  std::uint64_t seed = 0;
  int pad = -1;
  double onset = 0.0;  // actual contact start, s
  double effort = 0.0;
  bool ok = true;
  std::string diagnostic;
  bool reacted = false;
  double reaction_time = std::numeric_limits<double>::quiet_NaN();   // detection sample - onset
  double task_time = std::numeric_limits<double>::quiet_NaN();       // penalty-free
  double total_time = std::numeric_limits<double>::quiet_NaN();      // task_time + penalty if reacted
  double avoid_distance = std::numeric_limits<double>::quiet_NaN();  // AVOID and reacted only
  SensitivityLevel level_at_pad = SensitivityLevel::Most;  // at detection, else at onset
  double estimated_force = std::numeric_limits<double>::quiet_NaN();  // N, at onset
  std::array<std::int64_t, kLevelCount> level_counts{};
  std::int64_t threshold_updates = 0;
  std::int64_t skin_samples = 0;
};

RunSetup make_run_setup(const ExperimentConfig& config, const ScenarioSpec& spec);

ContactEvent make_contact(const ExperimentConfig& config, const ScenarioSpec& spec,
                          const Timetable& timetable, std::uint64_t seed);

/// Simulates one scenario. Failures are captured in the record, not thrown.
/// When `world_out` is given, the finished world (with full logs) is moved there.
RunRecord run_scenario(const RobotConfig& robot, const ExperimentConfig& config,
                       const ScenarioSpec& spec, std::size_t run_index, const Timetable& timetable,
                       std::optional<World>* world_out = nullptr);

/// Runs every scenario of the matrix, in parallel, in matrix order.
std::vector<RunRecord> run_matrix(const RobotConfig& robot, const ExperimentConfig& config);

struct MeanSd {
  double mean = std::numeric_limits<double>::quiet_NaN();
  double sd = std::numeric_limits<double>::quiet_NaN();  // sample (n - 1)
  std::size_t n = 0;
};

MeanSd mean_sd(const std::vector<double>& values);
/// Pearson correlation; empty when fewer than two points or a constant series.
std::optional<double> pearson(const std::vector<double>& x, const std::vector<double>& y);

inline constexpr std::size_t kPolicyCount = 4;
inline constexpr std::size_t kReactionCount = 2;
inline constexpr std::size_t kPartCount = 3;

struct SummaryTables {
  std::size_t runs = 0;
  std::size_t aborted = 0;
  std::array<std::array<MeanSd, kReactionCount>, kPolicyCount> total_time{};
  /// Percent of runs that reacted, pooled over both reactions.
  std::array<std::array<double, kPartCount>, kPolicyCount> reaction_rate{};
  std::array<double, kPolicyCount> reaction_rate_overall{};
  /// Percent of (threshold update, pad) pairs at each level over the whole task.
  std::array<std::array<double, kLevelCount>, kPolicyCount> level_share{};
  std::array<MeanSd, kPolicyCount> reaction_time{};
  std::array<MeanSd, kPolicyCount> avoid_distance{};
  std::optional<double> correlation;  // r(reaction_time, estimated_force) over reacted runs
  std::size_t correlation_n = 0;
};

SummaryTables aggregate(const std::vector<RunRecord>& records);

void write_records_csv(std::ostream& out, const std::vector<RunRecord>& records);
std::vector<RunRecord> read_records_csv(std::istream& in);
void save_records(const std::filesystem::path& path, const std::vector<RunRecord>& records);
std::vector<RunRecord> load_records(const std::filesystem::path& path);

std::string summary_json(const SummaryTables& tables);
std::string summary_text(const SummaryTables& tables);

/// Peak pad speed per body part over the undisturbed task.
std::array<double, kPartCount> peak_part_speeds(const RobotConfig& robot, const ExperimentConfig& config);

/// Writes records.csv, summary.json, summary.txt and the plot series
/// (total_time.csv, reaction_time.csv, avoid_distance.csv) into `dir`.
void emit(const SummaryTables& tables, const std::vector<RunRecord>& records,
          const std::filesystem::path& dir);

}  // namespace askin
