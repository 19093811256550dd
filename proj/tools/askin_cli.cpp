// askin: run contact scenarios, sweep the experiment matrix, report, and
// evaluate the PFL force model for a single pad.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "askin/errors.hpp"
#include "askin/harness.hpp"
#include "askin/text_format.hpp"

namespace {

using namespace askin;
namespace fs = std::filesystem;

struct CommonOptions {
  std::string experiment;
  std::string robot;
  std::optional<std::uint64_t> seed;
  std::optional<int> reps;
  std::optional<double> dt;
  std::optional<double> effort;
  std::optional<unsigned> threads;
  bool paced = false;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.experiment, "Experiment/scenario JSON file")->check(CLI::ExistingFile);
  cmd->add_option("--robot", o.robot, "Robot model JSON file")->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seed, "Master seed");
  cmd->add_option("--reps", o.reps, "Repetitions per scenario");
  cmd->add_option("--dt", o.dt, "Integration step [s]");
  cmd->add_option("--effort", o.effort, "Contact effort in [0, 1]");
  cmd->add_option("--threads", o.threads, "Worker threads (0: all cores)");
  auto* fast = cmd->add_flag("--fast", "Run as fast as possible (default)");
  cmd->add_flag("--paced", o.paced, "Pace the simulation to wall-clock time")->excludes(fast);
}

ExperimentConfig build_config(const CommonOptions& o) {
  ExperimentConfig config = load_experiment(o.experiment.empty() ? default_experiment_path() : fs::path(o.experiment));
  if (!o.robot.empty()) config.robot_path = o.robot;
  if (o.seed) config.seed = *o.seed;
  if (o.reps) config.reps = *o.reps;
  if (o.dt) config.sim.dt = *o.dt;
  if (o.effort) config.effort = *o.effort;
  if (o.threads) config.threads = *o.threads;
  config.sim.real_time_paced = o.paced;
  return config;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  if (!out) throw IoError("failed writing " + path.string());
}

template <typename Writer>
void write_stream(const fs::path& path, Writer&& writer) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  writer(out);
  if (!out) throw IoError("failed writing " + path.string());
}

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

RobotConfig load_robot(const ExperimentConfig& config) {
  auto robot = load_robot_config(config.robot_path);
  if (static_cast<std::size_t>(config.q_start.size()) != robot.model.dof()) {
    throw ConfigError("q_start has " + std::to_string(config.q_start.size()) + " entries, robot has " +
                      std::to_string(robot.model.dof()) + " joints");
  }
  return robot;
}

// ---------------------------------------------------------------- run

struct RunOptions {
  CommonOptions common;
  std::string policy, reaction, axis, part;
  std::string out = "askin_run";
  bool binary = false;
};

int cmd_run(const RunOptions& o) {
  auto config = build_config(o.common);
  if (!o.common.reps) config.reps = 1;
  if (!o.policy.empty()) config.policies = {parse_policy(o.policy)};
  if (!o.reaction.empty()) config.reactions = {parse_reaction(o.reaction)};
  if (!o.axis.empty()) config.axes = {parse_axis(o.axis)};
  if (!o.part.empty()) config.parts = {parse_body_part(o.part)};
  if (config.policies.size() != 1 || config.reactions.size() != 1 || config.axes.size() != 1 ||
      config.parts.size() != 1) {
    throw InvalidInput("run needs exactly one policy, reaction, axis and body part (use `matrix` for sweeps)");
  }
  config.validate();
  const auto robot = load_robot(config);
  const auto timetable = nominal_timetable(robot, config);
  const fs::path out(o.out);
  make_dir(out);
  write_file(out / "manifest.json", experiment_manifest(config));

  std::vector<RunRecord> records;
  int status = 0;
  const auto specs = enumerate_matrix(config);
  for (std::size_t i = 0; i < specs.size(); ++i) {
    std::optional<World> world;
    auto rec = run_scenario(robot, config, specs[i], i, timetable, &world);
    char name[32];
    std::snprintf(name, sizeof name, "rep_%03d", specs[i].rep);
    const fs::path dir = out / name;
    make_dir(dir);
    if (world) {
      write_stream(dir / "ticks.csv", [&](std::ostream& s) { write_tick_log_csv(s, world->ticks()); });
      if (o.binary) {
        write_stream(dir / "ticks.bin", [&](std::ostream& s) { write_tick_log_binary(s, world->ticks()); });
      }
      write_stream(dir / "thresholds.csv",
                   [&](std::ostream& s) { write_threshold_timeline(s, world->assignments()); });
      write_stream(dir / "samples.csv", [&](std::ostream& s) {
        s << "pad,time,value,level,detected\n";
        for (const auto& line : world->samples()) {
          s << line.pad << ',' << exact(line.time) << ',' << exact(line.value) << ',' << to_int(line.level) << ','
            << (line.detected ? 1 : 0) << '\n';
        }
      });
    }
    if (!rec.ok) {
      std::cerr << "run " << i << " aborted: " << rec.diagnostic << "\n";
      status = static_cast<int>(ErrorCategory::RunAborted);
    } else {
      std::cout << name << ": pad " << rec.pad << ", onset " << fixed(rec.onset, 3) << " s, "
                << (rec.reacted ? "reacted after " + fixed(rec.reaction_time, 3) + " s" : std::string("no reaction"))
                << ", level " << to_int(rec.level_at_pad) << ", est. force " << fixed(rec.estimated_force, 1)
                << " N, total " << fixed(rec.total_time, 3) << " s\n";
    }
    records.push_back(std::move(rec));
  }
  save_records(out / "records.csv", records);
  return status;
}

// ---------------------------------------------------------------- matrix

struct MatrixOptions {
  CommonOptions common;
  std::string out = "askin_matrix";
};

int cmd_matrix(const MatrixOptions& o) {
  auto config = build_config(o.common);
  config.validate();
  const auto robot = load_robot(config);
  const fs::path out(o.out);
  make_dir(out);
  write_file(out / "manifest.json", experiment_manifest(config));

  const auto t0 = std::chrono::steady_clock::now();
  const auto records = run_matrix(robot, config);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const auto tables = aggregate(records);
  emit(tables, records, out);
  std::cout << summary_text(tables);
  std::cerr << records.size() << " runs in " << fixed(wall, 1) << " s, results in " << out.string() << "\n";
  return 0;
}

// ---------------------------------------------------------------- report

int cmd_report(const std::string& records_path, const std::string& out) {
  const auto records = load_records(records_path);
  const auto tables = aggregate(records);
  if (!out.empty()) emit(tables, records, out);
  std::cout << summary_text(tables);
  return 0;
}

// ---------------------------------------------------------------- pfl

struct PflOptions {
  std::string experiment;
  std::string robot;
  std::vector<double> q, qdot;
  int pad = -1;
  std::optional<double> speed, robot_mass, max_force;
};

Eigen::VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

int cmd_pfl(const PflOptions& o) {
  ExperimentConfig config = load_experiment(o.experiment.empty() ? default_experiment_path() : fs::path(o.experiment));
  if (!o.robot.empty()) config.robot_path = o.robot;
  const auto& pfl = config.pfl;
  pfl.validate();

  if (o.pad < 0) {
    if (!o.robot_mass) throw InvalidInput("give --pad with a state, or --robot-mass for a direct evaluation");
    const double v = o.speed.value_or(pfl.commanded_speed);
    const double f = pfl_max_force(v, pfl.stiffness, *o.robot_mass, pfl.human_mass);
    const double fmax = o.max_force.value_or(pfl.force_limit);
    std::cout << "speed           " << exact(v) << " m/s\n"
              << "robot mass      " << exact(*o.robot_mass) << " kg\n"
              << "max force       " << exact(f) << " N\n"
              << "level           " << to_int(force_to_threshold(f, pfl)) << "\n"
              << "max speed @" << fixed(fmax, 1) << " N  "
              << exact(pfl_max_velocity(fmax, pfl.stiffness, *o.robot_mass, pfl.human_mass)) << " m/s\n";
    return 0;
  }

  const auto robot = load_robot_config(config.robot_path);
  const auto n = robot.model.dof();
  if (o.pad >= static_cast<int>(robot.pads.size())) throw InvalidInput("pad id out of range");
  JointState state;
  state.q = o.q.empty() ? config.q_start : to_vector(o.q);
  state.qdot = o.qdot.empty() ? Eigen::VectorXd::Zero(n) : to_vector(o.qdot);
  if (static_cast<std::size_t>(state.q.size()) != n || static_cast<std::size_t>(state.qdot.size()) != n) throw InvalidInput("--q and --qdot need one value per joint");

  const auto& pad = robot.pads[static_cast<std::size_t>(o.pad)];
  std::cout << "pad " << pad.id << " (" << to_string(pad.part) << ", link " << pad.link << ")\n";
  for (auto policy : kAllPolicies) {
    const auto est = estimate_pad_forces(policy, robot.model, state, robot.pads, pfl)[static_cast<std::size_t>(o.pad)];
    const auto level = compute_thresholds(policy, robot.model, state, robot.pads, pfl).levels[static_cast<std::size_t>(o.pad)];
    std::cout << "  " << to_string(policy) << ": speed " << fixed(est.speed, 4) << " m/s, m_R "
              << fixed(est.robot_mass, 3) << " kg" << (est.mass_unbounded ? " (unbounded)" : "") << ", F "
              << fixed(est.force, 2) << " N, level " << to_int(level) << "\n";
  }
  return 0;
}

int exit_code(const Error& e) { return static_cast<int>(e.category()); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive skin sensitivity simulator"};
  app.require_subcommand(1);

  RunOptions run;
  auto* run_cmd = app.add_subcommand("run", "Simulate one scenario (optionally repeated)");
  add_common(run_cmd, run.common);
  run_cmd->add_option("--policy", run.policy, "uniform | body_parts | link_velocity | effective_mass");
  run_cmd->add_option("--reaction", run.reaction, "stop | avoid");
  run_cmd->add_option("--axis", run.axis, "+y | -z | -x");
  run_cmd->add_option("--part", run.part, "upper | lower | hand");
  run_cmd->add_option("--out", run.out, "Output directory")->capture_default_str();
  run_cmd->add_flag("--binary", run.binary, "Also write the binary tick log");

  MatrixOptions matrix;
  auto* matrix_cmd = app.add_subcommand("matrix", "Run the full experiment matrix");
  add_common(matrix_cmd, matrix.common);
  matrix_cmd->add_option("--out", matrix.out, "Output directory")->capture_default_str();

  std::string records_path, report_out;
  auto* report_cmd = app.add_subcommand("report", "Aggregate an existing records file");
  report_cmd->add_option("records", records_path, "records.csv")->required()->check(CLI::ExistingFile);
  report_cmd->add_option("--out", report_out, "Write summary and plot series here");

  PflOptions pfl;
  auto* pfl_cmd = app.add_subcommand("pfl", "Contact force model for one pad or one mass");
  pfl_cmd->add_option("--config", pfl.experiment, "Experiment JSON (PFL parameters, start state)")
      ->check(CLI::ExistingFile);
  pfl_cmd->add_option("--robot", pfl.robot, "Robot model JSON file")->check(CLI::ExistingFile);
  pfl_cmd->add_option("--pad", pfl.pad, "Pad id");
  pfl_cmd->add_option("--q", pfl.q, "Joint positions [rad] (default: start configuration)");
  pfl_cmd->add_option("--qdot", pfl.qdot, "Joint velocities [rad/s] (default: zero)");
  pfl_cmd->add_option("--speed", pfl.speed, "Speed [m/s] for a direct evaluation");
  pfl_cmd->add_option("--robot-mass", pfl.robot_mass, "Robot mass [kg] for a direct evaluation");
  pfl_cmd->add_option("--max-force", pfl.max_force, "Force limit for the speed inverse [N]");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ErrorCategory::InvalidInput);
  }

  try {
    if (*run_cmd) return cmd_run(run);
    if (*matrix_cmd) return cmd_matrix(matrix);
    if (*report_cmd) return cmd_report(records_path, report_out);
    if (*pfl_cmd) return cmd_pfl(pfl);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
