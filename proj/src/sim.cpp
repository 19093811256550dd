#include "askin/sim.hpp"

#include <chrono>
#include <cmath>
#include <cstring>
#include <limits>
#include <string>
#include <thread>

#include "askin/errors.hpp"
#include "askin/text_format.hpp"

namespace askin {

void SimConfig::validate() const {
  step_in_microseconds(dt);
  if (!(max_duration > 0.0)) throw InvalidInput("max duration must be positive");
  if (!(retract_hold >= 0.0)) throw InvalidInput("retract hold must be non-negative");
  if (!(pressure_ramp > 0.0)) throw InvalidInput("pressure ramp must be positive");
  if (!(indentation_depth >= 0.0)) throw InvalidInput("indentation depth must be non-negative");
}

int select_pad(const RobotModel& model, const std::vector<SkinPad>& pads, BodyPart part,
               const Eigen::Vector3d& ee_velocity, const JointState& state) {
  const auto candidates = pads_of_part(pads, part);
  if (candidates.empty()) throw InvalidInput("body part '" + std::string(to_string(part)) + "' has no pads");
  const double ee_speed = ee_velocity.norm();
  const Eigen::Vector3d ee_dir = ee_speed > 0.0 ? Eigen::Vector3d(ee_velocity / ee_speed) : Eigen::Vector3d::Zero();
  const auto poses = forward_kinematics(model, state.q);

  int best = candidates.front();
  double best_score = -std::numeric_limits<double>::infinity();
  for (int id : candidates) {
    const auto& pad = pads[static_cast<std::size_t>(id)];
    const Eigen::Vector3d v = point_jacobian(model, poses, pad.link, pad.center).topRows<3>() * state.qdot;
    const double speed = v.norm();
    const double score = speed > 0.0 ? ee_dir.dot(v / speed) : 0.0;
    if (score > best_score) {
      best_score = score;
      best = id;
    }
  }
  return best;
}

World::World(const RobotConfig& robot, RunSetup setup)
    : robot_(&robot),
      setup_(std::move(setup)),
      threshold_timer_(kThresholdRateHz, setup_.sim.dt),
      skin_timer_(static_cast<int>(kSkinRateHz), setup_.sim.dt),
      tracker_(robot.model, setup_.plan, setup_.q_start, setup_.tracking),
      reaction_(setup_.reaction, setup_.sim.retract_hold) {
  setup_.sim.validate();
  setup_.pfl.validate();
  setup_.triggers.validate();
  if (robot.pads.empty()) throw InvalidInput("robot config has no skin pads");
  state_.q = setup_.q_start;
  state_.qdot = Eigen::VectorXd::Zero(state_.q.size());
  state_.time = 0.0;
  assignment_ = compute_thresholds(setup_.policy, robot.model, state_, robot.pads, setup_.pfl);
  pressures_.assign(robot.pads.size(), 0.0);
}

void World::inject_contact(ContactEvent event) {
  if (contact_) throw InvalidInput("a run allows a single contact; one is already scheduled");
  if (!(event.effort >= 0.0 && event.effort <= 1.0)) throw InvalidInput("contact effort must lie in [0, 1]");
  if (!(event.onset >= 0.0)) throw InvalidInput("contact onset must be non-negative");
  if (!(event.max_dwell > 0.0)) throw InvalidInput("contact dwell must be positive");
  if (event.pad && (*event.pad < 0 || static_cast<std::size_t>(*event.pad) >= robot_->pads.size())) {
    throw InvalidInput("contact pad id out of range");
  }
  contact_ = std::move(event);
}

double World::time_now() const { return static_cast<double>(steps_) * setup_.sim.dt; }

bool World::finished() const { return tracker_.done() && !reaction_.active(); }

void World::update_contact(double t) {
  if (!contact_) return;
  auto& c = *contact_;
  constexpr double eps = 1e-9;
  if (!c.start_time && t + eps >= c.onset) {
    const auto& model = robot_->model;
    const Eigen::Vector3d ee_velocity =
        point_jacobian(model, state_.q, model.dof() - 1, tool_point(model)).topRows<3>() * state_.qdot;
    if (!c.pad) c.pad = select_pad(model, robot_->pads, c.part, ee_velocity, state_);
    c.part = robot_->pads[static_cast<std::size_t>(*c.pad)].part;
    c.start_time = t;
    contact_active_ = true;
    level_at_onset_ = assignment_.levels[static_cast<std::size_t>(*c.pad)];
    force_at_onset_ = estimate_pad_forces(setup_.policy, model, state_, robot_->pads, setup_.pfl)
                          [static_cast<std::size_t>(*c.pad)];
    c.ramp = setup_.sim.pressure_ramp;
    if (setup_.sim.indentation_depth > 0.0) {
      const double depth = setup_.sim.indentation_depth;
      c.ramp = depth / std::max(force_at_onset_->speed, depth / c.max_dwell);
    }
  }
  if (contact_active_ && c.dwell == DwellRule::FixedMax && t + eps >= *c.start_time + c.max_dwell) {
    contact_active_ = false;
    c.end_time = t;
  }
}

void World::sample_skin(double t, std::vector<int>& detections) {
  const auto& pads = robot_->pads;
  for (std::size_t i = 0; i < pads.size(); ++i) {
    double value = 0.0;
    if (contact_active_ && static_cast<std::size_t>(*contact_->pad) == i) {
      value = pressure_from_contact(contact_->effort, t - *contact_->start_time, contact_->ramp);
    }
    pressures_[i] = value;
    const PressureSample sample{static_cast<int>(i), value, t};
    const bool hit = detect(sample, assignment_, setup_.triggers).has_value();
    if (hit) detections.push_back(static_cast<int>(i));
    if (logging_) samples_.push_back({static_cast<int>(i), t, value, assignment_.levels[i], hit});
  }
  if (contact_active_ && !contact_->detection_time) {
    const auto pad = static_cast<std::size_t>(*contact_->pad);
    for (int id : detections) {
      if (static_cast<std::size_t>(id) != pad) continue;
      contact_->detection_time = t;
      level_at_detection_ = assignment_.levels[pad];
      if (contact_->dwell == DwellRule::UntilDetected) {
        contact_active_ = false;
        contact_->end_time = t;
      }
    }
  }
}

void World::step() {
  const double t = time_now();
  const auto& model = robot_->model;
  const auto& pads = robot_->pads;
  const double dt = setup_.sim.dt;
  state_.time = t;

  // (1) 25 Hz threshold update.
  const bool threshold_due = threshold_timer_.tick();
  if (threshold_due) {
    assignment_ = compute_thresholds(setup_.policy, model, state_, pads, setup_.pfl);
    assignment_.time = t;
    for (auto level : assignment_.levels) ++level_counts_[static_cast<std::size_t>(level)];
    if (logging_) assignments_.push_back(assignment_);
  }

  // (2) contact bookkeeping and 30 Hz skin sampling with detection.
  update_contact(t);
  std::vector<int> detections;
  const bool sample_due = skin_timer_.tick();
  if (sample_due) sample_skin(t, detections);

  // (3) reaction state machine.
  bool engaged_now = false;
  if (!reaction_.active() && !detections.empty()) {
    const int pad = detections.front();
    const auto& p = pads[static_cast<std::size_t>(pad)];
    const auto poses = forward_kinematics(model, state_.q);
    reaction_.engage(pad, poses[p.link + 1].rotation * p.normal, t);
    tracker_.interrupt();
    engaged_now = true;
  }
  if (reaction_.active() && !engaged_now) {
    if (sample_due) reaction_.on_sample(pressures_[static_cast<std::size_t>(reaction_.pad())], t);
    reaction_.update(t);
  }

  // (4) command.
  VelocityCommand cmd;
  const bool retreating = reaction_.phase() == ReactionPhase::Retreating;
  if (reaction_.phase() == ReactionPhase::Stopped) {
    cmd = stop_reaction(state_);
  } else if (retreating) {
    cmd = avoid_reaction(model, state_, pads[static_cast<std::size_t>(reaction_.pad())],
                         reaction_.retract_direction(), setup_.pfl.commanded_speed);
  } else {
    cmd = tracker_.command(state_, dt);
  }
  clamp_to_limits(model, cmd);

  // (5) explicit Euler.
  Eigen::Vector3d pad_before = Eigen::Vector3d::Zero();
  const SkinPad* retreat_pad = retreating ? &pads[static_cast<std::size_t>(reaction_.pad())] : nullptr;
  if (retreat_pad) pad_before = forward_kinematics(model, state_.q)[retreat_pad->link + 1].apply(retreat_pad->center);
  state_.qdot = cmd.qdot;
  state_.q += cmd.qdot * dt;
  if (retreat_pad) {
    retreat_distance_ +=
        (forward_kinematics(model, state_.q)[retreat_pad->link + 1].apply(retreat_pad->center) - pad_before).norm();
  }
  for (std::size_t i = 0; i < model.dof(); ++i) {
    const double qi = state_.q(static_cast<Eigen::Index>(i));
    const auto& joint = model.links[i].joint;
    if (qi < joint.lower || qi > joint.upper) {
      throw RunAborted("joint " + std::to_string(i) + " left its limits at t=" + exact(t));
    }
  }
  last_clamped_ = cmd.clamped;

  // (6) log.
  if (logging_) {
    TickLog tick;
    tick.time = t;
    tick.q = state_.q;
    tick.qdot = state_.qdot;
    tick.levels = assignment_.levels;
    tick.pressures = pressures_;
    tick.contact_active = contact_active_;
    tick.reacting = reaction_.active();
    tick.clamped = cmd.clamped;
    tick.threshold_update = threshold_due;
    tick.skin_sample = sample_due;
    const auto ee = tool_pose(model, state_.q);
    tick.ee_position = ee.translation;
    tick.ee_orientation = Eigen::Quaterniond(ee.rotation);
    ticks_.push_back(std::move(tick));
  }
  ++steps_;
}

void World::run() {
  const auto wall_start = std::chrono::steady_clock::now();
  while (!finished()) {
    if (time_now() > setup_.sim.max_duration) {
      throw RunAborted("task did not complete within " + exact(setup_.sim.max_duration) + " s");
    }
    if (setup_.sim.real_time_paced) {
      std::this_thread::sleep_until(wall_start + std::chrono::duration<double>(time_now()));
    }
    step();
  }
}

void write_tick_log_csv(std::ostream& out, const std::vector<TickLog>& ticks) {
  if (ticks.empty()) return;
  const auto n = ticks.front().q.size();
  const auto p = ticks.front().levels.size();
  std::string line = "time";
  for (Eigen::Index i = 0; i < n; ++i) line += ",q" + std::to_string(i);
  for (Eigen::Index i = 0; i < n; ++i) line += ",qdot" + std::to_string(i);
  for (std::size_t i = 0; i < p; ++i) line += ",level" + std::to_string(i);
  for (std::size_t i = 0; i < p; ++i) line += ",pressure" + std::to_string(i);
  line += ",contact,reacting,clamped,threshold_update,skin_sample,ee_x,ee_y,ee_z,ee_qw,ee_qx,ee_qy,ee_qz\n";
  out << line;
  for (const auto& t : ticks) {
    line = exact(t.time);
    for (Eigen::Index i = 0; i < n; ++i) line += "," + exact(t.q(i));
    for (Eigen::Index i = 0; i < n; ++i) line += "," + exact(t.qdot(i));
    for (auto l : t.levels) line += "," + std::to_string(to_int(l));
    for (double v : t.pressures) line += "," + exact(v);
    line += std::string(",") + (t.contact_active ? "1" : "0") + "," + (t.reacting ? "1" : "0") + "," +
            (t.clamped ? "1" : "0") + "," + (t.threshold_update ? "1" : "0") + "," + (t.skin_sample ? "1" : "0");
    for (int i = 0; i < 3; ++i) line += "," + exact(t.ee_position(i));
    line += "," + exact(t.ee_orientation.w()) + "," + exact(t.ee_orientation.x()) + "," +
            exact(t.ee_orientation.y()) + "," + exact(t.ee_orientation.z()) + "\n";
    out << line;
  }
}

namespace {

template <typename T>
void put(std::ostream& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  out.write(bytes, sizeof(T));  // host order; the supported targets are little-endian
}

template <typename T>
T get(std::istream& in) {
  char bytes[sizeof(T)];
  if (!in.read(bytes, sizeof(T))) throw IoError("truncated binary tick log");
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

constexpr char kTickMagic[8] = {'A', 'S', 'K', 'T', 'I', 'C', 'K', '1'};

}  // namespace

void write_tick_log_binary(std::ostream& out, const std::vector<TickLog>& ticks) {
  out.write(kTickMagic, sizeof kTickMagic);
  const auto n = static_cast<std::uint32_t>(ticks.empty() ? 0 : ticks.front().q.size());
  const auto p = static_cast<std::uint32_t>(ticks.empty() ? 0 : ticks.front().levels.size());
  put(out, n);
  put(out, p);
  put(out, static_cast<std::uint64_t>(ticks.size()));
  for (const auto& t : ticks) {
    put(out, t.time);
    for (std::uint32_t i = 0; i < n; ++i) put(out, t.q(i));
    for (std::uint32_t i = 0; i < n; ++i) put(out, t.qdot(i));
    for (auto l : t.levels) put(out, static_cast<std::uint8_t>(l));
    for (double v : t.pressures) put(out, v);
    const std::uint8_t flags = (t.contact_active ? 1 : 0) | (t.reacting ? 2 : 0) | (t.clamped ? 4 : 0) |
                               (t.threshold_update ? 8 : 0) | (t.skin_sample ? 16 : 0);
    put(out, flags);
    for (int i = 0; i < 3; ++i) put(out, t.ee_position(i));
    put(out, t.ee_orientation.w());
    put(out, t.ee_orientation.x());
    put(out, t.ee_orientation.y());
    put(out, t.ee_orientation.z());
  }
}

std::vector<TickLog> read_tick_log_binary(std::istream& in) {
  char magic[sizeof kTickMagic];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kTickMagic, sizeof magic) != 0) {
    throw IoError("not a binary tick log");
  }
  const auto n = get<std::uint32_t>(in);
  const auto p = get<std::uint32_t>(in);
  const auto count = get<std::uint64_t>(in);
  std::vector<TickLog> ticks;
  ticks.reserve(count);
  for (std::uint64_t k = 0; k < count; ++k) {
    TickLog t;
    t.time = get<double>(in);
    t.q.resize(n);
    t.qdot.resize(n);
    for (std::uint32_t i = 0; i < n; ++i) t.q(i) = get<double>(in);
    for (std::uint32_t i = 0; i < n; ++i) t.qdot(i) = get<double>(in);
    for (std::uint32_t i = 0; i < p; ++i) {
      const auto raw = get<std::uint8_t>(in);
      if (raw >= kLevelCount) throw IoError("corrupt level in binary tick log");
      t.levels.push_back(static_cast<SensitivityLevel>(raw));
    }
    for (std::uint32_t i = 0; i < p; ++i) t.pressures.push_back(get<double>(in));
    const auto flags = get<std::uint8_t>(in);
    t.contact_active = flags & 1;
    t.reacting = flags & 2;
    t.clamped = flags & 4;
    t.threshold_update = flags & 8;
    t.skin_sample = flags & 16;
    for (int i = 0; i < 3; ++i) t.ee_position(i) = get<double>(in);
    const double w = get<double>(in);
    const double x = get<double>(in);
    const double y = get<double>(in);
    const double z = get<double>(in);
    t.ee_orientation = Eigen::Quaterniond(w, x, y, z);
    ticks.push_back(std::move(t));
  }
  return ticks;
}

void write_threshold_timeline(std::ostream& out, const std::vector<ThresholdAssignment>& assignments) {
  if (assignments.empty()) return;
  out << "# policy " << to_string(assignments.front().policy) << "; rows: pads, columns: update times (s)\npad";
  for (const auto& a : assignments) out << "," << fixed(a.time, 3);
  out << "\n";
  const auto pads = assignments.front().levels.size();
  for (std::size_t i = 0; i < pads; ++i) {
    out << i;
    for (const auto& a : assignments) out << "," << to_int(a.levels[i]);
    out << "\n";
  }
}

}  // namespace askin
