#include "askin/harness.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <thread>

#include "askin/errors.hpp"
#include "askin/text_format.hpp"

namespace askin {

using nlohmann::json;

std::filesystem::path default_robot_path() { return std::filesystem::path(ASKIN_CONFIG_DIR) / "ur10e.json"; }

std::filesystem::path default_experiment_path() {
  return std::filesystem::path(ASKIN_CONFIG_DIR) / "experiment.json";
}

void ExperimentConfig::validate() const {
  pfl.validate();
  triggers.validate();
  sim.validate();
  task_plan(task);
  if (!(effort >= 0.0 && effort <= 1.0)) throw InvalidInput("effort must lie in [0, 1]");
  if (!(effort >= triggers.pressure[0])) {
    throw InvalidInput("effort below the most sensitive trigger could never be detected");
  }
  if (!(onset_fraction >= 0.0 && onset_fraction < 1.0)) throw InvalidInput("onset fraction must lie in [0, 1)");
  if (!(onset_jitter >= 0.0)) throw InvalidInput("onset jitter must be non-negative");
  if (!(penalty >= 0.0)) throw InvalidInput("penalty must be non-negative");
  if (reps < 1) throw InvalidInput("reps must be at least 1");
  if (policies.empty() || reactions.empty() || axes.empty() || parts.empty()) {
    throw InvalidInput("experiment matrix has an empty axis");
  }
}

namespace {

template <typename T, typename Parse>
std::vector<T> one_or_many(const json& node, Parse parse, const char* key) {
  std::vector<T> out;
  if (node.is_string()) {
    out.push_back(parse(node.get<std::string>()));
  } else if (node.is_array()) {
    for (const auto& item : node) {
      if (!item.is_string()) throw ConfigError(std::string(key) + ": expected strings");
      out.push_back(parse(item.get<std::string>()));
    }
  } else {
    throw ConfigError(std::string(key) + ": expected a string or an array of strings");
  }
  return out;
}

double num(const json& node, const char* key) {
  if (!node.is_number()) throw ConfigError(std::string(key) + ": expected a number");
  return node.get<double>();
}

template <typename F>
void if_key(const json& node, const char* key, F&& fn) {
  if (node.contains(key)) fn(node.at(key));
}

}  // namespace

void apply_experiment_json(ExperimentConfig& config, const std::string& text) {
  json root;
  try {
    root = json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("experiment file: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("experiment file: expected an object");

  try {
    if_key(root, "robot", [&](const json& v) { config.robot_path = v.get<std::string>(); });
    if_key(root, "q_start", [&](const json& v) {
      if (!v.is_array()) throw ConfigError("q_start: expected an array");
      config.q_start.resize(static_cast<Eigen::Index>(v.size()));
      for (std::size_t i = 0; i < v.size(); ++i) config.q_start(static_cast<Eigen::Index>(i)) = num(v[i], "q_start");
    });
    if_key(root, "task", [&](const json& t) {
      if_key(t, "lengths", [&](const json& v) {
        if (!v.is_array() || v.size() != 4) throw ConfigError("task.lengths: expected 4 numbers");
        for (std::size_t i = 0; i < 4; ++i) config.task.lengths[i] = num(v[i], "task.lengths");
      });
      if_key(t, "speed", [&](const json& v) { config.task.speed = num(v, "task.speed"); });
    });
    if_key(root, "pfl", [&](const json& p) {
      if_key(p, "stiffness", [&](const json& v) { config.pfl.stiffness = num(v, "pfl.stiffness"); });
      if_key(p, "force_limit", [&](const json& v) { config.pfl.force_limit = num(v, "pfl.force_limit"); });
      if_key(p, "force_mid", [&](const json& v) { config.pfl.force_mid = num(v, "pfl.force_mid"); });
      if_key(p, "human_mass", [&](const json& v) { config.pfl.human_mass = num(v, "pfl.human_mass"); });
      if_key(p, "commanded_speed", [&](const json& v) { config.pfl.commanded_speed = num(v, "pfl.commanded_speed"); });
    });
    if_key(root, "triggers", [&](const json& v) {
      if (!v.is_array() || v.size() != 3) throw ConfigError("triggers: expected 3 numbers");
      for (std::size_t i = 0; i < 3; ++i) config.triggers.pressure[i] = num(v[i], "triggers");
    });
    if_key(root, "sim", [&](const json& s) {
      if_key(s, "dt", [&](const json& v) { config.sim.dt = num(v, "sim.dt"); });
      if_key(s, "max_duration", [&](const json& v) { config.sim.max_duration = num(v, "sim.max_duration"); });
      if_key(s, "retract_hold", [&](const json& v) { config.sim.retract_hold = num(v, "sim.retract_hold"); });
      if_key(s, "pressure_ramp", [&](const json& v) { config.sim.pressure_ramp = num(v, "sim.pressure_ramp"); });
      if_key(s, "indentation_depth", [&](const json& v) { config.sim.indentation_depth = num(v, "sim.indentation_depth"); });
      if_key(s, "real_time_paced", [&](const json& v) { config.sim.real_time_paced = v.get<bool>(); });
    });
    if_key(root, "tracking", [&](const json& t) {
      if_key(t, "ramp_time", [&](const json& v) { config.tracking.ramp_time = num(v, "tracking.ramp_time"); });
      if_key(t, "approach_time_constant",
             [&](const json& v) { config.tracking.approach_time_constant = num(v, "tracking.approach_time_constant"); });
      if_key(t, "endpoint_tolerance",
             [&](const json& v) { config.tracking.endpoint_tolerance = num(v, "tracking.endpoint_tolerance"); });
      if_key(t, "orientation_gain",
             [&](const json& v) { config.tracking.orientation_gain = num(v, "tracking.orientation_gain"); });
    });
    if_key(root, "effort", [&](const json& v) { config.effort = num(v, "effort"); });
    if_key(root, "onset", [&](const json& v) { config.onset_fraction = num(v, "onset"); });
    if_key(root, "onset_jitter", [&](const json& v) { config.onset_jitter = num(v, "onset_jitter"); });
    if_key(root, "penalty", [&](const json& v) { config.penalty = num(v, "penalty"); });
    if_key(root, "reps", [&](const json& v) { config.reps = v.get<int>(); });
    if_key(root, "seed", [&](const json& v) { config.seed = v.get<std::uint64_t>(); });
    if_key(root, "threads", [&](const json& v) { config.threads = v.get<unsigned>(); });
    if_key(root, "policy", [&](const json& v) { config.policies = one_or_many<PolicyKind>(v, parse_policy, "policy"); });
    if_key(root, "reaction",
           [&](const json& v) { config.reactions = one_or_many<ReactionPolicy>(v, parse_reaction, "reaction"); });
    if_key(root, "axis", [&](const json& v) { config.axes = one_or_many<TaskAxis>(v, parse_axis, "axis"); });
    if_key(root, "body_part",
           [&](const json& v) { config.parts = one_or_many<BodyPart>(v, parse_body_part, "body_part"); });
  } catch (const json::exception& e) {
    throw ConfigError(std::string("experiment file: ") + e.what());
  } catch (const InvalidInput& e) {
    throw ConfigError(std::string("experiment file: ") + e.what());
  }
}

ExperimentConfig load_experiment(const std::filesystem::path& path) {
  ExperimentConfig config;
  config.robot_path = default_robot_path();
  try {
    apply_experiment_json(config, read_text_file(path));
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  if (config.robot_path.is_relative()) config.robot_path = path.parent_path() / config.robot_path;
  return config;
}

std::string experiment_manifest(const ExperimentConfig& config) {
  json j;
  j["robot"] = config.robot_path.string();
  j["q_start"] = std::vector<double>(config.q_start.data(), config.q_start.data() + config.q_start.size());
  j["task"] = {{"lengths", config.task.lengths}, {"speed", config.task.speed}};
  j["pfl"] = {{"stiffness", config.pfl.stiffness},
              {"force_limit", config.pfl.force_limit},
              {"force_mid", config.pfl.force_mid},
              {"human_mass", config.pfl.human_mass},
              {"commanded_speed", config.pfl.commanded_speed}};
  j["triggers"] = config.triggers.pressure;
  j["sim"] = {{"dt", config.sim.dt},
              {"max_duration", config.sim.max_duration},
              {"retract_hold", config.sim.retract_hold},
              {"pressure_ramp", config.sim.pressure_ramp},
              {"indentation_depth", config.sim.indentation_depth},
              {"real_time_paced", config.sim.real_time_paced}};
  j["tracking"] = {{"ramp_time", config.tracking.ramp_time},
                   {"approach_time_constant", config.tracking.approach_time_constant},
                   {"endpoint_tolerance", config.tracking.endpoint_tolerance},
                   {"orientation_gain", config.tracking.orientation_gain}};
  j["effort"] = config.effort;
  j["onset"] = config.onset_fraction;
  j["onset_jitter"] = config.onset_jitter;
  j["penalty"] = config.penalty;
  j["reps"] = config.reps;
  j["seed"] = config.seed;
  j["threads"] = config.threads;
  auto names = [](const auto& items) {
    std::vector<std::string> out;
    for (const auto& item : items) out.emplace_back(to_string(item));
    return out;
  };
  j["policy"] = names(config.policies);
  j["reaction"] = names(config.reactions);
  j["axis"] = names(config.axes);
  j["body_part"] = names(config.parts);
  return j.dump(2) + "\n";
}

std::vector<ScenarioSpec> enumerate_matrix(const ExperimentConfig& config) {
  std::vector<ScenarioSpec> specs;
  for (auto policy : config.policies)
    for (auto reaction : config.reactions)
      for (auto axis : config.axes)
        for (auto part : config.parts)
          for (int rep = 0; rep < config.reps; ++rep) specs.push_back({policy, reaction, axis, part, rep});
  return specs;
}

std::uint64_t run_seed(std::uint64_t master_seed, std::size_t run_index) {
  std::seed_seq seq{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32),
                    static_cast<std::uint32_t>(run_index), static_cast<std::uint32_t>(run_index >> 32)};
  std::array<std::uint32_t, 2> words{};
  seq.generate(words.begin(), words.end());
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

RunSetup make_run_setup(const ExperimentConfig& config, const ScenarioSpec& spec) {
  RunSetup setup;
  setup.policy = spec.policy;
  setup.reaction = spec.reaction;
  setup.pfl = config.pfl;
  setup.triggers = config.triggers;
  setup.sim = config.sim;
  setup.plan = task_plan(config.task);
  setup.tracking = config.tracking;
  setup.q_start = config.q_start;
  return setup;
}

Timetable nominal_timetable(const RobotConfig& robot, const ExperimentConfig& config) {
  World world(robot, make_run_setup(config, ScenarioSpec{}));
  world.set_logging(false);
  world.run();
  Timetable table;
  const auto& starts = world.tracker().segment_start_times();
  table.segment_start = starts;
  table.task_time = world.tracker().completion_time();
  for (std::size_t i = 0; i < starts.size(); ++i) {
    const double end = i + 1 < starts.size() ? starts[i + 1] : table.task_time;
    table.segment_duration.push_back(end - starts[i]);
  }
  return table;
}

ContactEvent make_contact(const ExperimentConfig& config, const ScenarioSpec& spec, const Timetable& timetable,
                          std::uint64_t seed) {
  const auto seg = segment_index(spec.axis);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(-config.onset_jitter, config.onset_jitter);
  ContactEvent event;
  event.part = spec.part;
  event.effort = config.effort;
  event.dwell = dwell_rule_for(spec.reaction);
  event.onset = std::max(0.0, timetable.segment_start.at(seg) + config.onset_fraction * timetable.segment_duration.at(seg) +
                                  (config.onset_jitter > 0.0 ? jitter(rng) : 0.0));
  return event;
}

RunRecord run_scenario(const RobotConfig& robot, const ExperimentConfig& config, const ScenarioSpec& spec,
                       std::size_t run_index, const Timetable& timetable, std::optional<World>* world_out) {
  RunRecord rec;
  rec.run_index = run_index;
  rec.scenario = spec;
  rec.seed = run_seed(config.seed, run_index);
  rec.effort = config.effort;
  try {
    World world(robot, make_run_setup(config, spec));
    world.set_logging(world_out != nullptr);
    world.inject_contact(make_contact(config, spec, timetable, rec.seed));
    world.run();

    const auto& contact = *world.contact();
    rec.pad = contact.pad.value_or(-1);
    rec.onset = contact.start_time.value_or(std::numeric_limits<double>::quiet_NaN());
    rec.reacted = world.reaction().engagements() > 0 && contact.detection_time.has_value();
    rec.task_time = world.tracker().completion_time();
    rec.total_time = rec.task_time + (rec.reacted ? config.penalty : 0.0);
    if (rec.reacted) {
      rec.reaction_time = *contact.detection_time - *contact.start_time;
      rec.level_at_pad = *world.level_at_detection();
      if (spec.reaction == ReactionPolicy::Avoid) rec.avoid_distance = world.retreat_distance();
    } else if (world.level_at_onset()) {
      rec.level_at_pad = *world.level_at_onset();
    }
    if (world.force_at_onset()) rec.estimated_force = world.force_at_onset()->force;
    rec.level_counts = world.level_counts();
    rec.threshold_updates = world.threshold_updates();
    rec.skin_samples = world.skin_samples();
    if (!contact.start_time) {
      rec.ok = false;
      rec.diagnostic = "contact never started (task finished before onset)";
    }
    if (world_out) world_out->emplace(std::move(world));
  } catch (const Error& e) {
    rec.ok = false;
    rec.diagnostic = e.what();
  }
  return rec;
}

std::vector<RunRecord> run_matrix(const RobotConfig& robot, const ExperimentConfig& config) {
  config.validate();
  const auto specs = enumerate_matrix(config);
  const auto timetable = nominal_timetable(robot, config);
  std::vector<RunRecord> records(specs.size());

  unsigned threads = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, specs.size())));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < specs.size(); i = next++) {
      records[i] = run_scenario(robot, config, specs[i], i, timetable);
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return records;
}

MeanSd mean_sd(const std::vector<double>& values) {
  MeanSd out;
  out.n = values.size();
  if (values.empty()) return out;
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return out;
}

std::optional<double> pearson(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) return std::nullopt;
  const double mx = mean_sd(x).mean;
  const double my = mean_sd(y).mean;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0.0 || syy <= 0.0) return std::nullopt;
  return sxy / std::sqrt(sxx * syy);
}

SummaryTables aggregate(const std::vector<RunRecord>& records) {
  if (records.empty()) throw InvalidInput("no run records to aggregate");
  SummaryTables t;
  t.runs = records.size();

  std::array<std::array<std::vector<double>, kReactionCount>, kPolicyCount> totals;
  std::array<std::array<std::pair<int, int>, kPartCount>, kPolicyCount> reacted_counts{};
  std::array<std::array<std::int64_t, kLevelCount>, kPolicyCount> levels{};
  std::array<std::vector<double>, kPolicyCount> reaction_times, distances;
  std::vector<double> rt_all, force_all;

  for (const auto& r : records) {
    if (!r.ok) {
      ++t.aborted;
      continue;
    }
    const auto p = static_cast<std::size_t>(r.scenario.policy);
    const auto re = static_cast<std::size_t>(r.scenario.reaction);
    const auto part = static_cast<std::size_t>(r.scenario.part);
    totals[p][re].push_back(r.total_time);
    reacted_counts[p][part].second += 1;
    for (std::size_t l = 0; l < kLevelCount; ++l) levels[p][l] += r.level_counts[l];
    if (r.reacted) {
      reacted_counts[p][part].first += 1;
      reaction_times[p].push_back(r.reaction_time);
      if (r.scenario.reaction == ReactionPolicy::Avoid) distances[p].push_back(r.avoid_distance);
      if (std::isfinite(r.estimated_force)) {
        rt_all.push_back(r.reaction_time);
        force_all.push_back(r.estimated_force);
      }
    }
  }

  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t p = 0; p < kPolicyCount; ++p) {
    for (std::size_t re = 0; re < kReactionCount; ++re) t.total_time[p][re] = mean_sd(totals[p][re]);
    int hit = 0, all = 0;
    for (std::size_t part = 0; part < kPartCount; ++part) {
      const auto [h, n] = reacted_counts[p][part];
      t.reaction_rate[p][part] = n ? 100.0 * h / n : nan;
      hit += h;
      all += n;
    }
    t.reaction_rate_overall[p] = all ? 100.0 * hit / all : nan;
    std::int64_t level_total = 0;
    for (auto c : levels[p]) level_total += c;
    for (std::size_t l = 0; l < kLevelCount; ++l) {
      t.level_share[p][l] = level_total ? 100.0 * static_cast<double>(levels[p][l]) / static_cast<double>(level_total) : nan;
    }
    t.reaction_time[p] = mean_sd(reaction_times[p]);
    t.avoid_distance[p] = mean_sd(distances[p]);
  }
  t.correlation = pearson(rt_all, force_all);
  t.correlation_n = rt_all.size();
  return t;
}

namespace {

constexpr const char* kRecordHeader =
    "run_index,policy,reaction,axis,body_part,rep,seed,pad,onset,effort,status,reacted,reaction_time,"
    "task_time,total_time,avoid_distance,level_at_pad,estimated_force,level0_count,level1_count,"
    "level2_count,threshold_updates,skin_samples,diagnostic";

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cell);
      cell.clear();
    } else {
      cell.push_back(ch);
    }
  }
  out.push_back(cell);
  return out;
}

double parse_double(const std::string& s) {
  if (s == "nan" || s == "-nan") return std::numeric_limits<double>::quiet_NaN();
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument(s);
  return v;
}

}  // namespace

void write_records_csv(std::ostream& out, const std::vector<RunRecord>& records) {
  out << kRecordHeader << "\n";
  for (const auto& r : records) {
    std::string diag = r.diagnostic;
    std::replace(diag.begin(), diag.end(), ',', ';');
    std::replace(diag.begin(), diag.end(), '\n', ' ');
    out << r.run_index << ',' << to_string(r.scenario.policy) << ',' << to_string(r.scenario.reaction) << ','
        << to_string(r.scenario.axis) << ',' << to_string(r.scenario.part) << ',' << r.scenario.rep << ','
        << r.seed << ',' << r.pad << ',' << exact(r.onset) << ',' << exact(r.effort) << ','
        << (r.ok ? "ok" : "aborted") << ',' << (r.reacted ? 1 : 0) << ',' << exact(r.reaction_time) << ','
        << exact(r.task_time) << ',' << exact(r.total_time) << ',' << exact(r.avoid_distance) << ','
        << to_int(r.level_at_pad) << ',' << exact(r.estimated_force) << ',' << r.level_counts[0] << ','
        << r.level_counts[1] << ',' << r.level_counts[2] << ',' << r.threshold_updates << ',' << r.skin_samples
        << ',' << diag << "\n";
  }
}

std::vector<RunRecord> read_records_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kRecordHeader) throw IoError("records file: unexpected header");
  std::vector<RunRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 24) throw IoError("records file line " + std::to_string(line_no) + ": expected 24 fields");
    try {
      RunRecord r;
      r.run_index = std::stoull(f[0]);
      r.scenario.policy = parse_policy(f[1]);
      r.scenario.reaction = parse_reaction(f[2]);
      r.scenario.axis = parse_axis(f[3]);
      r.scenario.part = parse_body_part(f[4]);
      r.scenario.rep = std::stoi(f[5]);
      r.seed = std::stoull(f[6]);
      r.pad = std::stoi(f[7]);
      r.onset = parse_double(f[8]);
      r.effort = parse_double(f[9]);
      r.ok = f[10] == "ok";
      r.reacted = f[11] == "1";
      r.reaction_time = parse_double(f[12]);
      r.task_time = parse_double(f[13]);
      r.total_time = parse_double(f[14]);
      r.avoid_distance = parse_double(f[15]);
      const int level = std::stoi(f[16]);
      if (level < 0 || level >= kLevelCount) throw std::invalid_argument("level");
      r.level_at_pad = static_cast<SensitivityLevel>(level);
      r.estimated_force = parse_double(f[17]);
      for (std::size_t l = 0; l < kLevelCount; ++l) r.level_counts[l] = std::stoll(f[18 + l]);
      r.threshold_updates = std::stoll(f[21]);
      r.skin_samples = std::stoll(f[22]);
      r.diagnostic = f[23];
      records.push_back(std::move(r));
    } catch (const std::exception& e) {
      throw IoError("records file line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return records;
}

void save_records(const std::filesystem::path& path, const std::vector<RunRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  write_records_csv(out, records);
  if (!out) throw IoError("failed writing " + path.string());
}

std::vector<RunRecord> load_records(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_records_csv(in);
}

namespace {

json to_json(const MeanSd& m) {
  auto num_or_null = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  return {{"mean", num_or_null(m.mean)}, {"sd", num_or_null(m.sd)}, {"n", m.n}};
}

json num_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

constexpr ReactionPolicy kReactions[] = {ReactionPolicy::Stop, ReactionPolicy::Avoid};

std::string mean_pm_sd(const MeanSd& m, int decimals) {
  if (m.n == 0) return "-";
  return fixed(m.mean, decimals) + " +- " + (std::isfinite(m.sd) ? fixed(m.sd, decimals) : std::string("-"));
}

std::string pad_right(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

}  // namespace

std::string summary_json(const SummaryTables& t) {
  json j;
  j["runs"] = t.runs;
  j["aborted"] = t.aborted;
  j["level_share_basis"] = "per threshold update and pad, whole task";
  j["reaction_rate_basis"] = "percent of runs, pooled over stop and avoid";
  for (std::size_t p = 0; p < kPolicyCount; ++p) {
    const std::string name(to_string(kAllPolicies[p]));
    for (std::size_t re = 0; re < kReactionCount; ++re) {
      j["total_time"][name][std::string(to_string(kReactions[re]))] = to_json(t.total_time[p][re]);
    }
    for (std::size_t part = 0; part < kPartCount; ++part) {
      j["reaction_rate"][name][std::string(to_string(kAllBodyParts[part]))] = num_or_null(t.reaction_rate[p][part]);
    }
    j["reaction_rate"][name]["overall"] = num_or_null(t.reaction_rate_overall[p]);
    j["level_share"][name] = {num_or_null(t.level_share[p][0]), num_or_null(t.level_share[p][1]),
                              num_or_null(t.level_share[p][2])};
    j["reaction_time"][name] = to_json(t.reaction_time[p]);
    j["avoid_distance"][name] = to_json(t.avoid_distance[p]);
  }
  j["correlation"] = {{"r", t.correlation ? json(*t.correlation) : json(nullptr)},
                      {"n", t.correlation_n},
                      {"between", "reaction_time, estimated_force"}};
  return j.dump(2) + "\n";
}

std::string summary_text(const SummaryTables& t) {
  std::ostringstream out;
  out << "Runs: " << t.runs << " (aborted: " << t.aborted << ")\n\n";
  out << "Average total time [s] (mean +- sd, penalty included)\n";
  out << pad_right("", 16) << pad_right("stop", 20) << "avoid\n";
  for (std::size_t p = 0; p < kPolicyCount; ++p) {
    out << pad_right(std::string(to_string(kAllPolicies[p])), 16) << pad_right(mean_pm_sd(t.total_time[p][0], 2), 20)
        << mean_pm_sd(t.total_time[p][1], 2) << "\n";
  }
  out << "\nReaction rate [%] (stop and avoid pooled)\n";
  out << pad_right("", 16) << pad_right("upper", 10) << pad_right("lower", 10) << pad_right("hand", 10) << "overall\n";
  for (std::size_t p = 0; p < kPolicyCount; ++p) {
    out << pad_right(std::string(to_string(kAllPolicies[p])), 16);
    for (std::size_t part = 0; part < kPartCount; ++part) out << pad_right(fixed(t.reaction_rate[p][part], 1), 10);
    out << fixed(t.reaction_rate_overall[p], 1) << "\n";
  }
  out << "\nThreshold level share [%] (per update and pad)\n";
  out << pad_right("", 16) << pad_right("0", 10) << pad_right("1", 10) << "2\n";
  for (std::size_t p = 0; p < kPolicyCount; ++p) {
    out << pad_right(std::string(to_string(kAllPolicies[p])), 16) << pad_right(fixed(t.level_share[p][0], 1), 10)
        << pad_right(fixed(t.level_share[p][1], 1), 10) << fixed(t.level_share[p][2], 1) << "\n";
  }
  out << "\nReaction time [s] and avoid distance [m] (reacted runs)\n";
  for (std::size_t p = 0; p < kPolicyCount; ++p) {
    out << pad_right(std::string(to_string(kAllPolicies[p])), 16) << pad_right(mean_pm_sd(t.reaction_time[p], 3), 20)
        << mean_pm_sd(t.avoid_distance[p], 4) << "\n";
  }
  out << "\nPearson r(reaction time, estimated force): "
      << (t.correlation ? fixed(*t.correlation, 3) : std::string("undefined")) << " over " << t.correlation_n
      << " reacted runs\n";
  return out.str();
}

std::array<double, kPartCount> peak_part_speeds(const RobotConfig& robot, const ExperimentConfig& config) {
  World world(robot, make_run_setup(config, ScenarioSpec{}));
  world.run();
  std::array<double, kPartCount> peak{};
  for (const auto& tick : world.ticks()) {
    const auto poses = forward_kinematics(robot.model, tick.q);
    for (const auto& pad : robot.pads) {
      const double speed =
          (point_jacobian(robot.model, poses, pad.link, pad.center).topRows<3>() * tick.qdot).norm();
      auto& slot = peak[static_cast<std::size_t>(pad.part)];
      slot = std::max(slot, speed);
    }
  }
  return peak;
}

void emit(const SummaryTables& tables, const std::vector<RunRecord>& records, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  auto write = [&](const char* name, const std::string& content) {
    const auto path = dir / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << content;
    if (!out) throw IoError("failed writing " + path.string());
  };

  save_records(dir / "records.csv", records);
  write("summary.json", summary_json(tables));
  write("summary.txt", summary_text(tables));

  std::ostringstream total, rt, dist;
  total << "policy,reaction,mean,sd,n\n";
  rt << "policy,mean,sd,n\n";
  dist << "policy,mean,sd,n\n";
  for (std::size_t p = 0; p < kPolicyCount; ++p) {
    const auto name = to_string(kAllPolicies[p]);
    for (std::size_t re = 0; re < kReactionCount; ++re) {
      const auto& m = tables.total_time[p][re];
      total << name << ',' << to_string(kReactions[re]) << ',' << exact(m.mean) << ',' << exact(m.sd) << ',' << m.n
            << "\n";
    }
    rt << name << ',' << exact(tables.reaction_time[p].mean) << ',' << exact(tables.reaction_time[p].sd) << ','
       << tables.reaction_time[p].n << "\n";
    dist << name << ',' << exact(tables.avoid_distance[p].mean) << ',' << exact(tables.avoid_distance[p].sd) << ','
         << tables.avoid_distance[p].n << "\n";
  }
  write("total_time.csv", total.str());
  write("reaction_time.csv", rt.str());
  write("avoid_distance.csv", dist.str());
}

}  // namespace askin
