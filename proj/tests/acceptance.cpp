// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>

#include "askin/dynamics.hpp"
#include "askin/harness.hpp"
#include "askin/safety.hpp"
#include "support.hpp"

using namespace askin;
using testing::Rng;

namespace {

int failures = 0;

void report(int id, bool pass, const std::string& detail) {
  std::printf("%s  criterion %d: %s\n", pass ? "PASS" : "FAIL", id, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void math_oracles() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto& robot = testing::shipped_robot();
  const auto& model = robot.model;
  Rng rng(1001);

  double worst_jac = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto q = testing::random_q(rng, model);
    const Eigen::VectorXd qdot = rng.vector(6, -1.0, 1.0);
    const auto& pad = robot.pads[rng.index(robot.pads.size())];
    const Eigen::Vector3d v = point_jacobian(model, q, pad.link, pad.center).topRows<3>() * qdot;
    const Eigen::Vector3d fd = testing::fd_point_velocity(model, q, qdot, pad.link, pad.center);
    worst_jac = std::max(worst_jac, testing::rel_err(v, fd));
  }

  bool spd = true;
  double worst_ke = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto q = testing::random_q(rng, model);
    const Eigen::VectorXd qdot = rng.vector(6, -1.0, 1.0);
    const Eigen::MatrixXd m = joint_space_inertia(model, q);
    spd = spd && (m - m.transpose()).norm() <= 1e-12 * m.norm() &&
          Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m).eigenvalues().minCoeff() > 0.0;
    worst_ke = std::max(worst_ke, testing::rel_err(0.5 * qdot.dot(m * qdot), testing::kinetic_energy_oracle(model, q, qdot)));
  }

  double worst_em = 0.0;
  int compared = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto q = testing::random_q(rng, model);
    const auto& pad = robot.pads[rng.index(robot.pads.size())];
    const Eigen::Vector3d u = rng.unit3();
    const auto em = effective_mass(model, q, pad.link, pad.center, u);
    if (!em.bounded) continue;
    const auto jac = point_jacobian(model, q, pad.link, pad.center);
    const double oracle = testing::effective_mass_oracle(testing::mass_matrix_oracle(model, q), jac.topRows<3>(), u);
    worst_em = std::max(worst_em, testing::rel_err(em.value, oracle));
    ++compared;
  }

  double worst_mp = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto q = testing::random_q(rng, model);
    const Eigen::MatrixXd a = point_jacobian(model, q, 5, Eigen::Vector3d(rng.vector(3, -0.1, 0.1)));
    const Eigen::MatrixXd p = pseudoinverse(a);
    const Eigen::MatrixXd ap = a * p, pa = p * a;
    worst_mp = std::max({worst_mp, (ap * a - a).norm() / a.norm(), (pa * p - p).norm() / p.norm(),
                         (ap - ap.transpose()).norm(), (pa - pa.transpose()).norm()});
  }

  const double elapsed = seconds_since(t0);
  report(1, worst_jac < 1e-6 && spd && worst_ke < 1e-8 && worst_em < 1e-6 && compared >= 100 && worst_mp < 1e-9 &&
                elapsed < 10.0,
         fmt("jacobian fd %.2e, inertia spd %s, energy %.2e, effective mass %.2e (%d), pinv %.2e, %.2f s",
             worst_jac, spd ? "yes" : "no", worst_ke, worst_em, compared, worst_mp, elapsed));
}

void force_model() {
  const PflParams p;
  Rng rng(1002);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const double v = rng.uniform(0.0, 2.0);
    const double mr = rng.uniform(0.1, 60.0);
    const double f = pfl_max_force(v, p.stiffness, mr, p.human_mass);
    worst = std::max(worst, std::abs(pfl_max_velocity(f, p.stiffness, mr, p.human_mass) - v));
  }
  const bool edges = force_to_threshold(300, p) == SensitivityLevel::Most &&
                     force_to_threshold(140, p) == SensitivityLevel::Medium &&
                     force_to_threshold(139.999, p) == SensitivityLevel::Least &&
                     force_to_threshold(280, p) == SensitivityLevel::Most;
  report(2, worst <= 1e-12 && edges, fmt("round trip %.2e, boundaries %s", worst, edges ? "ok" : "wrong"));
}

std::string records_bytes(const std::vector<RunRecord>& records) {
  std::ostringstream out;
  write_records_csv(out, records);
  return out.str();
}

void matrix_criteria() {
  const auto& robot = testing::shipped_robot();
  auto config = testing::shipped_experiment();
  config.reps = 10;

  const auto t0 = std::chrono::steady_clock::now();
  const auto records = run_matrix(robot, config);
  const double elapsed = seconds_since(t0);
  const auto t = aggregate(records);
  std::printf("%s", summary_text(t).c_str());

  const int U = 0, BP = 1, LV = 2, EM = 3;
  bool order = records.size() == 720 && t.aborted == 0 && elapsed < 300.0;
  std::string detail;
  for (std::size_t r = 0; r < kReactionCount; ++r) {
    const double u = t.total_time[U][r].mean, bp = t.total_time[BP][r].mean;
    const double lv = t.total_time[LV][r].mean, em = t.total_time[EM][r].mean;
    const double gain = (u - em) / u;
    order = order && u >= bp && bp >= lv && lv > em && gain >= 0.15;
    detail += fmt("%s %.4f >= %.4f >= %.4f > %.4f (%.1f%% faster); ", r == 0 ? "stop" : "avoid", u, bp, lv, em,
                  100.0 * gain);
  }
  report(3, order, detail + fmt("%zu runs, %zu aborted, %.1f s", records.size(), t.aborted, elapsed));

  const auto& rate = t.reaction_rate_overall;
  report(4, rate[U] == 100.0 && rate[BP] == 100.0 && rate[EM] < rate[LV],
         fmt("uniform %.1f%%, body parts %.1f%%, link velocity %.1f%%, effective mass %.1f%%", rate[U], rate[BP],
             rate[LV], rate[EM]));

  const auto& s = t.level_share;
  report(5, s[U][0] == 100.0 && s[U][1] == 0.0 && s[U][2] == 0.0 && s[EM][0] == 0.0 && s[EM][2] > s[LV][2],
         fmt("uniform %.1f/%.1f/%.1f, effective mass %.1f/%.1f/%.1f, link velocity %.1f/%.1f/%.1f", s[U][0], s[U][1],
             s[U][2], s[EM][0], s[EM][1], s[EM][2], s[LV][0], s[LV][1], s[LV][2]));

  report(6, t.correlation.has_value() && *t.correlation < -0.3,
         fmt("r = %.3f over %zu reacted runs", t.correlation.value_or(NAN), t.correlation_n));

  const auto reference = records_bytes(records);
  auto serial = config;
  serial.threads = 1;
  auto fanned = config;
  fanned.threads = 4;
  const bool same_serial = records_bytes(run_matrix(robot, serial)) == reference;
  const bool same_fanned = records_bytes(run_matrix(robot, fanned)) == reference;
  report(7, same_serial && same_fanned,
         fmt("%zu bytes; 1 thread %s, 4 threads %s", reference.size(), same_serial ? "identical" : "differs",
             same_fanned ? "identical" : "differs"));

  // Informational: the same statistic with a constant one-sample pressure ramp.
  auto fixed = config;
  fixed.sim.indentation_depth = 0.0;
  const auto fixed_t = aggregate(run_matrix(robot, fixed));
  std::printf("INFO  constant pressure ramp: r = %.3f over %zu reacted runs\n", fixed_t.correlation.value_or(NAN),
              fixed_t.correlation_n);
}

void timer_counts() {
  const auto& config = testing::shipped_experiment();
  World world(testing::shipped_robot(), make_run_setup(config, ScenarioSpec{}));
  const auto steps = static_cast<std::int64_t>(std::llround(10.0 / config.sim.dt));
  for (std::int64_t i = 0; i < steps; ++i) world.step();
  std::int64_t logged_updates = 0, logged_samples = 0;
  for (const auto& tick : world.ticks()) {
    logged_updates += tick.threshold_update ? 1 : 0;
    logged_samples += tick.skin_sample ? 1 : 0;
  }
  const double span = static_cast<double>(world.steps()) * config.sim.dt;
  report(8,
         world.threshold_updates() == 250 && world.skin_samples() == 300 && logged_updates == 250 &&
             logged_samples == 300 && std::abs(span - 10.0) < 1e-9,
         fmt("%.3f s simulated, %lld threshold updates, %lld skin samples", span,
             static_cast<long long>(world.threshold_updates()), static_cast<long long>(world.skin_samples())));
}

}  // namespace

int main() {
  try {
    math_oracles();
    force_model();
    matrix_criteria();
    timer_counts();
  } catch (const std::exception& e) {
    std::printf("FAIL  acceptance run aborted: %s\n", e.what());
    return 1;
  }
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
