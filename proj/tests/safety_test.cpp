#include <doctest.h>

#include "askin/errors.hpp"
#include "askin/safety.hpp"
#include "askin/sim.hpp"
#include "support.hpp"

using namespace askin;
using testing::Rng;

TEST_CASE("force model reference values") {
  CHECK(pfl_max_force(0.0, 75000, 5.6, 5.6) == 0.0);
  // 0.5 * sqrt(75000) / sqrt(2 / 5.6), evaluated independently.
  CHECK(pfl_max_force(0.5, 75000, 5.6, 5.6) == doctest::Approx(229.1287847).epsilon(1e-9));
  CHECK(pfl_max_velocity(280, 75000, 5.6, 5.6) == doctest::Approx(0.6110100927).epsilon(1e-9));
  CHECK(pfl_max_force(1.0, 75000, 5.6, 5.6) == doctest::Approx(2 * pfl_max_force(0.5, 75000, 5.6, 5.6)));
}

TEST_CASE("force and speed limits invert each other") {
  Rng rng(31);
  for (int trial = 0; trial < 1000; ++trial) {
    const double v = rng.uniform(0.0, 3.0);
    const double k = rng.uniform(1e3, 2e5);
    const double mr = rng.uniform(0.05, 100.0);
    const double mh = rng.uniform(0.5, 80.0);
    const double f = pfl_max_force(v, k, mr, mh);
    CHECK(std::abs(pfl_max_velocity(f, k, mr, mh) - v) <= 1e-12 * std::max(1.0, v));
  }
}

TEST_CASE("force grows with robot mass and the speed limit approaches the heavy-robot bound") {
  Rng rng(32);
  for (int trial = 0; trial < 200; ++trial) {
    const double m1 = rng.uniform(0.1, 50.0);
    const double m2 = m1 + rng.uniform(0.0, 50.0);
    CHECK(pfl_max_force(0.5, 75000, m2, 5.6) >= pfl_max_force(0.5, 75000, m1, 5.6));
  }
  const double bound = 280 / std::sqrt(75000.0) * std::sqrt(1 / 5.6);
  CHECK(pfl_max_velocity(280, 75000, 1e12, 5.6) == doctest::Approx(bound).epsilon(1e-9));
  CHECK(pfl_max_velocity(280, 75000, 100, 5.6) > pfl_max_velocity(280, 75000, 1000, 5.6));
}

TEST_CASE("force model rejects nonphysical inputs") {
  CHECK_THROWS_AS(pfl_max_force(0.5, 0.0, 5.6, 5.6), InvalidInput);
  CHECK_THROWS_AS(pfl_max_force(0.5, 75000, -1.0, 5.6), InvalidInput);
  CHECK_THROWS_AS(pfl_max_force(0.5, 75000, 5.6, 0.0), InvalidInput);
  CHECK_THROWS_AS(pfl_max_force(-0.1, 75000, 5.6, 5.6), InvalidInput);
  CHECK_THROWS_AS(pfl_max_velocity(-1.0, 75000, 5.6, 5.6), InvalidInput);
}

TEST_CASE("force quantization boundaries") {
  const PflParams p;
  CHECK(force_to_threshold(300, p) == SensitivityLevel::Most);
  CHECK(force_to_threshold(280, p) == SensitivityLevel::Most);
  CHECK(force_to_threshold(279.999, p) == SensitivityLevel::Medium);
  CHECK(force_to_threshold(140, p) == SensitivityLevel::Medium);
  CHECK(force_to_threshold(139.999, p) == SensitivityLevel::Least);
  CHECK(force_to_threshold(100, p) == SensitivityLevel::Least);
  CHECK(force_to_threshold(0, p) == SensitivityLevel::Least);
  CHECK_THROWS_AS(force_to_threshold(-1.0, p), InvalidInput);
}

TEST_CASE("quantizer is monotone") {
  const PflParams p;
  Rng rng(33);
  for (int trial = 0; trial < 1000; ++trial) {
    const double f1 = rng.uniform(0, 500);
    const double f2 = f1 + rng.uniform(0, 200);
    CHECK(to_int(force_to_threshold(f1, p)) >= to_int(force_to_threshold(f2, p)));
  }
}

TEST_CASE("PFL parameters validate") {
  PflParams p;
  CHECK_NOTHROW(p.validate());
  p.force_mid = 300;
  CHECK_THROWS_AS(p.validate(), InvalidInput);
  p = PflParams{};
  p.human_mass = 0;
  CHECK_THROWS_AS(p.validate(), InvalidInput);
}

TEST_CASE("policy names round-trip") {
  for (auto policy : kAllPolicies) CHECK(parse_policy(to_string(policy)) == policy);
  CHECK_THROWS_AS(parse_policy("fastest"), InvalidInput);
}

namespace {

JointState random_state(Rng& rng) {
  const auto& model = testing::shipped_robot().model;
  JointState s;
  s.q = testing::random_q(rng, model);
  s.qdot = rng.vector(6, -0.6, 0.6);
  return s;
}

}  // namespace

TEST_CASE("static policies ignore the state") {
  const auto& robot = testing::shipped_robot();
  Rng rng(34);
  for (int trial = 0; trial < 20; ++trial) {
    const auto state = random_state(rng);
    const auto uniform = compute_thresholds(PolicyKind::Uniform, robot.model, state, robot.pads, {});
    const auto parts = compute_thresholds(PolicyKind::BodyParts, robot.model, state, robot.pads, {});
    REQUIRE(uniform.levels.size() == robot.pads.size());
    for (std::size_t i = 0; i < robot.pads.size(); ++i) {
      CHECK(uniform.levels[i] == SensitivityLevel::Most);
      const auto want = robot.pads[i].part == BodyPart::Upper ? SensitivityLevel::Medium : SensitivityLevel::Most;
      CHECK(parts.levels[i] == want);
    }
  }
}

TEST_CASE("a robot at rest gets the least sensitive level under dynamic policies") {
  const auto& robot = testing::shipped_robot();
  JointState state;
  state.q = Eigen::VectorXd::Constant(6, 0.3);
  state.qdot = Eigen::VectorXd::Zero(6);
  for (auto policy : {PolicyKind::LinkVelocity, PolicyKind::EffectiveMass}) {
    const auto est = estimate_pad_forces(policy, robot.model, state, robot.pads, {});
    for (const auto& e : est) {
      CHECK(e.force == 0.0);
      CHECK(e.level == SensitivityLevel::Least);
    }
  }
}

TEST_CASE("link-velocity estimate uses half the moving mass and the pad-point speed") {
  const auto& robot = testing::shipped_robot();
  Rng rng(35);
  const PflParams p;
  for (int trial = 0; trial < 20; ++trial) {
    const auto state = random_state(rng);
    const auto est = estimate_pad_forces(PolicyKind::LinkVelocity, robot.model, state, robot.pads, p);
    for (const auto& pad : robot.pads) {
      const double speed = (point_jacobian(robot.model, state.q, pad.link, pad.center).topRows<3>() * state.qdot).norm();
      const double mass = 0.5 * moving_mass_up_to(robot.model, pad.link);
      const auto& e = est[static_cast<std::size_t>(pad.id)];
      CHECK(e.speed == doctest::Approx(speed).epsilon(1e-12));
      CHECK(e.robot_mass == doctest::Approx(mass).epsilon(1e-12));
      CHECK(e.force == doctest::Approx(pfl_max_force(speed, p.stiffness, mass, p.human_mass)).epsilon(1e-12));
      CHECK(e.level == force_to_threshold(e.force, p));
    }
  }
}

TEST_CASE("effective-mass estimate uses m_u along the pad velocity") {
  const auto& robot = testing::shipped_robot();
  Rng rng(36);
  const PflParams p;
  for (int trial = 0; trial < 20; ++trial) {
    const auto state = random_state(rng);
    const auto est = estimate_pad_forces(PolicyKind::EffectiveMass, robot.model, state, robot.pads, p);
    for (const auto& pad : robot.pads) {
      const Eigen::Vector3d v =
          point_jacobian(robot.model, state.q, pad.link, pad.center).topRows<3>() * state.qdot;
      const auto& e = est[static_cast<std::size_t>(pad.id)];
      if (v.norm() < kStillPadSpeed) continue;
      const auto em = effective_mass(robot.model, state.q, pad.link, pad.center, Eigen::Vector3d(v.normalized()));
      const double mass = em.bounded ? em.value : robot.model.total_mass();
      CHECK(e.mass_unbounded == !em.bounded);
      CHECK(e.robot_mass == doctest::Approx(mass).epsilon(1e-9));
      CHECK(e.force == doctest::Approx(pfl_max_force(v.norm(), p.stiffness, mass, p.human_mass)).epsilon(1e-9));
    }
  }
}

TEST_CASE("over the undisturbed task the effective-mass levels are rarely more sensitive") {
  const auto& robot = testing::shipped_robot();
  const auto& config = testing::shipped_experiment();
  World world(robot, make_run_setup(config, ScenarioSpec{}));
  world.run();
  std::size_t ticks = 0, ok = 0;
  for (const auto& tick : world.ticks()) {
    if (!tick.threshold_update) continue;
    JointState s;
    s.q = tick.q;
    s.qdot = tick.qdot;
    const auto lv = compute_thresholds(PolicyKind::LinkVelocity, robot.model, s, robot.pads, config.pfl);
    const auto em = compute_thresholds(PolicyKind::EffectiveMass, robot.model, s, robot.pads, config.pfl);
    for (std::size_t i = 0; i < robot.pads.size(); ++i) {
      ++ticks;
      if (to_int(em.levels[i]) >= to_int(lv.levels[i])) ++ok;
    }
  }
  REQUIRE(ticks > 0);
  CHECK(static_cast<double>(ok) / static_cast<double>(ticks) >= 0.9);
}
