#include <doctest.h>

#include "askin/dynamics.hpp"
#include "askin/errors.hpp"
#include "support.hpp"

using namespace askin;
using testing::Rng;

TEST_CASE("point-mass pendulum has M = m l^2") {
  const auto model = testing::pendulum(3.0, 0.8);
  const auto m = joint_space_inertia(model, Eigen::VectorXd::Constant(1, 0.4));
  REQUIRE(m.rows() == 1);
  CHECK(m(0, 0) == doctest::Approx(3.0 * 0.64).epsilon(1e-14));
}

TEST_CASE("inertia matrix is symmetric positive definite at 1000 configurations") {
  const auto& model = testing::shipped_robot().model;
  Rng rng(21);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto m = joint_space_inertia(model, testing::random_q(rng, model));
    CHECK((m - m.transpose()).norm() < 1e-10);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
    CHECK(eig.eigenvalues().minCoeff() > 0.0);
  }
}

TEST_CASE("kinetic energy identity holds against the per-link oracle") {
  const auto& model = testing::shipped_robot().model;
  Rng rng(22);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::VectorXd q = testing::random_q(rng, model);
    const Eigen::VectorXd qdot = rng.vector(6, -2.0, 2.0);
    const double energy = 0.5 * qdot.dot(joint_space_inertia(model, q) * qdot);
    worst = std::max(worst, testing::rel_err(energy, testing::kinetic_energy_oracle(model, q, qdot)));
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("inertia matrix matches the Jacobian-assembled oracle") {
  const auto& model = testing::shipped_robot().model;
  Rng rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::VectorXd q = testing::random_q(rng, model);
    CHECK(testing::rel_err(joint_space_inertia(model, q), testing::mass_matrix_oracle(model, q)) < 1e-12);
  }
}

TEST_CASE("zero joint rate carries zero kinetic energy") {
  const auto& model = testing::shipped_robot().model;
  const auto m = joint_space_inertia(model, Eigen::VectorXd::Constant(6, 0.2));
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(6);
  CHECK(zero.dot(m * zero) == 0.0);
}

TEST_CASE("pendulum Cartesian mobility is 1/m along the tangent only") {
  const double mass = 2.5, l = 0.6;
  const auto model = testing::pendulum(mass, l);
  const auto ke = cartesian_ke_inverse(model, Eigen::VectorXd::Zero(1), 0, Eigen::Vector3d(l, 0, 0));
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(ke.linear_block());
  CHECK(eig.eigenvalues()(2) == doctest::Approx(1.0 / mass).epsilon(1e-12));
  CHECK(std::abs(eig.eigenvalues()(0)) < 1e-15);
  CHECK(std::abs(eig.eigenvalues()(1)) < 1e-15);
  CHECK(std::abs(eig.eigenvectors().col(2).dot(Eigen::Vector3d::UnitY())) == doctest::Approx(1.0));
}

TEST_CASE("Cartesian mobility reproduces the joint response to a wrench") {
  const auto& model = testing::shipped_robot().model;
  Rng rng(24);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::VectorXd q = testing::random_q(rng, model);
    const std::size_t link = rng.index(6);
    const Eigen::Vector3d point = rng.vector(3, -0.1, 0.1);
    const auto jac = point_jacobian(model, q, link, point);
    const Eigen::MatrixXd m = joint_space_inertia(model, q);
    const auto ke = cartesian_ke_inverse(model, q, link, point);
    CHECK((ke.lambda_inv - ke.lambda_inv.transpose()).norm() < 1e-9);
    const Eigen::VectorXd f = rng.vector(6, -10, 10);
    const Eigen::VectorXd qdot = m.ldlt().solve(jac.transpose() * f);
    CHECK(testing::rel_err(Eigen::VectorXd(jac * qdot), Eigen::VectorXd(ke.lambda_inv * f)) < 1e-9);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(ke.linear_block());
    CHECK(eig.eigenvalues().minCoeff() > -1e-12);
  }
}

TEST_CASE("pendulum effective mass: tangential m, radial unbounded") {
  const double mass = 4.0, l = 0.5;
  const auto model = testing::pendulum(mass, l);
  const Eigen::VectorXd q = Eigen::VectorXd::Zero(1);
  const Eigen::Vector3d tip(l, 0, 0);
  const auto tangential = effective_mass(model, q, 0, tip, Eigen::Vector3d::UnitY().eval());
  CHECK(tangential.bounded);
  CHECK(tangential.value == doctest::Approx(mass).epsilon(1e-12));
  const auto radial = effective_mass(model, q, 0, tip, Eigen::Vector3d::UnitX().eval());
  CHECK_FALSE(radial.bounded);
}

TEST_CASE("effective mass matches the minimum-energy oracle") {
  const auto& model = testing::shipped_robot().model;
  Rng rng(25);
  double worst = 0.0;
  int compared = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const Eigen::VectorXd q = testing::random_q(rng, model);
    const std::size_t link = rng.index(6);
    const Eigen::Vector3d point = rng.vector(3, -0.1, 0.1);
    const Eigen::Vector3d u = rng.unit3();
    const auto em = effective_mass(model, q, link, point, u);
    if (!em.bounded) continue;
    const Eigen::MatrixXd jv = point_jacobian(model, q, link, point).topRows<3>();
    const double oracle = testing::effective_mass_oracle(testing::mass_matrix_oracle(model, q), jv, u);
    worst = std::max(worst, testing::rel_err(em.value, oracle));
    ++compared;
  }
  CHECK(compared > 250);
  CHECK(worst < 1e-6);
}

TEST_CASE("effective mass is direction-sign invariant and within sanity bounds") {
  const auto& model = testing::shipped_robot().model;
  Rng rng(26);
  for (int trial = 0; trial < 300; ++trial) {
    const Eigen::VectorXd q = testing::random_q(rng, model);
    const std::size_t link = rng.index(6);
    const Eigen::Vector3d point = rng.vector(3, -0.1, 0.1);
    const Eigen::Vector3d u = rng.unit3();
    const auto ke = cartesian_ke_inverse(model, q, link, point);
    const auto plus = effective_mass(ke, u);
    const auto minus = effective_mass(ke, Eigen::Vector3d(-u));
    CHECK(plus.bounded == minus.bounded);
    if (!plus.bounded) continue;
    CHECK(plus.value == minus.value);
    CHECK(plus.value > 0.0);
    // Rayleigh bounds of the linear mobility block.
    const Eigen::Matrix3d mobility = ke.linear_block();
    const Eigen::Vector3d eig = Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(mobility).eigenvalues();
    CHECK(plus.value >= (1.0 - 1e-9) / eig.maxCoeff());
    if (eig.minCoeff() > 0.0) CHECK(plus.value <= (1.0 + 1e-9) / eig.minCoeff());
  }
}

TEST_CASE("effective mass rejects a non-unit direction") {
  const auto model = testing::pendulum(1.0, 1.0);
  CHECK_THROWS_AS(effective_mass(model, Eigen::VectorXd::Zero(1), 0, Eigen::Vector3d(1, 0, 0).eval(),
                                 Eigen::Vector3d(0, 2, 0).eval()),
                  InvalidInput);
}

TEST_CASE("singular inertia is reported as an internal inconsistency") {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2, 2);
  m(0, 0) = 1.0;
  CHECK_THROWS_AS(factor_inertia(m), ConsistencyError);
}

TEST_CASE("moving mass sums base-to-link masses") {
  const auto& model = testing::shipped_robot().model;
  CHECK(moving_mass_up_to(model, 0) == doctest::Approx(7.369));
  CHECK(moving_mass_up_to(model, 2) == doctest::Approx(7.369 + 13.051 + 3.989));
  CHECK(moving_mass_up_to(model, 5) == doctest::Approx(model.total_mass()));
  for (std::size_t i = 1; i < model.dof(); ++i) {
    CHECK(moving_mass_up_to(model, i) >= moving_mass_up_to(model, i - 1));
  }
  CHECK_THROWS_AS(moving_mass_up_to(model, 6), InvalidInput);
}
