#pragma once

// Shared fixtures and independent oracles for the test suites.

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <vector>

#include "askin/dynamics.hpp"
#include "askin/harness.hpp"
#include "askin/kinematics.hpp"
#include "askin/model_io.hpp"

namespace testing {

using askin::RobotModel;

inline const askin::RobotConfig& shipped_robot() {
  static const askin::RobotConfig robot = askin::load_robot_config(askin::default_robot_path());
  return robot;
}

inline const askin::ExperimentConfig& shipped_experiment() {
  static const askin::ExperimentConfig config = askin::load_experiment(askin::default_experiment_path());
  return config;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }

  Eigen::VectorXd vector(Eigen::Index n, double lo, double hi) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = uniform(lo, hi);
    return v;
  }

  Eigen::MatrixXd matrix(Eigen::Index r, Eigen::Index c, double lo = -1.0, double hi = 1.0) {
    Eigen::MatrixXd m(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
      for (Eigen::Index j = 0; j < c; ++j) m(i, j) = uniform(lo, hi);
    return m;
  }

  Eigen::Vector3d unit3() {
    std::normal_distribution<double> n(0.0, 1.0);
    Eigen::Vector3d v;
    do {
      v = {n(engine_), n(engine_), n(engine_)};
    } while (v.norm() < 1e-6);
    return v.normalized();
  }

  std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_); }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

/// Joint vector inside the shipped limits (the elbow is kept off its stops).
inline Eigen::VectorXd random_q(Rng& rng, const RobotModel& model) {
  Eigen::VectorXd q(static_cast<Eigen::Index>(model.dof()));
  for (std::size_t i = 0; i < model.dof(); ++i) {
    const auto& j = model.links[i].joint;
    q(static_cast<Eigen::Index>(i)) = rng.uniform(std::max(j.lower, -M_PI), std::min(j.upper, M_PI));
  }
  return q;
}

/// Single revolute joint about z with a point mass at distance `length` along x.
inline RobotModel pendulum(double mass, double length) {
  RobotModel model;
  model.name = "pendulum";
  askin::Link<double> link;
  link.name = "bar";
  link.inertia.mass = mass;
  link.inertia.com = {length, 0.0, 0.0};
  link.inertia.inertia.setZero();
  model.links.push_back(link);
  return model;
}

inline Eigen::Matrix4d homogeneous(const askin::Transform<double>& t) {
  Eigen::Matrix4d h = Eigen::Matrix4d::Identity();
  h.topLeftCorner<3, 3>() = t.rotation;
  h.topRightCorner<3, 1>() = t.translation;
  return h;
}

/// Standard Denavit-Hartenberg chain of the UR10e, built from the published
/// parameter table rather than from the config file.
inline Eigen::Matrix4d ur10e_dh_flange(const Eigen::VectorXd& q) {
  const double a[6] = {0, -0.6127, -0.57155, 0, 0, 0};
  const double d[6] = {0.1807, 0, 0, 0.17415, 0.11985, 0.11655};
  const double alpha[6] = {M_PI / 2, 0, 0, M_PI / 2, -M_PI / 2, 0};
  Eigen::Matrix4d t = Eigen::Matrix4d::Identity();
  for (int i = 0; i < 6; ++i) {
    const double ct = std::cos(q(i)), st = std::sin(q(i));
    const double ca = std::cos(alpha[i]), sa = std::sin(alpha[i]);
    Eigen::Matrix4d a_i;
    a_i << ct, -st * ca, st * sa, a[i] * ct,
           st, ct * ca, -ct * sa, a[i] * st,
           0, sa, ca, d[i],
           0, 0, 0, 1;
    t = t * a_i;
  }
  return t;
}

/// Central finite difference of the world position of `point` on `link`.
inline Eigen::Vector3d fd_point_velocity(const RobotModel& model, const Eigen::VectorXd& q,
                                         const Eigen::VectorXd& qdot, std::size_t link,
                                         const Eigen::Vector3d& point, double h = 1e-6) {
  const auto plus = askin::forward_kinematics(model, Eigen::VectorXd(q + h * qdot));
  const auto minus = askin::forward_kinematics(model, Eigen::VectorXd(q - h * qdot));
  return (plus[link + 1].apply(point) - minus[link + 1].apply(point)) / (2.0 * h);
}

/// Kinetic energy summed link by link: translational energy of each COM plus
/// rotational energy about it, velocities from per-link COM Jacobians.
inline double kinetic_energy_oracle(const RobotModel& model, const Eigen::VectorXd& q, const Eigen::VectorXd& qdot) {
  const auto poses = askin::forward_kinematics(model, q);
  double energy = 0.0;
  for (std::size_t i = 0; i < model.dof(); ++i) {
    const auto& body = model.links[i].inertia;
    const auto jac = askin::point_jacobian(model, poses, i, body.com);
    const Eigen::Vector3d v = jac.topRows<3>() * qdot;
    const Eigen::Vector3d w = jac.bottomRows<3>() * qdot;
    const Eigen::Matrix3d& r = poses[i + 1].rotation;
    const Eigen::Matrix3d inertia_world = r * body.inertia * r.transpose();
    energy += 0.5 * body.mass * v.squaredNorm() + 0.5 * w.dot(inertia_world * w);
  }
  return energy;
}

/// Joint-space inertia assembled from per-link COM Jacobians.
inline Eigen::MatrixXd mass_matrix_oracle(const RobotModel& model, const Eigen::VectorXd& q) {
  const auto poses = askin::forward_kinematics(model, q);
  const auto n = static_cast<Eigen::Index>(model.dof());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < model.dof(); ++i) {
    const auto& body = model.links[i].inertia;
    const auto jac = askin::point_jacobian(model, poses, i, body.com);
    const Eigen::Matrix3d& r = poses[i + 1].rotation;
    const Eigen::MatrixXd jv = jac.topRows<3>();
    const Eigen::MatrixXd jw = jac.bottomRows<3>();
    m += body.mass * jv.transpose() * jv + jw.transpose() * (r * body.inertia * r.transpose()) * jw;
  }
  return m;
}

/// Effective mass along u by solving the minimum-energy problem
///   min 1/2 qdot' M qdot  s.t.  u' J_v qdot = 1
/// through its KKT system. The optimal energy equals m_u / 2.
inline double effective_mass_oracle(const Eigen::MatrixXd& mass_matrix, const Eigen::MatrixXd& jac_linear,
                                    const Eigen::Vector3d& u) {
  const Eigen::Index n = mass_matrix.rows();
  Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(n + 1, n + 1);
  const Eigen::VectorXd a = jac_linear.transpose() * u;
  kkt.topLeftCorner(n, n) = mass_matrix;
  kkt.topRightCorner(n, 1) = a;
  kkt.bottomLeftCorner(1, n) = a.transpose();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
  rhs(n) = 1.0;
  const Eigen::VectorXd sol = kkt.fullPivLu().solve(rhs);
  const Eigen::VectorXd qdot = sol.head(n);
  return qdot.dot(mass_matrix * qdot);
}

inline double rel_err(double got, double want) { return std::abs(got - want) / std::max(std::abs(want), 1e-300); }

template <typename A, typename B>
double rel_err(const Eigen::MatrixBase<A>& got, const Eigen::MatrixBase<B>& want) {
  return (got - want).norm() / std::max(want.norm(), 1e-300);
}

}  // namespace testing
