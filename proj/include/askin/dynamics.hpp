#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <limits>

#include "askin/kinematics.hpp"

namespace askin {

template <typename Scalar>
Matrix3<Scalar> skew(const Vector3<Scalar>& v) {
  Matrix3<Scalar> s;
  s << Scalar(0), -v.z(), v.y(), v.z(), Scalar(0), -v.x(), -v.y(), v.x(), Scalar(0);
  return s;
}

/// 6x6 spatial inertia of one link about the world origin, ordering [angular; linear].
template <typename Scalar>
Matrix6<Scalar> spatial_inertia_world(const LinkInertia<Scalar>& body, const Transform<Scalar>& pose) {
  const Vector3<Scalar> c = pose.apply(body.com);
  const Matrix3<Scalar> inertia_world = pose.rotation * body.inertia * pose.rotation.transpose();
  const Matrix3<Scalar> cx = skew(c);
  Matrix6<Scalar> s;
  s.template topLeftCorner<3, 3>() = inertia_world + body.mass * cx.transpose() * cx;
  s.template topRightCorner<3, 3>() = body.mass * cx;
  s.template bottomLeftCorner<3, 3>() = -body.mass * cx;
  s.template bottomRightCorner<3, 3>() = body.mass * Matrix3<Scalar>::Identity();
  return s;
}

/// Joint-space inertia M(q) by the composite-rigid-body recursion, with all
/// quantities in the world frame so no spatial transforms between links are needed.
template <typename Scalar>
MatrixX<Scalar> joint_space_inertia(const RobotModelT<Scalar>& model,
                                    const std::vector<Transform<Scalar>>& poses) {
  const auto n = static_cast<Eigen::Index>(model.dof());
  MatrixX<Scalar> mass_matrix = MatrixX<Scalar>::Zero(n, n);
  if (n == 0) return mass_matrix;

  Eigen::Matrix<Scalar, 6, Eigen::Dynamic> axes(6, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto& frame = poses[static_cast<std::size_t>(j) + 1];
    const Vector3<Scalar> a = frame.rotation * model.links[static_cast<std::size_t>(j)].joint.axis;
    axes.col(j) << a, frame.translation.cross(a);
  }

  Matrix6<Scalar> composite = Matrix6<Scalar>::Zero();
  for (Eigen::Index k = n - 1; k >= 0; --k) {
    const auto link = static_cast<std::size_t>(k);
    composite += spatial_inertia_world(model.links[link].inertia, poses[link + 1]);
    const Vector6<Scalar> force = composite * axes.col(k);
    for (Eigen::Index i = 0; i <= k; ++i) {
      mass_matrix(i, k) = axes.col(i).dot(force);
      mass_matrix(k, i) = mass_matrix(i, k);
    }
  }
  return mass_matrix;
}

template <typename Scalar, typename Derived>
MatrixX<Scalar> joint_space_inertia(const RobotModelT<Scalar>& model,
                                    const Eigen::MatrixBase<Derived>& q) {
  return joint_space_inertia(model, forward_kinematics(model, q));
}

/// Inverse Cartesian kinetic-energy matrix J M^-1 J^T at a link point.
template <typename Scalar>
struct CartesianKEInverse {
  Matrix6<Scalar> lambda_inv = Matrix6<Scalar>::Zero();

  Matrix3<Scalar> linear_block() const { return lambda_inv.template topLeftCorner<3, 3>(); }
};

/// Cholesky factor of M(q); throws when M is not numerically positive definite.
template <typename Scalar>
Eigen::LLT<MatrixX<Scalar>> factor_inertia(const MatrixX<Scalar>& mass_matrix) {
  Eigen::LLT<MatrixX<Scalar>> llt(mass_matrix);
  if (llt.info() != Eigen::Success) {
    throw ConsistencyError("joint-space inertia matrix is not positive definite");
  }
  return llt;
}

template <typename Scalar>
CartesianKEInverse<Scalar> cartesian_ke_inverse(const Jacobian<Scalar>& jac,
                                                const Eigen::LLT<MatrixX<Scalar>>& inertia_factor) {
  CartesianKEInverse<Scalar> out;
  const MatrixX<Scalar> minv_jt = inertia_factor.solve(jac.transpose());
  out.lambda_inv = jac * minv_jt;
  out.lambda_inv = Scalar(0.5) * (out.lambda_inv + out.lambda_inv.transpose()).eval();
  return out;
}

template <typename Scalar, typename Derived>
CartesianKEInverse<Scalar> cartesian_ke_inverse(const RobotModelT<Scalar>& model,
                                                const Eigen::MatrixBase<Derived>& q,
                                                std::size_t link, const Vector3<Scalar>& point) {
  const auto poses = forward_kinematics(model, q);
  const auto jac = point_jacobian(model, poses, link, point);
  return cartesian_ke_inverse(jac, factor_inertia(joint_space_inertia(model, poses)));
}

inline constexpr double kUnboundedMobility = 1e-9;

template <typename Scalar>
struct EffectiveMass {
  Scalar value = Scalar(0);
  bool bounded = true;
  Vector3<Scalar> direction = Vector3<Scalar>::Zero();

  static EffectiveMass unbounded(const Vector3<Scalar>& u) {
    return {std::numeric_limits<Scalar>::infinity(), false, u};
  }
};

/// m_u = 1 / (u^T Lambda_v^-1 u). Unbounded when the point has no mobility along u.
template <typename Scalar>
EffectiveMass<Scalar> effective_mass(const CartesianKEInverse<Scalar>& ke_inv,
                                     const Vector3<Scalar>& u) {
  if (!u.allFinite() || std::abs(u.norm() - Scalar(1)) > Scalar(1e-9)) {
    throw InvalidInput("effective-mass direction must be a unit vector");
  }
  const Scalar mobility = u.dot(ke_inv.linear_block() * u);
  if (mobility < Scalar(kUnboundedMobility)) return EffectiveMass<Scalar>::unbounded(u);
  return {Scalar(1) / mobility, true, u};
}

template <typename Scalar, typename Derived>
EffectiveMass<Scalar> effective_mass(const RobotModelT<Scalar>& model,
                                     const Eigen::MatrixBase<Derived>& q, std::size_t link,
                                     const Vector3<Scalar>& point, const Vector3<Scalar>& u) {
  return effective_mass(cartesian_ke_inverse(model, q, link, point), u);
}

/// Sum of link masses from the first link through `link` inclusive.
template <typename Scalar>
Scalar moving_mass_up_to(const RobotModelT<Scalar>& model, std::size_t link) {
  detail::check_link(model, link);
  Scalar sum(0);
  for (std::size_t i = 0; i <= link; ++i) sum += model.links[i].inertia.mass;
  return sum;
}

}  // namespace askin
