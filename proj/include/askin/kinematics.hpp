#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cstddef>
#include <string>
#include <vector>

#include "askin/errors.hpp"

namespace askin {

template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar>
using Matrix3 = Eigen::Matrix<Scalar, 3, 3>;
template <typename Scalar>
using Vector6 = Eigen::Matrix<Scalar, 6, 1>;
template <typename Scalar>
using Matrix6 = Eigen::Matrix<Scalar, 6, 6>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Jacobian = Eigen::Matrix<Scalar, 6, Eigen::Dynamic>;

/// Rigid transform: x_parent = rotation * x_child + translation.
template <typename Scalar>
struct Transform {
  Matrix3<Scalar> rotation = Matrix3<Scalar>::Identity();
  Vector3<Scalar> translation = Vector3<Scalar>::Zero();

  static Transform identity() { return {}; }

  static Transform from_translation(const Vector3<Scalar>& t) {
    Transform out;
    out.translation = t;
    return out;
  }

  static Transform from_rotation(const Matrix3<Scalar>& r) {
    Transform out;
    out.rotation = r;
    return out;
  }

  Transform operator*(const Transform& rhs) const {
    Transform out;
    out.rotation = rotation * rhs.rotation;
    out.translation = rotation * rhs.translation + translation;
    return out;
  }

  Vector3<Scalar> apply(const Vector3<Scalar>& p) const { return rotation * p + translation; }

  Transform inverse() const {
    Transform out;
    out.rotation = rotation.transpose();
    out.translation = -(out.rotation * translation);
    return out;
  }

  bool is_proper(Scalar tol = Scalar(1e-9)) const {
    const Matrix3<Scalar> gram = rotation.transpose() * rotation;
    return (gram - Matrix3<Scalar>::Identity()).cwiseAbs().maxCoeff() <= tol &&
           std::abs(rotation.determinant() - Scalar(1)) <= tol;
  }
};

/// Roll-pitch-yaw (fixed-axis X, then Y, then Z) to rotation matrix, R = Rz(yaw) Ry(pitch) Rx(roll).
template <typename Scalar>
Matrix3<Scalar> rpy_to_rotation(Scalar roll, Scalar pitch, Scalar yaw) {
  using AA = Eigen::AngleAxis<Scalar>;
  return (AA(yaw, Vector3<Scalar>::UnitZ()) * AA(pitch, Vector3<Scalar>::UnitY()) *
          AA(roll, Vector3<Scalar>::UnitX()))
      .toRotationMatrix();
}

/// Revolute joint: the child frame is `origin` followed by a rotation of q about `axis`.
template <typename Scalar>
struct JointSpec {
  Vector3<Scalar> axis = Vector3<Scalar>::UnitZ();
  Transform<Scalar> origin;
  Scalar lower = Scalar(-2 * EIGEN_PI);
  Scalar upper = Scalar(2 * EIGEN_PI);
  Scalar velocity_limit = Scalar(2);
};

template <typename Scalar>
struct LinkInertia {
  Scalar mass = Scalar(1);
  Vector3<Scalar> com = Vector3<Scalar>::Zero();
  Matrix3<Scalar> inertia = Matrix3<Scalar>::Zero();  // about the COM, link frame
};

template <typename Scalar>
struct Link {
  std::string name;
  JointSpec<Scalar> joint;
  LinkInertia<Scalar> inertia;
};

template <typename Scalar>
struct RobotModelT {
  std::string name;
  Transform<Scalar> base;
  Transform<Scalar> tool;  // end-effector frame relative to the last link
  std::vector<Link<Scalar>> links;

  std::size_t dof() const { return links.size(); }

  Scalar total_mass() const {
    Scalar sum(0);
    for (const auto& l : links) sum += l.inertia.mass;
    return sum;
  }

  template <typename Other>
  RobotModelT<Other> cast() const {
    RobotModelT<Other> out;
    out.name = name;
    auto cast_tf = [](const Transform<Scalar>& t) {
      Transform<Other> o;
      o.rotation = t.rotation.template cast<Other>();
      o.translation = t.translation.template cast<Other>();
      return o;
    };
    out.base = cast_tf(base);
    out.tool = cast_tf(tool);
    for (const auto& l : links) {
      Link<Other> c;
      c.name = l.name;
      c.joint.axis = l.joint.axis.template cast<Other>();
      c.joint.origin = cast_tf(l.joint.origin);
      c.joint.lower = Other(l.joint.lower);
      c.joint.upper = Other(l.joint.upper);
      c.joint.velocity_limit = Other(l.joint.velocity_limit);
      c.inertia.mass = Other(l.inertia.mass);
      c.inertia.com = l.inertia.com.template cast<Other>();
      c.inertia.inertia = l.inertia.inertia.template cast<Other>();
      out.links.push_back(std::move(c));
    }
    return out;
  }
};

using RobotModel = RobotModelT<double>;

/// Joint positions and rates at a time instant.
struct JointState {
  Eigen::VectorXd q;
  Eigen::VectorXd qdot;
  double time = 0.0;
};

namespace detail {

template <typename Model, typename Derived>
void check_q(const Model& model, const Eigen::MatrixBase<Derived>& q) {
  if (static_cast<std::size_t>(q.size()) != model.dof()) {
    throw InvalidInput("joint vector has " + std::to_string(q.size()) + " entries, chain has " +
                       std::to_string(model.dof()));
  }
  if (!q.allFinite()) throw InvalidInput("joint vector contains non-finite entries");
}

template <typename Model>
void check_link(const Model& model, std::size_t link) {
  if (link >= model.dof()) {
    throw InvalidInput("link index " + std::to_string(link) + " out of range for chain of " +
                       std::to_string(model.dof()));
  }
}

}  // namespace detail

/// World poses along the chain. Element 0 is the base pose, element i + 1 the frame of link i.
template <typename Scalar, typename Derived>
std::vector<Transform<Scalar>> forward_kinematics(const RobotModelT<Scalar>& model,
                                                  const Eigen::MatrixBase<Derived>& q) {
  detail::check_q(model, q);
  std::vector<Transform<Scalar>> poses;
  poses.reserve(model.dof() + 1);
  poses.push_back(model.base);
  for (std::size_t i = 0; i < model.dof(); ++i) {
    const auto& joint = model.links[i].joint;
    const auto motion = Transform<Scalar>::from_rotation(
        Eigen::AngleAxis<Scalar>(Scalar(q(static_cast<Eigen::Index>(i))), joint.axis)
            .toRotationMatrix());
    poses.push_back(poses.back() * joint.origin * motion);
  }
  return poses;
}

template <typename Scalar, typename Derived>
Transform<Scalar> tool_pose(const RobotModelT<Scalar>& model, const Eigen::MatrixBase<Derived>& q) {
  return forward_kinematics(model, q).back() * model.tool;
}

/// Jacobian of a point fixed on `link` given the world poses from forward_kinematics.
/// Rows 0-2: linear velocity of the point, rows 3-5: world angular velocity of the link.
template <typename Scalar>
Jacobian<Scalar> point_jacobian(const RobotModelT<Scalar>& model,
                                const std::vector<Transform<Scalar>>& poses, std::size_t link,
                                const Vector3<Scalar>& point) {
  detail::check_link(model, link);
  if (!point.allFinite()) throw InvalidInput("jacobian point contains non-finite entries");
  Jacobian<Scalar> jac = Jacobian<Scalar>::Zero(6, static_cast<Eigen::Index>(model.dof()));
  const Vector3<Scalar> p_world = poses[link + 1].apply(point);
  for (std::size_t j = 0; j <= link; ++j) {
    const auto& frame = poses[j + 1];
    const Vector3<Scalar> axis = frame.rotation * model.links[j].joint.axis;
    const auto col = static_cast<Eigen::Index>(j);
    jac.template block<3, 1>(0, col) = axis.cross(p_world - frame.translation);
    jac.template block<3, 1>(3, col) = axis;
  }
  return jac;
}

template <typename Scalar, typename Derived>
Jacobian<Scalar> point_jacobian(const RobotModelT<Scalar>& model,
                                const Eigen::MatrixBase<Derived>& q, std::size_t link,
                                const Vector3<Scalar>& point) {
  return point_jacobian(model, forward_kinematics(model, q), link, point);
}

inline constexpr double kPinvRelativeCutoff = 1e-8;

/// Moore-Penrose pseudoinverse by SVD; singular values below 1e-8 * sigma_max count as zero.
template <typename Derived>
MatrixX<typename Derived::Scalar> pseudoinverse(const Eigen::MatrixBase<Derived>& mat) {
  using Scalar = typename Derived::Scalar;
  const MatrixX<Scalar> a = mat;
  if (a.size() == 0) return MatrixX<Scalar>::Zero(a.cols(), a.rows());
  Eigen::JacobiSVD<MatrixX<Scalar>> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sigma = svd.singularValues();
  const Scalar cutoff = Scalar(kPinvRelativeCutoff) * (sigma.size() ? sigma(0) : Scalar(0));
  VectorX<Scalar> inv = VectorX<Scalar>::Zero(sigma.size());
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    if (sigma(i) > cutoff && sigma(i) > Scalar(0)) inv(i) = Scalar(1) / sigma(i);
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

/// Rotation vector (axis * angle) taking `from` to `to`, expressed in the world frame.
template <typename Scalar>
Vector3<Scalar> rotation_error(const Matrix3<Scalar>& from, const Matrix3<Scalar>& to) {
  const Eigen::AngleAxis<Scalar> aa(to * from.transpose());
  return aa.axis() * aa.angle();
}

}  // namespace askin
