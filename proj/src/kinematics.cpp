#include "mict/kinematics.hpp"

#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include "mict/errors.hpp"

namespace mict {

JointModel JointModel::from(const Vector4d& mean, const Matrix4d& covariance) {
  Eigen::LLT<Matrix4d> llt(covariance);
  if (llt.info() != Eigen::Success || !covariance.allFinite())
    fail(ErrorKind::ContractViolation, "joint covariance is not positive definite");
  JointModel m;
  m.mean = mean;
  m.covariance = covariance;
  m.precision = llt.solve(Matrix4d::Identity());
  const double log_det = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  m.log_normalizer = -0.5 * (4.0 * std::log(2.0 * EIGEN_PI) + log_det);
  return m;
}

KinematicsModel::KinematicsModel() : KinematicsModel(nominal()) {}

KinematicsModel::KinematicsModel(const BodyModel& body,
                                 const std::array<JointModel, kJointCount>& joints)
    : body_(body), joints_(joints) {}

KinematicsModel KinematicsModel::nominal(double sigma_pos, double sigma_theta,
                                         double sigma_log_scale, const BodyModel& body) {
  Vector4d var;
  var << sigma_pos * sigma_pos, sigma_pos * sigma_pos, sigma_theta * sigma_theta,
      sigma_log_scale * sigma_log_scale;
  std::array<JointModel, kJointCount> joints;
  for (auto& j : joints) j = JointModel::from(Vector4d::Zero(), var.asDiagonal().toDenseMatrix());
  return KinematicsModel(body, joints);
}

Vector4d KinematicsModel::displacement(const PartProposal& parent, const PartProposal& child,
                                       Joint j, double person_height) const {
  const JointFrame fp = joint_transform(parent, j, person_height, body_);
  const JointFrame fc = joint_transform(child, j, person_height, body_);
  const Eigen::Vector2d d =
      rotation(-parent.theta) * (fp.anchor - fc.anchor) / (parent.s * person_height);
  Vector4d out;
  out << d.x(), d.y(), wrap_angle(parent.theta - child.theta), std::log(parent.s) - std::log(child.s);
  return out;
}

Vector4d KinematicsModel::residual(const PartProposal& parent, const PartProposal& child, Joint j,
                                   double person_height) const {
  Vector4d r = displacement(parent, child, j, person_height) - joints_[index(j)].mean;
  r[2] = wrap_angle(r[2]);
  return r;
}

double KinematicsModel::mahalanobis2(const Vector4d& residual, Joint j) const {
  return residual.dot(joints_[index(j)].precision * residual);
}

double KinematicsModel::probability(const PartProposal& a, const PartProposal& b,
                                    double person_height) const {
  const auto j = joint_between(a.part, b.part);
  if (!j)
    fail(ErrorKind::Domain, std::string(part_name(a.part)) + " and " +
                                std::string(part_name(b.part)) + " are not kinematically adjacent");
  const bool a_is_parent = link(*j).parent == a.part;
  const PartProposal& parent = a_is_parent ? a : b;
  const PartProposal& child = a_is_parent ? b : a;
  return std::exp(-0.5 * mahalanobis2(residual(parent, child, *j, person_height), *j));
}

KinematicsModel fit_kinematics(const std::vector<BodyAnnotation>& annotations,
                               const BodyModel& body) {
  if (annotations.size() < 2)
    fail(ErrorKind::UnderDetermined, "kinematics needs at least two annotated configurations");

  const KinematicsModel geometry(body, KinematicsModel::nominal().joints());
  std::array<JointModel, kJointCount> joints;
  const double n = static_cast<double>(annotations.size());
  for (std::size_t ji = 0; ji < kJointCount; ++ji) {
    const Joint j = static_cast<Joint>(ji);
    const auto& l = link(j);
    std::vector<Vector4d> samples;
    samples.reserve(annotations.size());
    for (const auto& a : annotations) {
      const PartProposal& parent = a.parts[index(l.parent)];
      const PartProposal& child = a.parts[index(l.child)];
      if (parent.part != l.parent || child.part != l.child)
        fail(ErrorKind::ContractViolation, "annotation slot holds the wrong part type");
      samples.push_back(geometry.displacement(normalized(parent), normalized(child), j, a.person_height));
    }
    Vector4d mean = Vector4d::Zero();
    for (const auto& s : samples) mean += s;
    mean /= n;
    Matrix4d cov = Matrix4d::Zero();
    for (const auto& s : samples) {
      Vector4d r = s - mean;
      r[2] = wrap_angle(r[2]);
      cov += r * r.transpose();
    }
    cov /= n;
    cov += kCovarianceJitter * Matrix4d::Identity();
    joints[ji] = JointModel::from(mean, cov);
  }
  return KinematicsModel(body, joints);
}

}  // namespace mict
