#pragma once

#include <array>
#include <vector>

#include <Eigen/Core>

#include "mict/parts.hpp"
#include "mict/proposal.hpp"

namespace mict {

using Vector4d = Eigen::Matrix<double, 4, 1>;
using Matrix4d = Eigen::Matrix<double, 4, 4>;

/// Zero-mean Gaussian over the joint-frame displacement (du, dv, dtheta,
/// dlog s) between a parent part and its child. `mean` is the learned rest
/// displacement subtracted before evaluation.
struct JointModel {
  Vector4d mean = Vector4d::Zero();
  Matrix4d covariance = Matrix4d::Identity();
  Matrix4d precision = Matrix4d::Identity();
  double log_normalizer = 0.0;  // log of the Gaussian density at its mode

  static JointModel from(const Vector4d& mean, const Matrix4d& covariance);
};

/// One fully annotated body configuration, e.g. from a reference image.
struct BodyAnnotation {
  std::array<PartProposal, kPartCount> parts;
  double person_height = kDefaultPersonHeight;
};

class KinematicsModel {
 public:
  KinematicsModel();  // nominal(): zero rest displacement, default spreads
  KinematicsModel(const BodyModel& body, const std::array<JointModel, kJointCount>& joints);

  /// Zero rest displacement and a diagonal covariance with the given
  /// standard deviations (position in person heights, angle in radians).
  static KinematicsModel nominal(double sigma_pos = 0.04, double sigma_theta = 0.2,
                                 double sigma_log_scale = 0.08,
                                 const BodyModel& body = BodyModel::standard());

  const BodyModel& body() const { return body_; }
  const JointModel& joint(Joint j) const { return joints_[index(j)]; }
  const std::array<JointModel, kJointCount>& joints() const { return joints_; }

  /// Raw (mean not removed) joint-frame displacement of parent vs child.
  Vector4d displacement(const PartProposal& parent, const PartProposal& child, Joint j,
                        double person_height) const;

  // Residual after removing the rest displacement; dtheta wrapped.
  Vector4d residual(const PartProposal& parent, const PartProposal& child, Joint j,
                    double person_height) const;

  double mahalanobis2(const Vector4d& residual, Joint j) const;

  /// Mode-normalized Gaussian density ratio in (0, 1]. Arguments may come in
  /// either order; their parts must share a joint.
  double probability(const PartProposal& a, const PartProposal& b, double person_height) const;

 private:
  BodyModel body_;
  std::array<JointModel, kJointCount> joints_;
};

inline constexpr double kCovarianceJitter = 1e-6;

/// Learns per-joint rest displacements and (population) covariances from
/// annotated configurations; needs at least two.
KinematicsModel fit_kinematics(const std::vector<BodyAnnotation>& annotations,
                               const BodyModel& body = BodyModel::standard());

}  // namespace mict
