#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "mict/features.hpp"
#include "mict/geometry.hpp"
#include "mict/parts.hpp"

namespace mict {

// Nominal person height in pixels for scale s = 1.
inline constexpr double kDefaultPersonHeight = 175.0;

/// One detected body-part hypothesis: pose (x, y, theta, s), detector score
/// and optional appearance.
struct PartProposal {
  Part part = Part::Torso;
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
  double s = 1.0;
  double score = 0.0;
  std::optional<Descriptor> descriptor;
  std::string source_id;

  Eigen::Vector2d center() const { return {x, y}; }
};

// Validates scale and wraps theta into (-pi, pi].
PartProposal normalized(PartProposal p);

using PartLists = std::array<std::vector<PartProposal>, kPartCount>;

/// Multiple-instance compositional template: per part, the alternative
/// reference proposals.
struct Template {
  PartLists parts;
  double person_height = kDefaultPersonHeight;

  const std::vector<PartProposal>& at(Part p) const { return parts[index(p)]; }
  std::size_t size() const;
};

/// Target proposal set of one shot.
struct Scene {
  PartLists proposals;
  int width = 0;
  int height = 0;
  double person_height = kDefaultPersonHeight;
  std::string id;

  const std::vector<PartProposal>& at(Part p) const { return proposals[index(p)]; }
  std::size_t size() const;
};

PartLists group_by_part(const std::vector<PartProposal>& props);

OrientedRectd rect_of(const PartProposal& p, double person_height,
                      const BodyModel& body = BodyModel::standard());

struct JointFrame {
  Eigen::Vector2d anchor;
  double theta;
  double s;
};

/// Image position of joint `j` as seen from proposal `p`: the center plus
/// the rotated, scaled joint offset of p's part.
JointFrame joint_transform(const PartProposal& p, Joint j, double person_height,
                           const BodyModel& body = BodyModel::standard());

}  // namespace mict
