#include "mict/proposal.hpp"

#include <cmath>

#include "mict/errors.hpp"

namespace mict {

PartProposal normalized(PartProposal p) {
  if (!(p.s > 0.0) || !std::isfinite(p.s))
    fail(ErrorKind::InvalidProposal, "scale must be positive, got " + std::to_string(p.s));
  if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.theta))
    fail(ErrorKind::InvalidProposal, "non-finite pose");
  p.theta = wrap_angle(p.theta);
  return p;
}

std::size_t Template::size() const {
  std::size_t n = 0;
  for (const auto& l : parts) n += l.size();
  return n;
}

std::size_t Scene::size() const {
  std::size_t n = 0;
  for (const auto& l : proposals) n += l.size();
  return n;
}

PartLists group_by_part(const std::vector<PartProposal>& props) {
  PartLists lists;
  for (const auto& p : props) lists[index(p.part)].push_back(p);
  return lists;
}

OrientedRectd rect_of(const PartProposal& p, double person_height, const BodyModel& body) {
  if (!(p.s > 0.0)) fail(ErrorKind::InvalidProposal, "scale must be positive");
  const Eigen::Vector2d size = body.size(p.part) * p.s * person_height;
  return OrientedRectd::make(p.center(), p.theta, size.x(), size.y());
}

JointFrame joint_transform(const PartProposal& p, Joint j, double person_height,
                           const BodyModel& body) {
  const Eigen::Vector2d& off = body.offset(j, p.part);
  return {p.center() + rotation(p.theta) * (off * p.s * person_height), p.theta, p.s};
}

}  // namespace mict
