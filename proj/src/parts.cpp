#include "mict/parts.hpp"

#include "mict/errors.hpp"

namespace mict {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidProposal: return "invalid proposal";
    case ErrorKind::EmptyRegion: return "empty region";
    case ErrorKind::ContractViolation: return "contract violation";
    case ErrorKind::MissingFeature: return "missing feature";
    case ErrorKind::TemplateIncomplete: return "template incomplete";
    case ErrorKind::UnderDetermined: return "under-determined model";
    case ErrorKind::Domain: return "domain error";
    case ErrorKind::SizeLimit: return "size limit";
    case ErrorKind::NoLocalization: return "no localization";
    case ErrorKind::Io: return "io error";
  }
  return "error";
}

namespace {

constexpr std::array<std::string_view, kPartCount> kPartNames = {
    "head",        "torso",        "left_upper_arm", "right_upper_arm", "left_forearm",
    "right_forearm", "left_thigh", "right_thigh",    "left_calf",       "right_calf"};

constexpr std::array<std::string_view, kJointCount> kJointNames = {
    "neck",      "left_shoulder", "right_shoulder", "left_elbow", "right_elbow",
    "left_hip", "right_hip",     "left_knee",      "right_knee"};

}  // namespace

std::string_view part_name(Part p) { return kPartNames[index(p)]; }

std::optional<Part> part_from_name(std::string_view name) {
  for (Part p : kAllParts)
    if (kPartNames[index(p)] == name) return p;
  return std::nullopt;
}

std::optional<Part> symmetry_partner(Part p) {
  switch (p) {
    case Part::Head:
    case Part::Torso: return std::nullopt;
    case Part::LeftUpperArm: return Part::RightUpperArm;
    case Part::RightUpperArm: return Part::LeftUpperArm;
    case Part::LeftForearm: return Part::RightForearm;
    case Part::RightForearm: return Part::LeftForearm;
    case Part::LeftThigh: return Part::RightThigh;
    case Part::RightThigh: return Part::LeftThigh;
    case Part::LeftCalf: return Part::RightCalf;
    case Part::RightCalf: return Part::LeftCalf;
  }
  return std::nullopt;
}

std::optional<Part> kinematic_parent(Part p) {
  if (auto j = parent_joint(p)) return link(*j).parent;
  return std::nullopt;
}

int strip_index(Part p) {
  switch (p) {
    case Part::Head: return 0;
    case Part::Torso:
    case Part::LeftUpperArm:
    case Part::RightUpperArm:
    case Part::LeftForearm:
    case Part::RightForearm: return 1;
    case Part::LeftThigh:
    case Part::RightThigh: return 2;
    case Part::LeftCalf:
    case Part::RightCalf: return 3;
  }
  return 0;
}

std::string_view joint_name(Joint j) { return kJointNames[index(j)]; }

std::optional<Joint> joint_between(Part a, Part b) {
  for (std::size_t j = 0; j < kJointCount; ++j) {
    const auto& l = kJointLinks[j];
    if ((l.parent == a && l.child == b) || (l.parent == b && l.child == a))
      return static_cast<Joint>(j);
  }
  return std::nullopt;
}

std::optional<Joint> parent_joint(Part p) {
  for (std::size_t j = 0; j < kJointCount; ++j)
    if (kJointLinks[j].child == p) return static_cast<Joint>(j);
  return std::nullopt;
}

const BodyModel& BodyModel::standard() {
  static const BodyModel model = [] {
    BodyModel m;
    using V = Eigen::Vector2d;
    m.base_size[index(Part::Head)] = V(0.16, 0.16);
    m.base_size[index(Part::Torso)] = V(0.30, 0.35);
    for (Part p : {Part::LeftUpperArm, Part::RightUpperArm}) m.base_size[index(p)] = V(0.10, 0.22);
    for (Part p : {Part::LeftForearm, Part::RightForearm}) m.base_size[index(p)] = V(0.09, 0.22);
    for (Part p : {Part::LeftThigh, Part::RightThigh}) m.base_size[index(p)] = V(0.13, 0.28);
    for (Part p : {Part::LeftCalf, Part::RightCalf}) m.base_size[index(p)] = V(0.11, 0.28);

    // Person's left is drawn at negative x.
    auto set = [&m](Joint j, V parent, V child) {
      m.parent_offset[index(j)] = parent;
      m.child_offset[index(j)] = child;
    };
    set(Joint::Neck, V(0.0, -0.175), V(0.0, 0.08));
    set(Joint::LeftShoulder, V(-0.19, -0.15), V(0.0, -0.10));
    set(Joint::RightShoulder, V(0.19, -0.15), V(0.0, -0.10));
    set(Joint::LeftElbow, V(0.0, 0.10), V(0.0, -0.10));
    set(Joint::RightElbow, V(0.0, 0.10), V(0.0, -0.10));
    set(Joint::LeftHip, V(-0.075, 0.175), V(0.0, -0.14));
    set(Joint::RightHip, V(0.075, 0.175), V(0.0, -0.14));
    set(Joint::LeftKnee, V(0.0, 0.14), V(0.0, -0.14));
    set(Joint::RightKnee, V(0.0, 0.14), V(0.0, -0.14));
    return m;
  }();
  return model;
}

const Eigen::Vector2d& BodyModel::offset(Joint j, Part p) const {
  const auto& l = link(j);
  if (l.parent == p) return parent_offset[index(j)];
  if (l.child == p) return child_offset[index(j)];
  fail(ErrorKind::Domain, std::string("joint ") + std::string(joint_name(j)) +
                              " is not incident to part " + std::string(part_name(p)));
}

}  // namespace mict
