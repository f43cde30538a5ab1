#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

#include <Eigen/Core>

namespace mict {

// Ten concrete body-part slots; limbs are split into left/right instances.
enum class Part : std::uint8_t {
  Head,
  Torso,
  LeftUpperArm,
  RightUpperArm,
  LeftForearm,
  RightForearm,
  LeftThigh,
  RightThigh,
  LeftCalf,
  RightCalf,
};

inline constexpr std::size_t kPartCount = 10;

inline constexpr std::array<Part, kPartCount> kAllParts = {
    Part::Head,        Part::Torso,        Part::LeftUpperArm, Part::RightUpperArm,
    Part::LeftForearm, Part::RightForearm, Part::LeftThigh,    Part::RightThigh,
    Part::LeftCalf,    Part::RightCalf};

constexpr std::size_t index(Part p) { return static_cast<std::size_t>(p); }

std::string_view part_name(Part p);
std::optional<Part> part_from_name(std::string_view name);

std::optional<Part> symmetry_partner(Part p);
std::optional<Part> kinematic_parent(Part p);

// Horizontal strip (0 = top quarter of the image) a part is expected in.
int strip_index(Part p);

// Articulation points of the kinematic tree; torso is the root.
enum class Joint : std::uint8_t {
  Neck,
  LeftShoulder,
  RightShoulder,
  LeftElbow,
  RightElbow,
  LeftHip,
  RightHip,
  LeftKnee,
  RightKnee,
};

inline constexpr std::size_t kJointCount = 9;

struct JointLink {
  Part parent;
  Part child;
};

inline constexpr std::array<JointLink, kJointCount> kJointLinks = {{
    {Part::Torso, Part::Head},
    {Part::Torso, Part::LeftUpperArm},
    {Part::Torso, Part::RightUpperArm},
    {Part::LeftUpperArm, Part::LeftForearm},
    {Part::RightUpperArm, Part::RightForearm},
    {Part::Torso, Part::LeftThigh},
    {Part::Torso, Part::RightThigh},
    {Part::LeftThigh, Part::LeftCalf},
    {Part::RightThigh, Part::RightCalf},
}};

constexpr std::size_t index(Joint j) { return static_cast<std::size_t>(j); }
constexpr const JointLink& link(Joint j) { return kJointLinks[index(j)]; }

std::string_view joint_name(Joint j);

// Joint connecting two parts, in either order.
std::optional<Joint> joint_between(Part a, Part b);

// Joint whose child is `p` (none for the torso).
std::optional<Joint> parent_joint(Part p);

/// Body proportions in units of person height: rectangle sizes per part and
/// the joint anchor offsets expressed in each incident part's local frame
/// (x across the part, y along it, pointing down for an upright person).
struct BodyModel {
  std::array<Eigen::Vector2d, kPartCount> base_size;
  std::array<Eigen::Vector2d, kJointCount> parent_offset;
  std::array<Eigen::Vector2d, kJointCount> child_offset;

  static const BodyModel& standard();

  const Eigen::Vector2d& size(Part p) const { return base_size[index(p)]; }

  // Offset of joint `j` in the frame of part `p`; p must be incident to j.
  const Eigen::Vector2d& offset(Joint j, Part p) const;
};

}  // namespace mict
