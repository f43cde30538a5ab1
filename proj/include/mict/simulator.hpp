#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "mict/features.hpp"
#include "mict/image.hpp"
#include "mict/kinematics.hpp"
#include "mict/proposal.hpp"
#include "mict/random.hpp"
#include "mict/template_builder.hpp"

namespace mict {

struct PoseNoise {
  double position = 0.015;  // joint displacement, person heights
  double theta = 0.03;      // radians
  // Small: scale levels are quantized, and a body straddling a bin edge
  // pays the alpha_s penalty twice.
  double log_scale = 0.003;
};

struct SimConfig {
  std::size_t n_individuals = 20;
  std::size_t shots_per_individual = 2;
  PoseNoise pose_noise;
  double descriptor_noise = 0.03;    // weight of the random histogram mixed into observations
  double false_alarm_rate = 2.0;     // expected spurious proposals per part and shot
  double occlusion_rate = 0.0;       // scenes only
  double confuser_similarity = 0.3;  // pull of distractor appearance toward the query
  std::uint64_t seed = 1;

  double person_height = kDefaultPersonHeight;
  double height_spread = 0.05;       // sd of log individual height
  double rest_angle_spread = 0.02;   // per-individual limb rest angles, radians
  int prototype_bins = 8;            // non-zero bins of a prototype histogram
  double symmetric_perturbation = 0.05;
  HistogramLayout layout;
};

void validate(const SimConfig& cfg);

struct SyntheticIndividual {
  int id = 0;
  std::array<Histogram, kPartCount> prototype;
  std::array<double, kJointCount> rest_angle{};  // child minus parent orientation at rest
  double height = kDefaultPersonHeight;          // pixels
  BodyModel body = BodyModel::standard();
};

Histogram sparse_histogram(Rng& rng, int size, int nonzero);
// normalize((1 - w) a + w b)
Histogram mix(const Histogram& a, const Histogram& b, double w);

SyntheticIndividual generate_individual(Rng& rng, const SimConfig& cfg, int id = 0);

std::vector<SyntheticIndividual> generate_population(const SimConfig& cfg);

/// One body configuration: the ten true part poses. `torso` places the
/// torso center; remaining parts follow the kinematic tree with pose noise.
std::array<PartProposal, kPartCount> generate_pose(const SyntheticIndividual& ind,
                                                   const Eigen::Vector2d& torso, Rng& rng,
                                                   const SimConfig& cfg);

struct SimReference {
  ReferenceShot shot;
  BodyAnnotation annotation;  // the true proposals
};

/// A single-person reference image: all ten true proposals, Poisson false
/// alarms, and a mask covering the body.
SimReference generate_reference_shot(const SyntheticIndividual& ind, Rng& rng, const SimConfig& cfg,
                                     const std::string& id = "ref");

struct Placement {
  std::size_t individual = 0;  // index into the individuals passed to generate_scene
  Eigen::Vector2d torso;       // torso center in pixels
};

struct PersonTruth {
  int individual_id = 0;
  std::array<std::optional<int>, kPartCount> proposal;  // index in the scene's part list
  std::array<OrientedRectd, kPartCount> rects;
  Boxd box;
};

struct GroundTruth {
  std::vector<PersonTruth> people;

  const PersonTruth* find(int individual_id) const;
};

struct SimScene {
  Scene scene;
  ForegroundMask mask;  // union of the visible true parts
  GroundTruth truth;
};

/// Places individuals in a shot. Individuals other than `query` (matched by
/// id) have their observed appearance pulled toward the query's prototypes
/// by confuser_similarity.
SimScene generate_scene(const std::vector<SyntheticIndividual>& individuals,
                        const std::vector<Placement>& placements, int width, int height, Rng& rng,
                        const SimConfig& cfg, const SyntheticIndividual* query = nullptr,
                        const std::string& id = "scene");

/// Shot size and placements for n people standing side by side.
struct Layout {
  int width = 0;
  int height = 0;
  std::vector<Placement> placements;
};
Layout side_by_side(const std::vector<std::size_t>& individuals, const SimConfig& cfg);

/// Paints the true parts of every placed person with colors drawn from
/// their prototypes over a gray background.
Raster render_scene(const SimScene& s, const std::vector<SyntheticIndividual>& individuals, Rng& rng,
                    const SimConfig& cfg);

}  // namespace mict
