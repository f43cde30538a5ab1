#include "mict/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mict/errors.hpp"

namespace mict {

namespace {

constexpr double kReferenceHeightRatio = 1.25;  // image height / person height
constexpr double kReferenceTorsoRow = 0.42;     // torso center, fraction of person height
constexpr double kReferenceWidthRatio = 0.7;
constexpr double kSceneHeightRatio = 1.3;
constexpr double kSceneTorsoRow = 0.4;
constexpr double kSceneSpacing = 0.75;

double individual_scale(const SyntheticIndividual& ind, const SimConfig& cfg) {
  return ind.height / cfg.person_height;
}

Descriptor observe(const Histogram& appearance, Rng& rng, const SimConfig& cfg) {
  const Histogram noise = sparse_histogram(rng, cfg.layout.size(), cfg.prototype_bins);
  return Descriptor{mix(appearance, noise, cfg.descriptor_noise), false, {}};
}

// Spurious proposal somewhere in the shot with random appearance.
PartProposal false_alarm(Part part, int width, int height, double scale, Rng& rng,
                         const SimConfig& cfg, const std::string& source) {
  PartProposal p;
  p.part = part;
  p.x = rng.uniform(0.0, width);
  p.y = rng.uniform(0.0, height);
  p.theta = rng.uniform(-std::numbers::pi / 4, std::numbers::pi / 4);
  p.s = scale * std::exp(rng.normal(0.0, 0.1));
  p.score = rng.uniform(0.1, 0.6);
  p.descriptor = Descriptor{sparse_histogram(rng, cfg.layout.size(), cfg.prototype_bins), false, {}};
  p.source_id = source;
  return p;
}

}  // namespace

void validate(const SimConfig& cfg) {
  auto check = [](bool ok, const char* what) {
    if (!ok) fail(ErrorKind::ContractViolation, what);
  };
  check(cfg.shots_per_individual >= 1, "shots_per_individual must be at least 1");
  check(cfg.pose_noise.position >= 0 && cfg.pose_noise.theta >= 0 && cfg.pose_noise.log_scale >= 0,
        "pose noise must be non-negative");
  check(cfg.descriptor_noise >= 0 && cfg.descriptor_noise <= 1, "descriptor_noise must lie in [0, 1]");
  check(cfg.false_alarm_rate >= 0 && std::isfinite(cfg.false_alarm_rate),
        "false_alarm_rate must be non-negative");
  check(cfg.occlusion_rate >= 0 && cfg.occlusion_rate <= 1, "occlusion_rate must lie in [0, 1]");
  check(cfg.confuser_similarity >= 0 && cfg.confuser_similarity <= 1,
        "confuser_similarity must lie in [0, 1]");
  check(cfg.person_height > 0, "person_height must be positive");
  check(cfg.prototype_bins >= 1 && cfg.prototype_bins <= cfg.layout.size(),
        "prototype_bins must lie in [1, histogram size]");
  check(cfg.symmetric_perturbation >= 0 && cfg.symmetric_perturbation <= 1,
        "symmetric_perturbation must lie in [0, 1]");
}

Histogram sparse_histogram(Rng& rng, int size, int nonzero) {
  Histogram h = Histogram::Zero(size);
  for (int k = 0; k < nonzero; ++k) h[static_cast<Eigen::Index>(rng.index(size))] += rng.uniform(0.2, 1.0);
  return h / h.sum();
}

Histogram mix(const Histogram& a, const Histogram& b, double w) {
  Histogram h = (1.0 - w) * a + w * b;
  return h / h.sum();
}

SyntheticIndividual generate_individual(Rng& rng, const SimConfig& cfg, int id) {
  validate(cfg);
  SyntheticIndividual ind;
  ind.id = id;
  ind.height = cfg.person_height * std::exp(rng.normal(0.0, cfg.height_spread));
  for (Part p : kAllParts) {
    const auto partner = symmetry_partner(p);
    if (partner && index(*partner) < index(p)) {
      const Histogram noise = sparse_histogram(rng, cfg.layout.size(), cfg.prototype_bins);
      ind.prototype[index(p)] = mix(ind.prototype[index(*partner)], noise, cfg.symmetric_perturbation);
    } else {
      ind.prototype[index(p)] = sparse_histogram(rng, cfg.layout.size(), cfg.prototype_bins);
    }
  }
  for (auto& a : ind.rest_angle) a = rng.uniform(-cfg.rest_angle_spread, cfg.rest_angle_spread);
  return ind;
}

std::vector<SyntheticIndividual> generate_population(const SimConfig& cfg) {
  std::vector<SyntheticIndividual> out;
  for (std::size_t i = 0; i < cfg.n_individuals; ++i) {
    Rng rng(derive_seed(cfg.seed, i));
    out.push_back(generate_individual(rng, cfg, static_cast<int>(i)));
  }
  return out;
}

std::array<PartProposal, kPartCount> generate_pose(const SyntheticIndividual& ind,
                                                   const Eigen::Vector2d& torso, Rng& rng,
                                                   const SimConfig& cfg) {
  const double H = cfg.person_height;
  const PoseNoise& n = cfg.pose_noise;
  std::array<PartProposal, kPartCount> pose;
  for (Part p : kAllParts) pose[index(p)].part = p;

  PartProposal& root = pose[index(Part::Torso)];
  root.x = torso.x();
  root.y = torso.y();
  root.theta = rng.normal(0.0, n.theta);
  root.s = individual_scale(ind, cfg) * std::exp(rng.normal(0.0, n.log_scale));

  // Links are ordered parents first. The child is placed so that its
  // joint-frame displacement from the parent is the rest displacement plus
  // independent Gaussian noise.
  for (std::size_t ji = 0; ji < kJointCount; ++ji) {
    const Joint j = static_cast<Joint>(ji);
    const PartProposal& parent = pose[index(link(j).parent)];
    PartProposal& child = pose[index(link(j).child)];
    const Eigen::Vector2d du(rng.normal(0.0, n.position), rng.normal(0.0, n.position));
    const double dtheta = rng.normal(0.0, n.theta);
    const double dls = rng.normal(0.0, n.log_scale);

    const Eigen::Vector2d parent_anchor = joint_transform(parent, j, H, ind.body).anchor;
    const Eigen::Vector2d child_anchor = parent_anchor - parent.s * H * (rotation(parent.theta) * du);
    child.theta = wrap_angle(parent.theta + ind.rest_angle[ji] + dtheta);
    child.s = parent.s * std::exp(-dls);
    const Eigen::Vector2d off = ind.body.offset(j, child.part) * child.s * H;
    const Eigen::Vector2d c = child_anchor - rotation(child.theta) * off;
    child.x = c.x();
    child.y = c.y();
  }
  return pose;
}

SimReference generate_reference_shot(const SyntheticIndividual& ind, Rng& rng, const SimConfig& cfg,
                                     const std::string& id) {
  validate(cfg);
  SimReference out;
  ReferenceShot& shot = out.shot;
  shot.id = id;
  shot.width = static_cast<int>(std::lround(kReferenceWidthRatio * ind.height));
  shot.height = static_cast<int>(std::lround(kReferenceHeightRatio * ind.height));
  const Eigen::Vector2d torso(0.5 * shot.width, kReferenceTorsoRow * ind.height);
  const auto pose = generate_pose(ind, torso, rng, cfg);

  ForegroundMask mask(shot.width, shot.height);
  for (Part p : kAllParts) {
    PartProposal prop = pose[index(p)];
    prop.score = rng.uniform(0.6, 1.0);
    prop.descriptor = observe(ind.prototype[index(p)], rng, cfg);
    prop.source_id = id;
    mask.fill(rect_of(prop, cfg.person_height, ind.body));
    out.annotation.parts[index(p)] = prop;
    shot.proposals.push_back(prop);
  }
  out.annotation.person_height = cfg.person_height;
  const double scale = individual_scale(ind, cfg);
  for (Part p : kAllParts) {
    const int count = rng.poisson(cfg.false_alarm_rate);
    for (int k = 0; k < count; ++k)
      shot.proposals.push_back(false_alarm(p, shot.width, shot.height, scale, rng, cfg, id));
  }
  shot.mask = std::move(mask);
  return out;
}

const PersonTruth* GroundTruth::find(int individual_id) const {
  for (const auto& p : people)
    if (p.individual_id == individual_id) return &p;
  return nullptr;
}

SimScene generate_scene(const std::vector<SyntheticIndividual>& individuals,
                        const std::vector<Placement>& placements, int width, int height, Rng& rng,
                        const SimConfig& cfg, const SyntheticIndividual* query,
                        const std::string& id) {
  validate(cfg);
  if (width <= 0 || height <= 0) fail(ErrorKind::ContractViolation, "scene size must be positive");
  SimScene out;
  out.scene.width = width;
  out.scene.height = height;
  out.scene.person_height = cfg.person_height;
  out.scene.id = id;
  out.mask = ForegroundMask(width, height);

  double mean_scale = 0.0;
  for (const auto& pl : placements) {
    if (pl.individual >= individuals.size())
      fail(ErrorKind::ContractViolation, "placement refers to an unknown individual");
    const SyntheticIndividual& ind = individuals[pl.individual];
    mean_scale += individual_scale(ind, cfg);
    const auto pose = generate_pose(ind, pl.torso, rng, cfg);
    const bool distractor = query != nullptr && query->id != ind.id;

    PersonTruth truth;
    truth.individual_id = ind.id;
    for (Part p : kAllParts) {
      const PartProposal& true_pose = pose[index(p)];
      const OrientedRectd r = rect_of(true_pose, cfg.person_height, ind.body);
      truth.rects[index(p)] = r;
      truth.box.extend(r.bounds());
      // Draw every random quantity even for occluded parts so that the
      // occlusion rate does not shift the remaining stream.
      const bool occluded = rng.uniform() < cfg.occlusion_rate;
      const Histogram appearance = distractor ? mix(ind.prototype[index(p)], query->prototype[index(p)],
                                                    cfg.confuser_similarity)
                                              : ind.prototype[index(p)];
      PartProposal prop = true_pose;
      prop.score = rng.uniform(0.6, 1.0);
      prop.descriptor = observe(appearance, rng, cfg);
      prop.source_id = id;
      if (occluded) continue;
      auto& list = out.scene.proposals[index(p)];
      truth.proposal[index(p)] = static_cast<int>(list.size());
      list.push_back(prop);
      out.mask.fill(r);
    }
    out.truth.people.push_back(truth);
  }
  mean_scale = placements.empty() ? 1.0 : mean_scale / static_cast<double>(placements.size());
  for (Part p : kAllParts) {
    const int count = rng.poisson(cfg.false_alarm_rate);
    for (int k = 0; k < count; ++k)
      out.scene.proposals[index(p)].push_back(false_alarm(p, width, height, mean_scale, rng, cfg, id));
  }
  return out;
}

Layout side_by_side(const std::vector<std::size_t>& individuals, const SimConfig& cfg) {
  const double H = cfg.person_height;
  Layout l;
  l.width = static_cast<int>(std::lround(kSceneSpacing * H * static_cast<double>(individuals.size())));
  l.height = static_cast<int>(std::lround(kSceneHeightRatio * H));
  for (std::size_t k = 0; k < individuals.size(); ++k)
    l.placements.push_back({individuals[k], {kSceneSpacing * H * (static_cast<double>(k) + 0.5), kSceneTorsoRow * H}});
  return l;
}

Raster render_scene(const SimScene& s, const std::vector<SyntheticIndividual>& individuals, Rng& rng,
                    const SimConfig& cfg) {
  Raster img(s.scene.width, s.scene.height);
  std::fill(img.pixels.begin(), img.pixels.end(), std::uint8_t{128});
  // Torso first so that limbs and head are painted over it.
  constexpr std::array<Part, kPartCount> order = {
      Part::Torso, Part::LeftThigh, Part::RightThigh, Part::LeftCalf, Part::RightCalf,
      Part::LeftUpperArm, Part::RightUpperArm, Part::LeftForearm, Part::RightForearm, Part::Head};
  for (const auto& person : s.truth.people) {
    const SyntheticIndividual* ind = nullptr;
    for (const auto& i : individuals)
      if (i.id == person.individual_id) ind = &i;
    if (ind == nullptr) fail(ErrorKind::ContractViolation, "ground truth refers to an unknown individual");
    for (Part p : order) {
      if (!person.proposal[index(p)]) continue;
      const Histogram& proto = ind->prototype[index(p)];
      for_each_pixel_in(person.rects[index(p)], img.width, img.height, true, [&](int x, int y) {
        // Inverse-CDF draw of a bin, then the color at its center.
        double u = rng.uniform();
        Eigen::Index bin = 0;
        while (bin + 1 < proto.size() && u >= proto[bin]) u -= proto[bin++];
        const Eigen::Vector3d hsv = cfg.layout.center(static_cast<int>(bin));
        img.set(x, y, hsv_to_rgb({hsv.x(), hsv.y(), hsv.z()}));
      });
    }
  }
  return img;
}

}  // namespace mict
