#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "mict/evaluation.hpp"
#include "mict/kinematics.hpp"
#include "mict/posterior.hpp"
#include "mict/proposal.hpp"
#include "mict/sampler.hpp"
#include "mict/simulator.hpp"
#include "mict/template_builder.hpp"

namespace mict {

using Json = nlohmann::ordered_json;

// Proposal records: {part, x, y, theta, s, score, source_id, descriptor?,
// descriptor_empty?, aux?}. descriptor holds the histogram bins.
Json to_json(const PartProposal& p);
PartProposal proposal_from_json(const Json& j);

/// One JSON object per line; blank lines are skipped.
std::vector<PartProposal> read_proposals(const std::filesystem::path& path);
void write_proposals(const std::filesystem::path& path, const std::vector<PartProposal>& props);

Json to_json(const Template& t);
Template template_from_json(const Json& j);
Template read_template(const std::filesystem::path& path);
void write_template(const std::filesystem::path& path, const Template& t);

Json to_json(const KinematicsModel& km);
KinematicsModel kinematics_from_json(const Json& j);
KinematicsModel read_kinematics(const std::filesystem::path& path);
void write_kinematics(const std::filesystem::path& path, const KinematicsModel& km);

/// Every tunable of a run. Missing keys keep their defaults; unknown keys
/// are rejected.
struct RunConfig {
  BuildConfig build;
  MatchConfig match;
  SimConfig sim;
};

RunConfig config_from_json(const Json& j);
Json to_json(const RunConfig& cfg);
RunConfig read_config(const std::filesystem::path& path);

// Delimited-text reports. Reals are written with 12 significant digits.
void write_graph(std::ostream& os, const CandidacyGraph& g);
void write_breakdown(std::ostream& os, const CandidacyGraph& g, const ScoreBreakdown& b);
void write_trace(std::ostream& os, const std::vector<TraceRecord>& trace);
void write_truth(std::ostream& os, const GroundTruth& truth);
GroundTruth read_truth(const std::filesystem::path& path);
void write_cmc(std::ostream& os, const CmcCurve& c);
void write_ranking(std::ostream& os, const RankedResult& r);

/// A shot on disk: scene.json (id, width, height, person_height),
/// proposals.jsonl, and optionally mask.pbm, truth.csv and render.ppm.
struct SceneBundle {
  std::string id;
  int width = 0;
  int height = 0;
  double person_height = kDefaultPersonHeight;
  std::vector<PartProposal> proposals;
  std::optional<ForegroundMask> mask;
  std::optional<GroundTruth> truth;
};

SceneBundle read_bundle(const std::filesystem::path& dir);
void write_bundle(const std::filesystem::path& dir, const SceneBundle& b,
                  const Raster* render = nullptr);

ReferenceShot to_reference(const SceneBundle& b);
Scene to_scene(const SceneBundle& b, const BuildConfig& cfg);

struct OverlayBox {
  Boxd box;
  std::string color;
  std::string label;
};

/// SVG of the shot with part rectangles of the activated vertices and any
/// extra boxes. `background` is referenced by path, not embedded.
void write_svg(std::ostream& os, int width, int height, const std::vector<OrientedRectd>& parts,
               const std::vector<OverlayBox>& boxes, const std::string& background = {});

// Whole-file helpers that raise ErrorKind::Io.
Json read_json(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace mict
