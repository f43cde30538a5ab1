#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mict/evaluation.hpp"
#include "mict/io.hpp"
#include "mict/simulator.hpp"

namespace mict {

// Synthetic re-identification protocol: every individual is a query with M
// reference shots, a gallery of one segmented shot per individual, and a
// two-person shot in which it has to be localized.
struct ReidQuery {
  std::string id;
  int individual = 0;
  std::vector<SceneBundle> references;
  std::vector<SceneBundle> gallery;
  std::string true_gallery_id;
  std::optional<SceneBundle> shot;  // truth lists the query individual
  std::optional<Raster> shot_render;
};

struct ReidDataset {
  std::vector<ReidQuery> queries;
  std::vector<BodyAnnotation> annotations;  // true reference poses, for fit_kinematics
};

/// Localization scenes use `loc`, everything else `cfg`. Both share the
/// population drawn from cfg.seed.
ReidDataset simulate_reid(const SimConfig& cfg, const SimConfig& loc, bool render = false);

/// cfg with confuser_similarity 0.9 and occlusion 0.3.
SimConfig localization_config(const SimConfig& cfg);

struct LocalizationRow {
  std::string query_id;
  std::optional<Boxd> sampler_box;
  std::optional<Boxd> greedy_box;
  Boxd truth;
  double score = 0.0;
  bool sampler_ok = false;
  bool greedy_ok = false;
};

struct ReidReport {
  std::vector<RankedResult> rankings;
  CmcCurve cmc;
  std::vector<LocalizationRow> localization;
  double sampler_rate = 0.0;
  double greedy_rate = 0.0;
};

/// Query q runs its chains with seed derive_seed(cfg.chain.seed, q).
/// Queries are independent and may run on `threads` workers; the report
/// does not depend on the thread count.
ReidReport evaluate_reid(const std::vector<ReidQuery>& queries, const KinematicsModel& km,
                         const MatchConfig& cfg, const BuildConfig& build, std::size_t threads = 1);

void write_localization(std::ostream& os, const std::vector<LocalizationRow>& rows);

// Directory layout: manifest.json and queries/<id>/{references/*,gallery/*,shot}
// as scene bundles. Annotations are not stored.
void write_dataset(const std::filesystem::path& dir, const ReidDataset& d);
ReidDataset read_dataset(const std::filesystem::path& dir);

}  // namespace mict
