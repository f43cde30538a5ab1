#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mict/candidacy_graph.hpp"
#include "mict/posterior.hpp"
#include "mict/sampler.hpp"

namespace mict {

/// Everything needed to score one template against one shot.
// Matching starts from the greedy labeling: from all-zero, single-vertex
// moves fill every part with arbitrary candidates first and the body
// clusters that would replace them are rarely accepted within 500 steps.
struct MatchConfig {
  GraphParams graph;
  PriorParams prior;
  ChainConfig chain = greedy_chain();
  std::size_t chains = 1;

  static ChainConfig greedy_chain() {
    ChainConfig c;
    c.greedy_init = true;
    return c;
  }
};

struct RankedResult {
  std::string query_id;
  std::vector<std::pair<std::string, double>> ranking;  // (gallery id, score), best first
};

struct CmcCurve {
  std::vector<double> rates;  // rates[r - 1] = rank-r matching rate
};

/// Scores every gallery shot by the best log-posterior found and sorts
/// descending, ties by gallery id. Items whose graph cannot be built score
/// -inf.
RankedResult rank_gallery(const Template& t, const std::vector<Scene>& gallery,
                          const KinematicsModel& km, const MatchConfig& cfg,
                          const std::string& query_id = "query");

CmcCurve cmc(const std::vector<RankedResult>& results,
             const std::map<std::string, std::string>& truth);

/// Tight axis-aligned box of the activated target rectangles.
Boxd person_box(const MatchState& state, const CandidacyGraph& g);

bool pascal_match(const Boxd& pred, const Boxd& gt);

struct ShotMatch {
  MatchState state;
  Boxd box;
  double score = 0.0;
  CandidacyGraph graph;
};

/// Graph construction, sampling and localization on one shot; throws a
/// no-localization error when nothing is matched.
ShotMatch match_in_shot(const Template& t, const Scene& scene, const KinematicsModel& km,
                        const MatchConfig& cfg);

/// Baseline without context: each part independently takes its lowest
/// appearance-distance target.
struct GreedyMatch {
  std::array<std::optional<int>, kPartCount> target;
  Boxd box;
};

GreedyMatch greedy_match(const Template& t, const Scene& scene, const AuxMetric& aux = zero_aux_metric);

}  // namespace mict
