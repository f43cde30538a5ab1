#include "mict/evaluation.hpp"

#include <algorithm>
#include <limits>

#include "mict/errors.hpp"

namespace mict {

RankedResult rank_gallery(const Template& t, const std::vector<Scene>& gallery,
                          const KinematicsModel& km, const MatchConfig& cfg,
                          const std::string& query_id) {
  if (gallery.empty()) fail(ErrorKind::ContractViolation, "gallery is empty");
  RankedResult out;
  out.query_id = query_id;
  for (const Scene& item : gallery) {
    double score = -std::numeric_limits<double>::infinity();
    try {
      const CandidacyGraph g = build_graph(t, item, km, cfg.graph);
      score = run_chains(g, cfg.prior, cfg.chain, cfg.chains).best_score;
    } catch (const Error&) {
    }
    out.ranking.emplace_back(item.id, score);
  }
  std::sort(out.ranking.begin(), out.ranking.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  for (std::size_t i = 1; i < out.ranking.size(); ++i)
    if (out.ranking[i].first == out.ranking[i - 1].first)
      fail(ErrorKind::ContractViolation, "duplicate gallery id " + out.ranking[i].first);
  return out;
}

CmcCurve cmc(const std::vector<RankedResult>& results,
             const std::map<std::string, std::string>& truth) {
  std::size_t length = 0;
  for (const auto& r : results) length = std::max(length, r.ranking.size());
  std::vector<double> hits(length, 0.0);
  for (const auto& r : results) {
    const auto it = truth.find(r.query_id);
    if (it == truth.end()) fail(ErrorKind::ContractViolation, "no ground truth for query " + r.query_id);
    for (std::size_t k = 0; k < r.ranking.size(); ++k) {
      if (r.ranking[k].first == it->second) {
        hits[k] += 1.0;
        break;
      }
    }
  }
  CmcCurve c;
  double cumulative = 0.0;
  for (double h : hits) {
    cumulative += h;
    c.rates.push_back(results.empty() ? 0.0 : cumulative / static_cast<double>(results.size()));
  }
  return c;
}

Boxd person_box(const MatchState& state, const CandidacyGraph& g) {
  if (state.labeling.size() != g.size())
    fail(ErrorKind::ContractViolation, "state does not belong to the graph");
  Boxd box;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Vertex& v = g.vertex(i);
    if (state.labeling[i] && v.target_rect) box.extend(v.target_rect->bounds());
  }
  if (box.isEmpty()) fail(ErrorKind::NoLocalization, "no part is matched");
  return box;
}

bool pascal_match(const Boxd& pred, const Boxd& gt) { return iou(pred, gt) > 0.5; }

ShotMatch match_in_shot(const Template& t, const Scene& scene, const KinematicsModel& km,
                        const MatchConfig& cfg) {
  ShotMatch out;
  out.graph = build_graph(t, scene, km, cfg.graph);
  const ChainResult r = run_chains(out.graph, cfg.prior, cfg.chain, cfg.chains);
  out.state = r.best_state;
  out.score = r.best_score;
  out.box = person_box(out.state, out.graph);
  return out;
}

GreedyMatch greedy_match(const Template& t, const Scene& scene, const AuxMetric& aux) {
  GreedyMatch out;
  for (Part p : kAllParts) {
    double best = std::numeric_limits<double>::infinity();
    const auto& targets = scene.at(p);
    for (std::size_t gi = 0; gi < targets.size(); ++gi) {
      for (const auto& ref : t.at(p)) {
        const double d = part_distance(ref.descriptor, targets[gi].descriptor, aux);
        if (d < best) {
          best = d;
          out.target[index(p)] = static_cast<int>(gi);
        }
      }
    }
    if (out.target[index(p)])
      out.box.extend(rect_of(targets[*out.target[index(p)]], scene.person_height).bounds());
  }
  if (out.box.isEmpty()) fail(ErrorKind::NoLocalization, "scene has no proposals");
  return out;
}

}  // namespace mict
