#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "mict/candidacy_graph.hpp"

namespace mict {

using Labeling = std::vector<std::uint8_t>;

struct PriorParams {
  double alpha_u = 12.0;        // per unmatched part
  double alpha_s = 3.0;         // per distinct scale level
  double scale_quantum = 0.1;   // log-scale bin width
};

/// Labeling plus the counts derived from it.
struct MatchState {
  Labeling labeling;
  int unmatched = 0;     // N_u
  int scale_levels = 0;  // N_s
};

int scale_bin(double s, double quantum);

MatchState derive_state(const CandidacyGraph& g, const Labeling& l, double scale_quantum = 0.1);

double log_likelihood(const CandidacyGraph& g, const Labeling& l);
double log_prior(const CandidacyGraph& g, const Labeling& l, const PriorParams& p = {});
double log_posterior(const CandidacyGraph& g, const Labeling& l, const PriorParams& p = {});

// Log contribution of an edge whose endpoints are both active; empty when
// the pair is forbidden (log 0).
std::optional<double> edge_log_term(const Edge& e);

struct EdgeContribution {
  int edge;
  std::optional<double> value;  // empty = -inf
};

struct ScoreBreakdown {
  double likelihood = 0.0;
  int unmatched = 0;
  int scale_levels = 0;
  double unmatched_term = 0.0;
  double scale_term = 0.0;
  double compatible_term = 0.0;
  double competitive_term = 0.0;
  int forbidden_pairs = 0;
  std::vector<EdgeContribution> edges;  // active-active edges only
  double total = 0.0;
};

ScoreBreakdown score_breakdown(const CandidacyGraph& g, const Labeling& l, const PriorParams& p = {});

/// Incrementally maintained log-posterior for one chain. Flipping a vertex
/// touches only its incident edges.
class ScoreAccumulator {
 public:
  ScoreAccumulator(const CandidacyGraph& g, const PriorParams& p, Labeling initial);

  const Labeling& labeling() const { return labels_; }
  void flip(int v);
  double score() const;
  int unmatched() const { return g_->parts_present() - matched_parts_; }
  int scale_levels() const { return static_cast<int>(scale_counts_.size()); }

 private:
  const CandidacyGraph* g_;
  PriorParams params_;
  Labeling labels_;
  std::vector<int> bins_;
  std::array<int, kPartCount> active_real_{};
  int matched_parts_ = 0;
  std::map<int, int> scale_counts_;
  double appearance_ = 0.0;
  double edge_sum_ = 0.0;
  int forbidden_ = 0;
};

}  // namespace mict
