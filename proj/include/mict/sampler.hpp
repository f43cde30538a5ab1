#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "mict/candidacy_graph.hpp"
#include "mict/posterior.hpp"
#include "mict/random.hpp"

namespace mict {

enum class SeedSelection {
  UniformVertex,   // seed vertex uniform over the graph; clusters weighted by size
  UniformCluster,  // every cluster equally likely (switches all edges each step)
};

enum class Coupling {
  Direct,      // the seed cluster and the clusters joined to it by an "on" competitive edge
  Transitive,  // closure over "on" competitive edges
};

struct ChainConfig {
  std::size_t iterations = 500;
  std::size_t burn_in = 0;
  std::uint64_t seed = 1;
  bool record_trace = false;
  SeedSelection seed_selection = SeedSelection::UniformVertex;
  Coupling coupling = Coupling::Direct;
  bool greedy_init = false;
  // Switching probability of same-part edges. The posterior still treats
  // them as hard exclusions; values < 1 keep every move reversible.
  double same_part_switch = 0.6;
  // Switching probability between a template copy and the primary vertex of
  // the same target: lets a chain move off a dominated copy. Kept small as
  // every such edge adds to the cost of activating the primary.
  double copy_switch = 0.3;
  // Fraction of iterations that switch only competitive edges: the move is
  // then a single vertex together with the vertices it displaces. Both move
  // types leave the posterior invariant, so any mixture does too.
  double local_move_rate = 0.5;
  // Cap on switching probabilities of the remaining edges.
  double max_switch = 0.95;
};

void validate(const ChainConfig& cfg);

bool edge_consistent(const Edge& e, const Labeling& l);

/// Per edge: 1 if its endpoint labels agree with its polarity (equal for
/// compatible edges, different for competitive ones).
std::vector<std::uint8_t> classify_edges(const CandidacyGraph& g, const Labeling& l);

/// Per vertex: 1 if it has the lowest appearance distance among the
/// vertices sharing its part and target (the first one on ties).
std::vector<std::uint8_t> primary_vertices(const CandidacyGraph& g);

/// Probability with which a consistent edge is switched on. Only edges
/// between primary vertices are ever switched, so that a cluster never
/// holds two template copies of one target. Symmetry edges use their
/// probability rescaled above the 1/e floor of exp(-D).
std::vector<double> switching_probabilities(const CandidacyGraph& g, const ChainConfig& cfg);

/// The same with every compatible edge off.
std::vector<double> local_switching_probabilities(const CandidacyGraph& g, const ChainConfig& cfg);

/// Clusters (components of "on" compatible edges) joined by "on"
/// competitive edges.
struct CompositeCluster {
  std::vector<std::vector<int>> clusters;  // clusters[0] holds the seed
  Coupling coupling_mode = Coupling::Direct;
  bool size_weighted = true;  // seed cluster chosen in proportion to its size
  std::vector<int> coupling;  // indices of "on" competitive edges inside the composite

  std::vector<int> vertices() const;  // sorted
  std::size_t size() const;
};

/// Reusable scratch space for composite-cluster generation on one graph.
class ClusterSampler {
 public:
  ClusterSampler(const CandidacyGraph& g, std::vector<double> switch_prob,
                 SeedSelection selection = SeedSelection::UniformVertex,
                 Coupling coupling = Coupling::Direct);

  /// Step I: switch consistent edges on with their probability, pick a seed
  /// cluster and collect every cluster reachable over "on" competitive
  /// edges. Only edges incident to the result are actually drawn in
  /// UniformVertex mode; the distribution is the same as switching all.
  CompositeCluster sample(const Labeling& l, Rng& rng);

  // Seeds the composite at a given vertex (test hook).
  CompositeCluster sample_from(int seed, const Labeling& l, Rng& rng);

  const std::vector<double>& switch_prob() const { return rho_; }

 private:
  enum : std::uint8_t { kUnsampled = 0, kOff = 1, kOn = 2 };

  bool edge_on(int e, const Labeling& l, Rng& rng);
  void grow_cluster(int seed, int cluster_id, const Labeling& l, Rng& rng,
                    std::vector<int>& members);
  CompositeCluster collect(int seed, const Labeling& l, Rng& rng);
  void reset();

  const CandidacyGraph* g_;
  std::vector<double> rho_;
  SeedSelection selection_;
  Coupling coupling_;
  std::vector<std::uint8_t> edge_state_;
  std::vector<int> cluster_of_;
  std::vector<int> touched_edges_;
  std::vector<int> touched_vertices_;
};

CompositeCluster sample_composite_cluster(const CandidacyGraph& g, const Labeling& l,
                                          const std::vector<double>& switch_prob, Rng& rng);

/// Step II: flips every vertex of the composite cluster in place; returns
/// the changed vertices.
std::vector<int> relabel(Labeling& l, const CompositeCluster& vcc);

/// log q(M'->M)/q(M->M'). Cut edges that had to be off contribute
/// log(1 - rho_e) when consistent under the new state and minus that when
/// consistent under the old one. In Direct mode the competitive cut edges
/// depend on which cluster seeded the move, and the probability is summed
/// over every cluster that could have.
double log_proposal_ratio(const CandidacyGraph& g, const Labeling& before, const Labeling& after,
                          const CompositeCluster& vcc, const std::vector<double>& switch_prob);

double proposal_ratio(const CandidacyGraph& g, const Labeling& before, const Labeling& after,
                      const CompositeCluster& vcc, const std::vector<double>& switch_prob);

/// Metropolis-Hastings test with acceptance min(1, ratio * exp(new - old)),
/// scores being log-posteriors. A -inf proposal is never accepted.
bool mh_accept(double score, double new_score, double log_ratio, Rng& rng);

struct TraceRecord {
  std::size_t iteration = 0;
  std::size_t cluster_size = 0;
  bool accepted = false;
  double log_posterior = 0.0;
};

struct ChainResult {
  MatchState best_state;
  double best_score = 0.0;
  double acceptance_rate = 0.0;
  Labeling final_labeling;
  std::vector<TraceRecord> trace;
};

// Called after every post-burn-in iteration with the current state.
using ChainObserver = std::function<void(std::size_t iteration, const Labeling& l, double score)>;

Labeling greedy_labeling(const CandidacyGraph& g, const PriorParams& p);

/// Composite cluster sampling from the all-zero labeling (or the greedy one);
/// tracks the best state visited. Deterministic for a given seed.
ChainResult run_chain(const CandidacyGraph& g, const PriorParams& p, const ChainConfig& cfg,
                      const ChainObserver& observer = {});

/// Independent chains with derived seeds; the best result wins, earlier
/// chains winning ties.
ChainResult run_chains(const CandidacyGraph& g, const PriorParams& p, const ChainConfig& cfg,
                       std::size_t chains);

}  // namespace mict
