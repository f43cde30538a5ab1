#include "mict/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <numeric>
#include <thread>

#include "mict/errors.hpp"

namespace mict {

void validate(const ChainConfig& cfg) {
  if (cfg.iterations < 1) fail(ErrorKind::ContractViolation, "iterations must be at least 1");
  if (!(cfg.same_part_switch >= 0.0 && cfg.same_part_switch < 1.0))
    fail(ErrorKind::ContractViolation, "same_part_switch must lie in [0, 1)");
  if (!(cfg.copy_switch >= 0.0 && cfg.copy_switch < 1.0))
    fail(ErrorKind::ContractViolation, "copy_switch must lie in [0, 1)");
  if (!(cfg.local_move_rate >= 0.0 && cfg.local_move_rate <= 1.0))
    fail(ErrorKind::ContractViolation, "local_move_rate must lie in [0, 1]");
  if (!(cfg.max_switch >= 0.0 && cfg.max_switch < 1.0))
    fail(ErrorKind::ContractViolation, "max_switch must lie in [0, 1)");
}

bool edge_consistent(const Edge& e, const Labeling& l) {
  const bool same = l[e.a] == l[e.b];
  return e.positive() ? same : !same;
}

std::vector<std::uint8_t> classify_edges(const CandidacyGraph& g, const Labeling& l) {
  std::vector<std::uint8_t> out(g.edges().size());
  for (std::size_t e = 0; e < out.size(); ++e) out[e] = edge_consistent(g.edge(e), l) ? 1 : 0;
  return out;
}

std::vector<std::uint8_t> primary_vertices(const CandidacyGraph& g) {
  std::map<std::pair<std::size_t, int>, int> best;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Vertex& v = g.vertex(i);
    const std::pair<std::size_t, int> key{index(v.part), v.target.value_or(-1)};
    auto [it, inserted] = best.try_emplace(key, static_cast<int>(i));
    if (!inserted && v.appearance < g.vertex(it->second).appearance) it->second = static_cast<int>(i);
  }
  std::vector<std::uint8_t> out(g.size(), 0);
  for (const auto& [key, v] : best) out[v] = 1;
  return out;
}

// exp(-D) never drops below 1/e for distances in [0, 1]; only the part
// above that baseline is evidence of a shared appearance.
double symmetry_switch(double p) {
  const double base = std::exp(-1.0);
  return std::max(0.0, (p - base) / (1.0 - base));
}

std::vector<double> switching_probabilities(const CandidacyGraph& g, const ChainConfig& cfg) {
  const std::vector<std::uint8_t> primary = primary_vertices(g);
  std::vector<double> rho(g.edges().size());
  for (std::size_t e = 0; e < rho.size(); ++e) {
    const Edge& edge = g.edge(e);
    const Vertex& a = g.vertex(edge.a);
    const Vertex& b = g.vertex(edge.b);
    if (edge.kind == EdgeKind::SamePart && primary[edge.a] != primary[edge.b] && a.target == b.target)
      rho[e] = cfg.copy_switch;
    else if (!(primary[edge.a] && primary[edge.b]))
      rho[e] = 0.0;
    else if (edge.kind == EdgeKind::SamePart)
      rho[e] = cfg.same_part_switch;
    else if (edge.kind == EdgeKind::Symmetry)
      rho[e] = std::min(symmetry_switch(edge.prob), cfg.max_switch);
    else
      rho[e] = std::min(edge.prob, cfg.max_switch);
  }
  return rho;
}

std::vector<double> local_switching_probabilities(const CandidacyGraph& g, const ChainConfig& cfg) {
  std::vector<double> rho = switching_probabilities(g, cfg);
  for (std::size_t e = 0; e < rho.size(); ++e)
    if (g.edge(e).positive()) rho[e] = 0.0;
  return rho;
}

std::vector<int> CompositeCluster::vertices() const {
  std::vector<int> out;
  for (const auto& c : clusters) out.insert(out.end(), c.begin(), c.end());
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t CompositeCluster::size() const {
  std::size_t n = 0;
  for (const auto& c : clusters) n += c.size();
  return n;
}

ClusterSampler::ClusterSampler(const CandidacyGraph& g, std::vector<double> switch_prob,
                               SeedSelection selection, Coupling coupling)
    : g_(&g),
      rho_(std::move(switch_prob)),
      selection_(selection),
      coupling_(coupling),
      edge_state_(g.edges().size(), kUnsampled),
      cluster_of_(g.size(), -1) {
  if (rho_.size() != g.edges().size())
    fail(ErrorKind::ContractViolation, "one switching probability per edge is required");
}

void ClusterSampler::reset() {
  for (int e : touched_edges_) edge_state_[e] = kUnsampled;
  for (int v : touched_vertices_) cluster_of_[v] = -1;
  touched_edges_.clear();
  touched_vertices_.clear();
}

bool ClusterSampler::edge_on(int e, const Labeling& l, Rng& rng) {
  if (edge_state_[e] == kUnsampled) {
    const bool on = edge_consistent(g_->edge(e), l) && rng.uniform() < rho_[e];
    edge_state_[e] = on ? kOn : kOff;
    touched_edges_.push_back(e);
  }
  return edge_state_[e] == kOn;
}

void ClusterSampler::grow_cluster(int seed, int cluster_id, const Labeling& l, Rng& rng,
                                  std::vector<int>& members) {
  cluster_of_[seed] = cluster_id;
  touched_vertices_.push_back(seed);
  members.push_back(seed);
  for (std::size_t head = members.size() - 1; head < members.size(); ++head) {
    const int u = members[head];
    for (int e : g_->incident(u)) {
      const Edge& edge = g_->edge(e);
      if (!edge.positive()) continue;
      const int w = edge.other(u);
      if (edge_on(e, l, rng) && cluster_of_[w] < 0) {
        cluster_of_[w] = cluster_id;
        touched_vertices_.push_back(w);
        members.push_back(w);
      }
    }
  }
}

CompositeCluster ClusterSampler::collect(int seed, const Labeling& l, Rng& rng) {
  CompositeCluster out;
  out.coupling_mode = coupling_;
  out.size_weighted = selection_ == SeedSelection::UniformVertex;
  out.clusters.emplace_back();
  grow_cluster(seed, 0, l, rng, out.clusters.back());
  const std::size_t sources = coupling_ == Coupling::Direct ? 1 : std::numeric_limits<std::size_t>::max();
  for (std::size_t c = 0; c < out.clusters.size() && c < sources; ++c) {
    for (std::size_t k = 0; k < out.clusters[c].size(); ++k) {
      const int u = out.clusters[c][k];
      for (int e : g_->incident(u)) {
        const Edge& edge = g_->edge(e);
        if (edge.positive()) continue;
        const bool was_sampled = edge_state_[e] != kUnsampled;
        if (!edge_on(e, l, rng)) continue;
        if (!was_sampled) out.coupling.push_back(e);
        const int w = edge.other(u);
        if (cluster_of_[w] < 0) {
          out.clusters.emplace_back();
          // `out.clusters` may reallocate; grow into a local and move in.
          std::vector<int> fresh;
          grow_cluster(w, static_cast<int>(out.clusters.size() - 1), l, rng, fresh);
          out.clusters.back() = std::move(fresh);
        }
      }
    }
  }
  for (auto& c : out.clusters) std::sort(c.begin(), c.end());
  std::sort(out.coupling.begin(), out.coupling.end());
  out.coupling.erase(std::unique(out.coupling.begin(), out.coupling.end()), out.coupling.end());
  return out;
}

CompositeCluster ClusterSampler::sample_from(int seed, const Labeling& l, Rng& rng) {
  if (seed < 0 || static_cast<std::size_t>(seed) >= g_->size())
    fail(ErrorKind::ContractViolation, "seed vertex out of range");
  reset();
  CompositeCluster out = collect(seed, l, rng);
  reset();
  return out;
}

CompositeCluster ClusterSampler::sample(const Labeling& l, Rng& rng) {
  if (g_->empty()) return {};
  if (selection_ == SeedSelection::UniformVertex)
    return sample_from(static_cast<int>(rng.index(g_->size())), l, rng);

  // Switch every edge, label all clusters, then pick one uniformly.
  reset();
  for (std::size_t e = 0; e < g_->edges().size(); ++e) edge_on(static_cast<int>(e), l, rng);
  std::vector<int> roots;
  std::vector<int> scratch;
  for (std::size_t v = 0; v < g_->size(); ++v) {
    if (cluster_of_[v] >= 0) continue;
    scratch.clear();
    grow_cluster(static_cast<int>(v), static_cast<int>(roots.size()), l, rng, scratch);
    roots.push_back(static_cast<int>(v));
  }
  const int seed = roots[rng.index(roots.size())];
  // Keep the edge draws, forget the labelling of clusters.
  for (int v : touched_vertices_) cluster_of_[v] = -1;
  touched_vertices_.clear();
  CompositeCluster out = collect(seed, l, rng);
  reset();
  return out;
}

CompositeCluster sample_composite_cluster(const CandidacyGraph& g, const Labeling& l,
                                          const std::vector<double>& switch_prob, Rng& rng) {
  ClusterSampler sampler(g, switch_prob);
  return sampler.sample(l, rng);
}

std::vector<int> relabel(Labeling& l, const CompositeCluster& vcc) {
  std::vector<int> changed = vcc.vertices();
  for (int v : changed) l[v] = l[v] ? 0 : 1;
  return changed;
}

namespace {

double log_sum_exp(const std::vector<double>& v) {
  const double m = *std::max_element(v.begin(), v.end());
  if (m == -std::numeric_limits<double>::infinity()) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

}  // namespace

// Transitive: every cut edge had to be off.
// Direct: the move could have been generated from any cluster that is
// coupled to all the others, so the proposal probability sums over such
// centers. Terms shared by all centers (compatible edges, couplings inside
// the composite) are unchanged by the flip and cancel.
double log_proposal_ratio(const CandidacyGraph& g, const Labeling& before, const Labeling& after,
                          const CompositeCluster& vcc, const std::vector<double>& switch_prob) {
  const std::size_t k = vcc.clusters.size();
  std::vector<int> cluster(g.size(), -1);
  for (std::size_t c = 0; c < k; ++c)
    for (int v : vcc.clusters[c]) cluster[v] = static_cast<int>(c);
  const bool transitive = vcc.coupling_mode == Coupling::Transitive;

  double log_ratio = 0.0;
  std::vector<double> cut_before(k, 0.0), cut_after(k, 0.0);
  std::vector<double> log_uncoupled(k * k, 0.0);
  for (std::size_t c = 0; c < k; ++c) {
    for (int u : vcc.clusters[c]) {
      for (int e : g.incident(u)) {
        const Edge& edge = g.edge(e);
        const int d = cluster[edge.other(u)];
        const double w = std::log1p(-switch_prob[e]);
        if (d >= 0) {
          if (!edge.positive() && d != static_cast<int>(c) && edge_consistent(edge, before))
            log_uncoupled[c * k + d] += w;
          continue;
        }
        if (edge.positive() || transitive) {
          if (edge_consistent(edge, after)) log_ratio += w;
          if (edge_consistent(edge, before)) log_ratio -= w;
        } else {
          if (edge_consistent(edge, after)) cut_after[c] += w;
          if (edge_consistent(edge, before)) cut_before[c] += w;
        }
      }
    }
  }
  if (transitive) return log_ratio;

  std::vector<double> w_before(k), w_after(k);
  for (std::size_t c = 0; c < k; ++c) {
    double base = vcc.size_weighted ? std::log(static_cast<double>(vcc.clusters[c].size())) : 0.0;
    for (std::size_t d = 0; d < k; ++d)
      if (d != c) base += std::log1p(-std::exp(log_uncoupled[c * k + d]));
    w_before[c] = base + cut_before[c];
    w_after[c] = base + cut_after[c];
  }
  return log_ratio + log_sum_exp(w_after) - log_sum_exp(w_before);
}

double proposal_ratio(const CandidacyGraph& g, const Labeling& before, const Labeling& after,
                      const CompositeCluster& vcc, const std::vector<double>& switch_prob) {
  return std::exp(log_proposal_ratio(g, before, after, vcc, switch_prob));
}

bool mh_accept(double score, double new_score, double log_ratio, Rng& rng) {
  if (std::isnan(new_score) || new_score == -std::numeric_limits<double>::infinity()) return false;
  if (log_ratio == -std::numeric_limits<double>::infinity()) return false;
  if (score == -std::numeric_limits<double>::infinity()) return true;
  const double log_alpha = log_ratio + (new_score - score);
  if (log_alpha >= 0.0) return true;
  return rng.uniform() < std::exp(log_alpha);
}

Labeling greedy_labeling(const CandidacyGraph& g, const PriorParams& p) {
  Labeling l(g.size(), 0);
  std::array<int, kPartCount> best;
  best.fill(-1);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Vertex& v = g.vertex(i);
    if (v.is_null()) continue;
    int& b = best[index(v.part)];
    if (b < 0 || v.appearance < g.vertex(b).appearance) b = static_cast<int>(i);
  }
  for (int b : best)
    if (b >= 0) l[b] = 1;
  if (!std::isfinite(log_posterior(g, l, p))) std::fill(l.begin(), l.end(), 0);
  return l;
}

ChainResult run_chain(const CandidacyGraph& g, const PriorParams& p, const ChainConfig& cfg,
                      const ChainObserver& observer) {
  validate(cfg);
  if (g.empty()) fail(ErrorKind::ContractViolation, "cannot sample an empty candidacy graph");

  Rng rng(cfg.seed);
  ClusterSampler global(g, switching_probabilities(g, cfg), cfg.seed_selection, cfg.coupling);
  ClusterSampler local(g, local_switching_probabilities(g, cfg), cfg.seed_selection, cfg.coupling);
  ScoreAccumulator acc(g, p, cfg.greedy_init ? greedy_labeling(g, p) : Labeling(g.size(), 0));

  ChainResult result;
  double score = acc.score();
  Labeling best = acc.labeling();
  double best_score = score;
  std::size_t accepted = 0;
  Labeling before;
  if (cfg.record_trace) result.trace.reserve(cfg.iterations);

  for (std::size_t it = 0; it < cfg.iterations; ++it) {
    ClusterSampler& sampler = cfg.local_move_rate > 0.0 && rng.uniform() < cfg.local_move_rate ? local : global;
    const CompositeCluster vcc = sampler.sample(acc.labeling(), rng);
    const std::vector<int> members = vcc.vertices();
    before = acc.labeling();
    for (int v : members) acc.flip(v);
    const double log_ratio = log_proposal_ratio(g, before, acc.labeling(), vcc, sampler.switch_prob());
    const double proposed = acc.score();
    const bool accept = mh_accept(score, proposed, log_ratio, rng);
    if (accept) {
      ++accepted;
      score = proposed;
      if (score > best_score) {
        best_score = score;
        best = acc.labeling();
      }
    } else {
      for (int v : members) acc.flip(v);
    }
    if (cfg.record_trace) result.trace.push_back({it, members.size(), accept, score});
    if (observer && it >= cfg.burn_in) observer(it, acc.labeling(), score);
  }

  result.best_state = derive_state(g, best, p.scale_quantum);
  result.best_score = log_posterior(g, best, p);
  result.acceptance_rate = static_cast<double>(accepted) / static_cast<double>(cfg.iterations);
  result.final_labeling = acc.labeling();
  return result;
}

ChainResult run_chains(const CandidacyGraph& g, const PriorParams& p, const ChainConfig& cfg,
                       std::size_t chains) {
  if (chains < 1) fail(ErrorKind::ContractViolation, "at least one chain is required");
  std::vector<ChainResult> results(chains);
  auto one = [&](std::size_t c) {
    ChainConfig local = cfg;
    local.seed = c == 0 ? cfg.seed : derive_seed(cfg.seed, c);
    results[c] = run_chain(g, p, local);
  };
  if (chains == 1) {
    one(0);
  } else {
    // Each chain owns its slot; the merge below runs in chain order.
    std::vector<std::exception_ptr> errors(chains);
    std::vector<std::thread> workers;
    workers.reserve(chains);
    for (std::size_t c = 0; c < chains; ++c)
      workers.emplace_back([&, c] {
        try {
          one(c);
        } catch (...) {
          errors[c] = std::current_exception();
        }
      });
    for (auto& w : workers) w.join();
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  std::size_t best = 0;
  for (std::size_t c = 1; c < chains; ++c)
    if (results[c].best_score > results[best].best_score) best = c;
  return std::move(results[best]);
}

}  // namespace mict
