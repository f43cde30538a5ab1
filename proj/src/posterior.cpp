#include "mict/posterior.hpp"

#include <cmath>
#include <limits>
#include <set>

#include "mict/errors.hpp"

namespace mict {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_length(const CandidacyGraph& g, const Labeling& l) {
  if (l.size() != g.size())
    fail(ErrorKind::ContractViolation, "labeling has " + std::to_string(l.size()) +
                                           " entries for a graph of " + std::to_string(g.size()));
}

}  // namespace

int scale_bin(double s, double quantum) {
  return static_cast<int>(std::floor(std::log(s) / quantum));
}

MatchState derive_state(const CandidacyGraph& g, const Labeling& l, double scale_quantum) {
  check_length(g, l);
  std::array<bool, kPartCount> matched{};
  std::set<int> bins;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Vertex& v = g.vertex(i);
    if (!l[i] || v.is_null()) continue;
    matched[index(v.part)] = true;
    bins.insert(scale_bin(v.target_scale, scale_quantum));
  }
  int unmatched = 0;
  for (Part p : kAllParts)
    if (g.has_part(p) && !matched[index(p)]) ++unmatched;
  return {l, unmatched, static_cast<int>(bins.size())};
}

double log_likelihood(const CandidacyGraph& g, const Labeling& l) {
  check_length(g, l);
  double sum = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (l[i] && !g.vertex(i).is_null()) sum += g.vertex(i).appearance;
  return -sum;
}

std::optional<double> edge_log_term(const Edge& e) {
  const double q = e.positive() ? e.prob : 1.0 - e.prob;
  if (q <= 0.0) return std::nullopt;
  return std::log(q);
}

ScoreBreakdown score_breakdown(const CandidacyGraph& g, const Labeling& l, const PriorParams& p) {
  ScoreBreakdown b;
  const MatchState st = derive_state(g, l, p.scale_quantum);
  b.likelihood = log_likelihood(g, l);
  b.unmatched = st.unmatched;
  b.scale_levels = st.scale_levels;
  b.unmatched_term = -p.alpha_u * st.unmatched;
  b.scale_term = -p.alpha_s * st.scale_levels;
  for (std::size_t e = 0; e < g.edges().size(); ++e) {
    const Edge& edge = g.edge(e);
    if (!l[edge.a] || !l[edge.b]) continue;
    const auto term = edge_log_term(edge);
    b.edges.push_back({static_cast<int>(e), term});
    if (!term)
      ++b.forbidden_pairs;
    else if (edge.positive())
      b.compatible_term += *term;
    else
      b.competitive_term += *term;
  }
  b.total = b.forbidden_pairs > 0
                ? kNegInf
                : b.likelihood + b.unmatched_term + b.scale_term + b.compatible_term + b.competitive_term;
  return b;
}

double log_prior(const CandidacyGraph& g, const Labeling& l, const PriorParams& p) {
  const ScoreBreakdown b = score_breakdown(g, l, p);
  if (b.forbidden_pairs > 0) return kNegInf;
  return b.unmatched_term + b.scale_term + b.compatible_term + b.competitive_term;
}

double log_posterior(const CandidacyGraph& g, const Labeling& l, const PriorParams& p) {
  return score_breakdown(g, l, p).total;
}

ScoreAccumulator::ScoreAccumulator(const CandidacyGraph& g, const PriorParams& p, Labeling initial)
    : g_(&g), params_(p), labels_(g.size(), 0) {
  check_length(g, initial);
  bins_.resize(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) bins_[i] = scale_bin(g.vertex(i).target_scale, p.scale_quantum);
  for (std::size_t i = 0; i < g.size(); ++i)
    if (initial[i]) flip(static_cast<int>(i));
}

void ScoreAccumulator::flip(int v) {
  const bool on = !labels_[v];
  const double sign = on ? 1.0 : -1.0;
  for (int e : g_->incident(v)) {
    const Edge& edge = g_->edge(e);
    if (!labels_[edge.other(v)]) continue;
    if (const auto term = edge_log_term(edge))
      edge_sum_ += sign * *term;
    else
      forbidden_ += on ? 1 : -1;
  }
  labels_[v] = on ? 1 : 0;

  const Vertex& vx = g_->vertex(v);
  if (vx.is_null()) return;
  appearance_ += sign * vx.appearance;
  int& active = active_real_[index(vx.part)];
  if (on) {
    if (active++ == 0) ++matched_parts_;
    ++scale_counts_[bins_[v]];
  } else {
    if (--active == 0) --matched_parts_;
    auto it = scale_counts_.find(bins_[v]);
    if (--it->second == 0) scale_counts_.erase(it);
  }
}

double ScoreAccumulator::score() const {
  if (forbidden_ > 0) return kNegInf;
  return -appearance_ - params_.alpha_u * unmatched() - params_.alpha_s * scale_levels() + edge_sum_;
}

}  // namespace mict
