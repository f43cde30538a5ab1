#include "mict/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mict/errors.hpp"

namespace mict {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Direct evaluation of the posterior for one bit mask, written without the
// incremental machinery so the two can be checked against each other.
class MaskScorer {
 public:
  MaskScorer(const CandidacyGraph& g, const PriorParams& p) : g_(g), p_(p) {
    for (std::size_t i = 0; i < g.size(); ++i)
      bins_.push_back(g.vertex(i).is_null() ? 0 : scale_bin(g.vertex(i).target_scale, p.scale_quantum));
    for (const Edge& e : g.edges()) terms_.push_back(edge_log_term(e));
  }

  double operator()(std::uint64_t mask) {
    auto on = [&](int v) { return ((mask >> v) & 1u) != 0; };
    double edges = 0.0;
    for (std::size_t e = 0; e < terms_.size(); ++e) {
      const Edge& edge = g_.edge(e);
      if (!on(edge.a) || !on(edge.b)) continue;
      if (!terms_[e]) return kNegInf;
      edges += *terms_[e];
    }
    std::array<bool, kPartCount> matched{};
    double appearance = 0.0;
    used_.clear();
    for (std::size_t i = 0; i < g_.size(); ++i) {
      const Vertex& v = g_.vertex(i);
      if (!on(static_cast<int>(i)) || v.is_null()) continue;
      appearance += v.appearance;
      matched[index(v.part)] = true;
      used_.push_back(bins_[i]);
    }
    std::sort(used_.begin(), used_.end());
    const auto levels = std::unique(used_.begin(), used_.end()) - used_.begin();
    int unmatched = 0;
    for (Part q : kAllParts)
      if (g_.has_part(q) && !matched[index(q)]) ++unmatched;
    return -appearance - p_.alpha_u * unmatched - p_.alpha_s * static_cast<double>(levels) + edges;
  }

 private:
  const CandidacyGraph& g_;
  const PriorParams& p_;
  std::vector<int> bins_;
  std::vector<std::optional<double>> terms_;
  std::vector<int> used_;
};

// Lexicographic order with vertex 0 first equals the numeric order of the
// bit-reversed mask.
bool lex_less(std::uint64_t a, std::uint64_t b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const bool x = (a >> i) & 1u;
    const bool y = (b >> i) & 1u;
    if (x != y) return y;
  }
  return false;
}

}  // namespace

Labeling labeling_from_mask(std::size_t n, std::uint64_t mask) {
  Labeling l(n, 0);
  for (std::size_t i = 0; i < n; ++i) l[i] = (mask >> i) & 1u;
  return l;
}

std::uint64_t mask_of(const Labeling& l) {
  if (l.size() > 64) fail(ErrorKind::SizeLimit, "labeling longer than 64 vertices");
  std::uint64_t m = 0;
  for (std::size_t i = 0; i < l.size(); ++i)
    if (l[i]) m |= std::uint64_t(1) << i;
  return m;
}

OracleResult oracle_map(const CandidacyGraph& g, const PriorParams& p) {
  const std::size_t n = g.size();
  if (n > kOracleMaxVertices)
    fail(ErrorKind::SizeLimit, "oracle_map supports at most " + std::to_string(kOracleMaxVertices) +
                                   " vertices, graph has " + std::to_string(n));
  MaskScorer score(g, p);
  std::uint64_t best = 0;
  double best_score = score(0);
  const std::uint64_t count = std::uint64_t(1) << n;
  for (std::uint64_t m = 1; m < count; ++m) {
    const double s = score(m);
    if (s > best_score || (s == best_score && lex_less(m, best, n))) {
      best = m;
      best_score = s;
    }
  }
  return {labeling_from_mask(n, best), best_score};
}

std::vector<double> enumerate_posterior(const CandidacyGraph& g, const PriorParams& p) {
  const std::size_t n = g.size();
  if (n > kEnumerateMaxVertices)
    fail(ErrorKind::SizeLimit, "enumerate_posterior supports at most " +
                                   std::to_string(kEnumerateMaxVertices) + " vertices, graph has " +
                                   std::to_string(n));
  MaskScorer score(g, p);
  const std::size_t count = std::size_t(1) << n;
  std::vector<double> logp(count);
  double top = kNegInf;
  for (std::size_t m = 0; m < count; ++m) {
    logp[m] = score(m);
    top = std::max(top, logp[m]);
  }
  // All-zero is never forbidden, so top is finite.
  double z = 0.0;
  for (double& v : logp) {
    v = v == kNegInf ? 0.0 : std::exp(v - top);
    z += v;
  }
  for (double& v : logp) v /= z;
  return logp;
}

}  // namespace mict
