#include "mict/candidacy_graph.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "mict/errors.hpp"

namespace mict {

const char* to_string(EdgeKind k) {
  switch (k) {
    case EdgeKind::Kinematic: return "kinematic";
    case EdgeKind::Symmetry: return "symmetry";
    case EdgeKind::SamePart: return "same_part";
    case EdgeKind::Overlap: return "overlap";
  }
  return "?";
}

CandidacyGraph::CandidacyGraph(std::vector<Vertex> vertices, std::vector<Edge> edges)
    : vertices_(std::move(vertices)), edges_(std::move(edges)) {
  const int n = static_cast<int>(vertices_.size());
  for (auto& e : edges_) {
    if (e.a < 0 || e.b < 0 || e.a >= n || e.b >= n)
      fail(ErrorKind::ContractViolation, "edge endpoint out of range");
    if (e.a == e.b) fail(ErrorKind::ContractViolation, "self-loop edge");
    if (!(e.prob >= 0.0 && e.prob <= 1.0))
      fail(ErrorKind::ContractViolation, "edge probability outside [0, 1]");
    if (e.a > e.b) std::swap(e.a, e.b);
  }
  std::sort(edges_.begin(), edges_.end(), [](const Edge& x, const Edge& y) {
    return std::tie(x.a, x.b, x.kind) < std::tie(y.a, y.b, y.kind);
  });
  for (std::size_t i = 1; i < edges_.size(); ++i) {
    const Edge& p = edges_[i - 1];
    const Edge& q = edges_[i];
    if (p.a == q.a && p.b == q.b && p.kind == q.kind)
      fail(ErrorKind::ContractViolation, "duplicate edge of one kind between a vertex pair");
  }
  incidence_.assign(vertices_.size(), {});
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    incidence_[edges_[i].a].push_back(static_cast<int>(i));
    incidence_[edges_[i].b].push_back(static_cast<int>(i));
  }
  for (const auto& v : vertices_) part_present_[index(v.part)] = true;
  parts_present_ = static_cast<int>(std::count(part_present_.begin(), part_present_.end(), true));
}

double kinematic_prob(const PartProposal& a, const PartProposal& b, const KinematicsModel& km,
                      double person_height) {
  return km.probability(a, b, person_height);
}

double symmetry_prob(const PartProposal& a, const PartProposal& b, const AuxMetric& aux_metric) {
  if (symmetry_partner(a.part) != b.part)
    fail(ErrorKind::Domain, std::string(part_name(a.part)) + " and " + std::string(part_name(b.part)) +
                                " are not symmetry partners");
  return std::exp(-part_distance(a.descriptor, b.descriptor, aux_metric));
}

double competitive_prob(const Vertex& a, const Vertex& b, const GraphParams& params) {
  if (a.part == b.part) return 1.0;
  if (!a.target_rect || !b.target_rect) return 0.0;
  const double overlap = iou(*a.target_rect, *b.target_rect);
  if (overlap <= 0.0) return 0.0;
  return 1.0 - std::exp(-params.lambda * overlap);
}

CandidacyGraph build_graph(const Template& t, const Scene& scene, const KinematicsModel& km,
                           const GraphParams& params) {
  if (!(params.lambda > 0.0)) fail(ErrorKind::ContractViolation, "lambda must be positive");

  const double H = scene.person_height;
  std::array<int, kPartCount> base{};
  std::vector<Vertex> vertices;
  std::array<std::vector<OrientedRectd>, kPartCount> rects;
  for (Part p : kAllParts) {
    const auto& targets = scene.at(p);
    for (const auto& g : targets) rects[index(p)].push_back(rect_of(g, H, km.body()));
    base[index(p)] = static_cast<int>(vertices.size());
    for (std::size_t ti = 0; ti < t.at(p).size(); ++ti) {
      Vertex null_vertex;
      null_vertex.part = p;
      null_vertex.template_index = static_cast<int>(ti);
      vertices.push_back(null_vertex);
      for (std::size_t gi = 0; gi < targets.size(); ++gi) {
        Vertex v;
        v.part = p;
        v.template_index = static_cast<int>(ti);
        v.target = static_cast<int>(gi);
        v.appearance = part_distance(t.at(p)[ti].descriptor, targets[gi].descriptor, params.aux_metric);
        v.target_scale = targets[gi].s;
        v.target_rect = rects[index(p)][gi];
        vertices.push_back(v);
      }
    }
  }
  auto vertex_of = [&](Part p, std::size_t ti, std::optional<std::size_t> gi) {
    const std::size_t stride = scene.at(p).size() + 1;
    return base[index(p)] + static_cast<int>(ti * stride + (gi ? *gi + 1 : 0));
  };

  std::vector<Edge> edges;
  // Same-part exclusion, NULL vertices included.
  for (Part p : kAllParts) {
    const int first = base[index(p)];
    const int count = static_cast<int>(t.at(p).size() * (scene.at(p).size() + 1));
    for (int i = 0; i < count; ++i)
      for (int j = i + 1; j < count; ++j) edges.push_back({first + i, first + j, EdgeKind::SamePart, 1.0});
  }

  // Edges between non-NULL vertices of two parts, one probability per target pair.
  auto connect = [&](Part p, Part q, EdgeKind kind, auto&& prob_of) {
    const auto& gp = scene.at(p);
    const auto& gq = scene.at(q);
    for (std::size_t i = 0; i < gp.size(); ++i) {
      for (std::size_t j = 0; j < gq.size(); ++j) {
        const std::optional<double> prob = prob_of(i, j);
        if (!prob) continue;
        for (std::size_t ti = 0; ti < t.at(p).size(); ++ti)
          for (std::size_t tj = 0; tj < t.at(q).size(); ++tj)
            edges.push_back({vertex_of(p, ti, i), vertex_of(q, tj, j), kind, *prob});
      }
    }
  };

  for (const auto& l : kJointLinks) {
    connect(l.parent, l.child, EdgeKind::Kinematic, [&](std::size_t i, std::size_t j) -> std::optional<double> {
      const double p = km.probability(scene.at(l.parent)[i], scene.at(l.child)[j], H);
      return std::max(p, params.compatible_floor);
    });
  }
  for (Part p : kAllParts) {
    const auto partner = symmetry_partner(p);
    if (!partner || index(*partner) < index(p)) continue;
    connect(p, *partner, EdgeKind::Symmetry, [&](std::size_t i, std::size_t j) -> std::optional<double> {
      const double s = symmetry_prob(scene.at(p)[i], scene.at(*partner)[j], params.aux_metric);
      return std::max(s, params.compatible_floor);
    });
  }
  for (std::size_t pi = 0; pi < kPartCount; ++pi) {
    for (std::size_t qi = pi + 1; qi < kPartCount; ++qi) {
      connect(kAllParts[pi], kAllParts[qi], EdgeKind::Overlap,
              [&](std::size_t i, std::size_t j) -> std::optional<double> {
                const double overlap = iou(rects[pi][i], rects[qi][j]);
                if (overlap <= 0.0) return std::nullopt;
                const double prob = 1.0 - std::exp(-params.lambda * overlap);
                if (prob < params.min_edge_prob) return std::nullopt;
                return prob;
              });
    }
  }
  return CandidacyGraph(std::move(vertices), std::move(edges));
}

}  // namespace mict
