#pragma once

#include <vector>

#include "mict/candidacy_graph.hpp"
#include "mict/posterior.hpp"
#include "mict/random.hpp"

namespace mict::testing {

inline Vertex fixture_vertex(Part p, std::optional<int> target, double d = 0.0, double s = 1.0, int tmpl = 0) {
  Vertex v;
  v.part = p;
  v.template_index = tmpl;
  v.target = target;
  v.appearance = target ? d : 0.0;
  v.target_scale = s;
  return v;
}

// Eight vertices over four parts with every edge kind: two torso targets,
// a head, two thighs, NULL vertices for three parts.
inline CandidacyGraph stationarity_fixture() {
  std::vector<Vertex> vs{
      fixture_vertex(Part::Torso, 0, 0.3, 1.0),      // 0
      fixture_vertex(Part::Torso, 1, 0.5, 1.12),     // 1
      fixture_vertex(Part::Torso, std::nullopt),     // 2
      fixture_vertex(Part::Head, 0, 0.2, 1.0),       // 3
      fixture_vertex(Part::Head, std::nullopt),      // 4
      fixture_vertex(Part::LeftThigh, 0, 0.4, 1.0),  // 5
      fixture_vertex(Part::LeftThigh, std::nullopt), // 6
      fixture_vertex(Part::RightThigh, 0, 0.6, 1.12),// 7
  };
  std::vector<Edge> es{
      {0, 1, EdgeKind::SamePart, 1.0},  {0, 2, EdgeKind::SamePart, 1.0},  {1, 2, EdgeKind::SamePart, 1.0},
      {3, 4, EdgeKind::SamePart, 1.0},  {5, 6, EdgeKind::SamePart, 1.0},  {0, 3, EdgeKind::Kinematic, 0.8},
      {1, 3, EdgeKind::Kinematic, 0.3}, {1, 3, EdgeKind::Overlap, 0.5},   {0, 5, EdgeKind::Kinematic, 0.6},
      {1, 5, EdgeKind::Kinematic, 0.2}, {0, 7, EdgeKind::Kinematic, 0.7}, {1, 7, EdgeKind::Kinematic, 0.1},
      {5, 7, EdgeKind::Symmetry, 0.6},  {3, 5, EdgeKind::Overlap, 0.3},
  };
  return CandidacyGraph(std::move(vs), std::move(es));
}

// Small penalties spread the posterior over many labelings, which makes the
// visit-frequency comparison informative.
inline PriorParams diffuse_prior() {
  PriorParams p;
  p.alpha_u = 1.5;
  p.alpha_s = 0.5;
  return p;
}

// Many same-part candidates with near-zero distance, strong mutual
// kinematic support and template copies: composite clusters routinely reach
// across two vertices of one part.
inline CandidacyGraph exclusion_fixture(Rng& rng) {
  std::vector<Vertex> vs;
  const std::vector<Part> parts{Part::Torso, Part::Head, Part::LeftUpperArm, Part::LeftForearm};
  for (Part p : parts) {
    vs.push_back(fixture_vertex(p, std::nullopt));
    for (int t = 0; t < 3; ++t) {
      const double d = rng.uniform(0.0, 0.05);
      vs.push_back(fixture_vertex(p, t, d, 1.0, 0));
      vs.push_back(fixture_vertex(p, t, d + 0.01, 1.0, 1));
    }
  }
  std::vector<Edge> es;
  const int n = static_cast<int>(vs.size());
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      const Vertex& u = vs[a];
      const Vertex& w = vs[b];
      if (u.part == w.part) {
        es.push_back({a, b, EdgeKind::SamePart, 1.0});
      } else if (!u.is_null() && !w.is_null() && joint_between(u.part, w.part)) {
        es.push_back({a, b, EdgeKind::Kinematic, rng.uniform(0.9, 1.0)});
      }
    }
  return CandidacyGraph(std::move(vs), std::move(es));
}

}  // namespace mict::testing
