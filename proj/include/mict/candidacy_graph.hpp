#pragma once

#include <optional>
#include <span>
#include <vector>

#include "mict/features.hpp"
#include "mict/kinematics.hpp"
#include "mict/proposal.hpp"

namespace mict {

/// Candidate match between a template proposal and a target proposal (or
/// no target, for an unmatched part).
struct Vertex {
  Part part = Part::Torso;
  int template_index = 0;
  std::optional<int> target;  // index into the scene's part list; empty = NULL target
  double appearance = 0.0;    // D(template, target); 0 for NULL targets
  double target_scale = 1.0;  // s of the target proposal
  std::optional<OrientedRectd> target_rect;

  bool is_null() const { return !target.has_value(); }
};

enum class EdgeKind : std::uint8_t { Kinematic, Symmetry, SamePart, Overlap };

constexpr bool is_positive(EdgeKind k) { return k == EdgeKind::Kinematic || k == EdgeKind::Symmetry; }

const char* to_string(EdgeKind k);

struct Edge {
  int a = 0;
  int b = 0;
  EdgeKind kind = EdgeKind::SamePart;
  double prob = 1.0;

  bool positive() const { return is_positive(kind); }
  int other(int v) const { return v == a ? b : a; }
};

/// Immutable candidacy graph. Edges are stored canonically (a < b, sorted
/// by endpoints then kind) with per-vertex incidence lists.
class CandidacyGraph {
 public:
  CandidacyGraph() = default;
  CandidacyGraph(std::vector<Vertex> vertices, std::vector<Edge> edges);

  std::size_t size() const { return vertices_.size(); }
  bool empty() const { return vertices_.empty(); }
  const std::vector<Vertex>& vertices() const { return vertices_; }
  const Vertex& vertex(std::size_t i) const { return vertices_[i]; }
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(std::size_t e) const { return edges_[e]; }
  std::span<const int> incident(std::size_t v) const { return incidence_[v]; }

  // Number of distinct parts carrying at least one vertex.
  int parts_present() const { return parts_present_; }
  bool has_part(Part p) const { return part_present_[index(p)]; }

 private:
  std::vector<Vertex> vertices_;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> incidence_;
  std::array<bool, kPartCount> part_present_{};
  int parts_present_ = 0;
};

struct GraphParams {
  double lambda = 10.0;          // overlap scaling
  double min_edge_prob = 1e-4;   // overlap edges below this are omitted
  // Lower bound on compatible probabilities. Below exp(-alpha_u) so that one
  // implausible link costs more than leaving a part unmatched.
  double compatible_floor = 1e-6;
  AuxMetric aux_metric = zero_aux_metric;
};

double kinematic_prob(const PartProposal& a, const PartProposal& b, const KinematicsModel& km,
                      double person_height);

double symmetry_prob(const PartProposal& a, const PartProposal& b,
                     const AuxMetric& aux_metric = zero_aux_metric);

/// Competitive relation strength: 1 for the same part, 1 - exp(-lambda IoU)
/// for overlapping targets of different parts, 0 otherwise.
double competitive_prob(const Vertex& a, const Vertex& b, const GraphParams& params);

/// Builds one vertex per (template proposal, target proposal or NULL) pair,
/// with same-part exclusion edges, kinematic/symmetry compatible edges, and
/// overlap competitive edges. Compatible probabilities are floored at
/// compatible_floor; overlap edges below min_edge_prob are omitted. Parts
/// without template proposals get no vertices and are absent from the graph.
CandidacyGraph build_graph(const Template& t, const Scene& scene, const KinematicsModel& km,
                           const GraphParams& params = {});

}  // namespace mict
