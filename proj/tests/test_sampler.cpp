#include <cmath>
#include <limits>

#include "doctest.h"

#include "mict/errors.hpp"
#include "mict/oracle.hpp"
#include "mict/sampler.hpp"
#include "support/fixtures.hpp"
#include "support/random_graph.hpp"
#include "support/reference_score.hpp"

using namespace mict;
using doctest::Approx;

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

Vertex v(Part p, std::optional<int> target, double d = 0.0, double s = 1.0) {
  return testing::fixture_vertex(p, target, d, s);
}

double total_variation(const std::vector<double>& a, const std::vector<double>& b) {
  double tv = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) tv += std::abs(a[i] - b[i]);
  return tv / 2.0;
}

std::vector<double> visit_frequencies(const CandidacyGraph& g, const PriorParams& p, ChainConfig cfg,
                                      std::size_t samples) {
  cfg.burn_in = 1000;
  cfg.iterations = cfg.burn_in + samples;
  std::vector<double> counts(std::size_t{1} << g.size(), 0.0);
  run_chain(g, p, cfg, [&](std::size_t, const Labeling& l, double) { counts[mask_of(l)] += 1.0; });
  for (auto& c : counts) c /= static_cast<double>(samples);
  return counts;
}

}  // namespace

TEST_CASE("classify_edges") {
  const CandidacyGraph g({v(Part::Torso, 0), v(Part::Head, 0), v(Part::Head, std::nullopt)},
                         {{0, 1, EdgeKind::Kinematic, 0.5}, {1, 2, EdgeKind::SamePart, 1.0}, {0, 1, EdgeKind::Overlap, 0.5}});
  // Edges are stored sorted: (0,1,Kinematic), (0,1,Overlap), (1,2,SamePart).
  CHECK(classify_edges(g, {1, 1, 0}) == std::vector<std::uint8_t>{1, 0, 1});
  CHECK(classify_edges(g, {0, 0, 0}) == std::vector<std::uint8_t>{1, 0, 0});
  CHECK(classify_edges(g, {1, 0, 1}) == std::vector<std::uint8_t>{0, 1, 1});
}

TEST_CASE("composite clusters") {
  SUBCASE("two positive components joined by a competitive edge") {
    // {0,1} labeled 1 and {2,3} labeled 0; the competitive edge 1-2 is
    // consistent, so with every probability 1 the whole graph moves.
    const CandidacyGraph g({v(Part::Torso, 0), v(Part::Head, 0), v(Part::Torso, 1), v(Part::Head, 1)},
                           {{0, 1, EdgeKind::Kinematic, 1.0}, {2, 3, EdgeKind::Kinematic, 1.0}, {1, 2, EdgeKind::Overlap, 1.0}});
    Rng rng(1);
    for (int i = 0; i < 20; ++i) {
      const auto vcc = sample_composite_cluster(g, {1, 1, 0, 0}, std::vector<double>(3, 1.0), rng);
      CHECK(vcc.vertices() == std::vector<int>{0, 1, 2, 3});
      CHECK(vcc.clusters.size() == 2);
    }
  }
  SUBCASE("all switches off") {
    const CandidacyGraph g({v(Part::Torso, 0), v(Part::Head, 0), v(Part::Torso, 1)},
                           {{0, 1, EdgeKind::Kinematic, 0.9}, {0, 2, EdgeKind::SamePart, 1.0}});
    Rng rng(2);
    std::vector<int> seen(3, 0);
    for (int i = 0; i < 300; ++i) {
      const auto vcc = sample_composite_cluster(g, {0, 0, 1}, std::vector<double>(2, 0.0), rng);
      REQUIRE(vcc.size() == 1);
      ++seen[vcc.vertices()[0]];
    }
    for (int c : seen) CHECK(c > 50);
  }
  SUBCASE("isolated vertex") {
    const CandidacyGraph g({v(Part::Torso, 0)}, {});
    Rng rng(3);
    CHECK(sample_composite_cluster(g, {0}, {}, rng).vertices() == std::vector<int>{0});
  }
}

TEST_CASE("relabel") {
  Labeling l{0};
  CompositeCluster one;
  one.clusters = {{0}};
  relabel(l, one);
  CHECK(l == Labeling{1});

  Labeling swap{1, 0};
  CompositeCluster two;
  two.clusters = {{0}, {1}};
  relabel(swap, two);
  CHECK(swap == Labeling{0, 1});
  relabel(swap, two);
  CHECK(swap == Labeling{1, 0});
}

TEST_CASE("proposal ratio") {
  const CandidacyGraph g({v(Part::Torso, 0), v(Part::Head, 0)}, {{0, 1, EdgeKind::Kinematic, 0.4}});
  const std::vector<double> rho{0.4};
  CompositeCluster c;
  c.clusters = {{0}};

  // Consistent before (1,1), inconsistent after (0,1).
  CHECK(proposal_ratio(g, {1, 1}, {0, 1}, c, rho) == Approx(1.0 / (1.0 - 0.4)));
  CHECK(proposal_ratio(g, {0, 1}, {1, 1}, c, rho) == Approx(1.0 - 0.4));

  const CandidacyGraph lone({v(Part::Torso, 0), v(Part::Head, 0)}, {});
  CHECK(proposal_ratio(lone, {0, 0}, {1, 0}, c, {}) == Approx(1.0));

  // Both endpoints flip together: the cut is empty.
  CompositeCluster both;
  both.clusters = {{0, 1}};
  CHECK(proposal_ratio(g, {1, 1}, {0, 0}, both, rho) == Approx(1.0));
}

TEST_CASE("forward and reverse ratios cancel") {
  Rng rng(31);
  for (Coupling mode : {Coupling::Direct, Coupling::Transitive}) {
    for (SeedSelection sel : {SeedSelection::UniformVertex, SeedSelection::UniformCluster}) {
      for (int k = 0; k < 100; ++k) {
        const CandidacyGraph g = testing::random_graph(rng);
        ChainConfig cfg;
        const auto rho = switching_probabilities(g, cfg);
        ClusterSampler sampler(g, rho, sel, mode);
        Labeling l(g.size());
        for (auto& x : l) x = rng.uniform() < 0.3;
        const CompositeCluster vcc = sampler.sample(l, rng);
        Labeling m = l;
        relabel(m, vcc);
        const double fwd = log_proposal_ratio(g, l, m, vcc, rho);
        const double rev = log_proposal_ratio(g, m, l, vcc, rho);
        if (std::isfinite(fwd) && std::isfinite(rev)) CHECK(std::abs(fwd + rev) < 1e-9);
      }
    }
  }
}

TEST_CASE("switching probabilities") {
  Rng rng(32);
  ChainConfig cfg;
  for (int k = 0; k < 50; ++k) {
    const CandidacyGraph g = testing::random_graph(rng);
    const auto rho = switching_probabilities(g, cfg);
    const auto local = local_switching_probabilities(g, cfg);
    const auto primary = primary_vertices(g);
    for (std::size_t e = 0; e < rho.size(); ++e) {
      CHECK(rho[e] >= 0.0);
      CHECK(rho[e] < 1.0);
      if (g.edge(e).positive()) CHECK(local[e] == 0.0);
      else CHECK(local[e] == rho[e]);
      const Edge& edge = g.edge(e);
      if (!primary[edge.a] && !primary[edge.b]) CHECK(rho[e] == 0.0);
    }
  }
  ChainConfig bad;
  bad.same_part_switch = 1.0;
  CHECK_THROWS_AS(validate(bad), Error);
  bad = {};
  bad.max_switch = 1.0;
  CHECK_THROWS_AS(validate(bad), Error);
}

TEST_CASE("primary vertices") {
  const CandidacyGraph g({v(Part::Torso, 0, 0.5), v(Part::Torso, 0, 0.2), v(Part::Torso, 0, 0.2), v(Part::Torso, std::nullopt),
                          v(Part::Torso, std::nullopt)},
                         {});
  CHECK(primary_vertices(g) == std::vector<std::uint8_t>{0, 1, 0, 1, 0});
}

TEST_CASE("mh_accept") {
  Rng rng(4);
  for (int i = 0; i < 100; ++i) {
    CHECK(mh_accept(-3.0, -3.0, 0.0, rng));
    CHECK(mh_accept(-3.0, -3.0 + std::log(2.0), 0.0, rng));
    CHECK_FALSE(mh_accept(-3.0, kNegInf, 0.0, rng));
    CHECK_FALSE(mh_accept(-3.0, 5.0, kNegInf, rng));
  }
  int accepted = 0;
  for (int i = 0; i < 20000; ++i) accepted += mh_accept(0.0, std::log(0.25), 0.0, rng);
  CHECK(accepted / 20000.0 == Approx(0.25).epsilon(0.05));
}

TEST_CASE("run_chain basics") {
  const PriorParams p;
  SUBCASE("one vertex") {
    const CandidacyGraph g({v(Part::Torso, 0, 0.1)}, {});
    ChainConfig cfg;
    cfg.iterations = 50;
    const auto r = run_chain(g, p, cfg);
    CHECK(r.best_state.labeling == Labeling{1});
    CHECK(r.best_score == Approx(-0.1 - p.alpha_s));
  }
  SUBCASE("single iteration flips one cluster") {
    const CandidacyGraph g = testing::stationarity_fixture();
    ChainConfig cfg;
    cfg.iterations = 1;
    cfg.record_trace = true;
    const auto r = run_chain(g, p, cfg);
    REQUIRE(r.trace.size() == 1);
    CHECK(r.trace[0].cluster_size >= 1);
  }
  SUBCASE("determinism") {
    Rng rng(5);
    const CandidacyGraph g = testing::random_graph(rng);
    ChainConfig cfg;
    cfg.record_trace = true;
    cfg.seed = 99;
    const auto a = run_chain(g, p, cfg);
    const auto b = run_chain(g, p, cfg);
    CHECK(a.best_state.labeling == b.best_state.labeling);
    CHECK(a.best_score == b.best_score);
    CHECK(a.final_labeling == b.final_labeling);
    REQUIRE(a.trace.size() == b.trace.size());
    for (std::size_t i = 0; i < a.trace.size(); ++i) CHECK(a.trace[i].log_posterior == b.trace[i].log_posterior);
    CHECK(run_chains(g, p, cfg, 3).best_score == run_chains(g, p, cfg, 3).best_score);
    CHECK(run_chains(g, p, cfg, 3).best_score >= a.best_score);
  }
  SUBCASE("best score dominates every visited state") {
    Rng rng(6);
    const CandidacyGraph g = testing::random_graph(rng);
    ChainConfig cfg;
    cfg.record_trace = true;
    const auto r = run_chain(g, p, cfg);
    for (const auto& t : r.trace) CHECK(t.log_posterior <= r.best_score + 1e-9);
    CHECK(r.best_score == Approx(log_posterior(g, r.best_state.labeling, p)));
  }
  SUBCASE("empty graph") { CHECK_THROWS_AS(run_chain(CandidacyGraph{}, p, ChainConfig{}), Error); }
}

TEST_CASE("oracle_map") {
  const PriorParams p;
  const auto empty = oracle_map(CandidacyGraph{}, p);
  CHECK(empty.labeling.empty());
  CHECK(empty.score == 0.0);

  const CandidacyGraph one({v(Part::Torso, 0, 0.1)}, {});
  const auto r = oracle_map(one, p);
  CHECK(r.labeling == Labeling{1});
  CHECK(r.score == Approx(-0.1 - p.alpha_s));

  Rng rng(7);
  for (int k = 0; k < 30; ++k) {
    const CandidacyGraph g = testing::random_graph(rng, {12, 5});
    const auto o = oracle_map(g, p);
    CHECK(o.score == log_posterior(g, o.labeling, p));
    CHECK(o.score == Approx(testing::reference_log_posterior(g, o.labeling, p)));
    // Brute force over a few random labelings never beats it.
    for (int t = 0; t < 50; ++t) {
      Labeling l(g.size());
      for (auto& x : l) x = rng.uniform() < 0.3;
      CHECK(log_posterior(g, l, p) <= o.score);
    }
  }
}

TEST_CASE("enumerate_posterior") {
  const PriorParams p;
  SUBCASE("everything forbidden but one labeling") {
    // Two torso vertices that exclude each other and an overlap of
    // probability 1 between the remaining candidates.
    const CandidacyGraph g({v(Part::Torso, 0)}, {});
    const CandidacyGraph forced({v(Part::Torso, 0), v(Part::Torso, 1)}, {{0, 1, EdgeKind::SamePart, 1.0}});
    const auto d = enumerate_posterior(forced, p);
    CHECK(d[3] == 0.0);
    CHECK(d[0] + d[1] + d[2] == Approx(1.0));

    const CandidacyGraph only({v(Part::Torso, 0), v(Part::Torso, std::nullopt)}, {{0, 1, EdgeKind::SamePart, 1.0}});
    PriorParams harsh;
    harsh.alpha_u = 800.0;
    harsh.alpha_s = 0.0;
    const auto h = enumerate_posterior(only, harsh);
    CHECK(h[1] == Approx(1.0));
  }
  SUBCASE("independent vertices factorize") {
    const CandidacyGraph g({v(Part::Torso, 0, 0.4), v(Part::Head, 0, 0.7, 1.0)}, {});
    PriorParams flat;
    flat.alpha_s = 0.0;
    const auto d = enumerate_posterior(g, flat);
    // Each part: inactive weight e^{-alpha_u}, active e^{-D}.
    auto marginal = [&](double dist) { return std::exp(-dist) / (std::exp(-dist) + std::exp(-flat.alpha_u)); };
    const double a = marginal(0.4), b = marginal(0.7);
    CHECK(d[0] == Approx((1 - a) * (1 - b)));
    CHECK(d[1] == Approx(a * (1 - b)));
    CHECK(d[2] == Approx((1 - a) * b));
    CHECK(d[3] == Approx(a * b));
  }
}

TEST_CASE("chain visits labelings in proportion to the posterior") {
  const CandidacyGraph g = testing::stationarity_fixture();
  const PriorParams p = testing::diffuse_prior();
  const auto exact = enumerate_posterior(g, p);
  for (Coupling mode : {Coupling::Direct, Coupling::Transitive}) {
    for (SeedSelection sel : {SeedSelection::UniformVertex, SeedSelection::UniformCluster}) {
      for (double local : {0.0, 0.5}) {
        ChainConfig cfg;
        cfg.coupling = mode;
        cfg.seed_selection = sel;
        cfg.local_move_rate = local;
        cfg.seed = 17;
        const double tv = total_variation(visit_frequencies(g, p, cfg, 200000), exact);
        CAPTURE(static_cast<int>(mode));
        CAPTURE(static_cast<int>(sel));
        CAPTURE(local);
        CHECK(tv < 0.03);
      }
    }
  }
}

TEST_CASE("chain never enters a forbidden state") {
  Rng rng(41);
  const PriorParams p;
  for (int k = 0; k < 5; ++k) {
    const CandidacyGraph g = testing::exclusion_fixture(rng);
    ChainConfig cfg;
    cfg.iterations = 20000;
    cfg.seed = derive_seed(41, k);
    std::size_t bad = 0;
    run_chain(g, p, cfg, [&](std::size_t, const Labeling&, double score) { bad += score == kNegInf; });
    CHECK(bad == 0);
  }
}

TEST_CASE("chain reaches the oracle MAP on small graphs") {
  Rng rng(51);
  int hits = 0;
  const int n = 40;
  for (int k = 0; k < n; ++k) {
    const CandidacyGraph g = testing::random_graph(rng);
    const auto o = oracle_map(g);
    ChainConfig cfg;
    cfg.seed = derive_seed(51, k);
    const auto r = run_chain(g, {}, cfg);
    CHECK(r.best_score <= o.score + 1e-9);
    hits += r.best_score >= o.score - 1e-9;
  }
  CHECK(hits >= n * 9 / 10);
}
