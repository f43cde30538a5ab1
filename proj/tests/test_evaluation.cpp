#include <algorithm>

#include "doctest.h"

#include "mict/errors.hpp"
#include "mict/evaluation.hpp"
#include "mict/simulator.hpp"

using namespace mict;
using doctest::Approx;

namespace {

RankedResult ranked(const std::string& q, std::vector<std::string> ids) {
  RankedResult r;
  r.query_id = q;
  double score = 0.0;
  for (auto& id : ids) r.ranking.emplace_back(std::move(id), score -= 1.0);
  return r;
}

Boxd box(double x0, double y0, double x1, double y1) { return Boxd(Eigen::Vector2d(x0, y0), Eigen::Vector2d(x1, y1)); }

Vertex with_rect(Part p, const OrientedRectd& r, std::optional<int> target = 0) {
  Vertex v;
  v.part = p;
  v.target = target;
  if (target) v.target_rect = r;
  return v;
}

MatchState state_of(Labeling l) { return MatchState{std::move(l), 0, 0}; }

SimConfig quiet() {
  SimConfig cfg;
  cfg.n_individuals = 4;
  cfg.pose_noise = {0.0, 0.0, 0.0};
  cfg.descriptor_noise = 0.0;
  cfg.false_alarm_rate = 0.0;
  return cfg;
}

// Reference shots of every individual as segmented gallery scenes.
struct Gallery {
  std::vector<Template> templates;
  std::vector<Scene> scenes;
};

Gallery self_gallery(const SimConfig& cfg) {
  Gallery g;
  const auto pop = generate_population(cfg);
  for (const auto& ind : pop) {
    Rng rng(derive_seed(cfg.seed, 100 + static_cast<std::uint64_t>(ind.id)));
    const SimReference r = generate_reference_shot(ind, rng, cfg, "ref" + std::to_string(ind.id));
    g.templates.push_back(build_template({r.shot}, BuildConfig{}));
    g.scenes.push_back(build_scene(r.shot.proposals, &*r.shot.mask, r.shot.width, r.shot.height, BuildConfig{},
                                   "g" + std::to_string(ind.id)));
  }
  return g;
}

}  // namespace

TEST_CASE("cmc") {
  const std::vector<std::string> g{"a", "b", "c", "d", "e"};
  std::vector<RankedResult> results{ranked("q1", g), ranked("q2", g), ranked("q3", g)};
  const std::map<std::string, std::string> truth{{"q1", "a"}, {"q2", "b"}, {"q3", "e"}};
  const CmcCurve c = cmc(results, truth);
  REQUIRE(c.rates.size() == 5);
  const std::vector<double> expected{1.0 / 3, 2.0 / 3, 2.0 / 3, 2.0 / 3, 1.0};
  for (std::size_t r = 0; r < 5; ++r) CHECK(c.rates[r] == Approx(expected[r]));

  const std::map<std::string, std::string> perfect{{"q1", "a"}, {"q2", "a"}, {"q3", "a"}};
  for (double x : cmc(results, perfect).rates) CHECK(x == 1.0);

  CHECK_THROWS_AS(cmc(results, {{"q1", "a"}}), Error);
}

TEST_CASE("cmc is non-decreasing and bounded") {
  Rng rng(1);
  std::vector<std::string> ids;
  for (int i = 0; i < 12; ++i) ids.push_back("g" + std::to_string(i));
  std::vector<RankedResult> results;
  std::map<std::string, std::string> truth;
  for (int q = 0; q < 30; ++q) {
    auto order = ids;
    for (std::size_t i = order.size() - 1; i > 0; --i) std::swap(order[i], order[rng.index(i + 1)]);
    results.push_back(ranked("q" + std::to_string(q), order));
    truth["q" + std::to_string(q)] = ids[rng.index(ids.size())];
  }
  const auto rates = cmc(results, truth).rates;
  CHECK(std::is_sorted(rates.begin(), rates.end()));
  CHECK(rates.back() == Approx(1.0));
  CHECK(rates.front() >= 0.0);
}

TEST_CASE("pascal_match") {
  CHECK(pascal_match(box(0, 0, 2, 2), box(0, 0, 2, 2)));
  // Exactly one half is not enough.
  CHECK_FALSE(pascal_match(box(0, 0, 2, 1), box(0, 0, 1, 1)));
  // Unit squares offset by half a side: IoU 1/3.
  CHECK_FALSE(pascal_match(box(0, 0, 1, 1), box(0.5, 0, 1.5, 1)));
  CHECK(pascal_match(box(0, 0, 10, 10), box(0, 0, 10, 9)));
  Rng rng(2);
  for (int i = 0; i < 200; ++i) {
    const double x = rng.uniform(0, 5), y = rng.uniform(0, 5);
    const Boxd a = box(x, y, x + rng.uniform(0.5, 3), y + rng.uniform(0.5, 3));
    const double u = rng.uniform(0, 5), v = rng.uniform(0, 5);
    const Boxd b = box(u, v, u + rng.uniform(0.5, 3), v + rng.uniform(0.5, 3));
    CHECK(pascal_match(a, b) == pascal_match(b, a));
  }
}

TEST_CASE("person_box") {
  const auto r1 = OrientedRectd::make({1, 1}, 0.0, 2, 2);
  const auto r2 = OrientedRectd::make({10, 5}, 0.0, 2, 4);
  const CandidacyGraph g({with_rect(Part::Torso, r1), with_rect(Part::Head, r2), with_rect(Part::Head, r2, std::nullopt)},
                         {{1, 2, EdgeKind::SamePart, 1.0}});
  const Boxd one = person_box(state_of({1, 0, 0}), g);
  CHECK(one.min().isApprox(Eigen::Vector2d(0, 0)));
  CHECK(one.max().isApprox(Eigen::Vector2d(2, 2)));
  const Boxd both = person_box(state_of({1, 1, 0}), g);
  CHECK(both.min().isApprox(Eigen::Vector2d(0, 0)));
  CHECK(both.max().isApprox(Eigen::Vector2d(11, 7)));
  CHECK(both.contains(one));

  try {
    person_box(state_of({0, 0, 1}), g);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NoLocalization);
  }
  CHECK_THROWS_AS(person_box(state_of({1}), g), Error);
}

TEST_CASE("rank_gallery") {
  const SimConfig cfg = quiet();
  const Gallery gal = self_gallery(cfg);
  const KinematicsModel km = KinematicsModel::nominal();
  const MatchConfig mc;

  SUBCASE("the query's own shot ranks first") {
    for (std::size_t q = 0; q < gal.templates.size(); ++q) {
      const RankedResult r = rank_gallery(gal.templates[q], gal.scenes, km, mc, "q");
      REQUIRE(r.ranking.size() == gal.scenes.size());
      CHECK(r.ranking.front().first == gal.scenes[q].id);
      for (std::size_t i = 1; i < r.ranking.size(); ++i) CHECK(r.ranking[i - 1].second >= r.ranking[i].second);
    }
  }
  SUBCASE("a gallery of one") {
    const RankedResult r = rank_gallery(gal.templates[0], {gal.scenes[2]}, km, mc);
    REQUIRE(r.ranking.size() == 1);
    CHECK(r.ranking[0].first == gal.scenes[2].id);
  }
  SUBCASE("deterministic and independent of gallery order") {
    const RankedResult a = rank_gallery(gal.templates[1], gal.scenes, km, mc);
    const RankedResult b = rank_gallery(gal.templates[1], gal.scenes, km, mc);
    CHECK(a.ranking == b.ranking);
    std::vector<Scene> reversed(gal.scenes.rbegin(), gal.scenes.rend());
    CHECK(rank_gallery(gal.templates[1], reversed, km, mc).ranking == a.ranking);
  }
  SUBCASE("unusable items score -inf") {
    std::vector<Scene> items = gal.scenes;
    Scene broken;
    broken.id = "broken";
    broken.width = 10;
    broken.height = 10;
    items.push_back(broken);
    const RankedResult r = rank_gallery(gal.templates[0], items, km, mc);
    CHECK(r.ranking.back().first == "broken");
  }
  SUBCASE("contract violations") {
    CHECK_THROWS_AS(rank_gallery(gal.templates[0], {}, km, mc), Error);
    CHECK_THROWS_AS(rank_gallery(gal.templates[0], {gal.scenes[0], gal.scenes[0]}, km, mc), Error);
  }
}

TEST_CASE("match_in_shot") {
  SimConfig cfg = quiet();
  const auto pop = generate_population(cfg);
  Rng rng(3);
  const SimReference ref = generate_reference_shot(pop[1], rng, cfg);
  const Template t = build_template({ref.shot}, BuildConfig{});
  const KinematicsModel km = KinematicsModel::nominal();

  SUBCASE("clean single person") {
    const Layout layout = side_by_side({1}, cfg);
    const SimScene s = generate_scene(pop, layout.placements, layout.width, layout.height, rng, cfg, &pop[1]);
    const ShotMatch m = match_in_shot(t, s.scene, km, MatchConfig{});
    CHECK(pascal_match(m.box, s.truth.people[0].box));
    const ShotMatch again = match_in_shot(t, s.scene, km, MatchConfig{});
    CHECK(again.score == m.score);
    CHECK(again.state.labeling == m.state.labeling);
  }
  SUBCASE("two people, clean scene: the query is found") {
    const Layout layout = side_by_side({0, 1}, cfg);
    const SimScene s = generate_scene(pop, layout.placements, layout.width, layout.height, rng, cfg, &pop[1]);
    const ShotMatch m = match_in_shot(t, s.scene, km, MatchConfig{});
    CHECK(pascal_match(m.box, s.truth.find(1)->box));
    CHECK_FALSE(pascal_match(m.box, s.truth.find(0)->box));
  }
  SUBCASE("empty scene") {
    Scene empty;
    empty.width = 100;
    empty.height = 100;
    try {
      match_in_shot(t, empty, km, MatchConfig{});
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::NoLocalization);
    }
    CHECK_THROWS_AS(greedy_match(t, empty), Error);
  }
}

TEST_CASE("greedy_match picks the closest appearance per part") {
  SimConfig cfg = quiet();
  const auto pop = generate_population(cfg);
  Rng rng(4);
  const SimReference ref = generate_reference_shot(pop[0], rng, cfg);
  const Template t = build_template({ref.shot}, BuildConfig{});
  const Layout layout = side_by_side({2, 0}, cfg);
  const SimScene s = generate_scene(pop, layout.placements, layout.width, layout.height, rng, cfg, &pop[0]);
  const GreedyMatch g = greedy_match(t, s.scene);
  const PersonTruth& truth = *s.truth.find(0);
  for (Part p : kAllParts) CHECK(g.target[index(p)] == truth.proposal[index(p)]);
  CHECK(pascal_match(g.box, truth.box));
}
