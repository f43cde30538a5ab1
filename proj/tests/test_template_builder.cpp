#include <algorithm>
#include <map>

#include "doctest.h"

#include "mict/errors.hpp"
#include "mict/random.hpp"
#include "mict/template_builder.hpp"

using namespace mict;

namespace {

constexpr double H = 175.0;

Histogram random_hist(Rng& rng) {
  Histogram h = Histogram::Zero(256);
  for (int k = 0; k < 6; ++k) h[static_cast<Eigen::Index>(rng.index(256))] += rng.uniform(0.1, 1.0);
  return h / h.sum();
}

// Row center for each part inside a 200-pixel-high shot, matching its strip.
double row_of(Part p) {
  switch (strip_index(p)) {
    case 0: return 25;
    case 1: return 75;
    case 2: return 125;
    default: return 175;
  }
}

PartProposal proposal(Part part, double x, double y, double score, Rng& rng, std::string src = "a") {
  PartProposal p;
  p.part = part;
  p.x = x;
  p.y = y;
  p.score = score;
  p.source_id = std::move(src);
  p.descriptor = Descriptor{random_hist(rng), false, {}};
  return p;
}

bool same_pose(const PartProposal& a, const PartProposal& b) {
  return a.part == b.part && a.x == b.x && a.y == b.y && a.score == b.score && a.source_id == b.source_id;
}

bool contains(const std::vector<PartProposal>& v, const PartProposal& p) {
  return std::any_of(v.begin(), v.end(), [&](const PartProposal& q) { return same_pose(p, q); });
}

}  // namespace

TEST_CASE("prune_by_foreground") {
  Rng rng(1);
  std::vector<PartProposal> props{proposal(Part::Torso, 50, 60, 1, rng), proposal(Part::Head, 120, 30, 1, rng)};
  CHECK(prune_by_foreground(props, ForegroundMask(200, 200, true), 0.75, H).size() == 2);
  CHECK(prune_by_foreground(props, ForegroundMask(200, 200, false), 0.75, H).empty());

  // Mask covering the left half of the torso rectangle.
  ForegroundMask half(200, 200, false);
  const Boxd b = rect_of(props[0], H).bounds();
  half.bits.block(0, 0, 200, static_cast<Eigen::Index>(std::round(b.center().x()))).setConstant(true);
  CHECK(foreground_fraction(rect_of(props[0], H), half) == doctest::Approx(0.5).epsilon(0.05));
  CHECK(prune_by_foreground({props[0]}, half, 0.75, H).empty());
  CHECK(prune_by_foreground({props[0]}, half, 0.4, H).size() == 1);
}

TEST_CASE("strip_filter") {
  Rng rng(2);
  CHECK(strip_filter({proposal(Part::Head, 10, 10, 1, rng)}, 100).size() == 1);
  CHECK(strip_filter({proposal(Part::Head, 10, 90, 1, rng)}, 100).empty());
  // y = height / 4 lands in strip 1.
  CHECK(strip_of(25, 100) == 1);
  CHECK(strip_filter({proposal(Part::Torso, 10, 25, 1, rng)}, 100).size() == 1);
  CHECK(strip_of(-5, 100) == 0);
  CHECK(strip_of(500, 100) == 3);
  CHECK(strip_of(100, 100) == 3);
}

TEST_CASE("nms") {
  Rng rng(3);
  SUBCASE("single proposal") { CHECK(nms({proposal(Part::Torso, 0, 0, 1, rng)}, 0.5, H).size() == 1); }
  SUBCASE("identical rectangles") {
    auto a = proposal(Part::Torso, 0, 0, 0.9, rng);
    auto b = proposal(Part::Torso, 0, 0, 0.8, rng);
    const auto kept = nms({b, a}, 0.5, H);
    REQUIRE(kept.size() == 1);
    CHECK(kept[0].score == 0.9);
  }
  SUBCASE("chain keeps the ends") {
    // Torso width 0.30 * 175 = 52.5: a 30 px step overlaps with IoU 0.27,
    // two steps are disjoint.
    auto a = proposal(Part::Torso, 0, 0, 0.9, rng);
    auto b = proposal(Part::Torso, 30, 0, 0.8, rng);
    auto c = proposal(Part::Torso, 60, 0, 0.7, rng);
    CHECK(iou(rect_of(a, H), rect_of(b, H)) > 0.2);
    CHECK(iou(rect_of(a, H), rect_of(c, H)) == 0.0);
    const auto kept = nms({c, b, a}, 0.2, H);
    REQUIRE(kept.size() == 2);
    CHECK(same_pose(kept[0], a));
    CHECK(same_pose(kept[1], c));
  }
  SUBCASE("different sources never suppress each other") {
    auto a = proposal(Part::Torso, 0, 0, 0.9, rng, "r0");
    auto b = proposal(Part::Torso, 0, 0, 0.8, rng, "r1");
    CHECK(nms({a, b}, 0.5, H).size() == 2);
  }
  SUBCASE("threshold 1 disables") {
    auto a = proposal(Part::Torso, 0, 0, 0.9, rng);
    CHECK(nms({a, a, a}, 1.0, H).size() == 3);
  }
}

TEST_CASE("build_template") {
  Rng rng(4);
  SUBCASE("one clean reference") {
    ReferenceShot shot;
    shot.width = 100;
    shot.height = 200;
    shot.id = "r0";
    for (Part p : kAllParts) shot.proposals.push_back(proposal(p, 50, row_of(p), 1.0, rng, "r0"));
    const Template t = build_template({shot}, BuildConfig{});
    for (Part p : kAllParts) CHECK(t.at(p).size() == 1);
  }

  SUBCASE("three references, K = 2 keeps the top scores") {
    std::vector<ReferenceShot> shots;
    std::map<Part, std::vector<double>> scores;
    for (int r = 0; r < 3; ++r) {
      ReferenceShot shot;
      shot.width = 400;
      shot.height = 200;
      shot.id = "r" + std::to_string(r);
      for (Part p : kAllParts)
        for (int k = 0; k < 3; ++k) {
          // Spread horizontally so that nothing overlaps.
          const double s = rng.uniform();
          shot.proposals.push_back(proposal(p, 40 + 120 * k, row_of(p), s, rng, shot.id));
          scores[p].push_back(s);
        }
      shots.push_back(shot);
    }
    BuildConfig cfg;
    cfg.K = 2;
    const Template t = build_template(shots, cfg);
    for (Part p : kAllParts) {
      auto& s = scores[p];
      std::sort(s.rbegin(), s.rend());
      REQUIRE(t.at(p).size() == 2);
      CHECK(t.at(p)[0].score == s[0]);
      CHECK(t.at(p)[1].score == s[1]);
    }
    CHECK(build_template(shots, cfg).size() == t.size());
  }

  SUBCASE("dedup") {
    ReferenceShot shot;
    shot.width = 400;
    shot.height = 200;
    for (Part p : kAllParts) {
      auto a = proposal(p, 40, row_of(p), 0.9, rng);
      auto b = proposal(p, 200, row_of(p), 0.8, rng);
      b.descriptor = a.descriptor;
      shot.proposals.push_back(a);
      shot.proposals.push_back(b);
    }
    BuildConfig cfg;
    CHECK(build_template({shot}, cfg).size() == 20);
    cfg.dedup_distance = 0.01;
    CHECK(build_template({shot}, cfg).size() == 10);
  }

  SUBCASE("missing part") {
    ReferenceShot shot;
    shot.width = 100;
    shot.height = 200;
    for (Part p : kAllParts)
      if (p != Part::Head) shot.proposals.push_back(proposal(p, 50, row_of(p), 1.0, rng));
    try {
      build_template({shot}, BuildConfig{});
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::TemplateIncomplete);
    }
  }

  SUBCASE("bad configuration") {
    BuildConfig cfg;
    cfg.K = 0;
    CHECK_THROWS_AS(validate(cfg), Error);
    cfg = {};
    cfg.nms_iou = 0.0;
    CHECK_THROWS_AS(validate(cfg), Error);
    CHECK_THROWS_AS(build_template({}, BuildConfig{}), Error);
  }
}

TEST_CASE("template builder only filters and reorders") {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    ReferenceShot shot;
    shot.width = 300;
    shot.height = 200;
    shot.id = "r";
    ForegroundMask mask(300, 200, false);
    mask.bits.block(0, 0, 200, 150).setConstant(true);
    shot.mask = mask;
    for (Part p : kAllParts) {
      shot.proposals.push_back(proposal(p, 60, row_of(p), 2.0, rng, "r"));
      for (int k = 0; k < 6; ++k)
        shot.proposals.push_back(
            proposal(p, rng.uniform(0, 300), rng.uniform(0, 200), rng.uniform(), rng, "r"));
    }
    BuildConfig cfg;
    cfg.K = 1 + rng.index(4);
    const Template t = build_template({shot}, cfg);
    for (Part p : kAllParts) {
      CHECK(t.at(p).size() <= cfg.K);
      for (const auto& q : t.at(p)) CHECK(contains(shot.proposals, q));
      CHECK(std::is_sorted(t.at(p).begin(), t.at(p).end(), nms_before));
    }
  }
}

TEST_CASE("build_scene") {
  Rng rng(6);
  CHECK(build_scene({}, nullptr, 100, 100, BuildConfig{}).size() == 0);

  ForegroundMask mask(200, 200, false);
  mask.bits.block(0, 0, 200, 100).setConstant(true);
  const auto inside = proposal(Part::Torso, 40, 100, 0.5, rng);
  const auto outside = proposal(Part::Torso, 170, 100, 0.9, rng);
  const Scene s = build_scene({inside, outside}, &mask, 200, 200, BuildConfig{});
  REQUIRE(s.at(Part::Torso).size() == 1);
  CHECK(same_pose(s.at(Part::Torso)[0], inside));

  auto dup = inside;
  dup.x += 1;
  dup.score = 0.4;
  const Scene d = build_scene({inside, dup}, nullptr, 200, 200, BuildConfig{});
  REQUIRE(d.at(Part::Torso).size() == 1);
  CHECK(d.at(Part::Torso)[0].score == 0.5);
}
