#include <algorithm>
#include <cmath>

#include "doctest.h"

#include "mict/errors.hpp"
#include "mict/features.hpp"
#include "mict/random.hpp"

using namespace mict;
using doctest::Approx;

namespace {

Histogram hist(std::initializer_list<double> v) {
  Histogram h(static_cast<Eigen::Index>(v.size()));
  std::copy(v.begin(), v.end(), h.data());
  return h;
}

Histogram random_hist(Rng& rng, int n) {
  Histogram h(n);
  for (int i = 0; i < n; ++i) h[i] = rng.uniform() < 0.5 ? 0.0 : rng.uniform();
  if (h.sum() == 0) h[0] = 1;
  return h / h.sum();
}

Descriptor desc(const Histogram& h, std::vector<double> aux = {}) { return {h, false, std::move(aux)}; }

}  // namespace

TEST_CASE("rgb_to_hsv") {
  auto red = rgb_to_hsv(255, 0, 0);
  CHECK(red.h == Approx(0));
  CHECK(red.s == Approx(1));
  CHECK(red.v == Approx(1));

  auto gray = rgb_to_hsv(128, 128, 128);
  CHECK(gray.h == Approx(0));
  CHECK(gray.s == Approx(0));
  CHECK(gray.v == Approx(128.0 / 255.0));

  // Blue is the maximum: h = 60 (4 + (r - g) / (max - min)).
  auto azure = rgb_to_hsv(0, 128, 255);
  CHECK(azure.h == Approx(60.0 * (4.0 - 128.0 / 255.0)));
  CHECK(azure.h == Approx(209.9).epsilon(1e-3));
  CHECK(azure.s == Approx(1));
  CHECK(azure.v == Approx(1));

  Rng rng(3);
  for (int i = 0; i < 500; ++i) {
    const auto c = rgb_to_hsv(static_cast<int>(rng.index(256)), static_cast<int>(rng.index(256)),
                              static_cast<int>(rng.index(256)));
    CHECK(c.h >= 0);
    CHECK(c.h < 360);
    CHECK(c.s >= 0);
    CHECK(c.s <= 1);
    CHECK(c.v >= 0);
    CHECK(c.v <= 1);
    const auto rgb = hsv_to_rgb(c);
    const auto back = rgb_to_hsv(rgb[0], rgb[1], rgb[2]);
    CHECK(back.v == Approx(c.v).epsilon(0.01));
  }
}

TEST_CASE("histogram layout") {
  HistogramLayout layout;
  CHECK(layout.size() == 256);
  for (int b = 0; b < layout.size(); ++b) {
    const auto c = layout.center(b);
    CHECK(layout.bin(c.x(), c.y(), c.z()) == b);
  }
  CHECK(layout.bin(359.999, 1.0, 1.0) < layout.size());
}

TEST_CASE("hsv_histogram") {
  Raster img(20, 10);
  for (int y = 0; y < 10; ++y)
    for (int x = 0; x < 20; ++x) img.set(x, y, x < 10 ? std::array<std::uint8_t, 3>{255, 0, 0} : std::array<std::uint8_t, 3>{0, 255, 0});
  HistogramLayout layout;

  SUBCASE("uniform red crop") {
    const auto d = hsv_histogram(img, OrientedRectd::make({5, 5}, 0, 10, 10));
    CHECK_FALSE(d.empty);
    CHECK((d.hist.array() > 0).count() == 1);
    CHECK(d.hist.maxCoeff() == Approx(1.0));
    CHECK(d.hist[layout.bin(0, 1, 1)] == Approx(1.0));
  }
  SUBCASE("half red, half green") {
    const auto d = hsv_histogram(img, OrientedRectd::make({10, 5}, 0, 20, 10));
    CHECK((d.hist.array() > 0).count() == 2);
    CHECK(d.hist[layout.bin(0, 1, 1)] == Approx(0.5));
    CHECK(d.hist[layout.bin(120, 1, 1)] == Approx(0.5));
  }
  SUBCASE("mask with no overlap") {
    ForegroundMask mask(20, 10, false);
    const auto d = hsv_histogram(img, OrientedRectd::make({5, 5}, 0, 10, 10), &mask);
    CHECK(d.empty);
    CHECK(d.hist.sum() == 0.0);
  }
  SUBCASE("region outside the image") {
    CHECK_THROWS_AS(hsv_histogram(img, OrientedRectd::make({-50, -50}, 0, 4, 4)), Error);
  }
  SUBCASE("pixel order does not matter") {
    // Mirror the image horizontally and the region with it.
    Rng rng(9);
    Raster a(16, 16), b(16, 16);
    for (int y = 0; y < 16; ++y)
      for (int x = 0; x < 16; ++x) {
        const std::array<std::uint8_t, 3> c{static_cast<std::uint8_t>(rng.index(256)),
                                            static_cast<std::uint8_t>(rng.index(256)),
                                            static_cast<std::uint8_t>(rng.index(256))};
        a.set(x, y, c);
        b.set(15 - x, y, c);
      }
    const auto ha = hsv_histogram(a, OrientedRectd::make({8, 8}, 0, 16, 16));
    const auto hb = hsv_histogram(b, OrientedRectd::make({8, 8}, 0, 16, 16));
    CHECK((ha.hist - hb.hist).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(is_normalized(ha.hist));
  }
}

TEST_CASE("bhattacharyya") {
  const auto a = hist({1, 0});
  const auto b = hist({0.5, 0.5});
  CHECK(bhattacharyya(a, a) == Approx(0));
  CHECK(bhattacharyya(a, hist({0, 1})) == Approx(1));
  CHECK(bhattacharyya(a, b) == Approx(std::sqrt(1 - std::sqrt(0.5))).epsilon(1e-12));
  CHECK(bhattacharyya(a, b) == Approx(0.54120).epsilon(1e-5));

  CHECK_THROWS_AS(bhattacharyya(hist({0.7, 0.7}), a), Error);
  CHECK_THROWS_AS(bhattacharyya(hist({1, 0, 0}), a), Error);

  Rng rng(4);
  for (int i = 0; i < 200; ++i) {
    const auto h1 = random_hist(rng, 8);
    const auto h2 = random_hist(rng, 8);
    const double d = bhattacharyya(h1, h2);
    CHECK(d >= 0);
    CHECK(d <= 1);
    CHECK(std::abs(d - bhattacharyya(h2, h1)) < 1e-12);
    CHECK(bhattacharyya(h1, h1) < 1e-6);
    if ((h1 - h2).cwiseAbs().maxCoeff() > 1e-3) CHECK(d > 0);
  }
}

TEST_CASE("part_distance") {
  const auto a = desc(hist({1, 0}), {1.0});
  const auto b = desc(hist({0.5, 0.5}), {2.0});
  CHECK(part_distance(a, a) == Approx(0));
  CHECK(part_distance(desc(hist({1, 0})), desc(hist({0, 1}))) == Approx(1));
  const AuxMetric constant = [](const std::vector<double>&, const std::vector<double>&) { return 0.2; };
  CHECK(part_distance(a, b, constant) == Approx(0.74120).epsilon(1e-5));

  const AuxMetric l1 = [](const std::vector<double>& x, const std::vector<double>& y) {
    return std::abs(x[0] - y[0]);
  };
  CHECK(part_distance(a, b, l1) == Approx(part_distance(b, a, l1)));
  CHECK(part_distance(a, b, l1) == Approx(0.54120 + 1.0).epsilon(1e-5));

  Descriptor empty{Histogram::Zero(2), true, {}};
  CHECK(part_distance(empty, a) == Approx(1));

  CHECK_THROWS_AS(part_distance(std::optional<Descriptor>{}, std::optional<Descriptor>{a}), Error);
}
