#include "mict/features.hpp"

#include <algorithm>
#include <cmath>

#include "mict/errors.hpp"

namespace mict {

int HistogramLayout::bin(double h, double s, double v) const {
  const int hb = std::clamp(static_cast<int>(std::floor(h / 360.0 * hue_bins)), 0, hue_bins - 1);
  const int sb = std::clamp(static_cast<int>(std::floor(s * sat_bins)), 0, sat_bins - 1);
  const int vb = std::clamp(static_cast<int>(std::floor(v * val_bins)), 0, val_bins - 1);
  return (hb * sat_bins + sb) * val_bins + vb;
}

Eigen::Vector3d HistogramLayout::center(int b) const {
  const int vb = b % val_bins;
  const int sb = (b / val_bins) % sat_bins;
  const int hb = b / (val_bins * sat_bins);
  return {(hb + 0.5) * 360.0 / hue_bins, (sb + 0.5) / sat_bins, (vb + 0.5) / val_bins};
}

double zero_aux_metric(const std::vector<double>&, const std::vector<double>&) { return 0.0; }

Hsv rgb_to_hsv(int r, int g, int b) {
  const double rf = r / 255.0, gf = g / 255.0, bf = b / 255.0;
  const double mx = std::max({rf, gf, bf});
  const double mn = std::min({rf, gf, bf});
  const double delta = mx - mn;
  Hsv out{0.0, mx > 0.0 ? delta / mx : 0.0, mx};
  if (delta <= 0.0) return out;
  double h;
  if (mx == rf)
    h = std::fmod((gf - bf) / delta, 6.0);
  else if (mx == gf)
    h = (bf - rf) / delta + 2.0;
  else
    h = (rf - gf) / delta + 4.0;
  h *= 60.0;
  if (h < 0.0) h += 360.0;
  if (h >= 360.0) h -= 360.0;
  out.h = h;
  return out;
}

std::array<std::uint8_t, 3> hsv_to_rgb(const Hsv& hsv) {
  const double c = hsv.v * hsv.s;
  const double hp = std::fmod(hsv.h, 360.0) / 60.0;
  const double x = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
  double r = 0, g = 0, b = 0;
  switch (static_cast<int>(std::floor(hp)) % 6) {
    case 0: r = c; g = x; break;
    case 1: r = x; g = c; break;
    case 2: g = c; b = x; break;
    case 3: g = x; b = c; break;
    case 4: r = x; b = c; break;
    default: r = c; b = x; break;
  }
  const double m = hsv.v - c;
  auto q = [m](double u) {
    return static_cast<std::uint8_t>(std::clamp(std::lround((u + m) * 255.0), 0L, 255L));
  };
  return {q(r), q(g), q(b)};
}

Descriptor hsv_histogram(const Raster& img, const OrientedRectd& region, const ForegroundMask* mask,
                         const HistogramLayout& layout) {
  if (mask && (mask->width() != img.width || mask->height() != img.height))
    fail(ErrorKind::ContractViolation, "mask size differs from image size");
  const Boxd image_box(Eigen::Vector2d(0, 0), Eigen::Vector2d(img.width, img.height));
  const Boxd rb = region.bounds();
  if (!image_box.intersects(rb) || rb.intersection(image_box).volume() <= 0.0)
    fail(ErrorKind::EmptyRegion, "region lies entirely outside the image");

  Descriptor d;
  d.hist = Histogram::Zero(layout.size());
  double count = 0.0;
  for_each_pixel_in(region, img.width, img.height, true, [&](int x, int y) {
    if (mask && !mask->at(x, y)) return;
    const auto px = img.at(x, y);
    const Hsv c = rgb_to_hsv(px[0], px[1], px[2]);
    d.hist[layout.bin(c.h, c.s, c.v)] += 1.0;
    count += 1.0;
  });
  if (count > 0.0)
    d.hist /= count;
  else
    d.empty = true;
  return d;
}

bool is_normalized(const Histogram& h, double tol) {
  return h.size() > 0 && (h.array() >= 0.0).all() && std::abs(h.sum() - 1.0) <= tol;
}

double bhattacharyya(const Histogram& h1, const Histogram& h2) {
  if (h1.size() != h2.size())
    fail(ErrorKind::ContractViolation, "histogram bin counts differ");
  if (!is_normalized(h1) || !is_normalized(h2))
    fail(ErrorKind::ContractViolation, "bhattacharyya needs L1-normalized histograms");
  const double bc = (h1.array() * h2.array()).sqrt().sum();
  return std::sqrt(std::clamp(1.0 - bc, 0.0, 1.0));
}

double part_distance(const Descriptor& a, const Descriptor& b, const AuxMetric& aux_metric) {
  const double color = (a.empty || b.empty) ? 1.0 : bhattacharyya(a.hist, b.hist);
  return color + (aux_metric ? aux_metric(a.aux, b.aux) : 0.0);
}

double part_distance(const std::optional<Descriptor>& a, const std::optional<Descriptor>& b,
                     const AuxMetric& aux_metric) {
  if (!a || !b) fail(ErrorKind::MissingFeature, "proposal has no descriptor");
  return part_distance(*a, *b, aux_metric);
}

}  // namespace mict
