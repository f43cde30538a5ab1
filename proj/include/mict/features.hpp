#pragma once

#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "mict/geometry.hpp"
#include "mict/image.hpp"

namespace mict {

using Histogram = Eigen::VectorXd;

/// Joint HSV bin layout: hue x saturation x value.
struct HistogramLayout {
  int hue_bins = 16;
  int sat_bins = 4;
  int val_bins = 4;

  int size() const { return hue_bins * sat_bins * val_bins; }
  int bin(double h, double s, double v) const;
  // HSV at the center of a bin (inverse of `bin` up to quantization).
  Eigen::Vector3d center(int bin) const;
};

/// Appearance of one proposal: color histogram plus an opaque auxiliary
/// payload consumed by a pluggable metric.
struct Descriptor {
  Histogram hist;
  bool empty = false;  // no pixels fell inside the region
  std::vector<double> aux;
};

using AuxMetric = std::function<double(const std::vector<double>&, const std::vector<double>&)>;

double zero_aux_metric(const std::vector<double>&, const std::vector<double>&);

struct Hsv {
  double h;  // degrees in [0, 360)
  double s;
  double v;
};

Hsv rgb_to_hsv(int r, int g, int b);
std::array<std::uint8_t, 3> hsv_to_rgb(const Hsv& hsv);

/// L1-normalized joint HSV histogram over pixels whose centers fall inside
/// `region` (and inside `mask` when given). Returns a flagged empty
/// descriptor when no pixel qualifies.
Descriptor hsv_histogram(const Raster& img, const OrientedRectd& region,
                         const ForegroundMask* mask = nullptr,
                         const HistogramLayout& layout = {});

bool is_normalized(const Histogram& h, double tol = 1e-6);

/// sqrt(1 - sum_i sqrt(h1_i h2_i)), clamped to [0, 1].
double bhattacharyya(const Histogram& h1, const Histogram& h2);

/// Bhattacharyya term plus the auxiliary metric. A flagged-empty histogram
/// contributes the maximal color distance 1.
double part_distance(const Descriptor& a, const Descriptor& b,
                     const AuxMetric& aux_metric = zero_aux_metric);

double part_distance(const std::optional<Descriptor>& a, const std::optional<Descriptor>& b,
                     const AuxMetric& aux_metric = zero_aux_metric);

}  // namespace mict
