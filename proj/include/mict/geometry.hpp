#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace mict {

template <typename Scalar>
using Point2 = Eigen::Matrix<Scalar, 2, 1>;

template <typename Scalar>
using Box2 = Eigen::AlignedBox<Scalar, 2>;

using Boxd = Box2<double>;

template <typename Scalar>
Eigen::Matrix<Scalar, 2, 2> rotation(Scalar theta) {
  return Eigen::Rotation2D<Scalar>(theta).toRotationMatrix();
}

// Wraps an angle into (-pi, pi].
template <typename Scalar>
Scalar wrap_angle(Scalar theta) {
  const Scalar two_pi = Scalar(2) * Scalar(EIGEN_PI);
  Scalar r = std::fmod(theta, two_pi);
  if (r <= -Scalar(EIGEN_PI)) r += two_pi;
  if (r > Scalar(EIGEN_PI)) r -= two_pi;
  return r;
}

// Twice the signed area; positive for counterclockwise order.
template <typename Scalar>
Scalar signed_area2(const std::vector<Point2<Scalar>>& poly) {
  Scalar a(0);
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& p = poly[i];
    const auto& q = poly[(i + 1) % n];
    a += p.x() * q.y() - q.x() * p.y();
  }
  return a;
}

template <typename Scalar>
Scalar polygon_area(const std::vector<Point2<Scalar>>& poly) {
  if (poly.size() < 3) return Scalar(0);
  return std::abs(signed_area2(poly)) / Scalar(2);
}

/// Sutherland-Hodgman clip of `subject` against a convex counterclockwise
/// `clip` polygon. Both inputs must be convex; the result is convex.
template <typename Scalar>
std::vector<Point2<Scalar>> clip_convex(std::vector<Point2<Scalar>> subject,
                                        const std::vector<Point2<Scalar>>& clip) {
  const std::size_t m = clip.size();
  for (std::size_t i = 0; i < m && !subject.empty(); ++i) {
    const Point2<Scalar> a = clip[i];
    const Point2<Scalar> b = clip[(i + 1) % m];
    const Point2<Scalar> edge = b - a;
    auto side = [&](const Point2<Scalar>& p) {
      const Point2<Scalar> d = p - a;
      return edge.x() * d.y() - edge.y() * d.x();
    };
    std::vector<Point2<Scalar>> out;
    out.reserve(subject.size() + 2);
    const std::size_t n = subject.size();
    for (std::size_t k = 0; k < n; ++k) {
      const Point2<Scalar>& cur = subject[k];
      const Point2<Scalar>& nxt = subject[(k + 1) % n];
      const Scalar sc = side(cur);
      const Scalar sn = side(nxt);
      if (sc >= Scalar(0)) out.push_back(cur);
      if ((sc >= Scalar(0)) != (sn >= Scalar(0))) {
        const Scalar t = sc / (sc - sn);
        out.push_back(cur + t * (nxt - cur));
      }
    }
    subject = std::move(out);
  }
  return subject;
}

/// Rectangle with arbitrary orientation; corners are counterclockwise.
template <typename Scalar>
struct OrientedRect {
  std::array<Point2<Scalar>, 4> corners;

  static OrientedRect make(const Point2<Scalar>& center, Scalar theta, Scalar width,
                           Scalar height) {
    const auto R = rotation(theta);
    const Scalar hw = width / Scalar(2);
    const Scalar hh = height / Scalar(2);
    OrientedRect r;
    r.corners = {center + R * Point2<Scalar>(-hw, -hh), center + R * Point2<Scalar>(hw, -hh),
                 center + R * Point2<Scalar>(hw, hh), center + R * Point2<Scalar>(-hw, hh)};
    return r;
  }

  std::vector<Point2<Scalar>> polygon() const { return {corners.begin(), corners.end()}; }

  Scalar area() const { return polygon_area(polygon()); }

  Point2<Scalar> center() const {
    return (corners[0] + corners[1] + corners[2] + corners[3]) / Scalar(4);
  }

  Box2<Scalar> bounds() const {
    Box2<Scalar> b;
    for (const auto& c : corners) b.extend(c);
    return b;
  }

  bool contains(const Point2<Scalar>& p) const {
    for (std::size_t i = 0; i < 4; ++i) {
      const Point2<Scalar> e = corners[(i + 1) % 4] - corners[i];
      const Point2<Scalar> d = p - corners[i];
      if (e.x() * d.y() - e.y() * d.x() < Scalar(0)) return false;
    }
    return true;
  }

  template <typename Transform>
  OrientedRect transformed(const Transform& t) const {
    OrientedRect r;
    for (std::size_t i = 0; i < 4; ++i) r.corners[i] = t * corners[i];
    return r;
  }
};

using OrientedRectd = OrientedRect<double>;

template <typename Scalar>
Scalar intersection_area(const OrientedRect<Scalar>& a, const OrientedRect<Scalar>& b) {
  return polygon_area(clip_convex(a.polygon(), b.polygon()));
}

/// Intersection over union of two oriented rectangles (exact, via polygon
/// clipping). Degenerate inputs yield 0.
template <typename Scalar>
Scalar iou(const OrientedRect<Scalar>& a, const OrientedRect<Scalar>& b) {
  const Scalar area_a = a.area();
  const Scalar area_b = b.area();
  if (!(area_a > Scalar(0)) || !(area_b > Scalar(0))) return Scalar(0);
  if (!a.bounds().intersects(b.bounds())) return Scalar(0);
  const Scalar inter = intersection_area(a, b);
  const Scalar uni = area_a + area_b - inter;
  if (!(uni > Scalar(0))) return Scalar(0);
  return std::clamp(inter / uni, Scalar(0), Scalar(1));
}

/// Axis-aligned box IoU; empty or zero-area boxes yield 0.
template <typename Scalar>
Scalar iou(const Box2<Scalar>& a, const Box2<Scalar>& b) {
  if (a.isEmpty() || b.isEmpty()) return Scalar(0);
  const Box2<Scalar> inter = a.intersection(b);
  const Scalar inter_area = inter.isEmpty() ? Scalar(0) : inter.volume();
  const Scalar uni = a.volume() + b.volume() - inter_area;
  if (!(uni > Scalar(0))) return Scalar(0);
  return std::clamp(inter_area / uni, Scalar(0), Scalar(1));
}

}  // namespace mict
