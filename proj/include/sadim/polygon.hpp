#pragma once

// Convex polygons: the bodies f_w(K) that carry every covering and
// intersection computation.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "sadim/linalg.hpp"

namespace sadim {

/// Closed segment [lo, hi] in the coordinate of a line.
struct Segment {
  double lo = 0.0;
  double hi = 0.0;
  double length() const { return hi - lo; }
};

class ConvexPolygon {
 public:
  ConvexPolygon() = default;
  /// Vertices in counter-clockwise order.
  explicit ConvexPolygon(std::vector<Vec2> vertices) : v_(std::move(vertices)) {
    if (v_.size() >= 3 && signed_area() < 0) std::reverse(v_.begin(), v_.end());
  }

  static ConvexPolygon rectangle(double x0, double y0, double x1, double y1) {
    return ConvexPolygon({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}});
  }
  /// Regular n-gon circumscribing the disk B(center, r).
  static ConvexPolygon circumscribing(const Vec2& center, double r, int n = 64) {
    const double big = r / std::cos(kPi / n);
    std::vector<Vec2> pts;
    pts.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
      const double a = 2 * kPi * (k + 0.5) / n;
      pts.push_back(center + Vec2{big * std::cos(a), big * std::sin(a)});
    }
    return ConvexPolygon(std::move(pts));
  }

  const std::vector<Vec2>& vertices() const { return v_; }
  std::size_t size() const { return v_.size(); }

  double signed_area() const {
    double s = 0.0;
    for (std::size_t i = 0; i < v_.size(); ++i) s += cross(v_[i], v_[(i + 1) % v_.size()]);
    return 0.5 * s;
  }

  ConvexPolygon transformed(const Matrix2& a, const Vec2& t) const {
    std::vector<Vec2> out;
    out.reserve(v_.size());
    for (const auto& p : v_) out.push_back(a(p) + t);
    return ConvexPolygon(std::move(out));
  }

  /// [min, max] of <u, x> over the polygon.
  Segment support(const Vec2& u) const {
    Segment s{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (const auto& p : v_) {
      const double d = dot(u, p);
      s.lo = std::min(s.lo, d);
      s.hi = std::max(s.hi, d);
    }
    return s;
  }

  /// Intersection with the line {x : <n, x> = t} for unit n, parametrised by
  /// <perp(n), x>.
  std::optional<Segment> chord(const Vec2& n, double t) const {
    const Vec2 along = perp(n);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    const std::size_t k = v_.size();
    for (std::size_t i = 0; i < k; ++i) {
      const Vec2& p = v_[i];
      const Vec2& q = v_[(i + 1) % k];
      const double dp = dot(n, p) - t;
      const double dq = dot(n, q) - t;
      if (dp == 0.0) {
        const double s = dot(along, p);
        lo = std::min(lo, s);
        hi = std::max(hi, s);
      }
      if ((dp < 0.0 && dq > 0.0) || (dp > 0.0 && dq < 0.0)) {
        const double w = dp / (dp - dq);
        const double s = dot(along, p) + w * (dot(along, q) - dot(along, p));
        lo = std::min(lo, s);
        hi = std::max(hi, s);
      }
    }
    if (lo > hi) return std::nullopt;
    return Segment{lo, hi};
  }

  double diameter() const {
    double d = 0.0;
    for (std::size_t i = 0; i < v_.size(); ++i)
      for (std::size_t j = i + 1; j < v_.size(); ++j) d = std::max(d, norm(v_[i] - v_[j]));
    return d;
  }

  /// Minimal width over all directions (attained at an edge normal).
  double width() const {
    double w = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < v_.size(); ++i) {
      const Vec2 e = v_[(i + 1) % v_.size()] - v_[i];
      const double len = norm(e);
      if (len > 0) w = std::min(w, support((1.0 / len) * perp(e)).length());
    }
    return v_.size() < 3 ? 0.0 : w;
  }

  Vec2 centroid() const {
    Vec2 c;
    for (const auto& p : v_) c += p;
    return (1.0 / static_cast<double>(v_.size())) * c;
  }

  bool contains(const Vec2& x, double tol = 0.0) const {
    for (std::size_t i = 0; i < v_.size(); ++i) {
      const Vec2& p = v_[i];
      const Vec2& q = v_[(i + 1) % v_.size()];
      if (cross(q - p, x - p) < -tol * norm(q - p)) return false;
    }
    return true;
  }

  /// Euclidean distance from x to the polygon (0 inside).
  double distance(const Vec2& x) const {
    if (contains(x)) return 0.0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < v_.size(); ++i) {
      const Vec2& p = v_[i];
      const Vec2& q = v_[(i + 1) % v_.size()];
      const Vec2 e = q - p;
      const double ee = dot(e, e);
      const double w = ee > 0 ? std::clamp(dot(x - p, e) / ee, 0.0, 1.0) : 0.0;
      best = std::min(best, norm(x - (p + w * e)));
    }
    return best;
  }

  /// Largest distance from x to a vertex; the polygon lies in B(x, r) iff this is <= r.
  double max_distance(const Vec2& x) const {
    double d = 0.0;
    for (const auto& p : v_) d = std::max(d, norm(p - x));
    return d;
  }

 private:
  std::vector<Vec2> v_;
};

/// Separating-axis overlap depth of two convex polygons: negative when a
/// separating gap exists, zero when they only touch, positive for interior
/// overlap (the minimal penetration over all edge normals).
inline double overlap_depth(const ConvexPolygon& a, const ConvexPolygon& b) {
  double depth = std::numeric_limits<double>::infinity();
  auto scan = [&](const ConvexPolygon& p) {
    const auto& v = p.vertices();
    for (std::size_t i = 0; i < v.size(); ++i) {
      const Vec2 e = v[(i + 1) % v.size()] - v[i];
      const double len = norm(e);
      if (len == 0.0) continue;
      const Vec2 n = (1.0 / len) * perp(e);
      const Segment sa = a.support(n);
      const Segment sb = b.support(n);
      depth = std::min(depth, std::min(sa.hi, sb.hi) - std::max(sa.lo, sb.lo));
    }
  };
  scan(a);
  scan(b);
  return depth;
}

}  // namespace sadim
