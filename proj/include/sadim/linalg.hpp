#pragma once

// Planar linear algebra and geometry of the projective line RP^1.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "sadim/error.hpp"

namespace sadim {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kAngleTol = 1e-12;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
  Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
  friend Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
  friend Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
  friend Vec2 operator*(double s, const Vec2& v) { return {s * v.x, s * v.y}; }
  friend Vec2 operator-(const Vec2& v) { return {-v.x, -v.y}; }
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Vec2& v) { return std::hypot(v.x, v.y); }
inline Vec2 perp(const Vec2& v) { return {-v.y, v.x}; }

struct Matrix2 {
  double a11 = 1.0, a12 = 0.0;
  double a21 = 0.0, a22 = 1.0;

  static Matrix2 identity() { return {}; }
  static Matrix2 diag(double a, double c) { return {a, 0.0, 0.0, c}; }

  double det() const { return a11 * a22 - a12 * a21; }
  double max_abs() const {
    return std::max({std::abs(a11), std::abs(a12), std::abs(a21), std::abs(a22)});
  }
  // Exactly singular (or non-finite).  Long word products are legitimately
  // conditioned far beyond 1e15, so only an exact zero determinant fails.
  bool singular() const {
    const double d = det();
    return d == 0.0 || !std::isfinite(d);
  }
  // |det| vanishing relative to the entry scale; used to reject input maps.
  bool near_singular() const {
    const double s = max_abs();
    return s == 0.0 || std::abs(det()) <= 1e-15 * s * s;
  }
  void require_nonsingular(const char* where) const {
    if (singular()) throw Error(ErrorKind::SingularMatrix, where);
  }

  Matrix2 transpose() const { return {a11, a21, a12, a22}; }
  Matrix2 inverse() const {
    require_nonsingular("inverse");
    const double d = det();
    return {a22 / d, -a12 / d, -a21 / d, a11 / d};
  }
  Matrix2 scaled(double s) const { return {s * a11, s * a12, s * a21, s * a22}; }

  Vec2 operator()(const Vec2& v) const { return {a11 * v.x + a12 * v.y, a21 * v.x + a22 * v.y}; }

  friend Matrix2 operator*(const Matrix2& a, const Matrix2& b) {
    return {a.a11 * b.a11 + a.a12 * b.a21, a.a11 * b.a12 + a.a12 * b.a22,
            a.a21 * b.a11 + a.a22 * b.a21, a.a21 * b.a12 + a.a22 * b.a22};
  }
  friend bool operator==(const Matrix2&, const Matrix2&) = default;
};

// ---------------------------------------------------------------------------
// Projective line

inline double wrap_pi(double theta) {
  double t = std::fmod(theta, kPi);
  if (t < 0.0) t += kPi;
  if (t >= kPi) t = 0.0;
  return t;
}

/// A line through the origin, stored as its angle in [0, pi).
class ProjPoint {
 public:
  ProjPoint() = default;

  static ProjPoint from_angle(double theta) { return ProjPoint(wrap_pi(theta)); }
  static ProjPoint from_vector(const Vec2& v) {
    if (v.x == 0.0 && v.y == 0.0) throw Error(ErrorKind::InvalidArgument, "zero vector has no direction");
    return from_angle(std::atan2(v.y, v.x));
  }
  static ProjPoint from_slope(double slope) { return from_angle(std::atan(slope)); }
  static ProjPoint x_axis() { return ProjPoint(0.0); }
  static ProjPoint y_axis() { return ProjPoint(kPi / 2); }

  double angle() const { return theta_; }

  /// Canonical unit representative: first nonzero coordinate positive.
  Vec2 unit() const {
    Vec2 v{std::cos(theta_), std::sin(theta_)};
    if (theta_ > kPi / 2) v = -v;
    if (theta_ == kPi / 2) v = {0.0, 1.0};
    return v;
  }
  /// Representative (cos, sin) with angle in [0, pi); continuous across pi/2.
  Vec2 raw_unit() const { return {std::cos(theta_), std::sin(theta_)}; }

  ProjPoint orthogonal() const { return from_angle(theta_ + kPi / 2); }

  /// Slope of the line; infinite for the vertical direction.
  double slope() const { return std::tan(theta_); }

 private:
  explicit ProjPoint(double t) : theta_(t) {}
  double theta_ = 0.0;
};

/// Angle between two lines, in [0, pi/2].
inline double proj_distance(const ProjPoint& a, const ProjPoint& b) {
  const double d = wrap_pi(a.angle() - b.angle());
  return std::min(d, kPi - d);
}

/// Counter-clockwise offset from a to b in [0, pi).
inline double ccw_offset(double from, double to) { return wrap_pi(to - from); }

/// Closed projective arc [start, start + length] traversed counter-clockwise.
struct ProjInterval {
  double start = 0.0;   // in [0, pi)
  double length = 0.0;  // in [0, pi)

  static ProjInterval from_endpoints(double a, double b) {
    return {wrap_pi(a), ccw_offset(a, b)};
  }
  static ProjInterval from_slopes(double lo, double hi) {
    return from_endpoints(std::atan(lo), std::atan(hi));
  }

  double end() const { return wrap_pi(start + length); }
  ProjPoint first() const { return ProjPoint::from_angle(start); }
  ProjPoint last() const { return ProjPoint::from_angle(start + length); }
  ProjPoint midpoint() const { return ProjPoint::from_angle(start + length / 2); }
  bool proper() const { return length < kPi; }

  bool contains(const ProjPoint& p, double tol = kAngleTol) const {
    const double off = ccw_offset(start, p.angle());
    return off <= length + tol || off >= kPi - tol;
  }
  /// Room to spare on both sides of `inner` inside this arc; negative if it does not fit.
  double inner_margin(const ProjInterval& inner) const {
    const double off = ccw_offset(start, inner.start);
    if (off + inner.length > length) return -1.0;
    return std::min(off, length - off - inner.length);
  }
  ProjInterval padded(double eps) const {
    return {wrap_pi(start - eps), std::min(length + 2 * eps, kPi)};
  }
};

/// Pairwise-disjoint union of closed proper arcs.
class Multicone {
 public:
  Multicone() = default;
  explicit Multicone(std::vector<ProjInterval> arcs) : arcs_(std::move(arcs)) { normalize(); }

  const std::vector<ProjInterval>& arcs() const { return arcs_; }
  bool empty() const { return arcs_.empty(); }
  std::size_t size() const { return arcs_.size(); }

  double total_length() const {
    double s = 0.0;
    for (const auto& a : arcs_) s += a.length;
    return s;
  }
  /// True when the arcs have been merged into all of RP^1.
  bool full() const { return arcs_.size() == 1 && arcs_.front().length >= kPi; }

  bool contains(const ProjPoint& p, double tol = kAngleTol) const {
    return std::any_of(arcs_.begin(), arcs_.end(), [&](const auto& a) { return a.contains(p, tol); });
  }

  /// Spare room on both sides of `inner` inside the arc holding it; negative
  /// when no single arc contains it.
  double containment_margin(const ProjInterval& inner) const {
    double best = -1.0;
    for (const auto& a : arcs_) best = std::max(best, a.inner_margin(inner));
    return best;
  }

  /// Merges the two arcs separated by the smallest gap until at most `cap` remain.
  void merge_to(std::size_t cap) {
    while (arcs_.size() > std::max<std::size_t>(cap, 1)) {
      std::size_t best = 0;
      double best_gap = kPi;
      for (std::size_t i = 0; i < arcs_.size(); ++i) {
        const auto& a = arcs_[i];
        const auto& b = arcs_[(i + 1) % arcs_.size()];
        const double gap = ccw_offset(a.end(), b.start);
        if (gap < best_gap) {
          best_gap = gap;
          best = i;
        }
      }
      const std::size_t j = (best + 1) % arcs_.size();
      const double len = arcs_[best].length + best_gap + arcs_[j].length;
      arcs_[best].length = std::min(len, kPi);
      arcs_.erase(arcs_.begin() + static_cast<std::ptrdiff_t>(j));
      if (arcs_.size() == 1 || len >= kPi) normalize();
    }
  }

 private:
  void normalize() {
    if (arcs_.empty()) return;
    for (auto& a : arcs_) {
      a.start = wrap_pi(a.start);
      a.length = std::clamp(a.length, 0.0, kPi);
      if (a.length >= kPi) {
        arcs_ = {ProjInterval{0.0, kPi}};
        return;
      }
    }
    std::sort(arcs_.begin(), arcs_.end(), [](const auto& a, const auto& b) { return a.start < b.start; });
    // Linear sweep, then fix the wrap-around between last and first.
    std::vector<ProjInterval> out;
    for (const auto& a : arcs_) {
      if (!out.empty() && a.start <= out.back().start + out.back().length) {
        auto& b = out.back();
        b.length = std::max(b.length, a.start + a.length - b.start);
      } else {
        out.push_back(a);
      }
    }
    while (out.size() > 1) {
      auto& last = out.back();
      auto& first = out.front();
      const double last_end = last.start + last.length;  // may exceed pi
      if (last_end - kPi < first.start) break;
      last.length = std::max(last.length, first.start + kPi + first.length - last.start);
      out.erase(out.begin());
    }
    for (auto& a : out) {
      if (a.length >= kPi) {
        out = {ProjInterval{0.0, kPi}};
        break;
      }
    }
    arcs_ = std::move(out);
  }

  std::vector<ProjInterval> arcs_;
};

// ---------------------------------------------------------------------------
// Singular values and the projective action

struct Svd2 {
  double alpha1 = 1.0;
  double alpha2 = 1.0;
  ProjPoint u1;  // direction of m * v1
  ProjPoint v1;  // leading right-singular direction
};

/// Closed-form 2x2 SVD via the eigen-decomposition of m^T m.
inline Svd2 svd2(const Matrix2& m) {
  m.require_nonsingular("svd2");
  const double p = m.a11 * m.a11 + m.a21 * m.a21;
  const double r = m.a12 * m.a12 + m.a22 * m.a22;
  const double q = m.a11 * m.a12 + m.a21 * m.a22;
  // Largest singular value as Q + R (sum of non-negatives, no cancellation).
  const double e = 0.5 * (m.a11 + m.a22), f = 0.5 * (m.a11 - m.a22);
  const double g = 0.5 * (m.a21 + m.a12), h = 0.5 * (m.a21 - m.a12);
  const double alpha1 = std::hypot(e, h) + std::hypot(f, g);
  const double alpha2 = std::abs(m.det()) / alpha1;
  Svd2 out;
  out.alpha1 = alpha1;
  out.alpha2 = alpha2;
  // Ties resolve to atan2(0, 0) = 0, i.e. the x-axis.
  out.v1 = ProjPoint::from_angle(0.5 * std::atan2(2.0 * q, p - r));
  out.u1 = ProjPoint::from_vector(m(out.v1.raw_unit()));
  return out;
}

/// Singular value function for planar matrices.
inline double phi_s(const Matrix2& m, double s) {
  if (!(s >= 0.0)) throw Error(ErrorKind::InvalidArgument, "phi_s requires s >= 0");
  if (s == 0.0) {
    m.require_nonsingular("phi_s");
    return 1.0;
  }
  const Svd2 sv = svd2(m);
  if (s <= 1.0) return std::pow(sv.alpha1, s);
  if (s <= 2.0) return sv.alpha1 * std::pow(sv.alpha2, s - 1.0);
  return std::pow(std::abs(m.det()), s / 2.0);
}

/// Same as phi_s but from already known singular values.
inline double phi_s_from(double alpha1, double alpha2, double s) {
  if (s <= 1.0) return std::pow(alpha1, s);
  if (s <= 2.0) return alpha1 * std::pow(alpha2, s - 1.0);
  return std::pow(alpha1 * alpha2, s / 2.0);
}

inline ProjPoint act_proj(const Matrix2& m, const ProjPoint& p) {
  m.require_nonsingular("act_proj");
  return ProjPoint::from_vector(m(p.raw_unit()));
}

/// ||m|V||: the norm of m restricted to the line p.
inline double norm_restricted(const Matrix2& m, const ProjPoint& p) {
  m.require_nonsingular("norm_restricted");
  return norm(m(p.raw_unit()));
}

/// Image arc of `iv` under the projective action of m.  Orientation flips
/// when det(m) < 0.
inline ProjInterval interval_image(const Matrix2& m, const ProjInterval& iv) {
  m.require_nonsingular("interval_image");
  if (!iv.proper()) throw Error(ErrorKind::InvalidArgument, "interval_image requires a proper arc");
  const double a = act_proj(m, iv.first()).angle();
  const double b = act_proj(m, iv.last()).angle();
  if (m.det() > 0) return {a, ccw_offset(a, b)};
  return {b, ccw_offset(b, a)};
}

inline Multicone multicone_image(const Matrix2& m, const Multicone& c) {
  std::vector<ProjInterval> out;
  out.reserve(c.size());
  for (const auto& a : c.arcs()) out.push_back(interval_image(m, a));
  return Multicone(std::move(out));
}

}  // namespace sadim
