#pragma once

// Affine iterated function systems on the plane and their symbolic coding.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sadim/error.hpp"
#include "sadim/linalg.hpp"
#include "sadim/polygon.hpp"

namespace sadim {

struct AffineMap {
  Matrix2 a;
  Vec2 t;
  Vec2 operator()(const Vec2& x) const { return a(x) + t; }
  friend bool operator==(const AffineMap&, const AffineMap&) = default;
};

enum class Structure { General, Diagonal, LowerTriangular };

inline const char* to_string(Structure s) {
  switch (s) {
    case Structure::General: return "general";
    case Structure::Diagonal: return "diagonal";
    case Structure::LowerTriangular: return "lower-triangular";
  }
  return "general";
}

inline Structure structure_from_string(const std::string& s) {
  if (s == "general") return Structure::General;
  if (s == "diagonal") return Structure::Diagonal;
  if (s == "lower-triangular") return Structure::LowerTriangular;
  throw Error(ErrorKind::InvalidArgument, "unknown structure tag '" + s + "'");
}

/// Smallest radius R with ||A_i|| R + ||t_i|| <= R for every map.
inline double minimal_radius(const std::vector<AffineMap>& maps) {
  double r = 0.0;
  for (const auto& m : maps) {
    const double op = svd2(m.a).alpha1;
    r = std::max(r, norm(m.t) / (1.0 - op));
  }
  return r;
}

/// A validated planar IFS {x -> A_i x + t_i}.
///
/// The attractor X lies in B(0, R).  An optional forward-invariant convex
/// polygon K (f_i(K) in K for all i) gives a tighter container; when present
/// its diameter is used for |X|, otherwise |X| is taken to be 2R.
class IfsSystem {
 public:
  IfsSystem(std::vector<AffineMap> maps, double radius, Structure tag = Structure::General,
            std::optional<ConvexPolygon> hull = std::nullopt)
      : maps_(std::move(maps)), radius_(radius), tag_(tag), hull_(std::move(hull)) {
    validate();
    body_ = hull_ ? *hull_ : ConvexPolygon::circumscribing({0.0, 0.0}, radius_);
  }

  std::size_t size() const { return maps_.size(); }
  const std::vector<AffineMap>& maps() const { return maps_; }
  const AffineMap& map(std::size_t i) const { return maps_.at(i); }
  double radius() const { return radius_; }
  Structure tag() const { return tag_; }
  const std::optional<ConvexPolygon>& hull() const { return hull_; }

  /// Container K of the attractor used for cylinder bodies f_w(K).
  const ConvexPolygon& body() const { return body_; }
  /// |X| surrogate.
  double diameter() const { return hull_ ? hull_->diameter() : 2.0 * radius_; }
  double max_contraction() const {
    double rho = 0.0;
    for (const auto& m : maps_) rho = std::max(rho, svd2(m.a).alpha1);
    return rho;
  }
  std::vector<Matrix2> linear_parts() const {
    std::vector<Matrix2> out;
    for (const auto& m : maps_) out.push_back(m.a);
    return out;
  }

 private:
  void validate() const {
    if (maps_.size() < 2) throw Error(ErrorKind::InvalidArgument, "an IFS needs at least two maps");
    for (std::size_t i = 0; i < maps_.size(); ++i) {
      const auto& m = maps_[i];
      if (m.a.near_singular())
        throw Error(ErrorKind::SingularMatrix, "map " + std::to_string(i) + " has a singular linear part");
      if (svd2(m.a).alpha1 >= 1.0)
        throw Error(ErrorKind::InvalidArgument, "map " + std::to_string(i) + " is not a contraction");
      if (tag_ == Structure::Diagonal && (m.a.a12 != 0.0 || m.a.a21 != 0.0))
        throw Error(ErrorKind::InvalidArgument, "map " + std::to_string(i) + " is not diagonal");
      if (tag_ == Structure::LowerTriangular && m.a.a12 != 0.0)
        throw Error(ErrorKind::InvalidArgument, "map " + std::to_string(i) + " is not lower-triangular");
    }
    if (!(radius_ > 0.0)) throw Error(ErrorKind::InvalidArgument, "radius must be positive");
    for (const auto& m : maps_) {
      if (svd2(m.a).alpha1 * radius_ + norm(m.t) > radius_ * (1.0 + 1e-12))
        throw Error(ErrorKind::InvalidArgument, "bounding ball B(0,R) is not forward invariant");
    }
    if (hull_) {
      if (hull_->size() < 3) throw Error(ErrorKind::InvalidArgument, "hull needs at least three vertices");
      const double tol = 1e-12 * hull_->diameter();
      for (const auto& m : maps_)
        for (const auto& p : hull_->vertices())
          if (!hull_->contains(m(p), tol))
            throw Error(ErrorKind::InvalidArgument, "hull is not forward invariant");
    }
  }

  std::vector<AffineMap> maps_;
  double radius_;
  Structure tag_;
  std::optional<ConvexPolygon> hull_;
  ConvexPolygon body_;
};

// ---------------------------------------------------------------------------
// Words

using Word = std::vector<int>;

inline void check_word(const IfsSystem& sys, const Word& w) {
  for (int s : w)
    if (s < 0 || static_cast<std::size_t>(s) >= sys.size())
      throw Error(ErrorKind::InvalidArgument, "symbol out of range");
}

inline Word reversed(const Word& w) { return Word(w.rbegin(), w.rend()); }

inline Word concat(const Word& a, const Word& b) {
  Word out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

inline std::string word_to_string(const Word& w) {
  std::string s;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(w[i]);
  }
  return "(" + s + ")";
}

/// Infinite word `prefix` followed by `period` repeated forever.
struct InfiniteWord {
  Word prefix;
  Word period;

  static InfiniteWord periodic(Word w) { return {{}, std::move(w)}; }

  int at(std::size_t k) const {
    if (k < prefix.size()) return prefix[k];
    return period[(k - prefix.size()) % period.size()];
  }
  Word head(std::size_t n) const {
    Word w(n);
    for (std::size_t k = 0; k < n; ++k) w[k] = at(k);
    return w;
  }
  InfiniteWord shifted() const {
    if (!prefix.empty()) return {Word(prefix.begin() + 1, prefix.end()), period};
    Word p(period.begin() + 1, period.end());
    p.push_back(period.front());
    return {{}, std::move(p)};
  }
  InfiniteWord prepended(int k) const {
    Word p{k};
    p.insert(p.end(), prefix.begin(), prefix.end());
    return {std::move(p), period};
  }
};

inline void check_word(const IfsSystem& sys, const InfiniteWord& w) {
  if (w.period.empty()) throw Error(ErrorKind::InvalidArgument, "infinite word needs a nonempty period");
  check_word(sys, w.prefix);
  check_word(sys, w.period);
}

/// f_w = f_{w1} o ... o f_{wn}, i.e. A_w = A_{w1} ... A_{wn}, t_w = f_w(0).
inline AffineMap compose_word(const IfsSystem& sys, const Word& w) {
  check_word(sys, w);
  AffineMap out{Matrix2::identity(), {0.0, 0.0}};
  for (int s : w) {
    const auto& m = sys.map(static_cast<std::size_t>(s));
    out.t = out.a(m.t) + out.t;
    out.a = out.a * m.a;
  }
  return out;
}

/// pi(w) = lim f_{w|n}(0), truncated at the first n with rho^n R <= tol.
inline Vec2 natural_project(const IfsSystem& sys, const InfiniteWord& w, double tol = 1e-12) {
  check_word(sys, w);
  if (!(tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "tolerance must be positive");
  const double rho = sys.max_contraction();
  std::size_t n = 0;
  for (double bound = sys.radius(); bound > tol; bound *= rho) ++n;
  Vec2 x{0.0, 0.0};
  for (std::size_t k = n; k-- > 0;) x = sys.map(static_cast<std::size_t>(w.at(k)))(x);
  return x;
}

inline Vec2 natural_project(const IfsSystem& sys, const Word& periodic_word, double tol = 1e-12) {
  if (periodic_word.empty()) throw Error(ErrorKind::InvalidArgument, "natural_project needs a nonempty word");
  return natural_project(sys, InfiniteWord::periodic(periodic_word), tol);
}

// ---------------------------------------------------------------------------
// Stopping sections

enum class SectionVariant { Alpha2, Alpha1 };

struct SectionEntry {
  Word word;
  AffineMap map;
  double alpha1 = 1.0;
  double alpha2 = 1.0;
};

/// Minimal words whose singular value (alpha2 for Delta_r, alpha1 for
/// Gamma_r) times |X| has dropped to r, enumerated depth-first in
/// lexicographic order.
struct StoppingSection {
  double r = 0.0;
  SectionVariant variant = SectionVariant::Alpha2;
  std::vector<SectionEntry> entries;

  std::size_t size() const { return entries.size(); }
};

inline constexpr std::size_t kDefaultSectionCap = 10'000'000;

inline StoppingSection stopping_section(const IfsSystem& sys, double r,
                                        SectionVariant variant = SectionVariant::Alpha2,
                                        std::size_t cap = kDefaultSectionCap) {
  const double diam = sys.diameter();
  if (!(r > 0.0) || !(r < diam))
    throw Error(ErrorKind::InvalidArgument, "stopping_section needs 0 < r < |X|");
  StoppingSection out{r, variant, {}};
  const double bound = r * (1.0 + 1e-12);
  struct Node {
    Word word;
    AffineMap map;
  };
  std::vector<Node> stack{{{}, {Matrix2::identity(), {0.0, 0.0}}}};
  while (!stack.empty()) {
    Node node = std::move(stack.back());
    stack.pop_back();
    for (std::size_t k = sys.size(); k-- > 0;) {
      const auto& m = sys.map(k);
      Node child{node.word, {node.map.a * m.a, node.map.a(m.t) + node.map.t}};
      child.word.push_back(static_cast<int>(k));
      const Svd2 sv = svd2(child.map.a);
      const double value = variant == SectionVariant::Alpha2 ? sv.alpha2 : sv.alpha1;
      if (value * diam <= bound) {
        // Members are emitted in reverse sibling order; fixed up below.
        out.entries.push_back({child.word, child.map, sv.alpha1, sv.alpha2});
        if (out.entries.size() > cap)
          throw Error(ErrorKind::ScaleTooSmall, "stopping section exceeds the cardinality cap");
      } else {
        stack.push_back(std::move(child));
      }
    }
  }
  std::sort(out.entries.begin(), out.entries.end(),
            [](const SectionEntry& a, const SectionEntry& b) { return a.word < b.word; });
  return out;
}

// ---------------------------------------------------------------------------
// Cylinder geometry

/// Rectangle with axes along the singular directions of A_w.
struct OrientedRect {
  Vec2 center;
  Vec2 axis1;  // unit
  double half1 = 0.0;
  double half2 = 0.0;

  Vec2 axis2() const { return perp(axis1); }
  bool contains(const Vec2& x, double tol = 1e-12) const {
    const Vec2 d = x - center;
    return std::abs(dot(d, axis1)) <= half1 * (1 + tol) + tol &&
           std::abs(dot(d, axis2())) <= half2 * (1 + tol) + tol;
  }
  std::vector<Vec2> corners() const {
    const Vec2 a = half1 * axis1, b = half2 * axis2();
    return {center - a - b, center + a - b, center + a + b, center - a + b};
  }
};

/// Smallest rectangle aligned with the singular directions of A_w that
/// contains f_w(B(0, R)).
inline OrientedRect cylinder_bbox(const IfsSystem& sys, const Word& w) {
  const AffineMap f = compose_word(sys, w);
  const Svd2 sv = svd2(f.a);
  return {f.t, sv.u1.raw_unit(), sv.alpha1 * sys.radius(), sv.alpha2 * sys.radius()};
}

/// f_w(K) for the system's container polygon K.
inline ConvexPolygon cylinder_body(const IfsSystem& sys, const AffineMap& f) {
  return sys.body().transformed(f.a, f.t);
}

}  // namespace sadim
