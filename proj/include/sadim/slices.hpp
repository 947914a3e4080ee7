#pragma once

// Slices X ∩ proj_V^{-1}(t) and their Hausdorff content.
//
// Every estimator here returns an explicit cover, so every value is an upper
// bound for the content it estimates.

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "sadim/domination.hpp"

namespace sadim {

inline double proj_scalar(const ProjPoint& v, const Vec2& x) { return dot(v.unit(), x); }

/// F_{i,V}(y) = slope * y + offset with proj_V(f_i(x)) = F_{i,V}(proj_{A_i^T V}(x)).
struct ConjugateMap {
  double slope = 1.0;
  double offset = 0.0;
  int orientation = 1;
  double operator()(double y) const { return slope * y + offset; }
};

inline ConjugateMap conjugate_map_F(const IfsSystem& sys, std::size_t i, const ProjPoint& v) {
  const auto& f = sys.map(i);
  const Vec2 image = f.a.transpose()(v.unit());  // A_i^T v, a multiple of the unit of A_i^T V
  const ProjPoint target = ProjPoint::from_vector(image);
  const int sign = dot(image, target.unit()) >= 0 ? 1 : -1;
  return {sign * norm(image), proj_scalar(v, f.t), sign};
}

struct SliceQuery {
  ProjPoint direction;
  double t = 0.0;
  double exponent = 1.0;  // s - 1, in [0, 1]
  double r_min = 1e-3;
};

struct ContentEstimate {
  double value = 0.0;
  double resolution = 0.0;
  std::size_t cover_size = 0;
  std::size_t nodes = 0;
};

inline constexpr std::size_t kSliceNodeCap = 5'000'000;

/// True when every map fixes the same point, i.e. the attractor is that point.
inline std::optional<Vec2> singleton_attractor(const IfsSystem& sys) {
  auto fixed = [](const AffineMap& f) {
    const Matrix2 m{1.0 - f.a.a11, -f.a.a12, -f.a.a21, 1.0 - f.a.a22};
    return m.inverse()(f.t);
  };
  const Vec2 p = fixed(sys.map(0));
  for (std::size_t i = 1; i < sys.size(); ++i)
    if (norm(fixed(sys.map(i)) - p) > 1e-12 * sys.diameter()) return std::nullopt;
  return p;
}

namespace detail {

inline double power_of(double len, double e) { return e == 0.0 ? 1.0 : std::pow(std::max(len, 0.0), e); }

inline double merged_power_sum(std::vector<Segment>& segs, double e, std::size_t* count = nullptr) {
  std::sort(segs.begin(), segs.end(), [](const Segment& a, const Segment& b) { return a.lo < b.lo; });
  double total = 0.0;
  std::size_t k = 0;
  for (std::size_t i = 0; i < segs.size();) {
    Segment cur = segs[i++];
    while (i < segs.size() && segs[i].lo <= cur.hi) cur.hi = std::max(cur.hi, segs[i++].hi);
    total += power_of(cur.length(), e);
    ++k;
  }
  if (count) *count = k;
  return total;
}

/// Content estimator for f_root(X) ∩ {<n, x> = t}.  Descends the cylinder
/// tree below `root`, pruning bodies that miss the line, down to cylinders
/// with alpha2 |X| <= r_min.  Two covers are compared:
///   * the tree recursion best(w) = min(|chord_w|^e, sum_k best(wk)), and
///   * merged chord intervals of the stopping cut at each ladder scale
///     |X| 2^{-j} >= r_min.
/// Both only improve as r_min decreases.
class SliceCoverer {
 public:
  SliceCoverer(const IfsSystem& sys, const AffineMap& root, const Vec2& n, double t, double e, double r_min)
      : sys_(sys), n_(n), t_(t), e_(e), r_min_(r_min), diam_(sys.diameter()) {
    for (double r = diam_; r >= r_min_; r *= 0.5) ladder_.push_back(r);
    cuts_.resize(ladder_.size());
    const Svd2 sv = svd2(root.a);
    const double tree = visit(root, sv.alpha2 * diam_, std::numeric_limits<double>::infinity());
    result_.value = tree;
    result_.cover_size = tree_cover_;
    for (auto& cut : cuts_) {
      if (cut.empty()) continue;
      std::size_t k = 0;
      const double v = merged_power_sum(cut, e_, &k);
      if (v < result_.value) {
        result_.value = v;
        result_.cover_size = k;
      }
    }
    if (empty_) result_ = {0.0, r_min_, 0, result_.nodes};
    result_.resolution = r_min_;
  }
  ContentEstimate result() const { return result_; }

 private:
  // Returns best(w) or -1 when the body misses the line.
  double visit(const AffineMap& f, double scale, double parent_scale) {
    if (++result_.nodes > kSliceNodeCap) throw Error(ErrorKind::BudgetExceeded, "slice cover exceeds node budget");
    const auto chord = cylinder_body(sys_, f).chord(n_, t_);
    if (!chord) return -1.0;
    empty_ = false;
    for (std::size_t j = 0; j < ladder_.size(); ++j)
      if (scale <= ladder_[j] && parent_scale > ladder_[j]) cuts_[j].push_back(*chord);
    const double own = power_of(chord->length(), e_);
    if (scale <= r_min_) {
      ++tree_cover_;
      return own;
    }
    double sum = 0.0;
    bool any = false;
    const std::size_t before = tree_cover_;
    for (std::size_t k = 0; k < sys_.size(); ++k) {
      const auto& m = sys_.map(k);
      const AffineMap child{f.a * m.a, f.a(m.t) + f.t};
      const double v = visit(child, svd2(child.a).alpha2 * diam_, scale);
      if (v >= 0) {
        sum += v;
        any = true;
      }
    }
    if (!any) return 0.0;  // only boundary contact: the attractor part misses the line
    if (own <= sum) {
      tree_cover_ = before + 1;
      return own;
    }
    return sum;
  }

  const IfsSystem& sys_;
  Vec2 n_;
  double t_, e_, r_min_, diam_;
  std::vector<double> ladder_;
  std::vector<std::vector<Segment>> cuts_;
  ContentEstimate result_;
  std::size_t tree_cover_ = 0;
  bool empty_ = true;
};

}  // namespace detail

inline ContentEstimate slice_content_rooted(const IfsSystem& sys, const AffineMap& root, const SliceQuery& q) {
  if (!(q.exponent >= 0.0 && q.exponent <= 1.0))
    throw Error(ErrorKind::InvalidArgument, "slice exponent must lie in [0, 1]");
  if (!(q.r_min > 0.0)) throw Error(ErrorKind::InvalidArgument, "r_min must be positive");
  const Vec2 n = q.direction.unit();
  if (const auto p = singleton_attractor(sys)) {
    // A point slice: content 1 at exponent 0, and 0 otherwise.
    const bool hit = std::abs(dot(n, root(*p)) - q.t) <= 1e-12 * sys.diameter();
    return {hit && q.exponent == 0.0 ? 1.0 : 0.0, q.r_min, hit ? 1u : 0u, 1};
  }
  return detail::SliceCoverer(sys, root, n, q.t, q.exponent, q.r_min).result();
}

/// Upper bound for H^{s-1}_inf(X ∩ proj_V^{-1}(t)).
inline ContentEstimate slice_content(const IfsSystem& sys, const SliceQuery& q) {
  return slice_content_rooted(sys, {Matrix2::identity(), {0.0, 0.0}}, q);
}

struct SliceIntegral {
  double value = 0.0;
  double t_lo = 0.0;
  double t_hi = 0.0;
  double step = 0.0;
  int quad_points = 0;
  double r_min = 0.0;
  ProjPoint direction;
  std::vector<double> profile;  // content at each quadrature node
};

namespace detail {

/// Range of proj_V over the bodies of the depth-d cylinders below `root`,
/// with d the first depth whose level has at least 256 cylinders (capped).
inline Segment projected_range(const IfsSystem& sys, const AffineMap& root, const Vec2& n) {
  std::vector<AffineMap> level{root};
  while (level.size() < 256 && level.size() * sys.size() <= 100'000) {
    std::vector<AffineMap> next;
    next.reserve(level.size() * sys.size());
    for (const auto& f : level)
      for (const auto& m : sys.maps()) next.push_back({f.a * m.a, f.a(m.t) + f.t});
    level = std::move(next);
  }
  Segment range{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const auto& f : level) {
    const Segment s = cylinder_body(sys, f).support(n);
    range.lo = std::min(range.lo, s.lo);
    range.hi = std::max(range.hi, s.hi);
  }
  return range;
}

}  // namespace detail

/// Midpoint-rule integral of slice content over t for the slices of
/// f_root(X) orthogonal to V.
inline SliceIntegral slice_integral_rooted(const IfsSystem& sys, const AffineMap& root, const ProjPoint& v,
                                           double exponent, int quad_points, double r_min) {
  if (quad_points < 16) throw Error(ErrorKind::InvalidArgument, "at least 16 quadrature points required");
  SliceIntegral out;
  out.quad_points = quad_points;
  out.r_min = r_min;
  out.direction = v;
  if (singleton_attractor(sys)) return out;  // a point projects to a null set
  const Vec2 n = v.unit();
  const Segment range = detail::projected_range(sys, root, n);
  out.t_lo = range.lo;
  out.t_hi = range.hi;
  out.step = range.length() / quad_points;
  KahanSum acc;
  for (int j = 0; j < quad_points; ++j) {
    const double t = range.lo + (j + 0.5) * out.step;
    const double c = slice_content_rooted(sys, root, {v, t, exponent, r_min}).value;
    out.profile.push_back(c);
    acc.add(c);
  }
  out.value = acc.value() * out.step;
  return out;
}

/// h(w) = integral of H^{s0-1}_inf(X ∩ proj_{V(w)}^{-1}(t)) dt.
inline SliceIntegral slice_integral_h(const IfsSystem& sys, const DominationCertificate& cert, const InfiniteWord& w,
                                      double s0, int quad_points = 256, double r_min = 1e-3) {
  const ProjPoint v = furstenberg_direction(sys, cert, w, 1e-13);
  return slice_integral_rooted(sys, {Matrix2::identity(), {0.0, 0.0}}, v, s0 - 1.0, quad_points, r_min);
}

/// eta_w([j]) = integral of H^{s0-1}_inf(f_j(X) ∩ proj_{V(w)}^{-1}(t)) dt.
inline SliceIntegral slice_measure_eta(const IfsSystem& sys, const DominationCertificate& cert,
                                       const InfiniteWord& base, const Word& j, double s0, int quad_points = 256,
                                       double r_min = 1e-3) {
  const ProjPoint v = furstenberg_direction(sys, cert, base, 1e-13);
  return slice_integral_rooted(sys, compose_word(sys, j), v, s0 - 1.0, quad_points, r_min);
}

/// Both sides of h(i) <= (L h)(i), with
/// (L h)(i) = sum_k ||A_k^T|V(i)|| ||A_k^{-1}|V(i)^perp||^{-(s0-1)} h(k i).
/// The mapped covers f_k(cover of slice at k i) reach resolution
/// alpha2(A_k) r_min, so the left side is evaluated at min_k alpha2(A_k) r_min
/// to compare covers of matched resolution.
struct SubinvarianceSample {
  double h = 0.0;
  double lh = 0.0;
  double r_lhs = 0.0;
  double r_rhs = 0.0;
};

inline SubinvarianceSample slice_subinvariance(const IfsSystem& sys, const DominationCertificate& cert,
                                               const InfiniteWord& w, double s0, int quad_points = 128,
                                               double r_min = 5e-3) {
  double shrink = 1.0;
  for (const auto& m : sys.maps()) shrink = std::min(shrink, svd2(m.a).alpha2);
  SubinvarianceSample out;
  out.r_rhs = r_min;
  out.r_lhs = r_min * shrink;
  const ProjPoint v = furstenberg_direction(sys, cert, w, 1e-13);
  out.h = slice_integral_rooted(sys, {Matrix2::identity(), {0.0, 0.0}}, v, s0 - 1.0, quad_points, out.r_lhs).value;
  KahanSum acc;
  for (std::size_t k = 0; k < sys.size(); ++k) {
    const double hk = slice_integral_h(sys, cert, w.prepended(static_cast<int>(k)), s0, quad_points, r_min).value;
    acc.add(norm_restricted(sys.map(k).a.transpose(), v) *
            std::pow(norm_restricted(sys.map(k).a.inverse(), v.orthogonal()), -(s0 - 1.0)) * hk);
  }
  out.lh = acc.value();
  return out;
}

/// Comma-separated (t, content) profile of a slice integral.
inline std::string slice_profile_csv(const SliceIntegral& h) {
  std::string out = "t,content\n";
  char buf[96];
  for (std::size_t j = 0; j < h.profile.size(); ++j) {
    std::snprintf(buf, sizeof buf, "%.12f,%.12e\n", h.t_lo + (static_cast<double>(j) + 0.5) * h.step,
                  h.profile[j]);
    out += buf;
  }
  return out;
}

/// Upper bound for H^s_inf(X): every w in Delta_r contributes
/// ceil(alpha1/alpha2) squares of side alpha2 |X|.
inline ContentEstimate content2d_upper(const IfsSystem& sys, double s, double r,
                                       std::size_t cap = kDefaultSectionCap) {
  if (s < 0) throw Error(ErrorKind::InvalidArgument, "exponent must be nonnegative");
  const StoppingSection sec = stopping_section(sys, r, SectionVariant::Alpha2, cap);
  const double diam = sys.diameter();
  KahanSum acc;
  std::size_t count = 0;
  for (const auto& e : sec.entries) {
    const double squares = std::ceil(e.alpha1 / e.alpha2 - 1e-9);
    count += static_cast<std::size_t>(squares);
    acc.add(squares * std::pow(e.alpha2 * diam * std::sqrt(2.0), s));
  }
  return {acc.value(), r, count, sec.size()};
}

}  // namespace sadim
