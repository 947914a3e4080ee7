#pragma once

// Empirical checks of the separation hypotheses and of the measure
// conditions that characterise positive Hausdorff measure.  All of them
// report trends over finitely many scales together with a witness; none is a
// decision procedure.

#include <algorithm>
#include <queue>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "sadim/kaenmaki.hpp"
#include "sadim/presets.hpp"
#include "sadim/pressure.hpp"
#include "sadim/slices.hpp"

namespace sadim {

inline constexpr std::uint64_t kDefaultSeed = 0x5EED;

struct Witness {
  Word word;
  Word other;  // second word for pairwise checks
  Vec2 point;
  double t = 0.0;
  double scale = 0.0;
  ProjPoint direction;
};

struct DiagnosticsReport {
  std::string check;
  std::vector<double> scales;
  std::vector<double> max_ratio;
  double extremum = 0.0;
  Witness witness;
  std::string verdict;
  bool passed = true;
  nlohmann::json details = nlohmann::json::object();
};

inline nlohmann::json report_to_json(const DiagnosticsReport& r) {
  nlohmann::json w{{"word", r.witness.word},
                   {"point", {r.witness.point.x, r.witness.point.y}},
                   {"scale", r.witness.scale}};
  if (!r.witness.other.empty()) w["other"] = r.witness.other;
  if (r.witness.t != 0.0) w["t"] = r.witness.t;
  return {{"check", r.check},     {"scales", r.scales},   {"max_ratio", r.max_ratio}, {"extremum", r.extremum},
          {"witness", w},         {"verdict", r.verdict}, {"passed", r.passed},       {"details", r.details}};
}

/// Ratio trend across scales: "divergent" when the last ratio exceeds the
/// first by more than `factor`, else "bounded".
inline std::string trend_verdict(const std::vector<double>& ratios, double factor = 4.0) {
  if (ratios.size() < 2) return "bounded";
  bool increasing = true;
  for (std::size_t i = 1; i < ratios.size(); ++i) increasing = increasing && ratios[i] > ratios[i - 1];
  return increasing && ratios.back() > factor * ratios.front() ? "divergent" : "bounded";
}

namespace detail {

inline Word random_word(std::mt19937_64& rng, std::size_t n_symbols, std::size_t length) {
  std::uniform_int_distribution<std::size_t> pick(0, n_symbols - 1);
  Word w(length);
  for (auto& s : w) s = static_cast<int>(pick(rng));
  return w;
}

/// Point of X coded by a random word, with its first 48 symbols as witness.
inline std::pair<Vec2, Word> random_attractor_point(const IfsSystem& sys, std::mt19937_64& rng) {
  Word w = random_word(rng, sys.size(), 48);
  return {natural_project(sys, InfiniteWord{w, {0}}), w};
}

inline AffineMap child_map(const AffineMap& f, const AffineMap& m) { return {f.a * m.a, f.a(m.t) + f.t}; }

/// Upper bound for the measure of a target region from cylinder masses.
/// Bodies disjoint from the region are dropped, bodies inside it count in
/// full.  Bodies crossing the boundary are refined heaviest first until they
/// are small enough to count whole (`small`); whatever is still crossing when
/// the per-region node budget runs out is counted in full, so the result
/// stays an upper bound.
template <class Disjoint, class Inside, class Small>
double cylinder_mass(const IfsSystem& sys, const MuK& mu, Disjoint&& disjoint, Inside&& inside, Small&& small,
                     std::size_t budget) {
  struct Node {
    double mass;
    AffineMap map;
    Word word;
    bool operator<(const Node& o) const { return mass < o.mass; }
  };
  const auto& k_vertices = sys.body().vertices();
  std::vector<Vec2> pts(k_vertices.size());
  double total = 0.0;
  std::priority_queue<Node> crossing;
  auto classify = [&](Node&& node) {
    for (std::size_t i = 0; i < pts.size(); ++i) pts[i] = node.map(k_vertices[i]);
    if (disjoint(pts)) return;
    if (inside(pts) || small(pts)) {
      total += node.mass;
      return;
    }
    crossing.push(std::move(node));
  };
  classify({1.0, {Matrix2::identity(), {0.0, 0.0}}, {}});
  std::size_t used = 1;
  while (!crossing.empty()) {
    if (used >= budget) {
      while (!crossing.empty()) {
        total += crossing.top().mass;
        crossing.pop();
      }
      break;
    }
    const Node node = crossing.top();
    crossing.pop();
    for (std::size_t k = 0; k < sys.size(); ++k) {
      Word w;
      if (!mu.bernoulli()) {
        w = node.word;
        w.push_back(static_cast<int>(k));
      }
      const double m = mu.child(node.mass, w, k);
      ++used;
      classify({m, child_map(node.map, sys.map(k)), std::move(w)});
    }
  }
  return total;
}

/// Euclidean distance from x to the convex polygon with CCW vertices `v`.
inline double polygon_distance(const std::vector<Vec2>& v, const Vec2& x) {
  bool inside = true;
  for (std::size_t i = 0; i < v.size() && inside; ++i)
    inside = cross(v[(i + 1) % v.size()] - v[i], x - v[i]) >= 0;
  if (inside) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vec2 e = v[(i + 1) % v.size()] - v[i];
    const double ee = dot(e, e);
    const double w = ee > 0 ? std::clamp(dot(x - v[i], e) / ee, 0.0, 1.0) : 0.0;
    best = std::min(best, norm(x - (v[i] + w * e)));
  }
  return best;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Separation

namespace detail {

enum class PairStatus { Separated = 0, Touching = 1, Inconclusive = 2, Overlapping = 3 };

struct PairResult {
  PairStatus status = PairStatus::Separated;
  double depth = -1.0;
  Word a, b;
};

inline PairResult refine_pair(const IfsSystem& sys, const Word& wa, const AffineMap& fa, const Word& wb,
                              const AffineMap& fb, int level, int max_depth, double tol) {
  const ConvexPolygon pa = cylinder_body(sys, fa), pb = cylinder_body(sys, fb);
  const double d = overlap_depth(pa, pb);
  if (d < -tol) return {PairStatus::Separated, d, wa, wb};
  if (level == max_depth) {
    if (d <= tol) return {PairStatus::Touching, d, wa, wb};
    // Penetration comparable to the thinner body's width: the bodies are
    // nested rather than grazing, so the pieces themselves overlap.
    const double size = std::min(pa.width(), pb.width());
    return {d >= 0.5 * size ? PairStatus::Overlapping : PairStatus::Inconclusive, d, wa, wb};
  }
  PairResult worst{PairStatus::Separated, d, wa, wb};
  for (std::size_t i = 0; i < sys.size(); ++i)
    for (std::size_t j = 0; j < sys.size(); ++j) {
      Word ca = wa, cb = wb;
      ca.push_back(static_cast<int>(i));
      cb.push_back(static_cast<int>(j));
      const PairResult r = refine_pair(sys, ca, child_map(fa, sys.map(i)), cb, child_map(fb, sys.map(j)), level + 1,
                                       max_depth, tol);
      if (r.status > worst.status || (r.status == worst.status && r.depth > worst.depth)) worst = r;
    }
  return worst;
}

}  // namespace detail

/// Pairwise separation of the first-level cylinder bodies, refined to `depth`.
inline DiagnosticsReport ssc_check(const IfsSystem& sys, int depth = 3) {
  if (depth < 1) throw Error(ErrorKind::InvalidArgument, "ssc depth must be at least 1");
  const double tol = 1e-12 * sys.diameter();
  DiagnosticsReport rep;
  rep.check = "ssc";
  detail::PairResult worst;
  worst.depth = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < sys.size(); ++i)
    for (std::size_t j = i + 1; j < sys.size(); ++j) {
      const auto r = detail::refine_pair(sys, {static_cast<int>(i)}, sys.map(i), {static_cast<int>(j)}, sys.map(j),
                                         1, depth, tol);
      if (r.status > worst.status || (r.status == worst.status && r.depth > worst.depth)) worst = r;
    }
  rep.extremum = worst.depth;
  rep.witness.word = worst.a;
  rep.witness.other = worst.b;
  switch (worst.status) {
    case detail::PairStatus::Separated: rep.verdict = "separated"; break;
    case detail::PairStatus::Touching: rep.verdict = "touching, not SSC"; break;
    case detail::PairStatus::Inconclusive: rep.verdict = "inconclusive"; break;
    case detail::PairStatus::Overlapping: rep.verdict = "overlapping"; break;
  }
  rep.passed = worst.status == detail::PairStatus::Separated;
  rep.details["depth"] = depth;
  return rep;
}

// ---------------------------------------------------------------------------
// Open bounded neighbourhood condition

/// Max over sampled x of #{w in Delta_r : f_w(U) meets B(x, r)} per scale.
inline DiagnosticsReport obnc_check(const IfsSystem& sys, const ConvexPolygon& u, const std::vector<double>& scales,
                                   int sample_points = 256, std::uint64_t seed = kDefaultSeed) {
  const double tol = 1e-12 * u.diameter();
  for (const auto& m : sys.maps())
    for (const auto& p : u.vertices())
      if (!u.contains(m(p), tol)) throw Error(ErrorKind::NotForwardInvariant, "f_i(U) is not contained in U");
  DiagnosticsReport rep;
  rep.check = "obnc";
  rep.scales = scales;
  std::mt19937_64 rng(seed);
  std::vector<std::pair<Vec2, Word>> samples;
  for (int k = 0; k < sample_points; ++k) samples.push_back(detail::random_attractor_point(sys, rng));
  double overall = 0.0;
  for (double r : scales) {
    const StoppingSection sec = stopping_section(sys, r);
    std::vector<ConvexPolygon> bodies;
    bodies.reserve(sec.size());
    for (const auto& e : sec.entries) bodies.push_back(u.transformed(e.map.a, e.map.t));
    double best = 0.0;
    for (const auto& [x, w] : samples) {
      std::size_t count = 0;
      // U is open, so f_w(U) meets the open ball iff dist(x, closure) < r.
      for (const auto& b : bodies)
        if (b.distance(x) < r * (1 - 1e-12)) ++count;
      if (static_cast<double>(count) > best) best = static_cast<double>(count);
      if (static_cast<double>(count) > overall) {
        overall = static_cast<double>(count);
        rep.witness = {w, {}, x, 0.0, r, {}};
      }
    }
    rep.max_ratio.push_back(best);
  }
  rep.extremum = overall;
  bool increasing = rep.max_ratio.size() > 1;
  for (std::size_t i = 1; i < rep.max_ratio.size(); ++i)
    increasing = increasing && rep.max_ratio[i] > rep.max_ratio[i - 1];
  rep.verdict = increasing && rep.max_ratio.back() >= 2 * rep.max_ratio.front() ? "divergent" : "bounded";
  rep.passed = rep.verdict == "bounded";
  return rep;
}

/// Count for a single point, used to re-evaluate obnc witnesses.
inline std::size_t obnc_count(const IfsSystem& sys, const ConvexPolygon& u, double r, const Vec2& x) {
  std::size_t count = 0;
  for (const auto& e : stopping_section(sys, r).entries)
    if (u.transformed(e.map.a, e.map.t).distance(x) < r * (1 - 1e-12)) ++count;
  return count;
}

// ---------------------------------------------------------------------------
// Mass distribution

struct MassOptions {
  int sample_points = 256;
  double leaf_fraction = 1.0 / 32;  // crossing cylinders counted whole below r * fraction
  std::size_t budget_per_region = 200'000;
  std::uint64_t seed = kDefaultSeed;
};

/// pi_* mu_K(B(x, r)) estimated from above by cylinder masses.
inline double ball_mass(const IfsSystem& sys, const MuK& mu, const Vec2& x, double r, const MassOptions& opt) {
  // Orientation of the transformed body flips with det < 0, which the
  // distance test tolerates by checking both windings.
  return detail::cylinder_mass(
      sys, mu,
      [&](const std::vector<Vec2>& v) {
        double d = detail::polygon_distance(v, x);
        if (d > 0) {
          std::vector<Vec2> rev(v.rbegin(), v.rend());
          d = std::min(d, detail::polygon_distance(rev, x));
        }
        return d > r;
      },
      [&](const std::vector<Vec2>& v) {
        return std::all_of(v.begin(), v.end(), [&](const Vec2& p) { return norm(p - x) <= r; });
      },
      [&](const std::vector<Vec2>& v) {
        double d = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i)
          for (std::size_t j = i + 1; j < v.size(); ++j) d = std::max(d, norm(v[i] - v[j]));
        return d <= r * opt.leaf_fraction;
      },
      opt.budget_per_region);
}

/// sup over sampled x of pi_* mu_K(B(x, r)) / r^{s0} per scale.
inline DiagnosticsReport mass_distribution_check(const IfsSystem& sys, const MuK& mu, const std::vector<double>& scales,
                                                 const MassOptions& opt = {}) {
  DiagnosticsReport rep;
  rep.check = "mass";
  rep.scales = scales;
  std::mt19937_64 rng(opt.seed);
  std::vector<std::pair<Vec2, Word>> samples;
  for (int k = 0; k < opt.sample_points; ++k) samples.push_back(detail::random_attractor_point(sys, rng));
  double overall = 0.0;
  for (double r : scales) {
    double best = 0.0;
    for (const auto& [x, w] : samples) {
      const double ratio = ball_mass(sys, mu, x, r, opt) / std::pow(r, mu.s0());
      if (ratio > best) {
        best = ratio;
        if (ratio > overall) {
          overall = ratio;
          rep.witness = {w, {}, x, 0.0, r, {}};
        }
      }
    }
    rep.max_ratio.push_back(best);
  }
  rep.extremum = overall;
  rep.verdict = trend_verdict(rep.max_ratio);
  rep.passed = rep.verdict == "bounded";
  rep.details["s0"] = mu.s0();
  return rep;
}

/// (proj_V)_* pi_* mu_K([t - r, t + r]) estimated from above.
inline double interval_mass(const IfsSystem& sys, const MuK& mu, const ProjPoint& v, double t, double r,
                            const MassOptions& opt) {
  const Vec2 n = v.unit();
  auto support = [&](const std::vector<Vec2>& pts) {
    Segment s{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (const auto& p : pts) {
      s.lo = std::min(s.lo, dot(n, p));
      s.hi = std::max(s.hi, dot(n, p));
    }
    return s;
  };
  return detail::cylinder_mass(
      sys, mu,
      [&](const std::vector<Vec2>& pts) {
        const Segment s = support(pts);
        return s.hi < t - r || s.lo > t + r;
      },
      [&](const std::vector<Vec2>& pts) {
        const Segment s = support(pts);
        return s.lo >= t - r && s.hi <= t + r;
      },
      [&](const std::vector<Vec2>& pts) { return support(pts).length() <= r * opt.leaf_fraction; },
      opt.budget_per_region);
}

/// sup over sampled V and t of projected mass / r per scale.
inline DiagnosticsReport projection_density_check(const IfsSystem& sys, const MuK& mu,
                                                  const std::vector<ProjPoint>& directions,
                                                  const std::vector<double>& scales, const MassOptions& opt = {}) {
  if (directions.empty()) throw Error(ErrorKind::InvalidArgument, "projection check needs at least one direction");
  DiagnosticsReport rep;
  rep.check = "proj";
  rep.scales = scales;
  std::mt19937_64 rng(opt.seed);
  std::vector<std::pair<Vec2, Word>> samples;
  for (int k = 0; k < opt.sample_points; ++k) samples.push_back(detail::random_attractor_point(sys, rng));
  double overall = 0.0;
  for (double r : scales) {
    double best = 0.0;
    for (const auto& v : directions)
      for (const auto& [x, w] : samples) {
        const double t = proj_scalar(v, x);
        const double ratio = interval_mass(sys, mu, v, t, r, opt) / r;
        if (ratio > best) {
          best = ratio;
          if (ratio > overall) {
            overall = ratio;
            rep.witness = {w, {}, x, t, r, v};
          }
        }
      }
    rep.max_ratio.push_back(best);
  }
  rep.extremum = overall;
  rep.verdict = trend_verdict(rep.max_ratio);
  rep.passed = rep.verdict == "bounded";
  return rep;
}

/// Furstenberg directions of `count` random words (deterministic in `seed`).
inline std::vector<ProjPoint> sample_furstenberg_directions(const IfsSystem& sys, const DominationCertificate& cert,
                                                            int count, std::uint64_t seed = kDefaultSeed) {
  std::mt19937_64 rng(seed);
  std::vector<ProjPoint> out;
  for (int k = 0; k < count; ++k)
    out.push_back(furstenberg_direction(sys, cert, InfiniteWord{detail::random_word(rng, sys.size(), 24), {0}}));
  return out;
}

// ---------------------------------------------------------------------------
// Slice dimension criterion

struct SliceCriterion {
  int max_column = 0;
  int column = 0;
  double slice_dimension = 0.0;
  PressureEstimate bound;
  bool vanishing = false;
  std::string verdict;
};

/// When s_n - 1 is below the largest vertical-column slice dimension of the
/// carpet subsystem, the s0-dimensional measure of X vanishes.
inline SliceCriterion slice_dimension_criterion(const IfsSystem& sys, const CarpetData& carpet, int n = 8) {
  if (carpet.p < 2 || carpet.q <= carpet.p) throw Error(ErrorKind::InvalidArgument, "carpet needs q > p >= 2");
  SliceCriterion out;
  std::vector<int> columns(static_cast<std::size_t>(carpet.p), 0);
  for (const auto& [j, i] : carpet.digits) {
    if (j < 0 || j >= carpet.p || i < 0 || i >= carpet.q)
      throw Error(ErrorKind::InvalidArgument, "carpet digit outside the p x q grid");
    ++columns[static_cast<std::size_t>(j)];
  }
  const auto it = std::max_element(columns.begin(), columns.end());
  out.max_column = *it;
  out.column = static_cast<int>(it - columns.begin());
  out.slice_dimension = out.max_column > 0 ? std::log(out.max_column) / std::log(carpet.q) : 0.0;
  out.bound = affinity_upper_bound(sys, n);
  // s_n is known to bisection accuracy; ties count as inconclusive.
  out.vanishing = out.bound.s - 1.0 < out.slice_dimension - 1e-10;
  char buf[160];
  if (out.vanishing)
    std::snprintf(buf, sizeof buf, "s_%d - 1 = %.5f < %.5f => H^{s0}(X) = 0", n, out.bound.s - 1.0,
                  out.slice_dimension);
  else
    std::snprintf(buf, sizeof buf, "s_%d - 1 = %.5f >= %.5f: inconclusive", n, out.bound.s - 1.0,
                  out.slice_dimension);
  out.verdict = buf;
  return out;
}

// ---------------------------------------------------------------------------
// Example hypotheses

struct HypothesisValue {
  std::string name;
  double value = 0.0;
  std::string relation;  // "<" or ">"
  double threshold = 0.0;
  bool holds = false;
};

struct HypothesisReport {
  std::string preset;
  double s0 = 0.0;
  std::vector<HypothesisValue> values;
  bool all_hold = true;
  std::string verdict;
};

namespace detail {

inline HypothesisValue hypothesis(std::string name, double value, const char* rel, double threshold) {
  // Strict inequalities: values within rounding of the threshold do not hold.
  const double slack = 1e-12 * std::max(1.0, std::abs(threshold));
  const bool holds = rel[0] == '<' ? value < threshold - slack : value > threshold + slack;
  return {std::move(name), value, rel, threshold, holds};
}

}  // namespace detail

/// Evaluates the hypothesis inequalities of the two worked examples.
inline HypothesisReport verify_example_hypotheses(const Preset& preset) {
  HypothesisReport rep;
  rep.preset = preset.name;
  const IfsSystem& sys = preset.system;
  if (preset.name == "ex1-diag") {
    rep.s0 = affinity_closed_form(sys);
    double max_c = 0.0, sum_ca = 0.0, sum_sqrt_a = 0.0;
    bool ordered = true;
    for (const auto& m : sys.maps()) {
      const double a = std::abs(m.a.a11), c = std::abs(m.a.a22);
      max_c = std::max(max_c, c);
      sum_ca += c * std::pow(a, 0.25);
      sum_sqrt_a += std::sqrt(a);
      ordered = ordered && a < c;
    }
    rep.values.push_back(detail::hypothesis("max |c_i|", max_c, "<", 0.5));
    rep.values.push_back(detail::hypothesis("sum |c_i| |a_i|^(1/4)", sum_ca, ">", 1.0));
    rep.values.push_back(detail::hypothesis("sum |a_i|^(1/2)", sum_sqrt_a, "<", 1.0));
    rep.values.push_back({"|a_i| < |c_i| for all i", ordered ? 1.0 : 0.0, "=", 1.0, ordered});
  } else if (preset.name == "ex2-triangular") {
    bool ordered = true;
    double sum_c = 0.0;
    for (const auto& m : sys.maps()) {
      const double a = std::abs(m.a.a11), c = std::abs(m.a.a22);
      ordered = ordered && a < c && c < 0.5;
      sum_c += c;
    }
    rep.values.push_back({"|a_i| < |c_i| < 1/2 for all i", ordered ? 1.0 : 0.0, "=", 1.0, ordered});
    rep.values.push_back(detail::hypothesis("sum |c_i|", sum_c, ">", 1.0));
    try {
      rep.s0 = affinity_closed_form(sys);
      double cond = 0.0;
      for (const auto& m : sys.maps())
        cond += std::pow(std::abs(m.a.a22), -1.0) * std::pow(std::abs(m.a.a11), 2.0 * (rep.s0 - 1.0));
      rep.values.push_back(detail::hypothesis("sum |c_i|^-1 |a_i|^(2(s0-1))", cond, "<", 1.0));
    } catch (const Error& e) {
      rep.values.push_back({std::string("closed-form s0: ") + e.what(), 0.0, "=", 1.0, false});
    }
    // Strong separation of the first-coordinate system {a_i x + t_i1}: the
    // images of its invariant interval must be pairwise disjoint.
    std::vector<Segment> images;
    double lo = 0.0, hi = 0.0;
    {
      // Invariant interval [lo, hi] of the 1D system (all a_i > 0 here).
      double mn = std::numeric_limits<double>::infinity(), mx = -mn;
      for (const auto& m : sys.maps()) {
        const double fix = m.t.x / (1.0 - m.a.a11);
        mn = std::min(mn, fix);
        mx = std::max(mx, fix);
      }
      lo = mn;
      hi = mx;
    }
    for (const auto& m : sys.maps()) {
      const double x0 = m.a.a11 * lo + m.t.x, x1 = m.a.a11 * hi + m.t.x;
      images.push_back({std::min(x0, x1), std::max(x0, x1)});
    }
    std::sort(images.begin(), images.end(), [](const Segment& a, const Segment& b) { return a.lo < b.lo; });
    double min_gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < images.size(); ++i) min_gap = std::min(min_gap, images[i].lo - images[i - 1].hi);
    rep.values.push_back(detail::hypothesis("min gap of 1D first-level intervals", min_gap, ">", 0.0));
  } else {
    throw Error(ErrorKind::WrongPreset, "hypotheses are defined for ex1-diag and ex2-triangular only");
  }
  for (const auto& v : rep.values) rep.all_hold = rep.all_hold && v.holds;
  rep.verdict = rep.all_hold ? "all hypotheses satisfied" : "hypotheses not satisfied";
  return rep;
}

inline nlohmann::json hypotheses_to_json(const HypothesisReport& r) {
  nlohmann::json vals = nlohmann::json::array();
  for (const auto& v : r.values)
    vals.push_back({{"name", v.name}, {"value", v.value}, {"relation", v.relation}, {"threshold", v.threshold},
                    {"holds", v.holds}});
  return {{"check", "hypotheses"}, {"preset", r.preset}, {"s0", r.s0}, {"values", vals}, {"verdict", r.verdict}};
}

}  // namespace sadim
