#pragma once

// Domination certificates: strongly invariant multicones for the transposed
// family, Furstenberg directions and the norm-comparability constants.

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "json.hpp"
#include "sadim/ifs.hpp"

namespace sadim {

using MatrixFamily = std::vector<Matrix2>;

struct DominationCertificate {
  Multicone cone;                                // for the transposes A_i^T
  std::vector<std::vector<ProjInterval>> images;  // A_i^T applied to each arc of `cone`
  double margin = 0.0;
  double c_dom = 1.0;
  double tau = 1.0;
  int iterations = 0;
};

struct MulticoneOptions {
  std::size_t max_intervals = 8;
  int max_iter = 200;
  double pad = 1e-3;       // outward padding per iteration (radians)
  int tighten_steps = 40;  // extra contraction passes after success
  int seed_depth = 3;      // repelling seeds from products up to this length
  std::uint64_t seed = 0x5EED;
};

namespace detail {

inline MatrixFamily transposes(const MatrixFamily& family) {
  MatrixFamily out;
  for (const auto& m : family) out.push_back(m.transpose());
  return out;
}

/// Smallest room left between the images of `cone` under each map and the
/// boundary of `cone`; negative when some image leaks out.
inline double invariance_margin(const MatrixFamily& maps, const Multicone& cone,
                                std::vector<std::vector<ProjInterval>>* images = nullptr) {
  double margin = std::numeric_limits<double>::infinity();
  if (images) images->clear();
  for (const auto& m : maps) {
    std::vector<ProjInterval> per_map;
    for (const auto& arc : cone.arcs()) {
      const ProjInterval img = interval_image(m, arc);
      margin = std::min(margin, cone.containment_margin(img));
      per_map.push_back(img);
    }
    if (images) images->push_back(std::move(per_map));
  }
  return margin;
}

inline Multicone set_image(const MatrixFamily& maps, const Multicone& cone, double pad) {
  std::vector<ProjInterval> arcs;
  for (const auto& m : maps)
    for (const auto& arc : cone.arcs()) arcs.push_back(interval_image(m, arc).padded(pad));
  return Multicone(std::move(arcs));
}

inline Multicone complement(const Multicone& removed) {
  if (removed.empty()) return Multicone({ProjInterval{0.0, kPi - 1e-9}});
  std::vector<ProjInterval> gaps;
  const auto& arcs = removed.arcs();
  for (std::size_t i = 0; i < arcs.size(); ++i) {
    const auto& a = arcs[i];
    const auto& b = arcs[(i + 1) % arcs.size()];
    const double gap = ccw_offset(a.end(), b.start);
    if (arcs.size() == 1 || gap > 0) gaps.push_back({a.end(), arcs.size() == 1 ? kPi - a.length : gap});
  }
  return Multicone(std::move(gaps));
}

/// Repelling directions of the transposed action: the least-expanded
/// direction of (A_w)^T for all words up to the given length.
inline std::vector<ProjPoint> repelling_seeds(const MatrixFamily& family, int depth) {
  std::vector<ProjPoint> seeds;
  std::vector<Matrix2> level{Matrix2::identity()};
  for (int d = 1; d <= depth; ++d) {
    std::vector<Matrix2> next;
    for (const auto& p : level)
      for (const auto& m : family) {
        Matrix2 q = p * m;
        q = q.scaled(1.0 / q.max_abs());
        next.push_back(q);
        seeds.push_back(svd2(q.transpose()).v1.orthogonal());
      }
    level = std::move(next);
    if (level.size() > 4096) break;
  }
  return seeds;
}

struct ArcSpread {
  double spread = 0.0;
  ProjPoint mid;
};

/// Smallest arc containing a set of nearby arcs (all within pi/2 of the first).
inline ArcSpread spread_of(const std::vector<ProjInterval>& arcs) {
  const double ref = arcs.front().start;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& a : arcs) {
    double d = ccw_offset(ref, a.start);
    if (d > kPi / 2) d -= kPi;
    lo = std::min(lo, d);
    hi = std::max(hi, d + a.length);
  }
  return {hi - lo, ProjPoint::from_angle(ref + 0.5 * (lo + hi))};
}

}  // namespace detail

/// Margin by which `cone` is strongly invariant under {A_i^T}; negative if not.
inline double strong_invariance_margin(const MatrixFamily& family, const Multicone& cone) {
  return detail::invariance_margin(detail::transposes(family), cone);
}

/// Searches for a multicone C with A_i^T C inside the interior of C by
/// iterating the padded set map from RP^1 minus neighbourhoods of the
/// repelling directions.  Failure is inconclusive, never a disproof.
inline DominationCertificate find_multicone(const MatrixFamily& family, const MulticoneOptions& opt = {}) {
  if (family.empty()) throw Error(ErrorKind::InvalidArgument, "empty matrix family");
  for (const auto& m : family) m.require_nonsingular("find_multicone");
  const MatrixFamily maps = detail::transposes(family);
  const auto seeds = detail::repelling_seeds(family, opt.seed_depth);

  bool collapsed = false;
  for (double halfwidth : {0.2, 0.1, 0.05, 0.02, 0.01, 0.005}) {
    std::vector<ProjInterval> holes;
    for (const auto& s : seeds) holes.push_back({wrap_pi(s.angle() - halfwidth), 2 * halfwidth});
    const Multicone removed(std::move(holes));
    if (removed.full()) continue;
    Multicone current = detail::complement(removed);
    current.merge_to(opt.max_intervals);
    if (current.full()) continue;

    for (int it = 0; it < opt.max_iter; ++it) {
      DominationCertificate cert;
      const double margin = detail::invariance_margin(maps, current, &cert.images);
      if (margin > 1e-12) {
        // Keep contracting while strict invariance survives; nested images
        // only tighten the cone.
        for (int k = 0; k < opt.tighten_steps; ++k) {
          Multicone next = detail::set_image(maps, current, opt.pad);
          if (next.size() > opt.max_intervals) break;
          std::vector<std::vector<ProjInterval>> imgs;
          if (detail::invariance_margin(maps, next, &imgs) <= 1e-12) break;
          current = std::move(next);
        }
        cert.cone = current;
        cert.margin = detail::invariance_margin(maps, current, &cert.images);
        cert.iterations = it;
        // Contraction rate: worst arc-length ratio of an image to its source arc.
        double tau = 0.0;
        for (std::size_t i = 0; i < maps.size(); ++i)
          for (std::size_t a = 0; a < current.size(); ++a) {
            const double src = current.arcs()[a].length;
            if (src > 0) tau = std::max(tau, cert.images[i][a].length / src);
          }
        cert.tau = std::min(tau, 1.0 - 1e-12);
        // C_dom over every word up to length 6 (budget permitting) and a
        // deterministic random sample up to length 12.
        auto ratio = [](const Matrix2& m) {
          const Svd2 sv = svd2(m);
          return sv.alpha2 / sv.alpha1;
        };
        double cdom = 1.0;
        std::vector<Matrix2> level{Matrix2::identity()};
        for (int d = 1; d <= 6 && level.size() * family.size() <= 200'000; ++d) {
          std::vector<Matrix2> next;
          for (const auto& p : level)
            for (const auto& m : family) {
              Matrix2 q = p * m;
              cdom = std::max(cdom, ratio(q) / std::pow(cert.tau, d));
              next.push_back(q.scaled(1.0 / q.max_abs()));
            }
          level = std::move(next);
        }
        std::mt19937_64 rng(opt.seed);
        std::uniform_int_distribution<std::size_t> pick(0, family.size() - 1);
        for (int trial = 0; trial < 2000; ++trial) {
          Matrix2 q = Matrix2::identity();
          for (int d = 1; d <= 12; ++d) {
            q = q * family[pick(rng)];
            cdom = std::max(cdom, ratio(q) / std::pow(cert.tau, d));
            q = q.scaled(1.0 / q.max_abs());
          }
        }
        cert.c_dom = cdom;
        return cert;
      }
      Multicone next = detail::set_image(maps, current, opt.pad);
      if (next.full()) break;
      if (next.size() > opt.max_intervals) {
        next.merge_to(opt.max_intervals);
        if (next.full()) {
          collapsed = true;
          break;
        }
      }
      current = std::move(next);
    }
  }
  if (collapsed) throw Error(ErrorKind::ConeCollapse, "arcs merged into all of RP^1");
  throw Error(ErrorKind::NotDominatedWithin,
              "no strongly invariant multicone found within " + std::to_string(opt.max_iter) + " iterations");
}

inline DominationCertificate find_multicone(const IfsSystem& sys, const MulticoneOptions& opt = {}) {
  return find_multicone(sys.linear_parts(), opt);
}

// ---------------------------------------------------------------------------
// Furstenberg directions

struct FurstenbergResult {
  ProjPoint direction;
  double spread = 0.0;  // diameter of the final image set
  int depth = 0;
};

/// V(w) = intersection over n of A_{w1}^T ... A_{wn}^T C, to projective
/// precision `tol` (depth cap 10^4).
inline FurstenbergResult furstenberg_direction_ex(const MatrixFamily& family, const DominationCertificate& cert,
                                                  const InfiniteWord& w, double tol = 1e-12) {
  if (w.period.empty()) throw Error(ErrorKind::InvalidArgument, "infinite word needs a nonempty period");
  Matrix2 prod = Matrix2::identity();
  FurstenbergResult best;
  best.spread = kPi;
  std::vector<ProjInterval> arcs;
  for (int n = 1; n <= 10'000; ++n) {
    prod = prod * family.at(static_cast<std::size_t>(w.at(static_cast<std::size_t>(n - 1)))).transpose();
    prod = prod.scaled(1.0 / prod.max_abs());
    arcs.clear();
    for (const auto& a : cert.cone.arcs()) arcs.push_back(interval_image(prod, a));
    const auto s = detail::spread_of(arcs);
    if (s.spread < best.spread) best = {s.mid, s.spread, n};
    if (s.spread < tol) break;
  }
  return best;
}

inline ProjPoint furstenberg_direction(const MatrixFamily& family, const DominationCertificate& cert,
                                       const InfiniteWord& w, double tol = 1e-12) {
  return furstenberg_direction_ex(family, cert, w, tol).direction;
}

inline ProjPoint furstenberg_direction(const IfsSystem& sys, const DominationCertificate& cert,
                                       const InfiniteWord& w, double tol = 1e-12) {
  check_word(sys, w);
  return furstenberg_direction(sys.linear_parts(), cert, w, tol);
}

// ---------------------------------------------------------------------------
// Comparability constants

struct DominReport {
  double c_emp = 1.0;
  Word witness;
  ProjPoint witness_direction;
  bool witness_is_inverse = false;
  std::size_t words = 0;
};

namespace detail {

/// Minimum of ||m u|| over unit u in the arc, attained at an endpoint or at
/// the least-stretched direction of m when that lies inside the arc.
inline std::pair<double, ProjPoint> min_norm_on_arc(const Matrix2& m, const ProjInterval& arc) {
  std::pair<double, ProjPoint> best{norm_restricted(m, arc.first()), arc.first()};
  const double e = norm_restricted(m, arc.last());
  if (e < best.first) best = {e, arc.last()};
  const ProjPoint weak = svd2(m).v1.orthogonal();
  if (arc.contains(weak, 0.0)) {
    const double w = norm_restricted(m, weak);
    if (w < best.first) best = {w, weak};
  }
  return best;
}

}  // namespace detail

/// Largest ratios alpha1(A_w) / ||A_w^T|V|| and alpha2(A_w)^{-1} /
/// ||A_w^{-1}|V^perp|| over all words up to `depth` and all V in the union of
/// A_i^T C (or in `directions`, when given).
inline DominReport domin_constants(const MatrixFamily& family, const DominationCertificate& cert, int depth,
                                   const std::vector<ProjPoint>* directions = nullptr) {
  std::vector<ProjInterval> vset;
  std::vector<ProjInterval> vperp;
  if (directions) {
    for (const auto& d : *directions) {
      vset.push_back({d.angle(), 0.0});
      vperp.push_back({d.orthogonal().angle(), 0.0});
    }
  } else {
    for (const auto& per_map : cert.images)
      for (const auto& a : per_map) {
        vset.push_back(a);
        vperp.push_back({wrap_pi(a.start + kPi / 2), a.length});
      }
  }
  DominReport rep;
  struct Node {
    Word word;
    Matrix2 prod;
  };
  std::vector<Node> stack{{{}, Matrix2::identity()}};
  while (!stack.empty()) {
    Node node = std::move(stack.back());
    stack.pop_back();
    for (std::size_t k = family.size(); k-- > 0;) {
      Node child{node.word, node.prod * family[k]};
      child.word.push_back(static_cast<int>(k));
      ++rep.words;
      // Ratios are scale free: rescale to keep deep products representable.
      const Matrix2 m = child.prod.scaled(1.0 / child.prod.max_abs());
      const Svd2 sv = svd2(m);
      const Matrix2 mt = m.transpose();
      const Matrix2 minv = m.inverse();
      for (const auto& arc : vset) {
        const auto [n, v] = detail::min_norm_on_arc(mt, arc);
        const double ratio = sv.alpha1 / n;
        if (ratio > rep.c_emp) rep = {ratio, child.word, v, false, rep.words};
      }
      for (const auto& arc : vperp) {
        const auto [n, v] = detail::min_norm_on_arc(minv, arc);
        const double ratio = (1.0 / sv.alpha2) / n;
        if (ratio > rep.c_emp) rep = {ratio, child.word, v.orthogonal(), true, rep.words};
      }
      if (static_cast<int>(child.word.size()) < depth) {
        child.prod = m;
        stack.push_back(std::move(child));
      }
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// JSON

inline nlohmann::json certificate_to_json(const DominationCertificate& c) {
  nlohmann::json arcs = nlohmann::json::array();
  for (const auto& a : c.cone.arcs())
    arcs.push_back({{"start", a.start}, {"length", a.length}, {"end", a.end()}});
  return {{"arcs", arcs}, {"margin", c.margin}, {"c_dom", c.c_dom}, {"tau", c.tau}, {"iterations", c.iterations}};
}

/// Rebuilds a certificate and re-verifies strong invariance for `family`.
inline DominationCertificate certificate_from_json(const nlohmann::json& j, const MatrixFamily& family) {
  std::vector<ProjInterval> arcs;
  for (const auto& a : j.at("arcs")) arcs.push_back({a.at("start").get<double>(), a.at("length").get<double>()});
  DominationCertificate c;
  c.cone = Multicone(std::move(arcs));
  c.c_dom = j.value("c_dom", 1.0);
  c.tau = j.value("tau", 1.0);
  c.iterations = j.value("iterations", 0);
  c.margin = detail::invariance_margin(detail::transposes(family), c.cone, &c.images);
  if (!(c.margin > 0)) throw Error(ErrorKind::InvalidArgument, "stored multicone is not strongly invariant");
  return c;
}

}  // namespace sadim
