#pragma once

// Affinity dimension: roots of the level-n singular value sums
//   S_n(s) = sum_{|w| = n} phi^s(A_w),
// and the closed form available for diagonal / lower-triangular families.

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "sadim/ifs.hpp"

namespace sadim {

inline constexpr double kLevelSumCap = 1e8;

/// Neumaier-compensated running sum.
class KahanSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

namespace detail {

inline void check_level_budget(std::size_t n_maps, int n, double cap) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "level must be at least 1");
  if (std::pow(static_cast<double>(n_maps), n) > cap)
    throw Error(ErrorKind::BudgetExceeded, "N^n = " + std::to_string(n_maps) + "^" + std::to_string(n) +
                                               " exceeds the word budget");
}

/// Depth-first walk over all words of length n, calling visit(alpha1, alpha2)
/// for each product.  Siblings are visited in increasing symbol order so the
/// accumulation order is fixed.
template <class Visit>
void for_each_level_product(const std::vector<Matrix2>& mats, int n, Visit&& visit) {
  std::vector<Matrix2> prefix(static_cast<std::size_t>(n) + 1, Matrix2::identity());
  std::vector<std::size_t> digit(static_cast<std::size_t>(n), 0);
  // Products are kept unnormalised: singular values down to 1e-300 are fine
  // for every level that fits the budget.
  std::size_t depth = 0;
  while (true) {
    if (depth == static_cast<std::size_t>(n)) {
      const Svd2 sv = svd2(prefix[depth]);
      visit(sv.alpha1, sv.alpha2);
      // backtrack
      while (depth > 0 && ++digit[depth - 1] == mats.size()) {
        digit[depth - 1] = 0;
        --depth;
      }
      if (depth == 0) return;
      prefix[depth] = prefix[depth - 1] * mats[digit[depth - 1]];
      continue;
    }
    prefix[depth + 1] = prefix[depth] * mats[digit[depth]];
    ++depth;
  }
}

}  // namespace detail

inline double level_sum(const std::vector<Matrix2>& mats, int n, double s, double cap = kLevelSumCap) {
  detail::check_level_budget(mats.size(), n, cap);
  KahanSum acc;
  detail::for_each_level_product(mats, n, [&](double a1, double a2) { acc.add(phi_s_from(a1, a2, s)); });
  return acc.value();
}

inline double level_sum(const IfsSystem& sys, int n, double s, double cap = kLevelSumCap) {
  return level_sum(sys.linear_parts(), n, s, cap);
}

struct PressureEstimate {
  int n = 0;
  double s = 0.0;        // root of S_n(s) = 1
  double lo = 0.0;       // final bracket
  double hi = 0.0;
  double sum_at_root = 1.0;
  std::size_t evaluations = 0;
  std::size_t words = 0;
  double seconds = 0.0;  // filled in by callers that time the run
};

namespace detail {

/// Bisection for the root of a decreasing function f with f(lo) >= 1.
template <class F>
PressureEstimate bisect_unit_root(F&& f, double lo, double hi, double tol) {
  PressureEstimate est;
  if (f(lo) < 1.0) throw Error(ErrorKind::NoBracket, "sum below 1 at the lower bracket end");
  est.evaluations = 1;
  while (f(hi) > 1.0) {
    ++est.evaluations;
    lo = hi;
    hi *= 2;
    if (hi > 64) throw Error(ErrorKind::NoBracket, "no root of S_n(s) = 1 below s = 64");
  }
  ++est.evaluations;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    ++est.evaluations;
    if (f(mid) > 1.0)
      lo = mid;
    else
      hi = mid;
  }
  est.lo = lo;
  est.hi = hi;
  est.s = 0.5 * (lo + hi);
  est.sum_at_root = f(est.s);
  ++est.evaluations;
  return est;
}

}  // namespace detail

/// s_n with S_n(s_n) = 1.  By submultiplicativity of phi^s every s_n bounds
/// the affinity dimension from above.
inline PressureEstimate affinity_upper_bound(const std::vector<Matrix2>& mats, int n, double tol = 1e-12,
                                             double cap = kLevelSumCap) {
  detail::check_level_budget(mats.size(), n, cap);
  // Singular values of every level-n product are computed once and reused
  // across bisection steps; beyond ~2^24 words fall back to streaming.
  const double count = std::pow(static_cast<double>(mats.size()), n);
  PressureEstimate est;
  if (count <= 16.0 * 1024 * 1024) {
    std::vector<double> a1, a2;
    a1.reserve(static_cast<std::size_t>(count));
    a2.reserve(static_cast<std::size_t>(count));
    detail::for_each_level_product(mats, n, [&](double x, double y) {
      a1.push_back(x);
      a2.push_back(y);
    });
    auto f = [&](double s) {
      KahanSum acc;
      for (std::size_t i = 0; i < a1.size(); ++i) acc.add(phi_s_from(a1[i], a2[i], s));
      return acc.value();
    };
    est = detail::bisect_unit_root(f, 0.0, 4.0, tol);
  } else {
    est = detail::bisect_unit_root([&](double s) { return level_sum(mats, n, s, cap); }, 0.0, 4.0, tol);
  }
  est.n = n;
  est.words = static_cast<std::size_t>(count);
  return est;
}

inline PressureEstimate affinity_upper_bound(const IfsSystem& sys, int n, double tol = 1e-12,
                                             double cap = kLevelSumCap) {
  return affinity_upper_bound(sys.linear_parts(), n, tol, cap);
}

/// Diagonal entries of a diagonal / lower-triangular map, ordered as
/// (strong, weak).  All maps must contract more strongly along the same axis.
struct AxisWeights {
  std::vector<double> strong;
  std::vector<double> weak;
};

inline AxisWeights axis_weights(const IfsSystem& sys) {
  if (sys.tag() == Structure::General)
    throw Error(ErrorKind::WrongStructure, "closed form needs a diagonal or lower-triangular system");
  AxisWeights w;
  int orientation = 0;  // +1: second entry dominates, -1: first entry dominates
  for (const auto& m : sys.maps()) {
    const double a = std::abs(m.a.a11), c = std::abs(m.a.a22);
    const int o = a < c ? 1 : (a > c ? -1 : 0);
    if (o == 0 || (orientation != 0 && o != orientation))
      throw Error(ErrorKind::WrongStructure, "diagonal entries are not uniformly ordered");
    orientation = o;
    w.strong.push_back(std::max(a, c));
    w.weak.push_back(std::min(a, c));
  }
  // For lower-triangular maps the product structure only works when the
  // dominant entry sits on the axis that the transposes attract to.
  if (sys.tag() == Structure::LowerTriangular && orientation != 1)
    throw Error(ErrorKind::WrongStructure, "lower-triangular closed form needs |a_i| < |c_i|");
  return w;
}

/// Root s0 in (0, 2] of sum_i |c_i| |a_i|^{s-1} = 1 (with sum |c_i|^s below 1).
inline double affinity_closed_form(const IfsSystem& sys, double tol = 1e-13) {
  const AxisWeights w = axis_weights(sys);
  auto f = [&](double s) {
    KahanSum acc;
    for (std::size_t i = 0; i < w.strong.size(); ++i) acc.add(phi_s_from(w.strong[i], w.weak[i], s));
    return acc.value();
  };
  if (f(2.0) > 1.0 + 1e-15)
    throw Error(ErrorKind::NoRootInRange,
                "root exceeds 2; solve sum |det A_i|^{s/2} = 1 instead");
  double lo = 0.0, hi = 2.0;
  if (f(hi) >= 1.0) return hi;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 1.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

/// One CSV line per estimate: n,s_n,evaluations,seconds.  The timing column
/// is left empty unless requested so repeated runs stay byte-identical.
inline std::string pressure_csv(const std::vector<PressureEstimate>& rows, bool with_timing = false) {
  std::string out = "n,s_n,evaluations,wall_seconds\n";
  char buf[128];
  for (const auto& r : rows) {
    if (with_timing)
      std::snprintf(buf, sizeof buf, "%d,%.12f,%zu,%.6f\n", r.n, r.s, r.evaluations, r.seconds);
    else
      std::snprintf(buf, sizeof buf, "%d,%.12f,%zu,\n", r.n, r.s, r.evaluations);
    out += buf;
  }
  return out;
}

}  // namespace sadim
