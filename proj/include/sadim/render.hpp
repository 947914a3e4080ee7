#pragma once

// SVG drawing of the level-n cylinder bodies f_w(K).

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "sadim/ifs.hpp"

namespace sadim {

inline constexpr double kRenderPolygonCap = 1e5;

/// Fixed palette, indexed by the first symbol of the word.
inline const char* prefix_color(std::size_t k) {
  static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  return palette[k % (sizeof palette / sizeof *palette)];
}

/// All level-n cylinder bodies in lexicographic word order.
inline std::vector<std::pair<Word, ConvexPolygon>> level_bodies(const IfsSystem& sys, int n) {
  if (n < 0) throw Error(ErrorKind::InvalidArgument, "depth must be nonnegative");
  if (std::pow(static_cast<double>(sys.size()), n) > kRenderPolygonCap)
    throw Error(ErrorKind::BudgetExceeded, "more than 1e5 polygons requested");
  std::vector<std::pair<Word, AffineMap>> level{{{}, {Matrix2::identity(), {0.0, 0.0}}}};
  for (int d = 0; d < n; ++d) {
    std::vector<std::pair<Word, AffineMap>> next;
    for (const auto& [w, f] : level)
      for (std::size_t k = 0; k < sys.size(); ++k) {
        Word c = w;
        c.push_back(static_cast<int>(k));
        const auto& m = sys.map(k);
        next.push_back({std::move(c), {f.a * m.a, f.a(m.t) + f.t}});
      }
    level = std::move(next);
  }
  std::vector<std::pair<Word, ConvexPolygon>> out;
  out.reserve(level.size());
  for (const auto& [w, f] : level) out.push_back({w, cylinder_body(sys, f)});
  return out;
}

/// SVG document with y pointing up; the view box fits the bounding ball.
inline std::string render_svg(const IfsSystem& sys, int n, int pixels = 600) {
  const auto bodies = level_bodies(sys, n);
  const ConvexPolygon& k = sys.body();
  Segment xs = k.support({1.0, 0.0}), ys = k.support({0.0, 1.0});
  if (!sys.hull()) xs = ys = {-sys.radius(), sys.radius()};
  const double pad = 0.02 * std::max(xs.length(), ys.length());
  const double w = xs.length() + 2 * pad, h = ys.length() + 2 * pad;
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" height=\"%d\" viewBox=\"%.6f %.6f %.6f %.6f\">\n",
                pixels, static_cast<int>(std::lround(pixels * h / w)), xs.lo - pad, -(ys.hi + pad), w, h);
  out += buf;
  std::snprintf(buf, sizeof buf, "<g transform=\"scale(1,-1)\" stroke=\"#000\" stroke-width=\"%.6f\">\n", w / 1500);
  out += buf;
  for (const auto& [word, poly] : bodies) {
    const char* fill = word.empty() ? "#cccccc" : prefix_color(static_cast<std::size_t>(word.front()));
    out += "<polygon fill=\"";
    out += fill;
    out += "\" fill-opacity=\"0.7\" points=\"";
    for (std::size_t i = 0; i < poly.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%s%.9f,%.9f", i ? " " : "", poly.vertices()[i].x, poly.vertices()[i].y);
      out += buf;
    }
    out += "\"/>\n";
  }
  out += "</g>\n</svg>\n";
  return out;
}

}  // namespace sadim
