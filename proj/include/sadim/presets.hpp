#pragma once

// Built-in systems: the Figure 1 family, the two worked examples and a few
// reference cases with exactly known answers.

#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "sadim/ifs.hpp"

namespace sadim {

/// Digit-carpet data for the figure-1 family: maps (x + j)/p, (y + i)/q for
/// (j, i) in `digits`.
struct CarpetData {
  int p = 0;
  int q = 0;
  std::vector<std::pair<int, int>> digits;
};

struct Preset {
  std::string name;
  IfsSystem system;
  std::optional<CarpetData> carpet;
  int n = 0;  // parameter of parametrised families (ex2-triangular)
};

inline const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"grid-2x3", "figure1", "ex1-diag", "ex2-triangular",
                                              "singleton-degenerate"};
  return names;
}

namespace detail {

inline ConvexPolygon unit_square() { return ConvexPolygon::rectangle(0.0, 0.0, 1.0, 1.0); }

inline double frac(double x) { return x - std::floor(x); }

}  // namespace detail

inline Preset preset_grid_2x3() {
  std::vector<AffineMap> maps;
  for (int j = 0; j < 2; ++j)
    for (int k = 0; k < 3; ++k) maps.push_back({Matrix2::diag(1.0 / 2, 1.0 / 3), {j / 2.0, k / 3.0}});
  const double r = minimal_radius(maps);
  return {"grid-2x3", IfsSystem(std::move(maps), r, Structure::Diagonal, detail::unit_square()), std::nullopt, 0};
}

inline Preset preset_figure1() {
  CarpetData carpet{3, 5, {{0, 0}, {0, 2}, {0, 4}, {2, 0}, {2, 4}}};
  std::vector<AffineMap> maps;
  for (const auto& [j, i] : carpet.digits)
    maps.push_back({Matrix2::diag(1.0 / carpet.p, 1.0 / carpet.q),
                    {static_cast<double>(j) / carpet.p, static_cast<double>(i) / carpet.q}});
  maps.push_back({Matrix2{2.0 / 10, 1.0 / 10, 1.0 / 10, 2.0 / 10}, {5.0 / 10, 2.0 / 10}});
  const double r = minimal_radius(maps);
  return {"figure1", IfsSystem(std::move(maps), r, Structure::General, detail::unit_square()), carpet, 0};
}

/// Ten maps diag(1/121, 1/3) in disjoint vertical strips.
inline Preset preset_ex1() {
  std::vector<AffineMap> maps;
  for (int i = 0; i < 10; ++i)
    maps.push_back({Matrix2::diag(1.0 / 121, 1.0 / 3),
                    {i / 10.0, 2.0 / 3 * detail::frac(i * std::numbers::phi)}});
  const double r = minimal_radius(maps);
  return {"ex1-diag", IfsSystem(std::move(maps), r, Structure::Diagonal, detail::unit_square()), std::nullopt, 0};
}

/// N maps [[1/(N+1), 0], [b_i, 1/3]] with first translations i N / (N^2 - 1).
inline Preset preset_ex2(int n = 28) {
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "ex2-triangular needs N >= 2");
  std::vector<AffineMap> maps;
  const double nn = n;
  for (int i = 0; i < n; ++i) {
    const double b = 0.1 * std::sin(1.0 + 2.0 * i);  // non-commuting shears
    maps.push_back({Matrix2{1.0 / (nn + 1), 0.0, b, 1.0 / 3},
                    {i * nn / (nn * nn - 1), 0.1 + 0.46 * detail::frac(i * std::numbers::phi)}});
  }
  const double r = minimal_radius(maps);
  return {"ex2-triangular", IfsSystem(std::move(maps), r, Structure::LowerTriangular, detail::unit_square()),
          std::nullopt, n};
}

/// Four copies of diag(1/4, 1/2): the attractor is the origin.
inline Preset preset_singleton() {
  std::vector<AffineMap> maps(4, AffineMap{Matrix2::diag(1.0 / 4, 1.0 / 2), {0.0, 0.0}});
  return {"singleton-degenerate",
          IfsSystem(std::move(maps), 1.0, Structure::Diagonal, ConvexPolygon::rectangle(-1, -1, 1, 1)),
          std::nullopt, 0};
}

inline Preset make_preset(const std::string& name, int n = 28) {
  if (name == "grid-2x3") return preset_grid_2x3();
  if (name == "figure1") return preset_figure1();
  if (name == "ex1-diag") return preset_ex1();
  if (name == "ex2-triangular") return preset_ex2(n);
  if (name == "singleton-degenerate") return preset_singleton();
  throw Error(ErrorKind::InvalidArgument, "unknown preset '" + name + "'");
}

}  // namespace sadim
