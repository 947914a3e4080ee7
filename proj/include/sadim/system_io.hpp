#pragma once

// JSON (de)serialisation of IFS definitions.
//
//   {"maps": [{"a": [[a11, a12], [a21, a22]], "t": [t1, t2]}, ...],
//    "radius": R, "tag": "general" | "diagonal" | "lower-triangular",
//    "hull": [[x, y], ...]}            // optional forward-invariant polygon
//
// Any numeric entry may also be a string holding a decimal or a ratio such
// as "1/3" or "-2/5".

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "sadim/ifs.hpp"

namespace sadim {

using json = nlohmann::json;

/// Parses "p", "p/q" with decimal p, q.  The ratio of two exactly
/// representable numbers is correctly rounded by IEEE division.
inline double parse_number(const std::string& text) {
  auto parse_one = [&](std::string_view s) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
      throw Error(ErrorKind::InvalidArgument, "cannot parse number '" + text + "'");
    return v;
  };
  const auto slash = text.find('/');
  if (slash == std::string::npos) return parse_one(text);
  const double den = parse_one(std::string_view(text).substr(slash + 1));
  if (den == 0.0) throw Error(ErrorKind::InvalidArgument, "zero denominator in '" + text + "'");
  return parse_one(std::string_view(text).substr(0, slash)) / den;
}

inline double number_from_json(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return parse_number(j.get<std::string>());
  throw Error(ErrorKind::InvalidArgument, "expected a number or a ratio string");
}

inline IfsSystem system_from_json(const json& j) {
  try {
    std::vector<AffineMap> maps;
    for (const auto& m : j.at("maps")) {
      const auto& a = m.at("a");
      const auto& t = m.at("t");
      maps.push_back({{number_from_json(a.at(0).at(0)), number_from_json(a.at(0).at(1)),
                       number_from_json(a.at(1).at(0)), number_from_json(a.at(1).at(1))},
                      {number_from_json(t.at(0)), number_from_json(t.at(1))}});
    }
    const double radius = j.contains("radius") ? number_from_json(j.at("radius")) : minimal_radius(maps);
    const Structure tag = j.contains("tag") ? structure_from_string(j.at("tag").get<std::string>())
                                            : Structure::General;
    std::optional<ConvexPolygon> hull;
    if (j.contains("hull")) {
      std::vector<Vec2> pts;
      for (const auto& p : j.at("hull")) pts.push_back({number_from_json(p.at(0)), number_from_json(p.at(1))});
      hull = ConvexPolygon(std::move(pts));
    }
    return IfsSystem(std::move(maps), radius, tag, std::move(hull));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("malformed system JSON: ") + e.what());
  }
}

inline json system_to_json(const IfsSystem& sys) {
  json maps = json::array();
  for (const auto& m : sys.maps()) {
    maps.push_back({{"a", {{m.a.a11, m.a.a12}, {m.a.a21, m.a.a22}}}, {"t", {m.t.x, m.t.y}}});
  }
  json out{{"maps", maps}, {"radius", sys.radius()}, {"tag", to_string(sys.tag())}};
  if (sys.hull()) {
    json pts = json::array();
    for (const auto& p : sys.hull()->vertices()) pts.push_back({p.x, p.y});
    out["hull"] = pts;
  }
  return out;
}

inline IfsSystem load_system(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("invalid JSON in '") + path + "': " + e.what());
  }
  return system_from_json(j);
}

}  // namespace sadim
