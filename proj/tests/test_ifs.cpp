#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <random>
#include <set>

#include "sadim/presets.hpp"
#include "sadim/system_io.hpp"

using namespace sadim;

namespace {

void expect_matrix_near(const Matrix2& a, const Matrix2& b, double tol) {
  EXPECT_NEAR(a.a11, b.a11, tol);
  EXPECT_NEAR(a.a12, b.a12, tol);
  EXPECT_NEAR(a.a21, b.a21, tol);
  EXPECT_NEAR(a.a22, b.a22, tol);
}

bool bit_equal(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no sadim::Error thrown";
  return ErrorKind::Io;
}

}  // namespace

TEST(IfsSystem, RejectsInvalidMaps) {
  const std::vector<AffineMap> singular{{Matrix2{0.5, 0.5, 0.25, 0.25}, {0, 0}}, {Matrix2::diag(0.5, 0.5), {0, 0}}};
  EXPECT_EQ(kind_of([&] { IfsSystem(singular, 1.0); }), ErrorKind::SingularMatrix);

  const std::vector<AffineMap> expanding{{Matrix2::diag(1.5, 0.5), {0, 0}}, {Matrix2::diag(0.5, 0.5), {0, 0}}};
  EXPECT_EQ(kind_of([&] { IfsSystem(expanding, 1.0); }), ErrorKind::InvalidArgument);

  const std::vector<AffineMap> shear{{Matrix2{0.5, 0.1, 0.0, 0.5}, {0, 0}}, {Matrix2::diag(0.5, 0.5), {0, 0}}};
  EXPECT_EQ(kind_of([&] { IfsSystem(shear, 2.0, Structure::Diagonal); }), ErrorKind::InvalidArgument);
  EXPECT_EQ(kind_of([&] { IfsSystem(shear, 2.0, Structure::LowerTriangular); }), ErrorKind::InvalidArgument);

  const std::vector<AffineMap> far{{Matrix2::diag(0.5, 0.5), {3.0, 0}}, {Matrix2::diag(0.5, 0.5), {0, 0}}};
  EXPECT_EQ(kind_of([&] { IfsSystem(far, 1.0); }), ErrorKind::InvalidArgument);
}

TEST(IfsSystem, MinimalRadiusIsForwardInvariant) {
  for (const auto& name : preset_names()) {
    const IfsSystem& sys = make_preset(name).system;
    for (const auto& m : sys.maps())
      EXPECT_LE(svd2(m.a).alpha1 * sys.radius() + norm(m.t), sys.radius() * (1 + 1e-12)) << name;
  }
}

TEST(ComposeWord, Examples) {
  const IfsSystem grid = make_preset("grid-2x3").system;
  const AffineMap id = compose_word(grid, {});
  expect_matrix_near(id.a, Matrix2::identity(), 0.0);
  EXPECT_EQ(id.t.x, 0.0);
  EXPECT_EQ(id.t.y, 0.0);
  expect_matrix_near(compose_word(grid, {0, 0}).a, Matrix2::diag(0.25, 1.0 / 9), 1e-16);

  const IfsSystem fig = make_preset("figure1").system;
  const AffineMap f6 = compose_word(fig, {5});
  expect_matrix_near(f6.a, Matrix2{0.2, 0.1, 0.1, 0.2}, 1e-16);
  EXPECT_NEAR(f6.t.x, 0.5, 1e-16);
  EXPECT_NEAR(f6.t.y, 0.2, 1e-16);
  // f6(x, y) = ((2x + y + 5)/10, (x + 2y + 2)/10)
  const Vec2 p{0.3, 0.7};
  EXPECT_NEAR(f6(p).x, (2 * p.x + p.y + 5) / 10, 1e-15);
  EXPECT_NEAR(f6(p).y, (p.x + 2 * p.y + 2) / 10, 1e-15);
}

TEST(ComposeWord, Concatenation) {
  const IfsSystem sys = make_preset("figure1").system;
  std::mt19937_64 rng(5);
  for (int k = 0; k < 200; ++k) {
    Word a, b;
    for (int j = 0; j < 1 + k % 5; ++j) a.push_back(static_cast<int>(rng() % 6));
    for (int j = 0; j < 1 + k % 4; ++j) b.push_back(static_cast<int>(rng() % 6));
    const AffineMap fa = compose_word(sys, a), fb = compose_word(sys, b), fab = compose_word(sys, concat(a, b));
    expect_matrix_near(fab.a, fa.a * fb.a, 1e-12);
    const Vec2 t = fa(fb.t);
    EXPECT_NEAR(fab.t.x, t.x, 1e-12);
    EXPECT_NEAR(fab.t.y, t.y, 1e-12);
  }
}

TEST(ComposeWord, RejectsBadSymbols) {
  const IfsSystem sys = make_preset("grid-2x3").system;
  EXPECT_THROW(compose_word(sys, {6}), Error);
  EXPECT_THROW(compose_word(sys, {-1}), Error);
}

TEST(NaturalProject, FixedPoints) {
  const IfsSystem fig = make_preset("figure1").system;
  const Vec2 p = natural_project(fig, Word{0});
  EXPECT_NEAR(p.x, 0.0, 1e-12);
  EXPECT_NEAR(p.y, 0.0, 1e-12);
  // Fixed point of f6: (I - B) x = t.
  const Vec2 q = natural_project(fig, Word{5});
  const Matrix2 ib{0.8, -0.1, -0.1, 0.8};
  const Vec2 expected = ib.inverse()({0.5, 0.2});
  EXPECT_NEAR(q.x, expected.x, 1e-12);
  EXPECT_NEAR(q.y, expected.y, 1e-12);
}

TEST(NaturalProject, PeriodicAgainstDirectIteration) {
  const IfsSystem grid = make_preset("grid-2x3").system;
  const Word w{0, 5};
  Vec2 x{0.0, 0.0};
  for (int k = 49; k >= 0; --k) x = grid.map(static_cast<std::size_t>(w[static_cast<std::size_t>(k % 2)]))(x);
  const Vec2 p = natural_project(grid, w);
  EXPECT_NEAR(p.x, x.x, 1e-10);
  EXPECT_NEAR(p.y, x.y, 1e-10);
}

TEST(NaturalProject, ShiftEquivariance) {
  std::mt19937_64 rng(6);
  for (const auto& name : preset_names()) {
    const IfsSystem sys = make_preset(name).system;
    for (int k = 0; k < 20; ++k) {
      Word head, tail;
      for (int j = 0; j < 3; ++j) head.push_back(static_cast<int>(rng() % sys.size()));
      for (int j = 0; j < 4; ++j) tail.push_back(static_cast<int>(rng() % sys.size()));
      const InfiniteWord w{head, tail};
      const Vec2 lhs = natural_project(sys, w);
      const Vec2 rhs = sys.map(static_cast<std::size_t>(w.at(0)))(natural_project(sys, w.shifted()));
      EXPECT_NEAR(lhs.x, rhs.x, 1e-11) << name;
      EXPECT_NEAR(lhs.y, rhs.y, 1e-11) << name;
    }
  }
}

TEST(Words, Reversal) {
  EXPECT_EQ(reversed(Word{}), Word{});
  EXPECT_EQ(reversed(Word{1, 2, 3}), (Word{3, 2, 1}));
  std::mt19937_64 rng(7);
  for (int k = 0; k < 50; ++k) {
    Word w(static_cast<std::size_t>(k % 9));
    for (auto& s : w) s = static_cast<int>(rng() % 7);
    EXPECT_EQ(reversed(reversed(w)), w);
  }
}

TEST(StoppingSection, Ex1FullLevel) {
  const IfsSystem ex1 = make_preset("ex1-diag").system;
  const double d = ex1.diameter();
  const StoppingSection sec = stopping_section(ex1, d / 121 / 50);
  ASSERT_EQ(sec.size(), 100u);
  for (const auto& e : sec.entries) EXPECT_EQ(e.word.size(), 2u);
  EXPECT_EQ(stopping_section(ex1, d / 121).size(), 10u);
}

TEST(StoppingSection, NeverContainsEmptyWord) {
  const IfsSystem grid = make_preset("grid-2x3").system;
  const StoppingSection sec = stopping_section(grid, grid.diameter() * (1.0 / 3) * 0.999);
  for (const auto& e : sec.entries) EXPECT_GE(e.word.size(), 1u);
}

TEST(StoppingSection, GridLevels) {
  const IfsSystem grid = make_preset("grid-2x3").system;
  for (int m = 1; m <= 5; ++m) {
    const StoppingSection sec = stopping_section(grid, std::pow(1.0 / 3, m) * grid.diameter());
    ASSERT_EQ(sec.size(), static_cast<std::size_t>(std::pow(6, m)));
    for (const auto& e : sec.entries) ASSERT_EQ(e.word.size(), static_cast<std::size_t>(m));
  }
}

TEST(StoppingSection, PrefixFreeExhaustiveMinimal) {
  for (const auto& name : preset_names()) {
    const IfsSystem sys = make_preset(name).system;
    const double n = static_cast<double>(sys.size());
    for (double f : {0.2, 0.05, 0.01}) {
      const double r = f * sys.diameter();
      const StoppingSection sec = stopping_section(sys, r);
      std::set<Word> words;
      double mass = 0.0;
      for (const auto& e : sec.entries) {
        words.insert(e.word);
        mass += std::pow(1.0 / n, static_cast<double>(e.word.size()));
        // Stopping rule: small now, not yet small one symbol earlier.
        EXPECT_LE(e.alpha2 * sys.diameter(), r * (1 + 1e-12));
        if (e.word.size() > 1) {
          const Word parent(e.word.begin(), e.word.end() - 1);
          EXPECT_GT(svd2(compose_word(sys, parent).a).alpha2 * sys.diameter(), r);
        }
      }
      EXPECT_NEAR(mass, 1.0, 1e-12) << name;
      for (const auto& w : words)
        for (std::size_t k = 1; k < w.size(); ++k) EXPECT_EQ(words.count(Word(w.begin(), w.begin() + k)), 0u);
    }
  }
}

TEST(StoppingSection, Alpha1Variant) {
  const IfsSystem grid = make_preset("grid-2x3").system;
  const StoppingSection sec = stopping_section(grid, grid.diameter() / 8, SectionVariant::Alpha1);
  for (const auto& e : sec.entries) EXPECT_EQ(e.word.size(), 3u);
}

TEST(StoppingSection, ScaleChecks) {
  const IfsSystem grid = make_preset("grid-2x3").system;
  EXPECT_THROW(stopping_section(grid, 0.0), Error);
  EXPECT_THROW(stopping_section(grid, 10.0), Error);
  EXPECT_EQ(kind_of([&] { stopping_section(grid, 1e-9, SectionVariant::Alpha2, 1000); }), ErrorKind::ScaleTooSmall);
}

TEST(CylinderBbox, Examples) {
  const IfsSystem grid = make_preset("grid-2x3").system;
  const OrientedRect root = cylinder_bbox(grid, {});
  EXPECT_NEAR(root.half1, grid.radius(), 1e-15);
  EXPECT_NEAR(root.half2, grid.radius(), 1e-15);
  const OrientedRect r3 = cylinder_bbox(grid, {1, 2, 3});
  EXPECT_NEAR(r3.half1, grid.radius() / 8, 1e-15);
  EXPECT_NEAR(r3.half2, grid.radius() / 27, 1e-15);

  const IfsSystem fig = make_preset("figure1").system;
  const OrientedRect r6 = cylinder_bbox(fig, {5});
  EXPECT_NEAR(r6.half1, 0.3 * fig.radius(), 1e-15);
  EXPECT_NEAR(r6.half2, 0.1 * fig.radius(), 1e-15);
}

TEST(CylinderBbox, ContainsImageOfBall) {
  const IfsSystem fig = make_preset("figure1").system;
  std::mt19937_64 rng(8);
  for (int k = 0; k < 50; ++k) {
    Word w;
    for (int j = 0; j < 1 + k % 4; ++j) w.push_back(static_cast<int>(rng() % 6));
    const AffineMap f = compose_word(fig, w);
    const OrientedRect box = cylinder_bbox(fig, w);
    for (int j = 0; j < 64; ++j) {
      const double th = 2 * kPi * j / 64;
      EXPECT_TRUE(box.contains(f(Vec2{fig.radius() * std::cos(th), fig.radius() * std::sin(th)}), 1e-9));
    }
  }
}

TEST(SystemIo, RatioStrings) {
  EXPECT_EQ(parse_number("1/3"), 1.0 / 3);
  EXPECT_EQ(parse_number("-2/5"), -2.0 / 5);
  EXPECT_EQ(parse_number("0.125"), 0.125);
  EXPECT_THROW(parse_number("1/0"), Error);
  EXPECT_THROW(parse_number("abc"), Error);
}

TEST(SystemIo, RoundTripIsBitExact) {
  for (const auto& name : preset_names()) {
    const IfsSystem a = make_preset(name).system;
    const IfsSystem b = system_from_json(json::parse(system_to_json(a).dump()));
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      const auto &p = a.map(i), &q = b.map(i);
      EXPECT_TRUE(bit_equal(p.a.a11, q.a.a11) && bit_equal(p.a.a12, q.a.a12) && bit_equal(p.a.a21, q.a.a21) &&
                  bit_equal(p.a.a22, q.a.a22) && bit_equal(p.t.x, q.t.x) && bit_equal(p.t.y, q.t.y))
          << name << " map " << i;
    }
    EXPECT_TRUE(bit_equal(a.radius(), b.radius()));
    EXPECT_EQ(a.tag(), b.tag());
    EXPECT_EQ(a.hull().has_value(), b.hull().has_value());
    EXPECT_EQ(system_to_json(a).dump(), system_to_json(b).dump());
  }
}

TEST(SystemIo, MalformedInput) {
  EXPECT_THROW(system_from_json(json::parse(R"({"maps": [{"a": [[0.5, 0]], "t": [0, 0]}]})")), Error);
  EXPECT_THROW(system_from_json(json::parse(R"({"nomaps": 1})")), Error);
  EXPECT_EQ(kind_of([] { load_system("/nonexistent/path.json"); }), ErrorKind::Io);
}

TEST(Presets, Figure1Layout) {
  const Preset p = make_preset("figure1");
  ASSERT_EQ(p.system.size(), 6u);
  ASSERT_TRUE(p.carpet.has_value());
  for (std::size_t i = 0; i < 5; ++i) expect_matrix_near(p.system.map(i).a, Matrix2::diag(1.0 / 3, 0.2), 1e-16);
}

TEST(Presets, Ex2Parameters) {
  const Preset p = make_preset("ex2-triangular", 28);
  ASSERT_EQ(p.system.size(), 28u);
  for (std::size_t i = 0; i < p.system.size(); ++i) {
    const auto& m = p.system.map(i);
    EXPECT_EQ(m.a.a11, 1.0 / 29);
    EXPECT_EQ(m.a.a22, 1.0 / 3);
    EXPECT_EQ(m.a.a12, 0.0);
    EXPECT_NEAR(m.t.x, static_cast<double>(i) * 28 / (28 * 28 - 1), 1e-15);
  }
  EXPECT_THROW(make_preset("nope"), Error);
}
