#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "sadim/linalg.hpp"
#include "sadim/polygon.hpp"

using namespace sadim;

namespace {

const Matrix2 kB{0.2, 0.1, 0.1, 0.2};

Matrix2 random_matrix(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (;;) {
    Matrix2 m{u(rng), u(rng), u(rng), u(rng)};
    if (std::abs(m.det()) > 1e-3) return m;
  }
}

// Singular values from the characteristic polynomial of m^T m.
std::pair<double, double> oracle_singular_values(const Matrix2& m) {
  const Matrix2 g = m.transpose() * m;
  const double tr = g.a11 + g.a22, det = g.det();
  const double disc = std::sqrt(std::max(0.0, tr * tr / 4 - det));
  return {std::sqrt(tr / 2 + disc), std::sqrt(std::max(0.0, tr / 2 - disc))};
}

double angle_gap(const ProjPoint& a, const ProjPoint& b) { return proj_distance(a, b); }

}  // namespace

TEST(Svd2, Identity) {
  const Svd2 s = svd2(Matrix2::identity());
  EXPECT_DOUBLE_EQ(s.alpha1, 1.0);
  EXPECT_DOUBLE_EQ(s.alpha2, 1.0);
}

TEST(Svd2, DiagonalThirdFifth) {
  const Svd2 s = svd2(Matrix2::diag(1.0 / 3, 1.0 / 5));
  EXPECT_NEAR(s.alpha1, 1.0 / 3, 1e-15);
  EXPECT_NEAR(s.alpha2, 1.0 / 5, 1e-15);
  EXPECT_LT(angle_gap(s.v1, ProjPoint::x_axis()), 1e-15);
  EXPECT_LT(angle_gap(s.u1, ProjPoint::x_axis()), 1e-15);
}

TEST(Svd2, SymmetricShear) {
  const Svd2 s = svd2(kB);
  EXPECT_NEAR(s.alpha1, 0.3, 1e-15);
  EXPECT_NEAR(s.alpha2, 0.1, 1e-15);
  EXPECT_LT(angle_gap(s.v1, ProjPoint::from_slope(1.0)), 1e-12);
}

TEST(Svd2, TieResolvesToXAxis) {
  const Svd2 s = svd2(Matrix2{0.0, -0.5, 0.5, 0.0});
  EXPECT_DOUBLE_EQ(s.v1.angle(), 0.0);
}

TEST(Svd2, SingularInputThrows) {
  try {
    svd2(Matrix2{1.0, 2.0, 2.0, 4.0});
    FAIL() << "expected SingularMatrix";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SingularMatrix);
  }
}

TEST(Svd2, RandomMatricesAgainstOracles) {
  std::mt19937_64 rng(1);
  for (int k = 0; k < 10000; ++k) {
    const Matrix2 m = random_matrix(rng);
    const Svd2 s = svd2(m);
    ASSERT_GE(s.alpha1, s.alpha2);
    ASSERT_GT(s.alpha2, 0.0);
    ASSERT_NEAR(s.alpha1 * s.alpha2, std::abs(m.det()), 1e-10 * std::abs(m.det()));
    const auto [o1, o2] = oracle_singular_values(m);
    ASSERT_NEAR(s.alpha1, o1, 1e-12);
    ASSERT_NEAR(s.alpha2, o2, 1e-9);
    if (k % 50 == 0) {
      double best = 0.0;
      for (int j = 0; j < 360; ++j) {
        const double th = kPi * j / 360;
        best = std::max(best, norm(m({std::cos(th), std::sin(th)})));
      }
      ASSERT_NEAR(best, s.alpha1, 1e-4 * s.alpha1);  // sampled sup with 1/2 degree spacing
      ASSERT_NEAR(norm_restricted(m, s.v1), s.alpha1, 1e-12);
    }
  }
}

TEST(PhiS, Examples) {
  const Matrix2 d = Matrix2::diag(1.0 / 3, 1.0 / 5);
  EXPECT_DOUBLE_EQ(phi_s(kB, 0.0), 1.0);
  EXPECT_NEAR(phi_s(d, 1.5), (1.0 / 3) * std::sqrt(1.0 / 5), 1e-15);
  EXPECT_NEAR(phi_s(d, 1.5), 0.1490712, 1e-7);
  EXPECT_NEAR(phi_s(d, 2.5), std::pow(1.0 / 15, 1.25), 1e-15);
  EXPECT_THROW(phi_s(d, -0.5), Error);
}

TEST(PhiS, Submultiplicative) {
  std::mt19937_64 rng(2);
  for (int k = 0; k < 2000; ++k) {
    const Matrix2 a = random_matrix(rng), b = random_matrix(rng);
    for (double s : {0.5, 1.0, 1.5, 2.0, 2.5})
      ASSERT_LE(phi_s(a * b, s), phi_s(a, s) * phi_s(b, s) * (1 + 1e-12)) << "s=" << s;
  }
}

TEST(ActProj, Examples) {
  const ProjPoint p = ProjPoint::from_angle(1.234);
  EXPECT_LT(angle_gap(act_proj(Matrix2::identity(), p), p), 1e-15);
  EXPECT_NEAR(act_proj(Matrix2::diag(0.5, 1.0 / 3).transpose(), ProjPoint::from_slope(1.0)).slope(), 2.0 / 3, 1e-14);
  EXPECT_NEAR(act_proj(kB, ProjPoint::from_slope(1.0)).slope(), 1.0, 1e-14);
}

TEST(ActProj, Composition) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, kPi);
  for (int k = 0; k < 2000; ++k) {
    const Matrix2 a = random_matrix(rng), b = random_matrix(rng);
    const ProjPoint p = ProjPoint::from_angle(u(rng));
    ASSERT_LT(angle_gap(act_proj(a, act_proj(b, p)), act_proj(a * b, p)), 1e-10);
  }
}

TEST(ProjPoint, CanonicalRepresentative) {
  for (double th : {0.0, 0.3, kPi / 2, 2.0, kPi - 1e-9, -0.4, 7.0}) {
    const ProjPoint p = ProjPoint::from_angle(th);
    EXPECT_GE(p.angle(), 0.0);
    EXPECT_LT(p.angle(), kPi);
    EXPECT_NEAR(norm(p.unit()), 1.0, 1e-15);
    const Vec2 v = p.unit();
    EXPECT_TRUE(v.x > 0 || (v.x == 0 && v.y > 0));
  }
  EXPECT_LT(proj_distance(ProjPoint::from_angle(0.7), ProjPoint::from_angle(0.7 + kPi)), 1e-15);
}

TEST(NormRestricted, Examples) {
  EXPECT_DOUBLE_EQ(norm_restricted(Matrix2::diag(0.5, 1.0 / 3), ProjPoint::x_axis()), 0.5);
  EXPECT_NEAR(norm_restricted(kB, ProjPoint::from_slope(1.0)), 0.3, 1e-15);
  EXPECT_NEAR(norm_restricted(Matrix2::identity(), ProjPoint::from_angle(2.2)), 1.0, 1e-15);
}

TEST(NormRestricted, BoundedByAlpha1) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, kPi);
  for (int k = 0; k < 2000; ++k) {
    const Matrix2 m = random_matrix(rng);
    ASSERT_LE(norm_restricted(m, ProjPoint::from_angle(u(rng))), svd2(m).alpha1 * (1 + 1e-14));
  }
}

TEST(IntervalImage, Examples) {
  const ProjInterval iv = ProjInterval::from_endpoints(0.2, 0.9);
  const ProjInterval same = interval_image(Matrix2::identity(), iv);
  EXPECT_NEAR(same.start, iv.start, 1e-15);
  EXPECT_NEAR(same.length, iv.length, 1e-15);

  const ProjInterval img = interval_image(Matrix2::diag(0.5, 1.0 / 3).transpose(), ProjInterval::from_slopes(-1, 1));
  EXPECT_NEAR(std::tan(img.start), -2.0 / 3, 1e-14);
  EXPECT_NEAR(std::tan(img.start + img.length), 2.0 / 3, 1e-14);

  const ProjInterval mob = interval_image(kB, ProjInterval::from_slopes(-0.1, 2.0));
  EXPECT_NEAR(std::tan(mob.start), 0.8 / 1.9, 1e-13);
  EXPECT_NEAR(std::tan(mob.start + mob.length), 1.25, 1e-13);
}

TEST(IntervalImage, OrientationReversingMap) {
  // det < 0: endpoints swap but the image is still the short arc between them.
  const ProjInterval img = interval_image(Matrix2::diag(-0.5, 0.25), ProjInterval::from_slopes(0.0, 1.0));
  EXPECT_NEAR(std::tan(img.start), -0.5, 1e-14);
  EXPECT_NEAR(img.length, std::atan(0.5), 1e-14);
}

TEST(Multicone, NormalizeMergesOverlaps) {
  const Multicone c({ProjInterval::from_endpoints(0.1, 0.5), ProjInterval::from_endpoints(0.4, 0.8),
                     ProjInterval::from_endpoints(2.0, 2.1)});
  ASSERT_EQ(c.size(), 2u);
  EXPECT_NEAR(c.total_length(), 0.7 + 0.1, 1e-14);
  EXPECT_TRUE(c.contains(ProjPoint::from_angle(0.6)));
  EXPECT_FALSE(c.contains(ProjPoint::from_angle(1.5)));
}

TEST(Polygon, ChordAndSupport) {
  const ConvexPolygon sq = ConvexPolygon::rectangle(0, 0, 1, 1);
  const auto chord = sq.chord({1.0, 0.0}, 0.5);
  ASSERT_TRUE(chord.has_value());
  EXPECT_NEAR(chord->length(), 1.0, 1e-15);
  EXPECT_FALSE(sq.chord({1.0, 0.0}, 1.5).has_value());
  const Segment s = sq.support({std::sqrt(0.5), std::sqrt(0.5)});
  EXPECT_NEAR(s.lo, 0.0, 1e-15);
  EXPECT_NEAR(s.hi, std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(sq.diameter(), std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(sq.width(), 1.0, 1e-15);
}
