#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "sadim/kaenmaki.hpp"
#include "sadim/presets.hpp"

using namespace sadim;

namespace {

struct Fixture {
  IfsSystem sys;
  DominationCertificate cert;
  double s0;
};

Fixture closed(const char* name) {
  IfsSystem sys = make_preset(name).system;
  auto cert = find_multicone(sys);
  const double s0 = affinity_closed_form(sys);
  return {std::move(sys), std::move(cert), s0};
}

const Fixture& figure1() {
  static const Fixture f = [] {
    IfsSystem sys = make_preset("figure1").system;
    auto cert = find_multicone(sys);
    const double s8 = affinity_upper_bound(sys, 8).s;
    return Fixture{std::move(sys), std::move(cert), s8};
  }();
  return f;
}

const KaenmakiModel& figure1_model() {
  static const KaenmakiModel m(figure1().sys, figure1().cert, figure1().s0);
  return m;
}

double tv_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d += std::abs(a[i] - b[i]);
  return d;
}

}  // namespace

TEST(CylinderIndex, EncodeDecodeAndPrefixRanges) {
  const CylinderIndex idx(3, 4);
  EXPECT_EQ(idx.size(), 81u);
  for (std::size_t u = 0; u < idx.size(); ++u) EXPECT_EQ(idx.encode(idx.decode(u)), u);
  const auto [lo, hi] = idx.refinements({2, 1});
  EXPECT_EQ(hi - lo, 9u);
  for (std::size_t u = lo; u < hi; ++u) {
    const Word w = idx.decode(u);
    EXPECT_EQ(w[0], 2);
    EXPECT_EQ(w[1], 1);
  }
  EXPECT_THROW(idx.refinements({0, 0, 0, 0, 0}), Error);
}

TEST(Potential, ConstantOnGridAndEx1) {
  const Fixture g = closed("grid-2x3");
  const Fixture e = closed("ex1-diag");
  std::mt19937_64 rng(21);
  for (int k = 0; k < 20; ++k) {
    Word head{static_cast<int>(rng() % 6)}, tail{static_cast<int>(rng() % 6), static_cast<int>(rng() % 6)};
    EXPECT_NEAR(potential_g(g.sys, g.cert, InfiniteWord{head, tail}, g.s0), std::log(1.0 / 6), 1e-12);
    Word he{static_cast<int>(rng() % 10)}, te{static_cast<int>(rng() % 10)};
    EXPECT_NEAR(potential_g(e.sys, e.cert, InfiniteWord{he, te}, e.s0), std::log(0.1), 1e-9);
  }
}

TEST(TransferOperator, ConstantPotentialPresets) {
  for (const char* name : {"grid-2x3", "ex1-diag"}) {
    const Fixture f = closed(name);
    KaenmakiOptions opt;
    opt.depth = 3;
    const KaenmakiModel m(f.sys, f.cert, f.s0, opt);
    const std::size_t n = m.index().size();
    const CylinderFunction one{3, std::vector<double>(n, 1.0)};
    for (double v : m.transfer_apply_raw(one).values) EXPECT_NEAR(v, 1.0, 1e-10) << name;
    for (double v : m.transfer_apply_raw({3, std::vector<double>(n, 0.0)}).values) EXPECT_EQ(v, 0.0);
    EXPECT_NEAR(m.lambda(), 1.0, 1e-10);
    for (double p : m.p().values) EXPECT_NEAR(p, 1.0, 1e-10) << name;
    EXPECT_LE(m.p_residual(), 1e-12);
    const double uniform = std::pow(static_cast<double>(f.sys.size()), -3);
    for (double x : m.nu().masses) EXPECT_NEAR(x, uniform, 1e-10 * uniform) << name;
  }
}

TEST(TransferOperator, GridMeasuresAreUniformBernoulli) {
  const Fixture f = closed("grid-2x3");
  KaenmakiOptions opt;
  opt.depth = 4;
  const KaenmakiModel m(f.sys, f.cert, f.s0, opt);
  EXPECT_NEAR(m.mu_F({0, 3}), 1.0 / 36, 1e-12);
  EXPECT_NEAR(m.mu_K({5, 1}), 1.0 / 36, 1e-12);
  EXPECT_NEAR(m.mu_K({5, 1, 2, 2}), std::pow(6.0, -4), 1e-14);
  EXPECT_NEAR(m.mu_K_extended({5, 1, 2, 2, 0, 3}), std::pow(6.0, -6), 1e-15);
}

TEST(TransferOperator, Ex1Masses) {
  const Fixture f = closed("ex1-diag");
  KaenmakiOptions opt;
  opt.depth = 3;
  const KaenmakiModel m(f.sys, f.cert, f.s0, opt);
  EXPECT_NEAR(m.mu_F({7}), 0.1, 1e-10);
  EXPECT_NEAR(m.mu_K({3, 9}), 0.01, 1e-10);
  EXPECT_NEAR(mu_K_closed_form(f.sys, {3, 9}, f.s0), 0.01, 1e-12);
}

TEST(TransferOperator, Figure1Residuals) {
  const KaenmakiModel& m = figure1_model();
  EXPECT_LE(m.p_residual(), 1e-6);
  const MeasureApprox nu = m.nu();
  EXPECT_LE(tv_distance(m.dual_apply(nu).masses, nu.masses), 1e-6);
  const auto p = m.p().values;
  EXPECT_GT(*std::min_element(p.begin(), p.end()), 0.0);
  const double ratio = *std::min_element(p.begin(), p.end()) / *std::max_element(p.begin(), p.end());
  EXPECT_GT(ratio, 0.0);
  EXPECT_LE(ratio, 1.0);
  double total = 0.0;
  for (double x : nu.masses) total += x;
  EXPECT_NEAR(total, 1.0, 1e-12);
  // The surrogate s8 is an upper bound for s0, so the spectral radius is at most 1.
  EXPECT_LE(m.lambda(), 1.0 + 1e-12);
}

TEST(TransferOperator, Figure1EigenfunctionStableInDepth) {
  KaenmakiOptions opt;
  opt.depth = 5;
  const KaenmakiModel coarse(figure1().sys, figure1().cert, figure1().s0, opt);
  const KaenmakiModel& fine = figure1_model();
  double worst = 0.0;
  for (std::size_t u = 0; u < fine.index().size(); ++u) {
    const Word w = fine.index().decode(u);
    const double pc = coarse.p().values[coarse.index().encode(Word(w.begin(), w.end() - 1))];
    worst = std::max(worst, std::abs(fine.p().values[u] / pc - 1.0));
  }
  EXPECT_LE(worst, 0.01);
}

TEST(Measures, ShiftConsistency) {
  const KaenmakiModel& m = figure1_model();
  for (int len = 0; len <= m.depth() - 1; ++len) {
    const CylinderIndex idx(6, std::max(len, 1));
    const std::size_t count = len == 0 ? 1 : idx.size();
    for (std::size_t u = 0; u < count; ++u) {
      const Word w = len == 0 ? Word{} : idx.decode(u);
      double sum = 0.0;
      for (int k = 0; k < 6; ++k) {
        Word kw{k};
        kw.insert(kw.end(), w.begin(), w.end());
        sum += m.mu_F(kw);
      }
      ASSERT_NEAR(sum, len == 0 ? 1.0 : m.mu_F(w), 1e-8) << word_to_string(w);
    }
  }
}

TEST(Measures, Figure1ComparabilityBand) {
  const KaenmakiModel& m = figure1_model();
  double lo = 1e300, hi = 0.0;
  for (int len = 1; len <= 6; ++len) {
    const CylinderIndex idx(6, len);
    for (std::size_t u = 0; u < idx.size(); ++u) {
      const Word w = idx.decode(u);
      const double r = m.mu_K(w) / phi_s(compose_word(figure1().sys, w).a, figure1().s0);
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
  }
  const double c = std::max(hi, 1.0 / lo);
  std::printf("figure1 mu_K / phi^s8 band: [%.4f, %.4f], c = %.4f\n", lo, hi, c);
  EXPECT_LT(c, 50.0);
}

TEST(Measures, MuKClosedFormMatchesModelOnEx2) {
  // The cylinder discretisation of the transfer operator converges to the
  // Bernoulli closed form as the depth grows.
  const Fixture f = closed("ex2-triangular");
  const MuK closed_mu = MuK::closed_form(f.sys, f.s0);
  double prev = 1.0;
  for (int depth : {1, 2, 3}) {
    KaenmakiOptions opt;
    opt.depth = depth;
    const KaenmakiModel m(f.sys, f.cert, f.s0, opt);
    double worst = 0.0;
    for (int k = 0; k < 28; ++k) worst = std::max(worst, std::abs(m.mu_K({k}) / closed_mu({k}) - 1.0));
    std::printf("ex2 depth %d: max |mu_K / closed - 1| = %.3e\n", depth, worst);
    EXPECT_LT(worst, prev);
    prev = worst;
  }
  EXPECT_LT(prev, 1e-4);
}

TEST(Measures, BirkhoffSumsComparableToPhi) {
  const Fixture& f = figure1();
  const double c_emp = domin_constants(f.sys.linear_parts(), f.cert, 6).c_emp;
  std::mt19937_64 rng(22);
  double worst = 0.0;
  for (int k = 0; k < 200; ++k) {
    Word period(5);
    for (auto& s : period) s = static_cast<int>(rng() % 6);
    const InfiniteWord w = InfiniteWord::periodic(period);
    for (std::size_t n : {1u, 3u, 6u}) {
      double sum = 0.0;
      InfiniteWord cur = w;
      for (std::size_t j = 0; j < n; ++j) {
        sum += potential_g(f.sys, f.cert, cur, f.s0);
        cur = cur.shifted();
      }
      const double phi = std::log(phi_s(compose_word(f.sys, reversed(w.head(n))).a, f.s0));
      worst = std::max(worst, std::abs(sum - phi));
    }
  }
  EXPECT_LE(worst, std::log(c_emp)) << "worst " << worst << " log C " << std::log(c_emp);
}

TEST(Measures, MuKCsvIsDeterministic) {
  const Fixture f = closed("grid-2x3");
  KaenmakiOptions opt;
  opt.depth = 2;
  const KaenmakiModel a(f.sys, f.cert, f.s0, opt), b(f.sys, f.cert, f.s0, opt);
  EXPECT_EQ(a.csv(), b.csv());
  EXPECT_EQ(a.csv().substr(0, 15), "word,p,nu,mu_K\n");
}
