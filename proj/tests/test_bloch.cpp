#include <gtest/gtest.h>

#include "support.hpp"

using namespace fcf;

namespace {

const LatticeGeometry geom = build_geometry();
constexpr double pi = std::numbers::pi;

BlochModel model(ModelKind kind, double delta, double j2, double phi) {
  BlochModel m;
  m.kind = kind;
  m.delta = delta;
  m.j1 = 1.0;
  m.j2 = j2;
  m.phi = phi;
  return m;
}

// Valley masses of the lower band: C = (sgn mK' - sgn mK) / 2.
int oracle_chern(ModelKind kind, double delta, double j2, double phi) {
  double mK = 0.0, mKp = 0.0;
  if (kind == ModelKind::driven_hexagonal) {
    mK = delta + 6.0 * j2 * std::cos(phi + 2.0 * pi / 3.0);
    mKp = delta + 6.0 * j2 * std::cos(phi - 2.0 * pi / 3.0);
  } else {
    mK = delta - 3.0 * std::numbers::sqrt3 * j2 * std::sin(phi);
    mKp = delta + 3.0 * std::numbers::sqrt3 * j2 * std::sin(phi);
  }
  const auto sgn = [](double x) { return (x > 0.0) - (x < 0.0); };
  return (sgn(mKp) - sgn(mK)) / 2;
}

const Vec2 K = geom.momentum(1.0 / 3.0, 1.0 / 3.0);
const Vec2 Kp = geom.momentum(2.0 / 3.0, 2.0 / 3.0);

}  // namespace

TEST(HVector, GammaPoint) {
  const HVector h = h_vector(model(ModelKind::driven_hexagonal, 0.3, 0.1, 0.4), Vec2::Zero());
  EXPECT_NEAR(h.h1, 3.0, 1e-14);
  EXPECT_NEAR(h.h2, 0.0, 1e-14);
  EXPECT_NEAR(h.h3, 0.3 + 6.0 * 0.1 * std::cos(0.4), 1e-14);
  EXPECT_EQ(h.h0, 0.0);
}

TEST(HVector, DiracPointsHaveNoOffDiagonal) {
  for (const Vec2& k : {K, Kp}) {
    const HVector h = h_vector(model(ModelKind::driven_hexagonal, 0.0, 0.0, 0.0), k);
    EXPECT_NEAR(h.h1, 0.0, 1e-14);
    EXPECT_NEAR(h.h2, 0.0, 1e-14);
  }
}

TEST(HVector, ValleyMassesMatchClosedForms) {
  for (double phi : {-2.5, -0.7, 0.0, 0.9, 2.2}) {
    const double d = 0.37, j2 = 0.2;
    EXPECT_NEAR(h_vector(model(ModelKind::driven_hexagonal, d, j2, phi), K).h3,
                d + 6.0 * j2 * std::cos(phi + 2.0 * pi / 3.0), 1e-13);
    EXPECT_NEAR(h_vector(model(ModelKind::driven_hexagonal, d, j2, phi), Kp).h3,
                d + 6.0 * j2 * std::cos(phi - 2.0 * pi / 3.0), 1e-13);
    EXPECT_NEAR(h_vector(model(ModelKind::haldane_reference, d, j2, phi), K).h3,
                d - 3.0 * std::numbers::sqrt3 * j2 * std::sin(phi), 1e-13);
  }
}

TEST(HVector, KindsAgreeAtQuarterTurn) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 50; ++t) {
    const Vec2 k = geom.momentum(u(rng), u(rng));
    for (double phi : {pi / 2.0, -pi / 2.0}) {
      const HVector a = h_vector(model(ModelKind::driven_hexagonal, 0.2, 0.3, phi), k);
      const HVector b = h_vector(model(ModelKind::haldane_reference, 0.2, 0.3, phi), k);
      EXPECT_NEAR(a.h3, b.h3, 1e-14);
      EXPECT_NEAR(b.h0, 0.0, 1e-14);
      EXPECT_NEAR(a.h1, b.h1, 1e-15);
    }
  }
}

TEST(Bands, EnergiesAreOrderedAndSymmetric) {
  const BlochModel m = model(ModelKind::haldane_reference, 0.1, 0.2, 0.6);
  const Vec2 k = geom.momentum(0.17, 0.41);
  const HVector h = h_vector(m, k);
  const auto [lo, hi] = band_energies(m, k);
  EXPECT_LT(lo, hi);
  EXPECT_NEAR((lo + hi) / 2.0, h.h0, 1e-14);
  EXPECT_NEAR(hi - lo, 2.0 * h.norm(), 1e-14);
}

TEST(Gap, GraphenePointIsGapless) {
  EXPECT_LT(min_gap(model(ModelKind::driven_hexagonal, 0.0, 0.0, 0.0), 48, 48).gap, 1e-12);
}

TEST(Gap, SemenoffMass) {
  EXPECT_NEAR(min_gap(model(ModelKind::driven_hexagonal, 0.25, 0.0, 0.0), 48, 48).gap, 0.5, 1e-9);
}

TEST(Gap, OffGridClosureIsFoundByRefinement) {
  // Closure at K (fraction 1/3) is off a 40-point grid.
  const double j2 = 0.2, phi = 0.5;
  const double delta = -6.0 * j2 * std::cos(phi + 2.0 * pi / 3.0);
  const BlochModel m = model(ModelKind::driven_hexagonal, delta, j2, phi);
  const GapMinimum g = min_gap(m, 40, 40);
  EXPECT_LT(g.gap, band_scan(m, 40, 40).min_gap / 10.0);
  EXPECT_LT(g.gap, 5e-3);
}

TEST(Gap, ScanRejectsTinyGrid) {
  EXPECT_THROW(band_scan(model(ModelKind::driven_hexagonal, 0, 0, 0), 2, 8), ConfigError);
}

TEST(Chern, QuarterTurnReference) {
  const ChernResult c = chern_number(model(ModelKind::driven_hexagonal, 0.0, 0.2, pi / 2.0), 48, 48);
  ASSERT_TRUE(c.determinate);
  EXPECT_EQ(c.chern, 1);
  EXPECT_EQ(chern_number(model(ModelKind::driven_hexagonal, 0.0, 0.2, -pi / 2.0), 48, 48).chern, -1);
  EXPECT_EQ(chern_number(model(ModelKind::haldane_reference, 0.0, 0.2, pi / 2.0), 48, 48).chern, 1);
}

TEST(Chern, TrivialWhenOffsetDominates) {
  const ChernResult c = chern_number(model(ModelKind::driven_hexagonal, 8.0 * 0.2, 0.2, pi / 2.0), 48, 48);
  ASSERT_TRUE(c.determinate);
  EXPECT_EQ(c.chern, 0);
}

TEST(Chern, MatchesValleyOracleAwayFromClosures) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> phi(-pi, pi), ratio(-8.0, 8.0);
  int checked = 0;
  for (int t = 0; t < 60; ++t) {
    const double p = phi(rng), r = ratio(rng), j2 = 0.2;
    for (ModelKind kind : {ModelKind::driven_hexagonal, ModelKind::haldane_reference}) {
      const BlochModel m = model(kind, r * j2, j2, p);
      const double gap = min_gap(m, 48, 48).gap;
      if (gap < 0.05) continue;
      const ChernResult c = chern_number(m, 48, 48);
      ASSERT_TRUE(c.determinate);
      EXPECT_EQ(c.chern, oracle_chern(kind, r * j2, j2, p)) << "phi=" << p << " ratio=" << r;
      ++checked;
    }
  }
  EXPECT_GT(checked, 60);
}

TEST(Chern, GridDoublingIsStable) {
  for (double p : {-2.0, -0.8, 0.5, 1.9}) {
    const BlochModel m = model(ModelKind::haldane_reference, 0.3, 0.25, p);
    EXPECT_EQ(chern_number(m, 48, 48).chern, chern_number(m, 96, 96).chern);
  }
}

TEST(Chern, BandsSumToZero) {
  for (double p : {-1.1, 0.4, 2.7}) {
    const BlochModel m = model(ModelKind::driven_hexagonal, 0.1, 0.2, p);
    const ChernResult lo = chern_number(m, 36, 36, Band::lower);
    const ChernResult hi = chern_number(m, 36, 36, Band::upper);
    EXPECT_EQ(lo.chern + hi.chern, 0);
    EXPECT_NEAR(lo.raw + hi.raw, 0.0, 1e-9);
  }
}

TEST(Chern, GaugeInvariantUnderRandomPhases) {
  const BlochModel m = model(ModelKind::driven_hexagonal, 0.0, 0.2, 1.2);
  const std::size_t n = 24;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ph(-pi, pi);
  const LatticeChern plain = lattice_chern(n, n, [&](std::size_t i, std::size_t j) {
    return band_spinor(h_vector(m, geom.momentum(double(i) / n, double(j) / n)), Band::lower);
  });
  const LatticeChern twisted = lattice_chern(n, n, [&](std::size_t i, std::size_t j) {
    return Spinor(std::polar(1.0, ph(rng)) *
                  band_spinor(h_vector(m, geom.momentum(double(i) / n, double(j) / n)), Band::lower));
  });
  EXPECT_NEAR(plain.raw, twisted.raw, 1e-10);
}

TEST(Chern, IndeterminateAtClosure) {
  const double j2 = 0.2, phi = 0.0;
  const double delta = -6.0 * j2 * std::cos(phi + 2.0 * pi / 3.0);
  const ChernResult c = chern_number(model(ModelKind::driven_hexagonal, delta, j2, phi), 48, 48);
  EXPECT_FALSE(c.determinate);
  EXPECT_EQ(c.reason, "gap closure");
}

TEST(Chern, RejectsSmallGridAndBadModel) {
  EXPECT_THROW(chern_number(model(ModelKind::driven_hexagonal, 0.0, 0.2, 1.0), 8, 48), ConfigError);
  BlochModel bad = model(ModelKind::driven_hexagonal, 0.0, 0.2, 1.0);
  bad.j1 = 0.0;
  EXPECT_THROW(chern_number(bad, 48, 48), ConfigError);
}

TEST(Diagram, SmallGridMatchesOracle) {
  DiagramSettings s;
  s.phis = linspace(-pi, pi, 9);
  s.ratios = linspace(-7.0, 7.0, 8);
  s.kgrid = 36;
  const ChernDiagram d = phase_diagram(ModelKind::haldane_reference, s);
  ASSERT_EQ(d.cells.size(), 72u);
  for (std::size_t i = 0; i < s.phis.size(); ++i) {
    for (std::size_t j = 0; j < s.ratios.size(); ++j) {
      const ChernResult& c = d.cell(i, j);
      if (!c.determinate) continue;
      EXPECT_EQ(c.chern, oracle_chern(ModelKind::haldane_reference, s.ratios[j] * 0.2, 0.2, s.phis[i]));
    }
  }
}

TEST(Diagram, RejectsEmptyAxes) {
  DiagramSettings s;
  s.phis.clear();
  EXPECT_THROW(phase_diagram(ModelKind::driven_hexagonal, s), ConfigError);
}

TEST(Linspace, Endpoints) {
  const auto v = linspace(-1.0, 1.0, 5);
  EXPECT_EQ(v.front(), -1.0);
  EXPECT_EQ(v.back(), 1.0);
  EXPECT_EQ(linspace(2.0, 3.0, 1), std::vector<double>{2.0});
}
