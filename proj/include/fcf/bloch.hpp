#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <utility>
#include <vector>

#include "effective.hpp"
#include "error.hpp"
#include "geometry.hpp"

namespace fcf {

enum class ModelKind { driven_hexagonal, haldane_reference };

/// Isotropic two-band Bloch model. delta is the effective offset (bare offset
/// plus the drive-induced shift) for the driven kind.
struct BlochModel {
  ModelKind kind = ModelKind::driven_hexagonal;
  double delta = 0.0;
  double j1 = 1.0;
  double j2 = 0.0;
  double phi = 0.0;
  LatticeGeometry geom = build_geometry();
};

inline void validate(const BlochModel& m) {
  if (!(m.j1 > 0.0)) throw ConfigError("NN amplitude j1 must be positive");
  if (!(m.j2 >= 0.0)) throw ConfigError("NNN amplitude j2 must be non-negative");
}

/// Driven model built from effective rates with bare offset delta.
inline BlochModel driven_model(const EffectiveRates& r, double delta, const LatticeGeometry& geom) {
  BlochModel m;
  m.kind = ModelKind::driven_hexagonal;
  m.delta = delta + r.delta_shift;
  m.j1 = r.j1;
  m.j2 = r.j2;
  m.phi = r.phi_defined ? r.phi : 0.0;
  m.geom = geom;
  return m;
}

/// H(k) = h0 1 + h1 sx + h2 sy + h3 sz.
struct HVector {
  double h0 = 0.0;
  double h1 = 0.0;
  double h2 = 0.0;
  double h3 = 0.0;

  double norm() const { return std::sqrt(h1 * h1 + h2 * h2 + h3 * h3); }
};

inline HVector h_vector(const BlochModel& m, const Vec2& k) {
  const double k1 = k.dot(m.geom.nnn[0]);
  const double k2 = k.dot(m.geom.nnn[1]);
  const double k3 = k.dot(m.geom.nnn[2]);
  HVector h;
  h.h1 = m.j1 * (1.0 + std::cos(k1) + std::cos(k2));
  h.h2 = m.j1 * (std::sin(k1) - std::sin(k2));
  h.h3 = m.delta + 2.0 * m.j2 * (std::cos(k1 + m.phi) + std::cos(k2 + m.phi) + std::cos(k3 + m.phi));
  if (m.kind == ModelKind::haldane_reference) {
    h.h0 = 2.0 * m.j2 * std::cos(m.phi) * (std::cos(k1) + std::cos(k2) + std::cos(k3));
    h.h3 -= h.h0;
  }
  return h;
}

inline std::pair<double, double> band_energies(const HVector& h) {
  const double d = h.norm();
  return {h.h0 - d, h.h0 + d};
}

inline std::pair<double, double> band_energies(const BlochModel& m, const Vec2& k) {
  return band_energies(h_vector(m, k));
}

/// Direct gap eps+ - eps- at k.
inline double direct_gap(const BlochModel& m, const Vec2& k) { return 2.0 * h_vector(m, k).norm(); }

/// Band energies on the torus grid k = (i/n1) G1 + (j/n2) G2, row-major in i.
struct BandScan {
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  std::vector<double> lower;
  std::vector<double> upper;
  double min_gap = std::numeric_limits<double>::infinity();
  std::size_t argmin_i = 0;
  std::size_t argmin_j = 0;

  double gap(std::size_t i, std::size_t j) const { return upper[i * n2 + j] - lower[i * n2 + j]; }
};

inline BandScan band_scan(const BlochModel& m, std::size_t n1, std::size_t n2) {
  if (n1 < 3 || n2 < 3) throw ConfigError("band scan needs at least 3x3 k-points");
  BandScan s;
  s.n1 = n1;
  s.n2 = n2;
  s.lower.resize(n1 * n2);
  s.upper.resize(n1 * n2);
  for (std::size_t i = 0; i < n1; ++i) {
    for (std::size_t j = 0; j < n2; ++j) {
      const Vec2 k = m.geom.momentum(double(i) / double(n1), double(j) / double(n2));
      const auto [lo, hi] = band_energies(m, k);
      s.lower[i * n2 + j] = lo;
      s.upper[i * n2 + j] = hi;
      if (hi - lo < s.min_gap) {
        s.min_gap = hi - lo;
        s.argmin_i = i;
        s.argmin_j = j;
      }
    }
  }
  return s;
}

struct GapMinimum {
  double gap = 0.0;
  Vec2 k = Vec2::Zero();
  double u = 0.0;  ///< fractional coordinate along G1
  double v = 0.0;  ///< fractional coordinate along G2
};

/// Refines a gap minimum on successively finer local grids: each level scans
/// +-1 cell of the current spacing at spacing / 8.
inline GapMinimum refine_gap(const BlochModel& m, double u, double v, double du, double dv, int levels = 2) {
  GapMinimum best{direct_gap(m, m.geom.momentum(u, v)), m.geom.momentum(u, v), u, v};
  for (int level = 0; level < levels; ++level) {
    du /= 8.0;
    dv /= 8.0;
    const double cu = best.u;
    const double cv = best.v;
    for (int a = -8; a <= 8; ++a) {
      for (int b = -8; b <= 8; ++b) {
        const double uu = cu + a * du;
        const double vv = cv + b * dv;
        const Vec2 k = m.geom.momentum(uu, vv);
        const double g = direct_gap(m, k);
        if (g < best.gap) best = {g, k, uu, vv};
      }
    }
  }
  return best;
}

/// Minimum direct gap over the Brillouin zone: coarse n1 x n2 scan followed by
/// two refinement levels (factor 8 each) around the coarse minimum.
inline GapMinimum min_gap(const BlochModel& m, std::size_t n1, std::size_t n2) {
  const BandScan s = band_scan(m, n1, n2);
  return refine_gap(m, double(s.argmin_i) / double(n1), double(s.argmin_j) / double(n2), 1.0 / double(n1),
                    1.0 / double(n2));
}

}  // namespace fcf
