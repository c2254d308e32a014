#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bloch.hpp"
#include "error.hpp"
#include "parallel.hpp"

namespace fcf {

using Spinor = Eigen::Vector2cd;

/// Orientation of the (G1, G2) torus relative to the reported Chern sign.
/// Fixed so that the driven model at phi = pi/2, delta = 0 has C = +1.
inline constexpr double kChernOrientation = -1.0;

/// Plaquette fluxes closer than this to +-pi are treated as ambiguous.
inline constexpr double kAmbiguousFlux = 0.9 * std::numbers::pi;

struct LatticeChern {
  double raw = 0.0;       ///< sum of plaquette fluxes / 2 pi, oriented
  int chern = 0;          ///< raw rounded to the nearest integer
  double max_flux = 0.0;  ///< largest |plaquette flux|
};

/// Field-strength (link-phase) Chern number of one band on an n1 x n2 torus.
/// state(i, j) returns the normalized band eigenvector at k = (i/n1) G1 + (j/n2) G2;
/// it is evaluated once per grid point. The result is gauge invariant.
template <class StateFn>
LatticeChern lattice_chern(std::size_t n1, std::size_t n2, StateFn&& state) {
  std::vector<Spinor> u(n1 * n2);
  for (std::size_t i = 0; i < n1; ++i) {
    for (std::size_t j = 0; j < n2; ++j) u[i * n2 + j] = state(i, j);
  }
  auto at = [&](std::size_t i, std::size_t j) -> const Spinor& { return u[(i % n1) * n2 + (j % n2)]; };

  LatticeChern out;
  double total = 0.0;
  for (std::size_t i = 0; i < n1; ++i) {
    for (std::size_t j = 0; j < n2; ++j) {
      const Spinor& a = at(i, j);
      const Spinor& b = at(i + 1, j);
      const Spinor& c = at(i + 1, j + 1);
      const Spinor& d = at(i, j + 1);
      const std::complex<double> loop = a.dot(b) * b.dot(c) * c.dot(d) * d.dot(a);
      const double flux = std::arg(loop);
      total += flux;
      out.max_flux = std::max(out.max_flux, std::abs(flux));
    }
  }
  out.raw = kChernOrientation * total / (2.0 * std::numbers::pi);
  out.chern = static_cast<int>(std::lround(out.raw));
  return out;
}

enum class Band { lower, upper };

/// Normalized eigenvector of h . sigma for the requested band, using the
/// better-conditioned of the two analytic forms.
inline Spinor band_spinor(const HVector& h, Band band) {
  const double d = h.norm();
  const std::complex<double> hp(h.h1, h.h2);  // h1 + i h2
  Spinor v;
  if (band == Band::lower) {
    if (h.h3 >= 0.0) {
      v << std::conj(hp), -(h.h3 + d);
    } else {
      v << d - h.h3, -hp;
    }
  } else {
    if (h.h3 >= 0.0) {
      v << h.h3 + d, hp;
    } else {
      v << std::conj(hp), d - h.h3;
    }
  }
  const double n = v.norm();
  if (n == 0.0) return Spinor(1.0, 0.0);
  return v / n;
}

inline constexpr double kDefaultClosureThreshold = 1e-6;

struct ChernResult {
  int chern = 0;
  double raw = 0.0;
  double min_gap = 0.0;
  double max_flux = 0.0;
  bool determinate = false;
  std::string reason;
};

/// Chern number of one band of a Bloch model on an n1 x n2 torus grid.
/// Indeterminate when the refined direct gap is below threshold * j1 or a
/// plaquette flux is close to the +-pi branch cut.
inline ChernResult chern_number(const BlochModel& m, std::size_t n1, std::size_t n2, Band band = Band::lower,
                                double threshold = kDefaultClosureThreshold) {
  validate(m);
  if (n1 < 12 || n2 < 12) throw ConfigError("Chern grid must be at least 12x12");
  ChernResult r;
  r.min_gap = min_gap(m, n1, n2).gap;
  if (r.min_gap < threshold * m.j1) {
    r.reason = "gap closure";
    return r;
  }
  const LatticeChern lc = lattice_chern(n1, n2, [&](std::size_t i, std::size_t j) {
    return band_spinor(h_vector(m, m.geom.momentum(double(i) / double(n1), double(j) / double(n2))), band);
  });
  r.raw = lc.raw;
  r.chern = lc.chern;
  r.max_flux = lc.max_flux;
  if (lc.max_flux > kAmbiguousFlux) {
    r.reason = "plaquette flux near branch cut";
    return r;
  }
  if (std::abs(lc.raw - lc.chern) > 1e-6) {
    r.reason = "non-integer lattice sum";
    return r;
  }
  r.determinate = true;
  return r;
}

/// Evenly spaced values; count == 1 yields {lo}.
inline std::vector<double> linspace(double lo, double hi, std::size_t count) {
  std::vector<double> v(count);
  for (std::size_t i = 0; i < count; ++i) {
    v[i] = (count == 1) ? lo : lo + (hi - lo) * double(i) / double(count - 1);
  }
  return v;
}

/// Chern number of the lowest band over a (phi, delta/j2) grid.
struct ChernDiagram {
  ModelKind kind = ModelKind::driven_hexagonal;
  std::vector<double> phis;
  std::vector<double> ratios;
  std::size_t kgrid = 0;
  double j2_over_j1 = 0.0;
  std::vector<ChernResult> cells;  ///< row-major in phi

  const ChernResult& cell(std::size_t ip, std::size_t ir) const { return cells[ip * ratios.size() + ir]; }
};

struct DiagramSettings {
  std::vector<double> phis = linspace(-std::numbers::pi, std::numbers::pi, 97);
  std::vector<double> ratios = linspace(-8.0, 8.0, 97);
  std::size_t kgrid = 48;
  /// NNN strength used for the scan; the topology depends only on (phi, delta/j2).
  double j2_over_j1 = 0.2;
  double threshold = kDefaultClosureThreshold;
};

inline ChernDiagram phase_diagram(ModelKind kind, const DiagramSettings& settings,
                                  const LatticeGeometry& geom = build_geometry()) {
  if (settings.phis.empty() || settings.ratios.empty()) throw ConfigError("diagram axes must be nonempty");
  if (!(settings.j2_over_j1 > 0.0)) throw ConfigError("diagram j2/j1 must be positive");
  ChernDiagram d;
  d.kind = kind;
  d.phis = settings.phis;
  d.ratios = settings.ratios;
  d.kgrid = settings.kgrid;
  d.j2_over_j1 = settings.j2_over_j1;
  d.cells.resize(d.phis.size() * d.ratios.size());
  parallel_for(d.cells.size(), [&](std::size_t idx) {
    BlochModel m;
    m.kind = kind;
    m.geom = geom;
    m.j1 = 1.0;
    m.j2 = settings.j2_over_j1;
    m.phi = d.phis[idx / d.ratios.size()];
    m.delta = d.ratios[idx % d.ratios.size()] * m.j2;
    d.cells[idx] = chern_number(m, settings.kgrid, settings.kgrid, Band::lower, settings.threshold);
  });
  return d;
}

}  // namespace fcf
