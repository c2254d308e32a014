#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "error.hpp"
#include "geometry.hpp"

namespace fcf {

enum class DriveFamily { plus, minus, custom };

/// One frequency component of the force, m * omega, with independent
/// amplitude and phase on each drive axis.
struct Harmonic {
  int m = 1;
  double amp_x = 0.0;
  double amp_y = 0.0;
  double phase_x = 0.0;
  double phase_y = 0.0;
};

/// Time-periodic force F(t) = sum_n [amp_x cos(m w t - phase_x) e1 + amp_y cos(m w t - phase_y) e2].
/// Amplitudes are absolute forces (energy / length, hbar = 1).
struct DriveSpec {
  DriveFamily family = DriveFamily::custom;
  double omega = 1.0;
  std::vector<Harmonic> harmonics;

  double period() const { return 2.0 * std::numbers::pi / omega; }
};

/// Projection of the force on one bond for one harmonic:
/// F(t).a_k contribution = amplitude * cos(m w t - phase).
struct BondTerm {
  int m = 1;
  double amplitude = 0.0;
  double phase = 0.0;
};

/// Harmonic integers of the F+/F- families: 1, 2, 4, 5, 7, 8, ...
inline int family_harmonic(int n) {
  const int sign = (n % 2 == 0) ? 1 : -1;
  return (6 * n - sign - 3) / 4;
}

inline void validate(const DriveSpec& spec) {
  if (!(spec.omega > 0.0) || !std::isfinite(spec.omega)) {
    throw ConfigError("drive frequency must be positive and finite");
  }
  for (const auto& h : spec.harmonics) {
    if (h.m < 1) throw ConfigError("harmonic integer must be >= 1");
    if (!std::isfinite(h.amp_x) || !std::isfinite(h.amp_y) || !std::isfinite(h.phase_x) ||
        !std::isfinite(h.phase_y)) {
      throw ConfigError("harmonic amplitudes and phases must be finite");
    }
  }
}

/// F+ (sign = plus) or F- (sign = minus) drive with N harmonics.
/// amps are absolute force amplitudes; phases are delta_1..delta_N with delta_1 = 0.
inline DriveSpec build_family_drive(DriveFamily sign, double omega, std::span<const double> amps,
                                    std::span<const double> phases) {
  if (sign == DriveFamily::custom) throw ConfigError("family drive needs sign plus or minus");
  if (amps.size() != phases.size()) throw ConfigError("amplitude and phase lists differ in length");
  if (amps.empty()) throw ConfigError("family drive needs at least one harmonic");
  if (phases[0] != 0.0) throw ConfigError("first harmonic phase must be zero");

  DriveSpec spec;
  spec.family = sign;
  spec.omega = omega;
  const double branch = (sign == DriveFamily::plus) ? 1.0 : -1.0;
  for (std::size_t i = 0; i < amps.size(); ++i) {
    const int n = static_cast<int>(i) + 1;
    const double alternating = (n % 2 == 0) ? 1.0 : -1.0;
    Harmonic h;
    h.m = family_harmonic(n);
    h.amp_x = amps[i];
    h.amp_y = amps[i];
    h.phase_x = phases[i];
    h.phase_y = phases[i] + branch * alternating * std::numbers::pi / 2.0;
    spec.harmonics.push_back(h);
  }
  validate(spec);
  return spec;
}

/// Same drive at frequency s * omega with every amplitude scaled by s (fixed A / omega).
inline DriveSpec scale_frequency(DriveSpec spec, double s) {
  spec.omega *= s;
  for (auto& h : spec.harmonics) {
    h.amp_x *= s;
    h.amp_y *= s;
  }
  return spec;
}

inline Vec2 force_at(const DriveSpec& spec, const LatticeGeometry& geom, double t) {
  Vec2 f = Vec2::Zero();
  for (const auto& h : spec.harmonics) {
    const double arg = h.m * spec.omega * t;
    f += h.amp_x * std::cos(arg - h.phase_x) * geom.e1 + h.amp_y * std::cos(arg - h.phase_y) * geom.e2;
  }
  return f;
}

inline void check_bond(std::size_t bond) {
  if (bond >= 3) throw std::out_of_range("bond index must be 0, 1 or 2");
}

/// F(t).a_k written as a sum of single cosines, one per harmonic.
inline std::vector<BondTerm> bond_terms(const DriveSpec& spec, const LatticeGeometry& geom,
                                        std::size_t bond) {
  check_bond(bond);
  const Vec2& a = geom.nn[bond];
  const double px = geom.e1.dot(a);
  const double py = geom.e2.dot(a);
  std::vector<BondTerm> terms;
  terms.reserve(spec.harmonics.size());
  for (const auto& h : spec.harmonics) {
    // Re(P e^{i m w t}) with P = amp_x px e^{-i phase_x} + amp_y py e^{-i phase_y}.
    const std::complex<double> P =
        h.amp_x * px * std::polar(1.0, -h.phase_x) + h.amp_y * py * std::polar(1.0, -h.phase_y);
    terms.push_back({h.m, std::abs(P), -std::arg(P)});
  }
  return terms;
}

/// Peierls phase of bond k with its period average removed:
/// chi_k(t) = sum_n C_n / (m_n w) sin(m_n w t - theta_n).
inline double chi(const DriveSpec& spec, const LatticeGeometry& geom, std::size_t bond, double t) {
  double value = 0.0;
  for (const auto& term : bond_terms(spec, geom, bond)) {
    const double w = term.m * spec.omega;
    value += term.amplitude / w * std::sin(w * t - term.phase);
  }
  return value;
}

/// Upper bound of |chi_k| over a period, sum_n C_n / (m_n w).
inline double modulation_index(const DriveSpec& spec, const LatticeGeometry& geom, std::size_t bond) {
  double z = 0.0;
  for (const auto& term : bond_terms(spec, geom, bond)) z += term.amplitude / (term.m * spec.omega);
  return z;
}

inline double max_modulation_index(const DriveSpec& spec, const LatticeGeometry& geom) {
  double z = 0.0;
  for (std::size_t k = 0; k < 3; ++k) z = std::max(z, modulation_index(spec, geom, k));
  return z;
}

/// Spectral half-width of e^{i chi_k}, max_k sum_n C_n / w: harmonic m with index z
/// spreads weight to orders m z, so this exceeds the modulation index once m > 1.
inline double spectral_bandwidth(const DriveSpec& spec, const LatticeGeometry& geom) {
  double z = 0.0;
  for (std::size_t k = 0; k < 3; ++k) {
    double s = 0.0;
    for (const auto& term : bond_terms(spec, geom, k)) s += term.amplitude / spec.omega;
    z = std::max(z, s);
  }
  return z;
}

inline int max_harmonic(const DriveSpec& spec) {
  int m = 0;
  for (const auto& h : spec.harmonics) m = std::max(m, h.m);
  return m;
}

}  // namespace fcf
