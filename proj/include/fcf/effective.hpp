#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>

#include "error.hpp"
#include "fourier.hpp"

namespace fcf {

/// First-order commutator kernel
///   w(a, b) = sum_{n=1}^{n_max} (ga[-n] gb[n] - gb[-n] ga[n]) / (n omega)
/// for Fourier arrays indexed n + n_max. Swapping the arguments negates
/// every term exactly, so w(a, b) == -w(b, a) bit for bit.
inline cplx w_commutator(std::span<const cplx> ga, std::span<const cplx> gb, double omega, int n_max) {
  const auto extent = static_cast<std::size_t>(2 * n_max + 1);
  if (n_max < 0 || ga.size() != extent || gb.size() != extent) {
    throw ConfigError("Fourier arrays must span [-n_max, n_max]");
  }
  cplx sum{0.0, 0.0};
  for (int n = 1; n <= n_max; ++n) {
    const auto plus = static_cast<std::size_t>(n_max + n);
    const auto minus = static_cast<std::size_t>(n_max - n);
    sum += (ga[minus] * gb[plus] - gb[minus] * ga[plus]) / (n * omega);
  }
  return sum;
}

/// On-site rate tau0 and the three NNN rates tau_1..tau_3.
struct NnnRates {
  cplx tau0{};
  std::array<cplx, 3> tau{};
};

inline NnnRates nnn_rates(const TunnelingSpectrum& s) {
  const std::array<std::vector<cplx>, 3> neg{s.reflected(0), s.reflected(1), s.reflected(2)};
  auto w = [&](std::span<const cplx> x, std::span<const cplx> y) { return w_commutator(x, y, s.omega, s.n_max); };
  NnnRates r;
  for (std::size_t i = 0; i < 3; ++i) r.tau0 += w(s.g[i], neg[i]);
  r.tau[0] = w(s.g[1], neg[2]);
  r.tau[1] = w(s.g[2], neg[0]);
  r.tau[2] = w(s.g[0], neg[1]);
  return r;
}

inline double wrap_angle(double x) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  x = std::remainder(x, two_pi);  // [-pi, pi]
  if (x <= -std::numbers::pi) x += two_pi;
  return x;
}

/// Effective-Hamiltonian parameters of a driven hexagonal lattice.
///
/// NN phases are removed by a sublattice gauge transformation (B -> e^{-i gauge_phase} B),
/// which leaves the diagonal NNN terms untouched. The on-site term of the
/// first-order correction is tau0 sigma_z, so the offset entering h3 is
/// delta_eff = delta + delta_shift with delta_shift = Re tau0.
struct EffectiveRates {
  double j0 = 1.0;
  double omega = 1.0;
  std::array<cplx, 3> g0{};
  cplx tau0{};
  std::array<cplx, 3> tau{};

  double j1 = 0.0;
  double j2 = 0.0;
  double phi = 0.0;
  bool phi_defined = false;
  double gauge_phase = 0.0;
  double delta_shift = 0.0;

  bool isotropic_nn = false;
  bool isotropic_nnn = false;
  double nn_magnitude_spread = 0.0;  ///< max_ij ||g0_i| - |g0_j||
  double nn_residual = 0.0;          ///< max_ij |g0_i - g0_j|
  double nnn_residual = 0.0;         ///< max_ij |tau_i - tau_j|
  double tau0_imag = 0.0;            ///< |Im tau0|, zero up to rounding
};

inline constexpr double kDefaultIsoTol = 1e-8;

/// Assembles EffectiveRates from a spectrum. iso_tol is relative: NN residuals are
/// compared with iso_tol * j0, NNN residuals with iso_tol * j0^2 / omega.
/// Anisotropy is reported through the flags, never thrown.
inline EffectiveRates derive_rates(const TunnelingSpectrum& s, double iso_tol = kDefaultIsoTol) {
  if (!(iso_tol > 0.0)) throw ConfigError("isotropy tolerance must be positive");
  EffectiveRates r;
  r.j0 = s.j0;
  r.omega = s.omega;
  for (std::size_t k = 0; k < 3; ++k) r.g0[k] = s.at(k, 0);
  const NnnRates nnn = nnn_rates(s);
  r.tau0 = nnn.tau0;
  r.tau = nnn.tau;

  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = i + 1; j < 3; ++j) {
      r.nn_magnitude_spread = std::max(r.nn_magnitude_spread, std::abs(std::abs(r.g0[i]) - std::abs(r.g0[j])));
      r.nn_residual = std::max(r.nn_residual, std::abs(r.g0[i] - r.g0[j]));
      r.nnn_residual = std::max(r.nnn_residual, std::abs(r.tau[i] - r.tau[j]));
    }
  }
  const double nnn_scale = s.j0 * s.j0 / s.omega;
  r.isotropic_nn = r.nn_residual <= iso_tol * s.j0;
  r.isotropic_nnn = r.nnn_residual <= iso_tol * nnn_scale;

  const cplx g_mean = (r.g0[0] + r.g0[1] + r.g0[2]) / 3.0;
  r.j1 = std::abs(g_mean);
  r.gauge_phase = (r.j1 > 0.0) ? std::arg(g_mean) : 0.0;

  r.j2 = std::abs(r.tau[0]);
  r.phi_defined = r.j2 >= 1e-14 * s.j0;
  r.phi = r.phi_defined ? wrap_angle(std::arg(r.tau[0])) : 0.0;

  r.delta_shift = r.tau0.real();
  r.tau0_imag = std::abs(r.tau0.imag());
  return r;
}

inline EffectiveRates effective_rates(const DriveSpec& spec, const LatticeGeometry& geom, double j0,
                                      double iso_tol = kDefaultIsoTol) {
  return derive_rates(fourier_components(spec, geom, j0), iso_tol);
}

}  // namespace fcf
