#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "bloch.hpp"
#include "chern.hpp"
#include "drive.hpp"
#include "effective.hpp"
#include "error.hpp"
#include "parallel.hpp"

namespace fcf {

using Mat2 = Eigen::Matrix2cd;

struct PropagatorSettings {
  std::size_t steps_per_period = 4096;
  /// Repeat each propagation at twice the steps and require entries to agree to 1e-8.
  bool richardson_check = false;
};

inline void validate(const PropagatorSettings& s) {
  const std::size_t n = s.steps_per_period;
  if (n < 256 || (n & (n - 1)) != 0) throw ConfigError("steps per period must be a power of two >= 256");
}

/// Exact time-dependent Bloch Hamiltonian of the driven lattice,
///   H(k, t) = [[delta, conj f], [f, -delta]],
///   f = e^{-i gauge} (g_{a3} + g_{a2} e^{i k.b1} + g_{a1} e^{-i k.b2}),
/// whose undriven limit has h1 + i h2 = j0 (1 + e^{i k.b1} + e^{-i k.b2}).
inline Mat2 bloch_hamiltonian_t(const DriveSpec& spec, const LatticeGeometry& geom, double j0, double delta,
                                const Vec2& k, double t, double gauge_phase = 0.0) {
  std::array<cplx, 3> g;
  for (std::size_t b = 0; b < 3; ++b) g[b] = std::polar(j0, chi(spec, geom, b, t));
  const cplx f = std::polar(1.0, -gauge_phase) *
                 (g[2] + g[1] * std::polar(1.0, k.dot(geom.nnn[0])) + g[0] * std::polar(1.0, -k.dot(geom.nnn[1])));
  Mat2 H;
  H << delta, std::conj(f), f, -delta;
  return H;
}

/// First-order effective Bloch Hamiltonian built from the full (possibly
/// anisotropic) rates in the same gauge as bloch_hamiltonian_t:
///   f0 = e^{-i gauge} (g0_3 + g0_2 e^{i k.b1} + g0_1 e^{-i k.b2}),
///   h3 = delta + Re tau0 + 2 Re sum_k tau_k e^{i k.b_k}.
inline HVector effective_h_vector(const EffectiveRates& r, double delta, const LatticeGeometry& geom, const Vec2& k) {
  const double k1 = k.dot(geom.nnn[0]);
  const double k2 = k.dot(geom.nnn[1]);
  const double k3 = k.dot(geom.nnn[2]);
  const cplx f = std::polar(1.0, -r.gauge_phase) *
                 (r.g0[2] + r.g0[1] * std::polar(1.0, k1) + r.g0[0] * std::polar(1.0, -k2));
  const cplx nnn = r.tau[0] * std::polar(1.0, k1) + r.tau[1] * std::polar(1.0, k2) + r.tau[2] * std::polar(1.0, k3);
  HVector h;
  h.h1 = f.real();
  h.h2 = f.imag();
  h.h3 = delta + r.delta_shift + 2.0 * nnn.real();
  return h;
}

inline Mat2 to_matrix(const HVector& h) {
  Mat2 H;
  H << h.h0 + h.h3, cplx(h.h1, -h.h2), cplx(h.h1, h.h2), h.h0 - h.h3;
  return H;
}

/// exp(-i (h0 + h.sigma) tau) in closed form.
inline Mat2 evolve(const HVector& h, double tau) {
  const double d = h.norm();
  const double c = std::cos(d * tau);
  const double s = (d > 0.0) ? std::sin(d * tau) / d : tau;
  Mat2 U;
  U << cplx(c, -s * h.h3), cplx(-s * h.h2, -s * h.h1), cplx(s * h.h2, -s * h.h1), cplx(c, s * h.h3);
  return U * std::polar(1.0, -h.h0 * tau);
}

inline double unitarity_defect(const Mat2& U) { return (U.adjoint() * U - Mat2::Identity()).cwiseAbs().maxCoeff(); }

/// One-period propagator U(T, 0; k) by the midpoint exponential rule. The
/// Peierls factors at the step midpoints are sampled once and shared by all k.
class FloquetPropagator {
 public:
  FloquetPropagator(const DriveSpec& spec, const LatticeGeometry& geom, double j0, double delta,
                    std::size_t steps, double gauge_phase = 0.0)
      : geom_(geom), delta_(delta), gauge_(std::polar(1.0, -gauge_phase)), period_(spec.period()), steps_(steps) {
    validate(spec);
    const double dt = period_ / double(steps);
    for (std::size_t b = 0; b < 3; ++b) {
      g_[b].resize(steps);
      for (std::size_t j = 0; j < steps; ++j) g_[b][j] = std::polar(j0, chi(spec, geom, b, (double(j) + 0.5) * dt));
    }
  }

  double period() const { return period_; }
  std::size_t steps() const { return steps_; }

  /// U(T, 0) = E_{S-1} ... E_1 E_0 with E_j = exp(-i H(t_j + dt/2) dt).
  Mat2 forward(const Vec2& k) const { return propagate(k, false); }
  /// Backward evolution from T to 0, E_0^+ E_1^+ ... E_{S-1}^+, the inverse of forward().
  Mat2 backward(const Vec2& k) const { return propagate(k, true); }

 private:
  Mat2 propagate(const Vec2& k, bool reverse) const {
    const cplx p1 = std::polar(1.0, k.dot(geom_.nnn[0]));
    const cplx p2 = std::polar(1.0, -k.dot(geom_.nnn[1]));
    const double dt = period_ / double(steps_);
    Mat2 U = Mat2::Identity();
    for (std::size_t s = 0; s < steps_; ++s) {
      const std::size_t j = reverse ? steps_ - 1 - s : s;
      const cplx f = gauge_ * (g_[2][j] + g_[1][j] * p1 + g_[0][j] * p2);
      const HVector h{0.0, f.real(), f.imag(), delta_};
      U = evolve(h, reverse ? -dt : dt) * U;
    }
    return U;
  }

  LatticeGeometry geom_;
  double delta_;
  cplx gauge_;
  double period_;
  std::size_t steps_;
  std::array<std::vector<cplx>, 3> g_;
};

struct PeriodPropagator {
  Mat2 U;
  double unitarity_defect = 0.0;
  double richardson_change = 0.0;  ///< max entry change at doubled steps (0 if unchecked)
};

inline PeriodPropagator period_propagator(const DriveSpec& spec, const LatticeGeometry& geom, double j0,
                                          double delta, const Vec2& k, const PropagatorSettings& settings = {},
                                          double gauge_phase = 0.0) {
  validate(settings);
  PeriodPropagator out;
  out.U = FloquetPropagator(spec, geom, j0, delta, settings.steps_per_period, gauge_phase).forward(k);
  out.unitarity_defect = unitarity_defect(out.U);
  if (settings.richardson_check) {
    const Mat2 fine = FloquetPropagator(spec, geom, j0, delta, 2 * settings.steps_per_period, gauge_phase).forward(k);
    out.richardson_change = (fine - out.U).cwiseAbs().maxCoeff();
    if (out.richardson_change > 1e-8) throw NumericalError("propagator not converged at the requested step count");
  }
  return out;
}

/// Quasienergy -arg(lambda) / T folded to (-w/2, w/2].
inline double fold_quasienergy(double eps, double omega) {
  double x = std::remainder(eps, omega);
  if (x <= -omega / 2.0) x += omega;
  return x;
}

struct FloquetEigen {
  std::array<double, 2> eps{};
  std::array<Spinor, 2> vec;
};

/// Folded quasienergies of U, sorted ascending, with eigenvectors.
inline FloquetEigen floquet_eigen(const Mat2& U, double period) {
  Eigen::ComplexEigenSolver<Mat2> es(U);
  const double omega = 2.0 * std::numbers::pi / period;
  FloquetEigen fe;
  for (int i = 0; i < 2; ++i) {
    fe.eps[std::size_t(i)] = fold_quasienergy(-std::arg(es.eigenvalues()(i)) / period, omega);
    fe.vec[std::size_t(i)] = es.eigenvectors().col(i).normalized();
  }
  if (fe.eps[0] > fe.eps[1]) {
    std::swap(fe.eps[0], fe.eps[1]);
    std::swap(fe.vec[0], fe.vec[1]);
  }
  return fe;
}

struct QuasienergyPoint {
  Vec2 k = Vec2::Zero();
  std::array<double, 2> exact{};      ///< paired with effective lower / upper
  std::array<double, 2> effective{};  ///< ascending
  double deviation = 0.0;
  bool ambiguous = false;
  double unitarity_defect = 0.0;
};

struct QuasienergyReport {
  std::size_t kgrid = 0;
  std::vector<QuasienergyPoint> points;
  double max_deviation = 0.0;
  double mean_deviation = 0.0;
  double max_unitarity_defect = 0.0;
  int ambiguous_points = 0;
  EffectiveRates rates;
};

/// Exact folded quasienergies against the eigenvalues of the truncated effective
/// Hamiltonian on a kgrid x kgrid torus grid. Branches are paired by eigenvector
/// overlap; pairs whose overlap sums differ by less than 1e-3 are flagged and
/// paired by energy order.
inline QuasienergyReport compare_effective(const DriveSpec& spec, const LatticeGeometry& geom, double j0, double delta,
                                           std::size_t kgrid, const PropagatorSettings& settings = {}) {
  validate(settings);
  if (kgrid < 1) throw ConfigError("k-grid must be nonempty");
  QuasienergyReport rep;
  rep.kgrid = kgrid;
  rep.rates = effective_rates(spec, geom, j0);
  const FloquetPropagator prop(spec, geom, j0, delta, settings.steps_per_period, rep.rates.gauge_phase);
  std::unique_ptr<FloquetPropagator> fine;
  if (settings.richardson_check) {
    fine = std::make_unique<FloquetPropagator>(spec, geom, j0, delta, 2 * settings.steps_per_period,
                                               rep.rates.gauge_phase);
  }
  const double omega = spec.omega;

  rep.points.resize(kgrid * kgrid);
  parallel_for(rep.points.size(), [&](std::size_t idx) {
    QuasienergyPoint& pt = rep.points[idx];
    pt.k = geom.momentum(double(idx / kgrid) / double(kgrid), double(idx % kgrid) / double(kgrid));
    const Mat2 U = prop.forward(pt.k);
    if (fine && (fine->forward(pt.k) - U).cwiseAbs().maxCoeff() > 1e-8) {
      throw NumericalError("propagator not converged at the requested step count");
    }
    pt.unitarity_defect = unitarity_defect(U);
    const FloquetEigen fe = floquet_eigen(U, prop.period());

    const HVector h = effective_h_vector(rep.rates, delta, geom, pt.k);
    const auto [lo, hi] = band_energies(h);
    pt.effective = {lo, hi};
    const std::array<Spinor, 2> w{band_spinor(h, Band::lower), band_spinor(h, Band::upper)};

    auto overlap = [&](std::size_t i, std::size_t j) { return std::norm(fe.vec[i].dot(w[j])); };
    const double direct = overlap(0, 0) + overlap(1, 1);
    const double swapped = overlap(0, 1) + overlap(1, 0);
    pt.ambiguous = std::abs(direct - swapped) / 2.0 < 1e-3;
    const bool swap = !pt.ambiguous && swapped > direct;
    pt.exact = swap ? std::array<double, 2>{fe.eps[1], fe.eps[0]} : fe.eps;
    for (std::size_t b = 0; b < 2; ++b) {
      pt.deviation = std::max(pt.deviation, std::abs(fold_quasienergy(pt.exact[b] - pt.effective[b], omega)));
    }
  });

  for (const auto& pt : rep.points) {
    rep.max_deviation = std::max(rep.max_deviation, pt.deviation);
    rep.mean_deviation += pt.deviation / double(rep.points.size());
    rep.max_unitarity_defect = std::max(rep.max_unitarity_defect, pt.unitarity_defect);
    rep.ambiguous_points += pt.ambiguous ? 1 : 0;
  }
  return rep;
}

/// Max deviation of compare_effective along a frequency ladder w -> s w at fixed
/// A/w and j0, with the fitted power law deviation ~ w^exponent.
struct OmegaLadder {
  std::vector<double> scales;
  std::vector<double> max_deviation;
  double exponent = 0.0;
};

inline OmegaLadder omega_ladder(const DriveSpec& spec, const LatticeGeometry& geom, double j0, double delta,
                                std::size_t kgrid, const std::vector<double>& scales,
                                const PropagatorSettings& settings = {}) {
  if (scales.size() < 2) throw ConfigError("frequency ladder needs at least two rungs");
  OmegaLadder out;
  out.scales = scales;
  for (double s : scales) {
    out.max_deviation.push_back(compare_effective(scale_frequency(spec, s), geom, j0, delta, kgrid, settings).max_deviation);
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = double(scales.size());
  for (std::size_t i = 0; i < scales.size(); ++i) {
    const double x = std::log(scales[i]), y = std::log(out.max_deviation[i]);
    sx += x, sy += y, sxx += x * x, sxy += x * y;
  }
  out.exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return out;
}

/// Chern number of the lower folded Floquet band on a grid x grid torus.
/// Indeterminate when the folded quasienergy separation drops below
/// threshold * j0 anywhere on the grid.
inline ChernResult floquet_chern(const DriveSpec& spec, const LatticeGeometry& geom, double j0, double delta,
                                 std::size_t grid, const PropagatorSettings& settings = {},
                                 double threshold = kDefaultClosureThreshold) {
  validate(settings);
  if (grid < 12) throw ConfigError("Chern grid must be at least 12x12");
  const FloquetPropagator prop(spec, geom, j0, delta, settings.steps_per_period);
  std::vector<FloquetEigen> eig(grid * grid);
  parallel_for(eig.size(), [&](std::size_t idx) {
    const Vec2 k = geom.momentum(double(idx / grid) / double(grid), double(idx % grid) / double(grid));
    eig[idx] = floquet_eigen(prop.forward(k), prop.period());
  });

  ChernResult r;
  r.min_gap = std::numeric_limits<double>::infinity();
  for (const auto& e : eig) {
    const double sep = std::abs(e.eps[1] - e.eps[0]);
    r.min_gap = std::min(r.min_gap, std::min(sep, spec.omega - sep));
  }
  if (r.min_gap < threshold * j0) {
    r.reason = "folded quasienergy gap closure";
    return r;
  }
  const LatticeChern lc = lattice_chern(grid, grid, [&](std::size_t i, std::size_t j) { return eig[i * grid + j].vec[0]; });
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

/// ||U(T)^m - exp(-i H_dh m T)||_2 for m = 1..m_max at one momentum.
inline std::vector<double> stroboscopic_deviation(const DriveSpec& spec, const LatticeGeometry& geom, double j0,
                                                  double delta, const Vec2& k, int m_max,
                                                  const PropagatorSettings& settings = {}) {
  validate(settings);
  const EffectiveRates rates = effective_rates(spec, geom, j0);
  const FloquetPropagator prop(spec, geom, j0, delta, settings.steps_per_period, rates.gauge_phase);
  const Mat2 U = prop.forward(k);
  const Mat2 Ueff = evolve(effective_h_vector(rates, delta, geom, k), prop.period());
  std::vector<double> out;
  Mat2 A = Mat2::Identity(), B = Mat2::Identity();
  for (int m = 1; m <= m_max; ++m) {
    A = U * A;
    B = Ueff * B;
    out.push_back(Eigen::JacobiSVD<Mat2>(A - B).singularValues()(0));
  }
  return out;
}

}  // namespace fcf
