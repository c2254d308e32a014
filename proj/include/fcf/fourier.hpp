#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <vector>

#include <fftw3.h>

#include "drive.hpp"
#include "error.hpp"
#include "geometry.hpp"

namespace fcf {

using cplx = std::complex<double>;

namespace detail {

/// Cached forward FFTW plan for one transform length. Plans are created
/// under a lock; executing a plan on caller-owned buffers is thread safe.
class FftPlan {
 public:
  explicit FftPlan(std::size_t n) : n_(n) {
    std::vector<cplx> in(n), out(n);
    plan_ = fftw_plan_dft_1d(static_cast<int>(n), reinterpret_cast<fftw_complex*>(in.data()),
                             reinterpret_cast<fftw_complex*>(out.data()), FFTW_FORWARD,
                             FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (plan_ == nullptr) throw NumericalError("FFTW plan creation failed");
  }
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;
  ~FftPlan() { fftw_destroy_plan(plan_); }

  void forward(std::span<const cplx> in, std::span<cplx> out) const {
    fftw_execute_dft(plan_, reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in.data())),
                     reinterpret_cast<fftw_complex*>(out.data()));
  }
  std::size_t size() const { return n_; }

 private:
  std::size_t n_;
  fftw_plan plan_;
};

inline std::mutex& fftw_mutex() {
  static std::mutex m;
  return m;
}

inline const FftPlan& fft_plan(std::size_t n) {
  static std::map<std::size_t, std::unique_ptr<FftPlan>> cache;
  std::lock_guard lock(fftw_mutex());
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<FftPlan>(n);
  return *slot;
}

/// e^{2 pi i r / n} for r in [0, n).
inline const std::vector<cplx>& unit_roots(std::size_t n) {
  thread_local std::map<std::size_t, std::vector<cplx>> cache;
  auto& roots = cache[n];
  if (roots.empty()) {
    roots.resize(n);
    for (std::size_t r = 0; r < n; ++r) {
      roots[r] = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(n));
    }
  }
  return roots;
}

inline std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace detail

/// Fourier components g[k][n], n in [-n_max, n_max], of the Peierls-phased
/// tunneling rates g_{a_k}(t) = j0 exp(i chi_k(t)).
struct TunnelingSpectrum {
  double j0 = 1.0;
  double omega = 1.0;
  int n_max = 0;
  std::size_t samples = 0;
  /// Largest spectral weight outside [-n_max, n_max] over the three bonds.
  double tail_weight = 0.0;
  std::array<std::vector<cplx>, 3> g;

  cplx at(std::size_t bond, int n) const { return g[bond][static_cast<std::size_t>(n + n_max)]; }

  /// Components of g_{-a_k}(t) = conj(g_{a_k}(t)): conj(g[k][-n]).
  std::vector<cplx> reflected(std::size_t bond) const {
    const auto& src = g[bond];
    std::vector<cplx> out(src.size());
    for (std::size_t i = 0; i < src.size(); ++i) out[i] = std::conj(src[src.size() - 1 - i]);
    return out;
  }
};

inline int default_n_max(const DriveSpec& spec, const LatticeGeometry& geom) {
  return static_cast<int>(std::ceil(spectral_bandwidth(spec, geom))) + 20;
}

/// Uniform sample count for the DFT: a power of two at least
/// 64 * (largest harmonic + ceil(modulation index)), and large enough to hold n_max.
inline std::size_t default_sample_count(const DriveSpec& spec, const LatticeGeometry& geom, int n_max) {
  const auto z = static_cast<std::size_t>(std::ceil(max_modulation_index(spec, geom)));
  const std::size_t need = 64 * (static_cast<std::size_t>(max_harmonic(spec)) + z);
  const std::size_t hold = 4 * (static_cast<std::size_t>(n_max) + 1);
  return detail::next_pow2(std::max({need, hold, std::size_t{64}}));
}

/// Fills out[j] = chi_k(j T / M) for the given bond.
inline void sample_chi(const DriveSpec& spec, const LatticeGeometry& geom, std::size_t bond,
                       std::span<double> out) {
  const std::size_t M = out.size();
  const auto& roots = detail::unit_roots(M);
  std::fill(out.begin(), out.end(), 0.0);
  for (const auto& term : bond_terms(spec, geom, bond)) {
    if (term.amplitude == 0.0) continue;
    const double scale = term.amplitude / (term.m * spec.omega);
    const double c = std::cos(term.phase);
    const double s = std::sin(term.phase);
    const auto step = static_cast<std::size_t>(term.m) % M;
    std::size_t r = 0;
    for (std::size_t j = 0; j < M; ++j) {
      // sin(2 pi m j / M - theta)
      out[j] += scale * (roots[r].imag() * c - roots[r].real() * s);
      r += step;
      if (r >= M) r -= M;
    }
  }
}

/// g[k][n] = (1/T) int_0^T j0 e^{i chi_k(t)} e^{-i n w t} dt by uniform DFT.
/// Throws NumericalError when more than 1e-8 j0^2 of spectral weight lies beyond n_max.
/// n_max <= 0 selects the default truncation; samples == 0 selects the default grid.
inline TunnelingSpectrum fourier_components(const DriveSpec& spec, const LatticeGeometry& geom, double j0,
                                            int n_max = 0, std::size_t samples = 0) {
  validate(spec);
  if (!(j0 > 0.0) || !std::isfinite(j0)) throw ConfigError("bare tunneling j0 must be positive");
  if (n_max <= 0) n_max = default_n_max(spec, geom);
  if (samples == 0) samples = default_sample_count(spec, geom, n_max);
  if (samples < static_cast<std::size_t>(2 * n_max + 1)) {
    throw ConfigError("sample count too small for the requested truncation");
  }

  TunnelingSpectrum out;
  out.j0 = j0;
  out.omega = spec.omega;
  out.n_max = n_max;
  out.samples = samples;

  const auto& plan = detail::fft_plan(samples);
  std::vector<double> phase(samples);
  std::vector<cplx> signal(samples), coeff(samples);
  const double norm = j0 / static_cast<double>(samples);
  const auto M = static_cast<std::ptrdiff_t>(samples);

  for (std::size_t k = 0; k < 3; ++k) {
    sample_chi(spec, geom, k, phase);
    for (std::size_t j = 0; j < samples; ++j) signal[j] = std::polar(1.0, phase[j]);
    plan.forward(signal, coeff);

    auto& g = out.g[k];
    g.resize(static_cast<std::size_t>(2 * n_max + 1));
    for (int n = -n_max; n <= n_max; ++n) {
      const std::ptrdiff_t bin = (n >= 0) ? n : M + n;
      g[static_cast<std::size_t>(n + n_max)] = coeff[static_cast<std::size_t>(bin)] * norm;
    }
    double tail = 0.0;
    for (std::ptrdiff_t bin = n_max + 1; bin < M - n_max; ++bin) {
      tail += std::norm(coeff[static_cast<std::size_t>(bin)] * norm);
    }
    out.tail_weight = std::max(out.tail_weight, tail);
  }
  if (out.tail_weight > 1e-8 * j0 * j0) {
    throw NumericalError("truncation order n_max too small: spectral tail exceeds 1e-8 j0^2");
  }
  return out;
}

}  // namespace fcf
