#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include <fcf/fcf.hpp>

namespace fcf::testing {

/// J_n(z) from its power series, summed in long double until the terms vanish.
inline double bessel_series(int n, double z) {
  const int order = std::abs(n);
  long double term = 1.0L;
  for (int i = 1; i <= order; ++i) term *= (static_cast<long double>(z) / 2.0L) / i;
  long double sum = term;
  const long double q = -(static_cast<long double>(z) * z) / 4.0L;
  for (int k = 1; k < 400; ++k) {
    term *= q / (static_cast<long double>(k) * (k + order));
    sum += term;
    if (std::fabs(term) < 1e-30L * std::fabs(sum) && k > 2 * order + 10) break;
  }
  const double value = static_cast<double>(sum);
  return (n < 0 && (order % 2 == 1)) ? -value : value;
}

/// Seeded random F+/F- drive with N in [1, 3] and A/omega in [0, amp_max].
struct RandomDrive {
  DriveSpec spec;
  int N = 1;
};

inline RandomDrive random_family_drive(std::mt19937_64& rng, double omega = 1.0, double amp_max = 4.0) {
  std::uniform_int_distribution<int> count(1, 3);
  std::uniform_real_distribution<double> amp(0.0, amp_max);
  std::uniform_real_distribution<double> phase(-std::numbers::pi, std::numbers::pi);
  const int N = count(rng);
  std::vector<double> A(static_cast<std::size_t>(N)), d(static_cast<std::size_t>(N), 0.0);
  for (int n = 0; n < N; ++n) {
    A[std::size_t(n)] = amp(rng) * omega;
    if (n > 0) d[std::size_t(n)] = phase(rng);
  }
  const DriveFamily fam = (rng() & 1U) ? DriveFamily::plus : DriveFamily::minus;
  return {build_family_drive(fam, omega, A, d), N};
}

inline DriveSpec family_drive(DriveFamily fam, double omega, std::vector<double> A_over_omega,
                              std::vector<double> delta) {
  for (auto& a : A_over_omega) a *= omega;
  return build_family_drive(fam, omega, A_over_omega, delta);
}

}  // namespace fcf::testing
