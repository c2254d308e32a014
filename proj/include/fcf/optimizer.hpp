#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "drive.hpp"
#include "effective.hpp"
#include "error.hpp"
#include "parallel.hpp"

namespace fcf {

/// Drive parameters p = (A_1/w, ..., A_N/w, delta_2, ..., delta_N).
using ParamVector = std::vector<double>;

struct Candidate {
  double R = 0.0;  ///< (j2/j1)(w/j0)
  double j1_over_j0 = 0.0;
  double phi = 0.0;
  bool phi_defined = false;
};

inline DriveSpec family_drive_from_params(DriveFamily family, int N, const ParamVector& p, double omega = 1.0) {
  if (N < 1 || p.size() != static_cast<std::size_t>(2 * N - 1)) {
    throw ConfigError("parameter vector must hold N amplitudes and N-1 phases");
  }
  std::vector<double> amps(static_cast<std::size_t>(N)), phases(static_cast<std::size_t>(N), 0.0);
  for (int n = 0; n < N; ++n) amps[std::size_t(n)] = p[std::size_t(n)] * omega;
  for (int n = 1; n < N; ++n) phases[std::size_t(n)] = p[std::size_t(N + n - 1)];
  return build_family_drive(family, omega, amps, phases);
}

/// R, j1/j0 and phi of a family drive, evaluated at w = j0 = 1.
inline Candidate evaluate_candidate(DriveFamily family, int N, const ParamVector& p) {
  static const LatticeGeometry geom = build_geometry();
  const EffectiveRates r = effective_rates(family_drive_from_params(family, N, p), geom, 1.0);
  if (!r.isotropic_nn || !r.isotropic_nnn) throw NumericalError("family drive produced anisotropic rates");
  Candidate c;
  c.j1_over_j0 = r.j1;
  c.R = (r.j1 > 0.0) ? r.j2 / r.j1 : 0.0;
  c.phi_defined = r.phi_defined && r.j1 > 0.0;
  c.phi = r.phi;
  return c;
}

struct OptimizationProblem {
  DriveFamily family = DriveFamily::plus;
  int N = 2;
  double phi_target = std::numbers::pi / 2.0;
  double r_threshold = 0.25;
  double amp_bound = 5.0;
  int n_starts = 64;
  std::uint64_t seed = 42;
  double phi_tol = 1e-3;
  double feas_tol = 1e-9;
  int max_iterations = 600;  ///< simplex iterations per penalty round
  /// Additional starting points tried after the low-discrepancy starts.
  std::vector<ParamVector> extra_starts;
};

inline void validate(const OptimizationProblem& q) {
  if (q.family == DriveFamily::custom) throw ConfigError("optimizer needs family plus or minus");
  if (q.N < 1) throw ConfigError("harmonic count N must be >= 1");
  if (!(q.r_threshold >= 0.0 && q.r_threshold <= 1.0)) throw ConfigError("r_th must lie in [0, 1]");
  if (!(q.amp_bound > 0.0)) throw ConfigError("amplitude bound must be positive");
  if (q.n_starts < 1) throw ConfigError("at least one start is required");
  if (!(q.phi_tol > 0.0) || !(q.feas_tol >= 0.0)) throw ConfigError("tolerances must be positive");
  if (q.max_iterations < 1) throw ConfigError("iteration cap must be positive");
}

struct StartOutcome {
  ParamVector p;
  double R = 0.0;
  bool feasible = false;
  bool converged = false;
  double violation = 0.0;
};

struct OptimizationResult {
  ParamVector p_star;
  double R_value = 0.0;
  double j1_over_j0 = 0.0;
  double phi_achieved = 0.0;
  bool phi_defined = false;
  bool feasible = false;
  double phi_residual = 0.0;        ///< |wrap(phi - phi_target)|
  double threshold_residual = 0.0;  ///< max(0, r_th - j1/j0)
  int starts_converged = 0;
  std::vector<StartOutcome> best_per_start;
  DriveFamily family = DriveFamily::plus;
};

namespace detail {

inline double radical_inverse(std::uint64_t index, std::uint64_t base) {
  double inv = 1.0 / double(base), f = inv, value = 0.0;
  while (index > 0) {
    value += f * double(index % base);
    index /= base;
    f *= inv;
  }
  return value;
}

/// Halton points with a seeded Cranley-Patterson rotation, mapped to the search box.
inline std::vector<ParamVector> start_points(const OptimizationProblem& q) {
  static constexpr std::array<std::uint64_t, 12> primes{2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  const auto dim = static_cast<std::size_t>(2 * q.N - 1);
  if (dim > primes.size()) throw ConfigError("harmonic count too large for the start sequence");
  std::mt19937_64 rng(q.seed);
  std::vector<double> shift(dim);
  for (auto& s : shift) s = double(rng() >> 11) * 0x1.0p-53;

  std::vector<ParamVector> pts;
  for (int s = 0; s < q.n_starts; ++s) {
    ParamVector p(dim);
    for (std::size_t d = 0; d < dim; ++d) {
      double u = radical_inverse(std::uint64_t(s) + 1, primes[d]) + shift[d];
      u -= std::floor(u);
      p[d] = (d < std::size_t(q.N)) ? u * q.amp_bound : -std::numbers::pi + 2.0 * std::numbers::pi * u;
    }
    pts.push_back(std::move(p));
  }
  for (const auto& p : q.extra_starts) {
    if (p.size() != dim) throw ConfigError("extra start has the wrong dimension");
    pts.push_back(p);
  }
  return pts;
}

struct Penalty {
  double phi = 10.0;
  double threshold = 10.0;
};

inline double objective(const OptimizationProblem& q, const ParamVector& p, const Penalty& rho) {
  double bound_excess = 0.0;
  for (int n = 0; n < q.N; ++n) bound_excess += std::pow(std::max(0.0, std::abs(p[std::size_t(n)]) - q.amp_bound), 2);
  if (bound_excess > 0.0) {
    // Outside the box: steer back without evaluating the drive.
    return 1e6 * bound_excess + 1e3;
  }
  const Candidate c = evaluate_candidate(q.family, q.N, p);
  const double dphi = c.phi_defined ? wrap_angle(c.phi - q.phi_target) : std::numbers::pi;
  const double short_fall = std::max(0.0, q.r_threshold - c.j1_over_j0);
  // R = j2 / j1 diverges as j1 -> 0; measuring j2 against max(j1, r_th) keeps the
  // penalized objective bounded and equals R on the feasible set.
  const double j2 = c.R * c.j1_over_j0;
  const double reward = j2 / std::max({c.j1_over_j0, q.r_threshold, 1e-6});
  return -reward + rho.phi * dphi * dphi + rho.threshold * short_fall * short_fall;
}

struct SimplexOutcome {
  ParamVector p;
  double value = 0.0;
  bool converged = false;
};

/// Nelder-Mead with standard coefficients and a fixed iteration cap.
template <class F>
SimplexOutcome nelder_mead(F&& f, const ParamVector& x0, const ParamVector& step, int max_iterations) {
  const std::size_t n = x0.size();
  std::vector<ParamVector> x(n + 1, x0);
  std::vector<double> fx(n + 1);
  for (std::size_t i = 0; i < n; ++i) x[i + 1][i] += step[i];
  for (std::size_t i = 0; i <= n; ++i) fx[i] = f(x[i]);

  std::vector<std::size_t> order(n + 1);
  auto sort = [&] {
    for (std::size_t i = 0; i <= n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fx[a] < fx[b]; });
  };
  auto point = [&](const ParamVector& c, const ParamVector& w, double t) {
    ParamVector y(n);
    for (std::size_t d = 0; d < n; ++d) y[d] = c[d] + t * (w[d] - c[d]);
    return y;
  };

  bool converged = false;
  for (int it = 0; it < max_iterations; ++it) {
    sort();
    const std::size_t best = order[0], worst = order[n], second = order[n - 1];
    double size = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
      for (std::size_t d = 0; d < n; ++d) size = std::max(size, std::abs(x[order[i]][d] - x[best][d]));
    }
    if (std::abs(fx[worst] - fx[best]) <= 1e-13 * (1.0 + std::abs(fx[best])) && size <= 1e-8) {
      converged = true;
      break;
    }

    ParamVector centroid(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t d = 0; d < n; ++d) centroid[d] += x[order[i]][d] / double(n);
    }
    const ParamVector xr = point(centroid, x[worst], -1.0);
    const double fr = f(xr);
    if (fr < fx[best]) {
      const ParamVector xe = point(centroid, x[worst], -2.0);
      const double fe = f(xe);
      if (fe < fr) {
        x[worst] = xe;
        fx[worst] = fe;
      } else {
        x[worst] = xr;
        fx[worst] = fr;
      }
    } else if (fr < fx[second]) {
      x[worst] = xr;
      fx[worst] = fr;
    } else {
      const bool outside = fr < fx[worst];
      const ParamVector xc = outside ? point(centroid, x[worst], -0.5) : point(centroid, x[worst], 0.5);
      const double fc = f(xc);
      if (fc < std::min(fr, fx[worst])) {
        x[worst] = xc;
        fx[worst] = fc;
      } else {
        for (std::size_t i = 1; i <= n; ++i) {
          x[order[i]] = point(x[best], x[order[i]], 0.5);
          fx[order[i]] = f(x[order[i]]);
        }
      }
    }
  }
  sort();
  return {x[order[0]], fx[order[0]], converged};
}

/// Makes amplitudes non-negative and wraps phases to (-pi, pi] without changing
/// the effective rates: -A_n is absorbed as delta_n + pi (n >= 2), and -A_1 as a
/// half-period time shift, delta_n + m_n pi. The rates are also invariant under
/// delta_n -> pi - delta_n for all n >= 2; the representative with cos delta_2 >= 0 is kept.
inline ParamVector canonical(const OptimizationProblem& q, ParamVector p) {
  const auto N = std::size_t(q.N);
  if (p[0] < 0.0) {
    p[0] = -p[0];
    for (std::size_t n = 1; n < N; ++n) p[N + n - 1] += family_harmonic(int(n) + 1) * std::numbers::pi;
  }
  for (std::size_t n = 1; n < N; ++n) {
    if (p[n] < 0.0) {
      p[n] = -p[n];
      p[N + n - 1] += std::numbers::pi;
    }
  }
  if (N >= 2 && std::cos(p[N]) < 0.0) {
    for (std::size_t n = 1; n < N; ++n) p[N + n - 1] = std::numbers::pi - p[N + n - 1];
  }
  for (std::size_t n = 1; n < N; ++n) p[N + n - 1] = wrap_angle(p[N + n - 1]);
  return p;
}

struct Assessment {
  Candidate c;
  double phi_residual = std::numbers::pi;
  double threshold_residual = 0.0;
  bool feasible = false;
  double violation = 0.0;
};

inline Assessment assess(const OptimizationProblem& q, const ParamVector& p) {
  Assessment a;
  for (int n = 0; n < q.N; ++n) {
    if (std::abs(p[std::size_t(n)]) > q.amp_bound) {
      a.violation = std::numeric_limits<double>::infinity();
      return a;
    }
  }
  a.c = evaluate_candidate(q.family, q.N, p);
  a.phi_residual = a.c.phi_defined ? std::abs(wrap_angle(a.c.phi - q.phi_target)) : std::numbers::pi;
  a.threshold_residual = std::max(0.0, q.r_threshold - a.c.j1_over_j0);
  a.feasible = a.c.phi_defined && a.phi_residual <= q.phi_tol && a.threshold_residual <= q.feas_tol;
  a.violation = a.phi_residual / q.phi_tol + a.threshold_residual / std::max(q.feas_tol, 1e-12);
  return a;
}

/// Minimum-norm Gauss-Newton correction onto phi = phi_target and, when the
/// threshold is active, j1/j0 = r_th (plus a small margin).
inline ParamVector restore_feasibility(const OptimizationProblem& q, ParamVector p) {
  const std::size_t n = p.size();
  const double h = 1e-6;
  const double margin = 1e-10;
  for (int iter = 0; iter < 8; ++iter) {
    const Assessment a = assess(q, p);
    if (!a.c.phi_defined) return p;
    const bool active = a.c.j1_over_j0 < q.r_threshold + 1e-6;
    if (a.phi_residual <= 1e-9 && (!active || a.c.j1_over_j0 >= q.r_threshold + 0.5 * margin)) return p;

    const std::size_t rows = active ? 2 : 1;
    Eigen::MatrixXd J(rows, n);
    Eigen::VectorXd res(rows);
    res(0) = wrap_angle(a.c.phi - q.phi_target);
    if (active) res(1) = a.c.j1_over_j0 - (q.r_threshold + margin);
    for (std::size_t d = 0; d < n; ++d) {
      ParamVector up = p, dn = p;
      up[d] += h;
      dn[d] -= h;
      const Candidate cu = evaluate_candidate(q.family, q.N, up);
      const Candidate cd = evaluate_candidate(q.family, q.N, dn);
      J(0, Eigen::Index(d)) = wrap_angle(cu.phi - cd.phi) / (2.0 * h);
      if (active) J(1, Eigen::Index(d)) = (cu.j1_over_j0 - cd.j1_over_j0) / (2.0 * h);
    }
    // Rank-revealing: with N = 1 the phase row vanishes identically.
    const Eigen::VectorXd dp = J.completeOrthogonalDecomposition().solve(res);
    if (!dp.allFinite()) return p;
    for (std::size_t d = 0; d < n; ++d) p[d] -= dp(Eigen::Index(d));
  }
  return p;
}

inline StartOutcome run_start(const OptimizationProblem& q, const ParamVector& x0) {
  const auto dim = x0.size();
  ParamVector step(dim);
  for (std::size_t d = 0; d < dim; ++d) step[d] = (d < std::size_t(q.N)) ? 0.3 : 0.6;

  Penalty rho;
  ParamVector x = x0;
  bool converged = false;
  for (int round = 0; round < 3; ++round) {
    const SimplexOutcome s =
        nelder_mead([&](const ParamVector& y) { return objective(q, y, rho); }, x, step, q.max_iterations);
    x = s.p;
    converged = s.converged;
    rho.phi *= 100.0;
    rho.threshold *= 100.0;
    for (auto& v : step) v *= 0.1;
  }

  x = restore_feasibility(q, x);
  x = canonical(q, x);
  const Assessment a = assess(q, x);
  return {x, a.c.R, a.feasible, converged, a.violation};
}

inline bool better(const StartOutcome& a, const StartOutcome& b) {
  if (a.feasible != b.feasible) return a.feasible;
  if (a.feasible) {
    if (a.R != b.R) return a.R > b.R;
  } else if (a.violation != b.violation) {
    return a.violation < b.violation;
  }
  return std::lexicographical_compare(a.p.begin(), a.p.end(), b.p.begin(), b.p.end());
}

}  // namespace detail

/// Maximizes R = (j2/j1)(w/j0) subject to phi = phi_target and j1/j0 >= r_th by
/// penalized multistart simplex search. Returns the best feasible point, or the
/// least-violating point flagged infeasible.
inline OptimizationResult maximize(const OptimizationProblem& q) {
  validate(q);
  const auto starts = detail::start_points(q);
  std::vector<StartOutcome> outcomes(starts.size());
  parallel_for(starts.size(), [&](std::size_t i) { outcomes[i] = detail::run_start(q, starts[i]); });

  OptimizationResult r;
  std::size_t best = 0;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (outcomes[i].converged) ++r.starts_converged;
    if (detail::better(outcomes[i], outcomes[best])) best = i;
  }
  r.p_star = outcomes[best].p;
  const detail::Assessment a = detail::assess(q, r.p_star);
  r.R_value = a.c.R;
  r.j1_over_j0 = a.c.j1_over_j0;
  r.phi_achieved = a.c.phi;
  r.phi_defined = a.c.phi_defined;
  r.feasible = a.feasible;
  r.phi_residual = a.phi_residual;
  r.threshold_residual = a.threshold_residual;
  r.best_per_start = std::move(outcomes);
  r.family = q.family;
  return r;
}

/// Runs maximize once per family and keeps the better result (feasible first,
/// then larger R); ties go to the earlier family in the list.
inline OptimizationResult maximize_over(const OptimizationProblem& q, const std::vector<DriveFamily>& families) {
  if (families.empty()) throw ConfigError("at least one drive family is required");
  OptimizationResult best;
  bool have = false;
  for (DriveFamily f : families) {
    OptimizationProblem qf = q;
    qf.family = f;
    OptimizationResult r = maximize(qf);
    const bool wins = !have || (r.feasible != best.feasible ? r.feasible
                                : r.feasible               ? r.R_value > best.R_value
                                                           : r.phi_residual + r.threshold_residual <
                                                                 best.phi_residual + best.threshold_residual);
    if (wins) {
      best = std::move(r);
      have = true;
    }
  }
  return best;
}

struct SweepRow {
  double phi_target = 0.0;
  double r_threshold = 0.0;
  OptimizationResult result;
  /// p_star jumps relative to the previous target of the same r_th
  bool jump_before = false;
  /// Best feasible R per entry of SweepOptions::families (NaN when infeasible).
  std::vector<double> family_R;
};

/// Distance between parameter vectors of one family, comparing each harmonic
/// as the complex amplitude A_n e^{i delta_n}, so a phase carried by a zero
/// amplitude does not count.
inline double param_distance(int N, const ParamVector& a, const ParamVector& b) {
  double s = 0.0;
  for (int n = 0; n < N; ++n) {
    const double pa = n == 0 ? 0.0 : a[std::size_t(N + n - 1)];
    const double pb = n == 0 ? 0.0 : b[std::size_t(N + n - 1)];
    s += std::norm(std::polar(a[std::size_t(n)], pa) - std::polar(b[std::size_t(n)], pb));
  }
  return std::sqrt(s);
}

/// Coarse screen: a step longer than 0.1 and than twice the shorter adjacent step.
inline std::vector<bool> jump_candidates(const std::vector<double>& step) {
  std::vector<bool> out(step.size(), false);
  for (std::size_t i = 0; i < step.size(); ++i) {
    double local = std::numeric_limits<double>::infinity();
    if (i > 0) local = std::min(local, step[i - 1]);
    if (i + 1 < step.size()) local = std::min(local, step[i + 1]);
    out[i] = std::isfinite(step[i]) && step[i] > 0.1 && (!std::isfinite(local) || step[i] > 2.0 * local);
  }
  return out;
}

struct SweepOptions {
  std::vector<DriveFamily> families{DriveFamily::plus};
  /// Bisection levels used to confirm a screened step as a jump (0 = screen only).
  int refine_levels = 4;
};

namespace detail {

/// Bisects [a, b] towards the half holding the longer parameter step, staying
/// within the family of both endpoints. A continuous optimum path shrinks the
/// step roughly with the interval, so the step is a jump when after L levels it
/// still exceeds 10x the linear trend d0 / 2^L (and 0.1 absolutely).
inline bool confirm_jump(OptimizationProblem q, int levels, double a, double b, OptimizationResult ra,
                         OptimizationResult rb) {
  q.family = ra.family;
  const double d0 = param_distance(q.N, ra.p_star, rb.p_star);
  double d = d0;
  for (int level = 0; level < levels && d > 0.1; ++level) {
    q.phi_target = 0.5 * (a + b);
    OptimizationResult rm = maximize(q);
    const double da = param_distance(q.N, ra.p_star, rm.p_star);
    const double db = param_distance(q.N, rm.p_star, rb.p_star);
    if (da >= db) {
      b = q.phi_target;
      rb = std::move(rm);
      d = da;
    } else {
      a = q.phi_target;
      ra = std::move(rm);
      d = db;
    }
  }
  return d > 0.1 && d > 10.0 * d0 / std::ldexp(1.0, levels);
}

}  // namespace detail

/// One optimization per (phi_target, r_th), rows ordered by r_th then phi.
/// Each target keeps the best result over opt.families. Parameter jumps between
/// neighboring targets of the same family are confirmed by bisection when
/// refine_levels > 0, otherwise taken from the coarse screen.
inline std::vector<SweepRow> sweep_targets(const std::vector<double>& phis, const std::vector<double>& r_ths,
                                           const OptimizationProblem& tmpl, const SweepOptions& opt = {}) {
  if (phis.empty() || r_ths.empty()) throw ConfigError("sweep lists must be nonempty");
  if (opt.refine_levels < 0) throw ConfigError("refinement levels must be non-negative");
  if (opt.families.empty()) throw ConfigError("at least one drive family is required");
  std::vector<SweepRow> rows;
  for (double r : r_ths) {
    const std::size_t first = rows.size();
    OptimizationProblem q = tmpl;
    q.r_threshold = r;
    for (double phi : phis) {
      q.phi_target = phi;
      SweepRow row{phi, r, {}, false, {}};
      for (DriveFamily f : opt.families) {
        q.family = f;
        OptimizationResult res = maximize(q);
        row.family_R.push_back(res.feasible ? res.R_value : std::nan(""));
        const bool wins = row.family_R.size() == 1 ||
                          (res.feasible != row.result.feasible ? res.feasible
                           : res.feasible ? res.R_value > row.result.R_value
                                          : res.phi_residual + res.threshold_residual <
                                                row.result.phi_residual + row.result.threshold_residual);
        if (wins) row.result = std::move(res);
      }
      rows.push_back(std::move(row));
    }
    std::vector<double> step(phis.size() - 1);
    for (std::size_t i = 0; i < step.size(); ++i) {
      const auto& ra = rows[first + i].result;
      const auto& rb = rows[first + i + 1].result;
      step[i] = (ra.family == rb.family) ? param_distance(tmpl.N, ra.p_star, rb.p_star)
                                         : std::numeric_limits<double>::quiet_NaN();
    }
    const auto screened = jump_candidates(step);
    for (std::size_t i = 0; i < step.size(); ++i) {
      const SweepRow& prev = rows[first + i];
      SweepRow& next = rows[first + i + 1];
      if (opt.refine_levels == 0) {
        next.jump_before = screened[i];
      } else if (std::isfinite(step[i]) && step[i] > 0.1) {
        next.jump_before = detail::confirm_jump(q, opt.refine_levels, prev.phi_target, next.phi_target,
                                                prev.result, next.result);
      }
    }
  }
  return rows;
}

struct PhaseMapCell {
  double A1 = 0.0;
  double A2 = 0.0;
  Candidate c;
};

/// phi and j1/j0 of the N = 2 family drive over an (A1/w, A2/w) grid at fixed delta_2.
struct PhaseMap {
  DriveFamily family = DriveFamily::plus;
  double delta2 = 0.0;
  std::vector<double> A1;
  std::vector<double> A2;
  std::vector<PhaseMapCell> cells;  ///< row-major in A1

  const PhaseMapCell& cell(std::size_t i, std::size_t j) const { return cells[i * A2.size() + j]; }
};

inline PhaseMap phase_map(const std::vector<double>& A1, const std::vector<double>& A2, double delta2,
                          DriveFamily family = DriveFamily::plus) {
  if (A1.empty() || A2.empty()) throw ConfigError("phase map axes must be nonempty");
  PhaseMap m;
  m.family = family;
  m.delta2 = delta2;
  m.A1 = A1;
  m.A2 = A2;
  m.cells.resize(A1.size() * A2.size());
  parallel_for(m.cells.size(), [&](std::size_t idx) {
    const double a1 = A1[idx / A2.size()];
    const double a2 = A2[idx % A2.size()];
    m.cells[idx] = {a1, a2, evaluate_candidate(family, 2, {a1, a2, delta2})};
  });
  return m;
}

/// Number of 4-connected components of {j1/j0 >= level} on the phase map grid.
inline int count_superlevel_components(const PhaseMap& m, double level) {
  const std::size_t n1 = m.A1.size(), n2 = m.A2.size();
  std::vector<int> label(n1 * n2, 0);
  int components = 0;
  std::vector<std::size_t> stack;
  for (std::size_t s = 0; s < n1 * n2; ++s) {
    if (label[s] != 0 || m.cells[s].c.j1_over_j0 < level) continue;
    ++components;
    label[s] = components;
    stack.push_back(s);
    while (!stack.empty()) {
      const std::size_t cur = stack.back();
      stack.pop_back();
      const std::size_t i = cur / n2, j = cur % n2;
      const std::array<std::pair<long, long>, 4> nb{{{-1, 0}, {1, 0}, {0, -1}, {0, 1}}};
      for (auto [di, dj] : nb) {
        const long ii = long(i) + di, jj = long(j) + dj;
        if (ii < 0 || jj < 0 || ii >= long(n1) || jj >= long(n2)) continue;
        const std::size_t t = std::size_t(ii) * n2 + std::size_t(jj);
        if (label[t] == 0 && m.cells[t].c.j1_over_j0 >= level) {
          label[t] = components;
          stack.push_back(t);
        }
      }
    }
  }
  return components;
}

}  // namespace fcf
