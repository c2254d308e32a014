#pragma once

#include <array>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "error.hpp"

namespace fcf {

using Vec2 = Eigen::Vector2d;

/// Hexagonal lattice with NN distance a.
///
/// nn[k]   bond vectors a_1, a_2, a_3 (sum to zero)
/// nnn[k]  Bravais / NNN vectors b_1, b_2, b_3 (sum to zero)
/// e1, e2  orthonormal drive axes, e1 = (a_1 - a_2)/sqrt(3), e2 = -a_3
/// G1, G2  reciprocal vectors with b_i . G_j = 2 pi delta_ij
struct LatticeGeometry {
  double a = 1.0;
  std::array<Vec2, 3> nn;
  std::array<Vec2, 3> nnn;
  Vec2 e1;
  Vec2 e2;
  Vec2 G1;
  Vec2 G2;

  /// Momentum at fractional coordinates (u, v) of the reciprocal cell.
  Vec2 momentum(double u, double v) const { return u * G1 + v * G2; }
};

inline LatticeGeometry build_geometry(double a = 1.0) {
  if (!(a > 0.0) || !std::isfinite(a)) {
    throw ConfigError("lattice constant must be positive and finite");
  }
  const double s3 = std::numbers::sqrt3;
  LatticeGeometry g;
  g.a = a;
  g.nn[0] = Vec2(s3, 1.0) * (a / 2.0);
  g.nn[1] = Vec2(-s3, 1.0) * (a / 2.0);
  g.nn[2] = -g.nn[0] - g.nn[1];
  g.nnn[0] = Vec2(s3, 0.0) * a;
  g.nnn[1] = Vec2(-s3, 3.0) * (a / 2.0);
  g.nnn[2] = -g.nnn[0] - g.nnn[1];
  g.e1 = (g.nn[0] - g.nn[1]) / s3;
  g.e2 = -g.nn[2];

  Eigen::Matrix2d B;
  B.row(0) = g.nnn[0].transpose();
  B.row(1) = g.nnn[1].transpose();
  const Eigen::Matrix2d G = 2.0 * std::numbers::pi * B.inverse();
  g.G1 = G.col(0);
  g.G2 = G.col(1);
  return g;
}

}  // namespace fcf
