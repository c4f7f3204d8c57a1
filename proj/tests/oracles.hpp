// Test-only oracles, independent of the implementation paths they check:
//  - radial shooting for the lowest Dirichlet eigenvalue of geodesic disks,
//  - the series/log form of the collar width,
//  - right-angled hexagon sides by geodesic walking plus the pole formula
//    for the distance between two disjoint geodesics.
#pragma once

#include <cmath>
#include <stdexcept>

#include "hypspec/hyperbolic.hpp"

namespace oracles {

// phi'' + (c'/c) phi' + lambda phi = 0 with c = sinh (hyperbolic) or c = r
// (flat); first zero of phi(R) in lambda located by bisection over RK4 runs.
inline double shoot_disk_lambda0(double R, bool hyperbolic) {
  auto deriv = [&](double r, double phi, double dphi, double lam) {
    double cot = hyperbolic ? 1.0 / std::tanh(r) : 1.0 / r;
    return -cot * dphi - lam * phi;
  };
  auto phi_at_R = [&](double lam) {
    double r = 1e-6, phi = 1.0 - lam * r * r / 4.0, dphi = -lam * r / 2.0;
    int steps = 20000;
    double dr = (R - r) / steps;
    for (int i = 0; i < steps; ++i) {
      double k1p = dphi, k1d = deriv(r, phi, dphi, lam);
      double k2p = dphi + 0.5 * dr * k1d,
             k2d = deriv(r + 0.5 * dr, phi + 0.5 * dr * k1p, dphi + 0.5 * dr * k1d, lam);
      double k3p = dphi + 0.5 * dr * k2d,
             k3d = deriv(r + 0.5 * dr, phi + 0.5 * dr * k2p, dphi + 0.5 * dr * k2d, lam);
      double k4p = dphi + dr * k3d,
             k4d = deriv(r + dr, phi + dr * k3p, dphi + dr * k3d, lam);
      phi += dr / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p);
      dphi += dr / 6.0 * (k1d + 2 * k2d + 2 * k3d + k4d);
      r += dr;
    }
    return phi;
  };
  double lo = 1e-4, hi = 1.0;
  while (phi_at_R(hi) > 0) hi *= 2;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    (phi_at_R(mid) > 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Series form 2*artanh(e^{-ell/2}) of the collar half-width.
inline double collar_width_series(double ell) { return 2.0 * std::atanh(std::exp(-0.5 * ell)); }

// Distance between two disjoint complete geodesics given by (point, tangent),
// via the unit pole vectors: cosh(d) = |<u1, u2>|.
inline double geodesic_distance(const hypspec::HVec& p1, const hypspec::HVec& v1,
                                const hypspec::HVec& p2, const hypspec::HVec& v2) {
  hypspec::HVec u1 = hypspec::perp_tangent(p1, v1);
  hypspec::HVec u2 = hypspec::perp_tangent(p2, v2);
  double c = std::abs(hypspec::mdot(u1, u2));
  if (c < 1.0) throw std::runtime_error("geodesics intersect; no common perpendicular");
  return std::acosh(c);
}

// Seam opposite a1 in the right-angled hexagon with alternate sides a_i:
// walk a2, a trial seam, a3 with right angles, and bisect the trial length
// until the common perpendicular between the two outer geodesics equals a1.
// Only geodesic walking and the pole formula are used; the cosh relation of
// the hexagon never enters.
inline double hexagon_seam_by_walk(double a1, double a2, double a3) {
  using namespace hypspec;
  auto opposite_side = [&](double trial_b1) {
    HVec p = origin(), v{0, 1, 0};
    // geodesic carrying side b3: through the start of a2, perpendicular turn
    HVec g1p = p, g1v = perp_tangent(p, v);
    GeodesicState g = geodesic_step(p, v, a2);
    HVec w = rotate_tangent(g.point, g.dir, 0.5 * kPi);
    g = geodesic_step(g.point, w, trial_b1);
    w = rotate_tangent(g.point, g.dir, 0.5 * kPi);
    g = geodesic_step(g.point, w, a3);
    HVec g2p = g.point;
    HVec g2v = rotate_tangent(g.point, g.dir, 0.5 * kPi);
    return geodesic_distance(g1p, g1v, g2p, g2v);
  };
  double lo = 1e-6, hi = 60.0;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    double val;
    try {
      val = opposite_side(mid);
    } catch (const std::runtime_error&) {
      lo = mid;  // outer geodesics still cross: seam too short
      continue;
    }
    (val > a1 ? hi : lo) = mid;  // longer seam -> shorter opposite side
  }
  return 0.5 * (lo + hi);
}

}  // namespace oracles
