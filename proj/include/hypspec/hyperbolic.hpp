// Hyperboloid-model primitives for the hyperbolic plane.
//
// Points live on the upper sheet of <x,x> = -1 in Minkowski 3-space with
// signature (-,+,+); tangent vectors are spacelike and orthogonal to the
// base point. Ideal points are future-pointing lightlike rays. All mesh
// generation works through these primitives and only geodesic distances
// survive into the output, so chart choices never leak downstream.
#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace hypspec {

struct HVec {
  double t = 0, x = 0, y = 0;

  HVec operator+(const HVec& o) const { return {t + o.t, x + o.x, y + o.y}; }
  HVec operator-(const HVec& o) const { return {t - o.t, x - o.x, y - o.y}; }
  HVec operator*(double s) const { return {t * s, x * s, y * s}; }
};

inline double mdot(const HVec& a, const HVec& b) {
  return -a.t * b.t + a.x * b.x + a.y * b.y;
}

inline HVec origin() { return {1, 0, 0}; }

// Rescale onto the hyperboloid sheet; guards against drift after long walks.
inline HVec renormalize_point(HVec p) {
  double s = -mdot(p, p);
  if (s <= 0) throw std::runtime_error("renormalize_point: vector left the timelike cone");
  double inv = 1.0 / std::sqrt(s);
  return {p.t * inv, p.x * inv, p.y * inv};
}

// Remove the component along p and rescale to unit spacelike norm.
inline HVec renormalize_tangent(const HVec& p, HVec v) {
  double c = mdot(p, v);  // should be 0; project out drift
  v = v + p * c;
  double s = mdot(v, v);
  if (s <= 0) throw std::runtime_error("renormalize_tangent: degenerate tangent");
  return v * (1.0 / std::sqrt(s));
}

// Geodesic distance. 2*asinh(|p-q|_M/2) avoids the cancellation in
// acosh(-<p,q>) when the points are close.
inline double hdist(const HVec& p, const HVec& q) {
  HVec d = p - q;
  double s = mdot(d, d);
  if (s < 0) s = 0;
  return 2.0 * std::asinh(0.5 * std::sqrt(s));
}

struct GeodesicState {
  HVec point;
  HVec dir;  // unit tangent at point
};

// Walk distance s along the geodesic through p with unit direction v,
// parallel-transporting v.
inline GeodesicState geodesic_step(const HVec& p, const HVec& v, double s) {
  double c = std::cosh(s), sh = std::sinh(s);
  GeodesicState out;
  out.point = p * c + v * sh;
  out.dir = p * sh + v * c;
  out.point = renormalize_point(out.point);
  out.dir = renormalize_tangent(out.point, out.dir);
  return out;
}

// The tangent obtained by rotating v by +pi/2 in the tangent plane at p,
// with the orientation fixed by the Minkowski cross product.
inline HVec perp_tangent(const HVec& p, const HVec& v) {
  // epsilon_{abc} p^b v^c with the first index raised by eta = diag(-1,1,1)
  double c0 = p.x * v.y - p.y * v.x;
  double c1 = p.y * v.t - p.t * v.y;
  double c2 = p.t * v.x - p.x * v.t;
  HVec w{-c0, c1, c2};
  return renormalize_tangent(p, w);
}

inline HVec rotate_tangent(const HVec& p, const HVec& v, double theta) {
  HVec w = perp_tangent(p, v);
  return renormalize_tangent(p, v * std::cos(theta) + w * std::sin(theta));
}

// Unit tangent at p pointing toward q.
inline HVec direction_to(const HVec& p, const HVec& q) {
  double c = mdot(p, q);  // = -cosh d
  HVec v = q + p * c;     // q - <q,p>/<p,p> p
  return renormalize_tangent(p, v);
}

// Ideal endpoint of the ray from p with direction v (future lightlike).
inline HVec ideal_endpoint(const HVec& p, const HVec& v) { return p + v; }

// Busemann function of the ideal point xi: B(p) = log(-<p,xi>).
// Along a unit-speed geodesic running into xi it decreases at rate 1.
inline double busemann(const HVec& p, const HVec& xi) {
  double s = -mdot(p, xi);
  if (s <= 0) throw std::runtime_error("busemann: not a future lightlike direction");
  return std::log(s);
}

// Unit tangent at p toward the ideal point xi.
inline HVec direction_to_ideal(const HVec& p, const HVec& xi) {
  double s = -mdot(p, xi);
  if (s <= 0) throw std::runtime_error("direction_to_ideal: bad ideal point");
  HVec v = xi * (1.0 / s) + p * (-1.0);  // xi/(-<p,xi>) - p
  return renormalize_tangent(p, v);
}

// Unit-speed horocycle through p about the ideal point xi. The step
// h(s) = p + s w + (s^2/2) q with q = xi/(-<p,xi>) stays on the horocycle
// {B = B(p)} for every s; `w` must be a unit tangent orthogonal to the
// direction into xi (choose the sign to pick the branch).
inline HVec horocycle_step(const HVec& p, const HVec& xi, const HVec& w, double s) {
  double d = -mdot(p, xi);
  HVec q = xi * (1.0 / d);
  HVec h = p + w * s + q * (0.5 * s * s);
  return renormalize_point(h);
}

// Arc length along a common horocycle between two of its points.
inline double horocycle_arc_between(const HVec& a, const HVec& b) {
  return 2.0 * std::sinh(0.5 * hdist(a, b));
}

// Orthonormal Lorentz frame with f0 = p; maps chart computations to a
// neighborhood of the origin (used to keep Poincare-disk coordinates tame).
struct Frame {
  HVec f0, f1, f2;

  // Coordinates of q in this frame (inverse isometry applied to q).
  HVec pull(const HVec& q) const {
    return {-mdot(f0, q), mdot(f1, q), mdot(f2, q)};
  }
  HVec push(const HVec& c) const {
    return f0 * c.t + f1 * c.x + f2 * c.y;
  }
};

inline Frame frame_at(const HVec& p) {
  Frame f;
  f.f0 = p;
  // Gram-Schmidt the spatial axes against p.
  HVec e1{0, 1, 0}, e2{0, 0, 1};
  f.f1 = renormalize_tangent(p, e1 + p * mdot(p, e1));
  HVec e2p = e2 + p * mdot(p, e2);
  e2p = e2p - f.f1 * mdot(f.f1, e2p);
  f.f2 = renormalize_tangent(p, e2p);
  return f;
}

// Poincare disk coordinates of a hyperboloid point.
inline std::array<double, 2> to_disk(const HVec& p) {
  return {p.x / (1.0 + p.t), p.y / (1.0 + p.t)};
}

// Fermi chart about an oriented geodesic: base point P, direction E1 along
// the geodesic, E2 the inward normal. (r,s) has metric dr^2 + cosh(r)^2 ds^2.
struct FermiChart {
  HVec base, along, normal;

  HVec at(double r, double s) const {
    double cs = std::cosh(s), ss = std::sinh(s);
    double cr = std::cosh(r), sr = std::sinh(r);
    // The normal of the axis plane is a fixed Minkowski vector, so parallel
    // transport along the axis leaves it unchanged.
    HVec on_axis = base * cs + along * ss;
    HVec p = on_axis * cr + normal * sr;
    return renormalize_point(p);
  }
};

// Hyperbolic polar chart about a center point: (r, theta).
struct PolarChart {
  Frame frame;

  HVec at(double r, double theta) const {
    double cr = std::cosh(r), sr = std::sinh(r);
    return frame.push({cr, sr * std::cos(theta), sr * std::sin(theta)});
  }
};

// Distance in the cusp model metric dr^2 + e^{-2r} ds^2 (s wrapped mod
// `period` when period > 0), via the upper half-plane z = (s, e^r).
inline double cusp_chart_distance(double r1, double s1, double r2, double s2, double period) {
  double ds = s1 - s2;
  if (period > 0) {
    ds = std::remainder(ds, period);
  }
  double y1 = std::exp(r1), y2 = std::exp(r2);
  double chord = std::sqrt(ds * ds + (y1 - y2) * (y1 - y2));
  return 2.0 * std::asinh(0.5 * chord / std::sqrt(y1 * y2));
}

// Distance in the collar model metric dr^2 + cosh(r)^2 ds^2 about a closed
// geodesic of length `period` (s wrapped when period > 0).
inline double collar_chart_distance(double r1, double s1, double r2, double s2, double period) {
  double ds = s1 - s2;
  if (period > 0) ds = std::remainder(ds, period);
  // Embed both points with the same Fermi chart about the axis.
  double c1 = std::cosh(r1), sh1 = std::sinh(r1);
  double c2 = std::cosh(r2), sh2 = std::sinh(r2);
  HVec p{c1 * std::cosh(0.0), c1 * std::sinh(0.0), sh1};
  HVec q{c2 * std::cosh(ds), c2 * std::sinh(ds), sh2};
  return hdist(p, q);
}

}  // namespace hypspec
