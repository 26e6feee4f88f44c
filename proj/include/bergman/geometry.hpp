#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bergman/core.hpp"

namespace bergman {

enum class DomainKind { Ball, Egg };

/// A concrete model domain: the unit ball of C^n, or the egg
/// {|z1|^2 + |z2|^(2m) < 1} in C^2.
struct ModelDomain {
  DomainKind kind = DomainKind::Ball;
  int n = 1;  // complex dimension
  int m = 2;  // egg exponent (unused for Ball)
  double eps0 = 0.5;
  double delta_global = 0.4;

  static ModelDomain ball(int n, double eps0 = 0.5, double delta_global = 0.4) {
    if (n < 1 || n > kMaxDim)
      throw Error(ErrorCode::InvalidArgument, "ball dimension must be in [1," + std::to_string(kMaxDim) + "]");
    if (!(eps0 > 0.0 && eps0 < 1.0)) throw Error(ErrorCode::InvalidArgument, "ball eps0 must lie in (0,1)");
    return ModelDomain{DomainKind::Ball, n, 0, eps0, delta_global};
  }

  static ModelDomain egg(int m, double eps0 = 0.2, double delta_global = 0.4) {
    if (m < 2) throw Error(ErrorCode::InvalidArgument, "egg exponent m must be >= 2");
    if (!(eps0 > 0.0 && eps0 < 0.5)) throw Error(ErrorCode::InvalidArgument, "egg eps0 must lie in (0,0.5)");
    return ModelDomain{DomainKind::Egg, 2, m, eps0, delta_global};
  }

  bool is_ball() const { return kind == DomainKind::Ball; }
  int dim() const { return n; }

  std::string describe() const {
    return is_ball() ? "ball:n=" + std::to_string(n) : "egg:m=" + std::to_string(m);
  }

  /// Lebesgue volume of the domain.
  double volume() const {
    if (is_ball()) {
      double v = 1.0;
      for (int k = 1; k <= n; ++k) v *= kPi / k;
      return v;
    }
    return kPi * kPi * m / (m + 1.0);
  }

  /// Surface area of the ball boundary S^{2n-1}; the egg has no closed form.
  double ball_boundary_area() const {
    double fact = 1.0;
    for (int k = 2; k < n; ++k) fact *= k;
    return 2.0 * std::pow(kPi, n) / fact;
  }
};

inline double defining_function(const ModelDomain& dom, const CPoint& z) {
  if (dom.is_ball()) return z.norm() - 1.0;
  return std::norm(z[0]) + std::pow(std::norm(z[1]), dom.m) - 1.0;
}

/// Nearest boundary point together with the Euclidean distance to the boundary.
struct Projection {
  CPoint point;
  double depth = 0.0;
};

namespace detail {

// Radius R(phi) of the egg profile curve r1^2 + r2^(2m) = 1 along direction (cos, sin).
inline double egg_profile_radius(int m, double c, double s) {
  double r = 1.0;
  for (int it = 0; it < 60; ++it) {
    const double rs = r * s;
    const double g = (r * c) * (r * c) + std::pow(rs, 2 * m) - 1.0;
    const double dg = 2.0 * r * c * c + (s > 0 ? 2.0 * m * std::pow(rs, 2 * m - 1) * s : 0.0);
    const double step = g / dg;
    r -= step;
    if (std::abs(step) < 1e-16 * r) break;
  }
  return r;
}

inline double egg_profile_dist_sq(int m, double a1, double a2, double phi) {
  const double c = std::cos(phi), s = std::sin(phi);
  const double r = egg_profile_radius(m, c, s);
  const double d1 = a1 - r * c, d2 = a2 - r * s;
  return d1 * d1 + d2 * d2;
}

inline cplx unit_phase(cplx z) {
  const double a = std::abs(z);
  return a > 0.0 ? z / a : cplx(1.0, 0.0);
}

}  // namespace detail

/// Nearest boundary point without the tubular-neighbourhood check.
inline Projection nearest_boundary_point(const ModelDomain& dom, const CPoint& z) {
  if (dom.is_ball()) {
    const double r = z.norm();
    if (r == 0.0)
      throw Error(ErrorCode::OutsideTubularNeighborhood, "the ball centre has no unique nearest boundary point");
    return Projection{(1.0 / r) * z, 1.0 - r};
  }
  if (defining_function(dom, z) > 1e-12)
    throw Error(ErrorCode::InvalidArgument, "egg projection requires a point of the closed domain");

  // Reinhardt symmetry: the nearest point keeps the phases of z, so only the
  // profile curve in the (|z1|, |z2|) quadrant has to be searched.
  const double a1 = std::abs(z[0]), a2 = std::abs(z[1]);
  const int m = dom.m;
  constexpr int kScan = 128;
  const double h = 0.5 * kPi / kScan;
  int best = 0;
  double best_val = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= kScan; ++i) {
    const double v = detail::egg_profile_dist_sq(m, a1, a2, i * h);
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }
  double lo = std::max(0.0, (best - 1) * h), hi = std::min(0.5 * kPi, (best + 1) * h);
  constexpr double kGolden = 0.61803398874989484820;
  double x1 = hi - kGolden * (hi - lo), x2 = lo + kGolden * (hi - lo);
  double f1 = detail::egg_profile_dist_sq(m, a1, a2, x1), f2 = detail::egg_profile_dist_sq(m, a1, a2, x2);
  int it = 0;
  for (; it < 100 && hi - lo > 1e-15; ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kGolden * (hi - lo);
      f1 = detail::egg_profile_dist_sq(m, a1, a2, x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kGolden * (hi - lo);
      f2 = detail::egg_profile_dist_sq(m, a1, a2, x2);
    }
  }
  if (hi - lo > 1e-12) throw Error(ErrorCode::NoConvergence, "egg projection did not converge in 100 steps");
  const double phi = 0.5 * (lo + hi);
  const double c = std::cos(phi), s = std::sin(phi);
  const double r = detail::egg_profile_radius(m, c, s);
  const CPoint q(r * c * detail::unit_phase(z[0]), r * s * detail::unit_phase(z[1]));
  return Projection{q, std::sqrt(detail::egg_profile_dist_sq(m, a1, a2, phi))};
}

inline Projection boundary_projection(const ModelDomain& dom, const CPoint& z) {
  Projection p = nearest_boundary_point(dom, z);
  if (p.depth >= dom.eps0)
    throw Error(ErrorCode::OutsideTubularNeighborhood,
                "distance " + std::to_string(p.depth) + " to the boundary is not below eps0");
  return p;
}

/// Outward unit normal at a boundary point, as a complex vector.
inline CPoint outward_normal(const ModelDomain& dom, const CPoint& q) {
  if (dom.is_ball()) return (1.0 / q.norm()) * q;
  CPoint g(q[0], static_cast<double>(dom.m) * std::pow(std::norm(q[1]), dom.m - 1) * q[1]);
  return (1.0 / g.norm()) * g;
}

/// Unit complex-tangential direction of the egg at q (orthogonal to the normal).
inline CPoint egg_tangent(const ModelDomain& dom, const CPoint& q) {
  const CPoint nu = outward_normal(dom, q);
  return CPoint(-std::conj(nu[1]), std::conj(nu[0]));
}

inline void require_on_boundary(const ModelDomain& dom, const CPoint& q, double tol) {
  if (std::abs(defining_function(dom, q)) > tol)
    throw Error(ErrorCode::NotOnBoundary, "point is not on the boundary within tolerance");
}

/// max over |s| = t of |rho(q + s e) - rho(q)| along the egg tangent at q.
/// The tangent line lies outside the convex egg, so the restriction is a
/// nonnegative subharmonic function and its disc maximum sits on the circle.
inline double egg_tangent_oscillation(const ModelDomain& dom, const CPoint& q, double t) {
  if (t <= 0.0) return 0.0;
  const CPoint e = egg_tangent(dom, q);
  const double rho_q = defining_function(dom, q);
  auto eval = [&](double angle) {
    const cplx s = std::polar(t, angle);
    return std::abs(defining_function(dom, q + s * e) - rho_q);
  };
  constexpr int kAngles = 48;
  const double h = 2.0 * kPi / kAngles;
  int best = 0;
  double best_val = -1.0;
  for (int i = 0; i < kAngles; ++i) {
    const double v = eval(i * h);
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  double lo = (best - 1) * h, hi = (best + 1) * h;
  constexpr double kGolden = 0.61803398874989484820;
  for (int it = 0; it < 40; ++it) {
    const double x1 = hi - kGolden * (hi - lo), x2 = lo + kGolden * (hi - lo);
    if (eval(x1) > eval(x2)) hi = x2;
    else lo = x1;
  }
  return std::max(best_val, eval(0.5 * (lo + hi)));
}

inline double lambda_scaling(const ModelDomain& dom, const CPoint& /*q*/, double delta) {
  if (!dom.is_ball()) throw Error(ErrorCode::WrongDomainKind, "Lambda(q,delta) is defined for the ball only");
  if (!(delta > 0.0)) throw Error(ErrorCode::InvalidArgument, "delta must be positive");
  return delta * delta;
}

/// McNeal polydisc radius tau_j(q, delta) on the egg. j = 1 is the normal
/// direction; j = 2 the complex tangent, found by bisection.
inline double tau_scaling(const ModelDomain& dom, const CPoint& q, double delta, int j) {
  if (dom.is_ball()) throw Error(ErrorCode::WrongDomainKind, "tau_j is defined for the egg only");
  if (!(delta > 0.0 && delta <= 1.0)) throw Error(ErrorCode::InvalidArgument, "delta must lie in (0,1]");
  if (j == 1) return delta;
  if (j != 2) throw Error(ErrorCode::InvalidArgument, "egg coordinate index must be 1 or 2");
  double lo = 0.0, hi = 2.0;
  if (egg_tangent_oscillation(dom, q, hi) <= delta)
    throw Error(ErrorCode::BisectionFailure, "tau_2 bracket [0,2] does not contain the crossing");
  for (int it = 0; it < 200 && hi - lo > 1e-8 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (egg_tangent_oscillation(dom, q, mid) <= delta) lo = mid;
    else hi = mid;
  }
  if (hi - lo > 1e-8 * hi) throw Error(ErrorCode::BisectionFailure, "tau_2 bisection did not reach tolerance");
  return 0.5 * (lo + hi);
}

namespace detail {

inline bool lex_less(const CPoint& a, const CPoint& b) {
  for (int i = 0; i < a.dim; ++i) {
    if (a[i].real() != b[i].real()) return a[i].real() < b[i].real();
    if (a[i].imag() != b[i].imag()) return a[i].imag() < b[i].imag();
  }
  return false;
}

}  // namespace detail

/// 1 - <zeta, eta> for unit vectors, written as <zeta, zeta - eta> to avoid
/// cancellation when the points are close.
inline cplx ball_gap(const CPoint& zeta, const CPoint& eta) {
  cplx acc = 0.0;
  for (int i = 0; i < zeta.dim; ++i) acc += zeta[i] * std::conj(zeta[i] - eta[i]);
  return acc;
}

/// Directed egg distance inf{delta : eta in D(zeta, delta)}.
inline double egg_directed_metric(const ModelDomain& dom, const CPoint& zeta, const CPoint& eta) {
  const CPoint v = eta - zeta;
  const double normal_part = std::abs(hermitian(v, outward_normal(dom, zeta)));
  const double tangent_part = std::abs(hermitian(v, egg_tangent(dom, zeta)));
  return std::max(normal_part, egg_tangent_oscillation(dom, zeta, tangent_part));
}

/// Quasi-metric on the boundary: |1 - <zeta, eta>|^(1/2) on the ball, the
/// symmetrised polydisc distance on the egg.
inline double quasi_metric(const ModelDomain& dom, const CPoint& zeta, const CPoint& eta, double tol = 1e-9) {
  require_on_boundary(dom, zeta, tol);
  require_on_boundary(dom, eta, tol);
  if (dom.is_ball()) {
    const bool swap = detail::lex_less(eta, zeta);
    const cplx gap = swap ? ball_gap(eta, zeta) : ball_gap(zeta, eta);
    return std::sqrt(std::abs(gap));
  }
  return std::max(egg_directed_metric(dom, zeta, eta), egg_directed_metric(dom, eta, zeta));
}

/// Height of the tent over a boundary ball of radius delta: Lambda = delta^2
/// on the ball, delta on the egg.
inline double tent_height(const ModelDomain& dom, double delta) { return dom.is_ball() ? delta * delta : delta; }

/// Tent membership from an already computed projection.
inline bool tent_contains(const ModelDomain& dom, const CPoint& proj, double depth, const CPoint& zeta, double delta,
                          double tol = 1e-9) {
  if (delta >= dom.delta_global) return true;
  if (depth >= dom.eps0) return false;
  return depth <= tent_height(dom, delta) && quasi_metric(dom, proj, zeta, tol) < delta;
}

inline bool tent_membership(const ModelDomain& dom, const CPoint& z, const CPoint& zeta, double delta) {
  if (!(delta > 0.0)) throw Error(ErrorCode::InvalidArgument, "delta must be positive");
  if (delta >= dom.delta_global) return true;
  const Projection p = boundary_projection(dom, z);
  return tent_contains(dom, p.point, p.depth, zeta, delta);
}

}  // namespace bergman
