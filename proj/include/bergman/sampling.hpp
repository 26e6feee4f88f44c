#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "bergman/core.hpp"
#include "bergman/geometry.hpp"
#include "bergman/parallel.hpp"
#include "bergman/quadrature.hpp"

namespace bergman {

inline constexpr std::size_t kNoIndex = std::numeric_limits<std::size_t>::max();

struct InteriorSample {
  CPoint z;
  double weight = 0.0;  // dV
  CPoint proj;          // nearest boundary point (valid when has_proj)
  double depth = 0.0;   // distance to the boundary, stored exactly
  bool has_proj = false;
  bool in_shell = false;  // depth < eps0
};

struct BoundarySample {
  CPoint q;
  double weight = 0.0;  // surface measure
};

/// Geometrically graded sample cluster around a singular point of a weight.
/// Supported on the disc (ball n = 1) only.
struct GradedRefinement {
  enum class Kind { InteriorPoint, BoundaryPoint };
  Kind kind = Kind::InteriorPoint;
  CPoint center;
  double radius = 0.1;  // Euclidean radius (interior) or half-width of the (angle, depth) box (boundary)
  double min_scale = 1e-12;
  double ratio = 0.5;
  int angular = 8;      // points per ring, interior kind
  int gauss_order = 2;  // Gauss points per rectangle side, boundary kind
};

struct SamplingOptions {
  std::size_t n_interior = 2000;
  std::size_t n_boundary = 1000;
  std::uint64_t seed = 1;
  double boundary_tol = 1e-9;
  double volume_tol = 0.01;   // declared relative quadrature tolerance for V(Omega)
  double surface_tol = 0.01;  // and for mu(bOmega)
  double aliasing = 7.0;      // disc: ring of depth t carries about aliasing*(1-t)/t points
  double ball_depth_floor = 1e-3;  // ball n >= 2: shallowest graded ring depth
  std::vector<GradedRefinement> refinements;
};

/// Finite quadrature discretisation of a model domain and its boundary.
/// Immutable once built.
struct SampleCloud {
  ModelDomain domain;
  std::vector<InteriorSample> interior;
  std::vector<BoundarySample> boundary;
  std::vector<std::size_t> anchor;  // nearest boundary sample of each in-shell interior sample
  std::uint64_t seed = 0;
  double boundary_tol = 1e-9;
  double volume_tol = 0.01;
  double surface_tol = 0.01;

  std::size_t size() const { return interior.size(); }

  double interior_volume() const {
    double acc = 0.0;
    for (const auto& s : interior) acc += s.weight;
    return acc;
  }

  double boundary_measure() const {
    double acc = 0.0;
    for (const auto& b : boundary) acc += b.weight;
    return acc;
  }

  double metric(std::size_t a, std::size_t b) const {
    return quasi_metric(domain, boundary[a].q, boundary[b].q, boundary_tol);
  }

  /// Smallest resolved interior scale, in quasi-metric units.
  double interior_resolution() const {
    double t = std::numeric_limits<double>::infinity();
    for (const auto& s : interior)
      if (s.in_shell) t = std::min(t, s.depth);
    if (!std::isfinite(t)) return 1.0;
    return domain.is_ball() ? std::sqrt(t) : t;
  }
};

namespace detail {

inline InteriorSample make_interior(const ModelDomain& dom, const CPoint& z, double weight) {
  InteriorSample s;
  s.z = z;
  s.weight = weight;
  if (dom.is_ball() && z.norm() == 0.0) return s;
  const Projection p = nearest_boundary_point(dom, z);
  s.proj = p.point;
  s.depth = p.depth;
  s.has_proj = true;
  s.in_shell = p.depth < dom.eps0;
  return s;
}

inline InteriorSample make_interior_polar(const ModelDomain& dom, const CPoint& boundary_point, double depth,
                                          double weight) {
  InteriorSample s;
  s.z = (1.0 - depth) * boundary_point;
  s.weight = weight;
  s.proj = boundary_point;
  s.depth = depth;
  s.has_proj = true;
  s.in_shell = depth < dom.eps0;
  return s;
}

inline CPoint random_sphere_point(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  CPoint p(n);
  for (;;) {
    for (int i = 0; i < n; ++i) p[i] = cplx(gauss(rng), gauss(rng));
    const double r = p.norm();
    if (r > 1e-12) return (1.0 / r) * p;
  }
}

struct Ring {
  double depth;
  double weight;  // measure of the ring shell
};

// Radial rule in the depth variable: Gauss-Legendre in log(depth) on
// [floor, 1] plus a midpoint strip for (0, floor).
inline std::vector<Ring> depth_rings(int n, double floor, int order) {
  std::vector<Ring> rings;
  const double sphere = ModelDomain{DomainKind::Ball, n, 0, 0.5, 0.4}.ball_boundary_area();
  const GaussRule g = gauss_legendre(order, std::log(floor), 0.0);
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    const double t = std::exp(g.nodes[i]);
    rings.push_back({t, sphere * g.weights[i] * t * std::pow(1.0 - t, 2 * n - 1)});
  }
  const double t = 0.5 * floor;
  // exact shell volume of (1-floor, 1)
  rings.push_back({t, sphere / (2.0 * n) * (1.0 - std::pow(1.0 - floor, 2 * n))});
  return rings;
}

inline std::size_t disc_ring_count(double depth, double aliasing) {
  return std::max<std::size_t>(8, static_cast<std::size_t>(std::ceil(aliasing * (1.0 - depth) / depth)));
}

inline std::vector<InteriorSample> disc_bulk(const ModelDomain& dom, const SamplingOptions& opt, std::mt19937_64& rng) {
  constexpr int kOrder = 24;
  auto total = [&](double floor) {
    std::size_t acc = 0;
    for (const Ring& r : depth_rings(1, floor, kOrder)) acc += disc_ring_count(r.depth, opt.aliasing);
    return acc;
  };
  double lo = std::log(1e-7), hi = std::log(0.5);
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (total(std::exp(mid)) > opt.n_interior) lo = mid;
    else hi = mid;
  }
  const double floor = std::exp(hi);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<InteriorSample> out;
  for (const Ring& ring : depth_rings(1, floor, kOrder)) {
    const std::size_t count = disc_ring_count(ring.depth, opt.aliasing);
    const double offset = unif(rng);
    for (std::size_t k = 0; k < count; ++k) {
      const double angle = 2.0 * kPi * (static_cast<double>(k) + offset) / static_cast<double>(count);
      out.push_back(make_interior_polar(dom, CPoint(std::polar(1.0, angle)), ring.depth,
                                        ring.weight / static_cast<double>(count)));
    }
  }
  return out;
}

inline std::vector<InteriorSample> ball_bulk(const ModelDomain& dom, const SamplingOptions& opt, std::mt19937_64& rng) {
  constexpr int kOrder = 16;
  const auto rings = depth_rings(dom.n, opt.ball_depth_floor, kOrder);
  std::vector<double> share(rings.size());
  double share_sum = 0.0;
  for (std::size_t i = 0; i < rings.size(); ++i) {
    share[i] = rings[i].weight / rings[i].depth;
    share_sum += share[i];
  }
  std::vector<InteriorSample> out;
  for (std::size_t i = 0; i < rings.size(); ++i) {
    const auto count = std::max<std::size_t>(
        4, static_cast<std::size_t>(std::llround(static_cast<double>(opt.n_interior) * share[i] / share_sum)));
    for (std::size_t k = 0; k < count; ++k)
      out.push_back(make_interior_polar(dom, random_sphere_point(dom.n, rng), rings[i].depth,
                                        rings[i].weight / static_cast<double>(count)));
  }
  return out;
}

inline std::vector<InteriorSample> egg_bulk(const ModelDomain& dom, const SamplingOptions& opt, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::vector<CPoint> pts;
  while (pts.size() < opt.n_interior) {
    const CPoint z(cplx(unif(rng), unif(rng)), cplx(unif(rng), unif(rng)));
    if (defining_function(dom, z) < 0.0) pts.push_back(z);
  }
  std::vector<InteriorSample> out(pts.size());
  const double w = dom.volume() / static_cast<double>(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) { out[i] = make_interior(dom, pts[i], w); });
  return out;
}

// Smooth step: 1 on [0, 1/2], 0 on [1, inf).
inline double cutoff(double x) {
  if (x <= 0.5) return 1.0;
  if (x >= 1.0) return 0.0;
  const double u = 2.0 * x - 1.0;
  const double a = std::exp(-1.0 / u), b = std::exp(-1.0 / (1.0 - u));
  return b / (a + b);
}

// The refinement rule carries chi * dV and the existing samples (1 - chi) * dV.
template <class Chi>
void blend(std::vector<InteriorSample>& samples, std::vector<InteriorSample>& added, Chi&& chi) {
  for (auto& s : samples) s.weight *= 1.0 - chi(s);
  std::erase_if(samples, [](const InteriorSample& s) { return !(s.weight > 0.0); });
  for (auto& s : added) s.weight *= chi(s);
  std::erase_if(added, [](const InteriorSample& s) { return !(s.weight > 0.0); });
  samples.insert(samples.end(), added.begin(), added.end());
}

inline void apply_interior_refinement(const ModelDomain& dom, const GradedRefinement& ref,
                                      std::vector<InteriorSample>& samples, std::mt19937_64& rng) {
  if (ref.center.norm() + ref.radius >= 1.0)
    throw Error(ErrorCode::InvalidArgument, "interior refinement disc must lie inside the domain");
  const GaussRule g = gauss_legendre(2, 0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<InteriorSample> added;
  for (double outer = ref.radius; outer > ref.min_scale; outer *= ref.ratio) {
    const double lo = std::log(outer * ref.ratio), hi = std::log(outer);
    for (std::size_t q = 0; q < g.nodes.size(); ++q) {
      const double r = std::exp(lo + (hi - lo) * g.nodes[q]);
      const double ring_area = 2.0 * kPi * r * r * (hi - lo) * g.weights[q];
      const double offset = unif(rng);
      for (int k = 0; k < ref.angular; ++k) {
        const double angle = 2.0 * kPi * (k + offset) / ref.angular;
        added.push_back(make_interior(dom, ref.center + CPoint(std::polar(r, angle)), ring_area / ref.angular));
      }
    }
  }
  blend(samples, added, [&](const InteriorSample& s) { return cutoff(distance(s.z, ref.center) / ref.radius); });
}

inline void apply_boundary_refinement(const ModelDomain& dom, const GradedRefinement& ref,
                                      std::vector<InteriorSample>& samples) {
  const cplx base = detail::unit_phase(ref.center[0]);
  const double box = ref.radius;
  const int order = std::max(1, ref.gauss_order);
  std::vector<InteriorSample> added;
  auto add_rect = [&](double a0, double a1, double t0, double t1) {
    const GaussRule ga = gauss_legendre(order, a0, a1);
    const GaussRule gt = gauss_legendre(order, t0, t1);
    for (std::size_t i = 0; i < ga.nodes.size(); ++i)
      for (std::size_t j = 0; j < gt.nodes.size(); ++j) {
        const double t = gt.nodes[j];
        const double w = ga.weights[i] * gt.weights[j] * (1.0 - t);
        added.push_back(make_interior_polar(dom, CPoint(base * std::polar(1.0, ga.nodes[i])), t, w));
      }
  };
  for (double outer = box; outer > ref.min_scale; outer *= ref.ratio) {
    const double inner = outer * ref.ratio;
    add_rect(-outer, outer, inner, outer);
    add_rect(-outer, -inner, 0.0, inner);
    add_rect(inner, outer, 0.0, inner);
  }
  blend(samples, added, [&](const InteriorSample& s) {
    if (!s.has_proj) return 0.0;
    return cutoff(std::abs(std::arg(s.proj[0] / base)) / box) * cutoff(s.depth / box);
  });
}

inline std::vector<std::size_t> compute_anchors(const SampleCloud& cloud) {
  std::vector<std::size_t> anchor(cloud.interior.size(), kNoIndex);
  const auto& dom = cloud.domain;
  if (cloud.boundary.empty()) return anchor;
  if (dom.is_ball() && dom.n == 1) {
    // sorted angles turn the nearest-neighbour search into a binary search
    std::vector<std::pair<double, std::size_t>> angles;
    for (std::size_t b = 0; b < cloud.boundary.size(); ++b) angles.emplace_back(std::arg(cloud.boundary[b].q[0]), b);
    std::sort(angles.begin(), angles.end());
    parallel_for(cloud.interior.size(), [&](std::size_t i) {
      const auto& s = cloud.interior[i];
      if (!s.in_shell) return;
      const double a = std::arg(s.proj[0]);
      auto it = std::lower_bound(angles.begin(), angles.end(), std::make_pair(a, std::size_t{0}));
      const std::size_t k = static_cast<std::size_t>(it - angles.begin());
      const std::size_t len = angles.size();
      std::size_t best = kNoIndex;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t off : {len - 1, std::size_t{0}, std::size_t{1}}) {
        const std::size_t b = angles[(k + off) % len].second;
        const double d = quasi_metric(dom, s.proj, cloud.boundary[b].q, cloud.boundary_tol);
        if (d < best_d || (d == best_d && b < best)) {
          best_d = d;
          best = b;
        }
      }
      anchor[i] = best;
    });
    return anchor;
  }
  const bool prefilter = !dom.is_ball();
  parallel_for(cloud.interior.size(), [&](std::size_t i) {
    const auto& s = cloud.interior[i];
    if (!s.in_shell) return;
    std::vector<std::size_t> candidates(cloud.boundary.size());
    std::iota(candidates.begin(), candidates.end(), std::size_t{0});
    if (prefilter && candidates.size() > 16) {
      // the polydisc metric is expensive; shortlist by Euclidean distance
      std::partial_sort(candidates.begin(), candidates.begin() + 16, candidates.end(),
                        [&](std::size_t a, std::size_t b) {
                          const double da = distance(s.proj, cloud.boundary[a].q);
                          const double db = distance(s.proj, cloud.boundary[b].q);
                          return da < db || (da == db && a < b);
                        });
      candidates.resize(16);
      std::sort(candidates.begin(), candidates.end());
    }
    std::size_t best = kNoIndex;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t b : candidates) {
      const double d = quasi_metric(dom, s.proj, cloud.boundary[b].q, cloud.boundary_tol);
      if (d < best_d) {
        best_d = d;
        best = b;
      }
    }
    anchor[i] = best;
  });
  return anchor;
}

}  // namespace detail

/// Quadrature sampling of the interior and the boundary; deterministic per seed.
inline SampleCloud sample(const ModelDomain& dom, const SamplingOptions& opt) {
  if (opt.n_interior < 1 || opt.n_boundary < 1)
    throw Error(ErrorCode::InvalidArgument, "sample counts must be at least 1");
  SampleCloud cloud;
  cloud.domain = dom;
  cloud.seed = opt.seed;
  cloud.boundary_tol = opt.boundary_tol;
  cloud.volume_tol = opt.volume_tol;
  cloud.surface_tol = opt.surface_tol;
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  if (dom.is_ball() && dom.n == 1) {
    const double offset = unif(rng);
    const double w = 2.0 * kPi / static_cast<double>(opt.n_boundary);
    for (std::size_t k = 0; k < opt.n_boundary; ++k)
      cloud.boundary.push_back(
          {CPoint(std::polar(1.0, 2.0 * kPi * (static_cast<double>(k) + offset) / static_cast<double>(opt.n_boundary))), w});
    cloud.interior = detail::disc_bulk(dom, opt, rng);
  } else if (dom.is_ball()) {
    const double w = dom.ball_boundary_area() / static_cast<double>(opt.n_boundary);
    for (std::size_t k = 0; k < opt.n_boundary; ++k) cloud.boundary.push_back({detail::random_sphere_point(dom.n, rng), w});
    cloud.interior = detail::ball_bulk(dom, opt, rng);
  } else {
    // boundary parametrised by (z2, arg z1); surface density sqrt(R^2 + m^2 |z2|^(4m-2))
    const int m = dom.m;
    std::vector<std::pair<CPoint, double>> raw;
    std::uniform_real_distribution<double> sym(-1.0, 1.0);
    while (raw.size() < opt.n_boundary) {
      const cplx w2(sym(rng), sym(rng));
      const double rr = std::abs(w2);
      if (rr >= 1.0) continue;
      const double alpha = 2.0 * kPi * unif(rng);
      const double big_r_sq = 1.0 - std::pow(rr, 2 * m);
      const double dens = std::sqrt(big_r_sq + m * m * std::pow(rr, 4 * m - 2));
      raw.emplace_back(CPoint(std::polar(std::sqrt(big_r_sq), alpha), w2), dens);
    }
    for (auto& [q, dens] : raw)
      cloud.boundary.push_back({q, 2.0 * kPi * kPi * dens / static_cast<double>(opt.n_boundary)});
    cloud.interior = detail::egg_bulk(dom, opt, rng);
  }

  for (const auto& ref : opt.refinements) {
    if (!(dom.is_ball() && dom.n == 1))
      throw Error(ErrorCode::DomainKindUnsupported, "graded refinement is implemented for the disc only");
    if (!(ref.ratio > 0.0 && ref.ratio < 1.0) || !(ref.min_scale > 0.0))
      throw Error(ErrorCode::InvalidArgument, "refinement needs ratio in (0,1) and min_scale > 0");
    if (ref.kind == GradedRefinement::Kind::InteriorPoint) detail::apply_interior_refinement(dom, ref, cloud.interior, rng);
    else detail::apply_boundary_refinement(dom, ref, cloud.interior);
  }
  cloud.anchor = detail::compute_anchors(cloud);
  return cloud;
}

inline SampleCloud sample(const ModelDomain& dom, std::size_t n_interior, std::size_t n_boundary, std::uint64_t seed) {
  SamplingOptions opt;
  opt.n_interior = n_interior;
  opt.n_boundary = n_boundary;
  opt.seed = seed;
  return sample(dom, opt);
}

/// Largest nearest-neighbour quasi-distance among boundary samples.
inline double boundary_resolution(const SampleCloud& cloud) {
  const std::size_t nb = cloud.boundary.size();
  if (nb < 2) return 0.0;
  std::vector<double> nearest(nb, std::numeric_limits<double>::infinity());
  parallel_for(nb, [&](std::size_t a) {
    for (std::size_t b = 0; b < nb; ++b)
      if (a != b) nearest[a] = std::min(nearest[a], cloud.metric(a, b));
  });
  return *std::max_element(nearest.begin(), nearest.end());
}

}  // namespace bergman
