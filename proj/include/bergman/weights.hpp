#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "bergman/geometry.hpp"
#include "bergman/quadrature.hpp"
#include "bergman/sampling.hpp"
#include "bergman/tents.hpp"

namespace bergman {

struct Weight {
  std::vector<double> values;
  std::string description;
};

/// sigma with exponent p and dual nu = sigma^(1/(1-p)).
struct WeightPair {
  double p = 2.0;
  Weight sigma;
  Weight nu;

  double conjugate() const { return p / (p - 1.0); }
};

inline void validate_weight(const Weight& w) {
  for (double v : w.values)
    if (!(v > 0.0) || !std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "weight values must be positive and finite");
}

inline WeightPair make_pair(double p, Weight sigma) {
  if (!(p > 1.0) || !std::isfinite(p)) throw Error(ErrorCode::InvalidArgument, "p must lie in (1, inf)");
  validate_weight(sigma);
  WeightPair pair;
  pair.p = p;
  pair.nu.values.resize(sigma.values.size());
  const double e = 1.0 / (1.0 - p);
  for (std::size_t i = 0; i < sigma.values.size(); ++i) pair.nu.values[i] = std::pow(sigma.values[i], e);
  pair.nu.description = "dual(" + sigma.description + ")";
  pair.sigma = std::move(sigma);
  return pair;
}

/// (nu, p') as a pair in its own right.
inline WeightPair dual_pair(const WeightPair& pair) { return make_pair(pair.conjugate(), pair.nu); }

inline Weight constant_weight(const SampleCloud& cloud, double c = 1.0) {
  return {std::vector<double>(cloud.size(), c), "one"};
}

/// sigma = (1 - |z|^2)^alpha on the ball, (-rho)^alpha on the egg.
inline Weight power_weight(const SampleCloud& cloud, double alpha) {
  Weight w;
  w.values.resize(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto& s = cloud.interior[i];
    double base;
    if (cloud.domain.is_ball() && s.has_proj) base = s.depth * (2.0 - s.depth);  // 1 - |z|^2 without cancellation
    else if (cloud.domain.is_ball()) base = 1.0 - s.z.norm_sq();
    else base = -defining_function(cloud.domain, s.z);
    w.values[i] = std::pow(base, alpha);
  }
  w.description = "power:alpha=" + format_number(alpha);
  return w;
}

/// True when the power weight is expected to have infinite B_p on the ball.
inline bool power_weight_nonintegrable(double alpha, double p) { return alpha <= -1.0 || alpha >= p - 1.0; }

/// Pointwise weight from a function of (|z|, distance to the boundary).
inline Weight custom_weight(const SampleCloud& cloud, const std::function<double(double, double)>& fn,
                            std::string description) {
  Weight w;
  w.values.resize(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto& s = cloud.interior[i];
    const double depth = s.has_proj ? s.depth : -defining_function(cloud.domain, s.z);
    w.values[i] = fn(s.z.norm(), depth);
  }
  w.description = std::move(description);
  validate_weight(w);
  return w;
}

/// Mean of |f| over `region` against dV, or against sigma dV when given.
inline double average(const SampleCloud& cloud, const std::vector<double>& f, const std::vector<std::size_t>& region,
                      const Weight* weight = nullptr) {
  double num = 0.0, den = 0.0;
  for (std::size_t i : region) {
    const double w = cloud.interior[i].weight * (weight ? weight->values[i] : 1.0);
    num += std::abs(f[i]) * w;
    den += w;
  }
  if (region.empty() || !(den > 0.0)) throw Error(ErrorCode::EmptyRegion, "average over a region of zero measure");
  return num / den;
}

inline std::vector<std::size_t> all_samples(const SampleCloud& cloud) {
  std::vector<std::size_t> out(cloud.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = i;
  return out;
}

/// <sigma>_U <nu>_U^(p-1) with dV averages.
inline double bracket_product(const SampleCloud& cloud, const WeightPair& pair, const std::vector<std::size_t>& region) {
  double vol = 0.0, s = 0.0, n = 0.0;
  for (std::size_t i : region) {
    const double w = cloud.interior[i].weight;
    vol += w;
    s += pair.sigma.values[i] * w;
    n += pair.nu.values[i] * w;
  }
  if (region.empty() || !(vol > 0.0)) throw Error(ErrorCode::EmptyRegion, "bracket over a region of zero measure");
  return (s / vol) * std::pow(n / vol, pair.p - 1.0);
}

struct TentWitness {
  std::size_t system = kNoIndex;
  int level = -1;
  std::size_t cell = kNoIndex;
};

struct CharacteristicReport {
  double value = 0.0;
  double global_product = 0.0;  // <sigma>_Omega <nu>_Omega^(p-1)
  double global_term = 0.0;     // global_product^(1/p)
  double tent_sup = 0.0;        // sup over tents of the same product
  double tent_term = 0.0;       // p p' tent_sup^max(1, 1/(p-1))
  double exponent = 1.0;
  TentWitness witness;
  std::size_t tents_scanned = 0;
  std::size_t tents_skipped = 0;  // zero-volume tents
};

namespace detail {

inline void scan_tents(const SampleCloud& cloud, const WeightPair& pair, const std::vector<TentSystem>& tents,
                       CharacteristicReport& rep) {
  for (std::size_t l = 0; l < tents.size(); ++l)
    for (std::size_t k = 0; k < tents[l].tents.size(); ++k)
      for (const auto& tent : tents[l].tents[k]) {
        if (tent.members.empty() || !(tent.volume > 0.0)) {
          ++rep.tents_skipped;
          continue;
        }
        ++rep.tents_scanned;
        const double v = bracket_product(cloud, pair, tent.members);
        if (v > rep.tent_sup) {
          rep.tent_sup = v;
          rep.witness = {l, static_cast<int>(k), tent.cell};
        }
      }
}

}  // namespace detail

/// [sigma]_p over the dyadic tents of every system in the family.
inline CharacteristicReport characteristic_bracket(const SampleCloud& cloud, const WeightPair& pair,
                                                   const std::vector<TentSystem>& tents) {
  CharacteristicReport rep;
  const double p = pair.p;
  rep.global_product = bracket_product(cloud, pair, all_samples(cloud));
  rep.global_term = std::pow(rep.global_product, 1.0 / p);
  detail::scan_tents(cloud, pair, tents, rep);
  rep.exponent = std::max(1.0, 1.0 / (p - 1.0));
  rep.tent_term = p * pair.conjugate() * std::pow(rep.tent_sup, rep.exponent);
  rep.value = rep.global_term + rep.tent_term;
  return rep;
}

/// B_p: the larger of the global product and the tent supremum.
inline CharacteristicReport characteristic_Bp(const SampleCloud& cloud, const WeightPair& pair,
                                              const std::vector<TentSystem>& tents) {
  CharacteristicReport rep;
  rep.global_product = bracket_product(cloud, pair, all_samples(cloud));
  rep.global_term = rep.global_product;
  detail::scan_tents(cloud, pair, tents, rep);
  rep.tent_term = rep.tent_sup;
  rep.value = std::max(rep.global_product, rep.tent_sup);
  return rep;
}

/// Smallest delta with the sample inside the tent B#(apex, delta), found by
/// bisection in log(delta) on [floor, delta_global].
inline double tent_level(const ModelDomain& dom, const InteriorSample& s, const CPoint& apex, double floor,
                         double tol = 1e-9) {
  if (!s.has_proj || !s.in_shell) return dom.delta_global;
  auto inside = [&](double delta) { return tent_contains(dom, s.proj, s.depth, apex, delta, tol); };
  double lo = std::log(floor), hi = std::log(dom.delta_global);
  if (inside(floor)) return floor;
  for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (inside(std::exp(mid))) hi = mid;
    else lo = mid;
  }
  return std::exp(hi);
}

struct SharpOptions {
  CPoint apex = CPoint(cplx(1.0, 0.0));   // boundary point where sigma vanishes
  CPoint pole = CPoint(cplx(0.0, 0.0));   // interior point where sigma blows up
  double floor = 0.0;  // smallest resolvable tent level; 0 uses the cloud resolution
};

/// sigma(w) = h(w)^((p-1)(2+2n-2s)) / |w - pole|^(2n-2s) with h the tent level
/// of w over the apex.
inline WeightPair sharp_example_weight(const SampleCloud& cloud, double p, double s, const SharpOptions& opt) {
  const auto& dom = cloud.domain;
  if (!dom.is_ball()) throw Error(ErrorCode::DomainKindUnsupported, "the sharp example is built on the ball only");
  if (!(s > 0.0 && s <= 0.5)) throw Error(ErrorCode::InvalidArgument, "sharp exponent s must lie in (0, 0.5]");
  if (!(p > 1.0 && p <= 2.0)) throw Error(ErrorCode::InvalidArgument, "sharp example needs p in (1, 2]");
  require_on_boundary(dom, opt.apex, cloud.boundary_tol);
  if (!(1.0 - opt.pole.norm() > dom.eps0))
    throw Error(ErrorCode::InvalidArgument, "pole must lie outside the tubular shell");
  const int n = dom.n;
  const double h_exp = (p - 1.0) * (2.0 + 2.0 * n - 2.0 * s);
  const double l_exp = 2.0 * n - 2.0 * s;
  const double floor = opt.floor > 0.0 ? opt.floor : cloud.interior_resolution();
  Weight sigma;
  sigma.values.resize(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i)
    if (distance(cloud.interior[i].z, opt.pole) == 0.0)
      throw Error(ErrorCode::SingularSample, "an interior sample coincides with the pole");
  parallel_for(cloud.size(), [&](std::size_t i) {
    const auto& smp = cloud.interior[i];
    const double h = tent_level(dom, smp, opt.apex, floor, cloud.boundary_tol);
    sigma.values[i] = std::pow(h, h_exp) / std::pow(distance(smp.z, opt.pole), l_exp);
  });
  sigma.description = "sharp:s=" + format_number(s);
  return make_pair(p, std::move(sigma));
}

inline WeightPair sharp_example_weight(const SampleCloud& cloud, double p, double s) {
  return sharp_example_weight(cloud, p, s, SharpOptions{});
}

/// Samples inside the tent B#(apex, delta), from stored projections.
inline std::vector<std::size_t> tent_region(const SampleCloud& cloud, const CPoint& apex, double delta) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto& s = cloud.interior[i];
    if (delta >= cloud.domain.delta_global || (s.has_proj && tent_contains(cloud.domain, s.proj, s.depth, apex, delta, cloud.boundary_tol)))
      out.push_back(i);
  }
  return out;
}

/// Reference B_p of a radial weight on the disc from analytic tents
/// B#(1, delta), delta on a log grid up to delta_global. The weight is a
/// function of depth t = 1 - |z|. Averages use graded Gauss rules in t.
inline double radial_disc_Bp(const std::function<double(double)>& sigma_of_depth, double p, double delta_global,
                             int grid = 200, double delta_min = 1e-4) {
  const GaussRule g = gauss_legendre(12, 0.0, 1.0);
  const double e = 1.0 / (1.0 - p);
  // int_0^H f(t) (1-t) dt over dyadic pieces of [0, H]
  auto integrate = [&](double height, auto&& fn) {
    double acc = 0.0;
    double top = height;
    for (int j = 0; j < 80; ++j) {
      const double bottom = 0.5 * top;
      for (std::size_t q = 0; q < g.nodes.size(); ++q) {
        const double t = bottom + (top - bottom) * g.nodes[q];
        acc += (top - bottom) * g.weights[q] * fn(t) * (1.0 - t);
      }
      top = bottom;
    }
    return acc;
  };
  auto product = [&](double height) {
    const double vol = integrate(height, [](double) { return 1.0; });
    const double s = integrate(height, [&](double t) { return sigma_of_depth(t); });
    const double n = integrate(height, [&](double t) { return std::pow(sigma_of_depth(t), e); });
    return (s / vol) * std::pow(n / vol, p - 1.0);
  };
  // tents over an arc of a radial weight: the angular factor cancels
  double best = product(1.0);
  for (int i = 0; i < grid; ++i) {
    const double delta = delta_min * std::pow(delta_global / delta_min, (i + 0.5) / grid);
    best = std::max(best, product(std::min(delta * delta, 1.0)));
  }
  return best;
}

}  // namespace bergman
