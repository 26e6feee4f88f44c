#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "bergman/dyadic.hpp"
#include "bergman/geometry.hpp"
#include "bergman/sampling.hpp"

namespace bergman {

struct Tent {
  int level = 0;
  std::size_t cell = 0;              // index of the dyadic cell at `level`
  std::vector<std::size_t> members;  // sorted interior-sample indices
  double volume = 0.0;
};

struct Kube {
  int level = 0;
  std::size_t tent = 0;
  std::vector<std::size_t> members;
  double volume = 0.0;
  CPoint center;
};

/// Tents and kubes over one dyadic system.
struct TentSystem {
  std::vector<std::vector<Tent>> tents;  // [level][cell index]
  std::vector<std::vector<Kube>> kubes;  // [level][cell index]
  std::vector<std::vector<std::size_t>> tent_of;  // [level][interior sample] -> cell index or kNoIndex
  std::vector<std::size_t> residual;  // Omega minus the level-0 tents
  double residual_volume = 0.0;

  std::size_t levels() const { return tents.size(); }
};

namespace detail {

inline double tent_depth_limit(const ModelDomain& dom, double scale) {
  return std::min(tent_height(dom, scale), dom.eps0);
}

}  // namespace detail

/// Lift each cell to the interior samples whose anchor lies in the cell and
/// whose depth is below the tent height at the cell scale.
inline TentSystem build_tents(const DyadicSystem& sys, const SampleCloud& cloud) {
  TentSystem ts;
  const std::size_t levels = sys.levels.size();
  const std::size_t m = cloud.size();
  ts.tents.resize(levels);
  ts.tent_of.assign(levels, std::vector<std::size_t>(m, kNoIndex));
  for (std::size_t k = 0; k < levels; ++k) {
    auto& tents = ts.tents[k];
    tents.resize(sys.levels[k].size());
    for (std::size_t j = 0; j < tents.size(); ++j) {
      tents[j].level = static_cast<int>(k);
      tents[j].cell = j;
    }
    const double limit = detail::tent_depth_limit(cloud.domain, sys.scale(static_cast<int>(k)));
    for (std::size_t i = 0; i < m; ++i) {
      const auto& s = cloud.interior[i];
      if (!s.in_shell || cloud.anchor[i] == kNoIndex || !(s.depth < limit)) continue;
      const std::size_t j = sys.cell_of[k][cloud.anchor[i]];
      ts.tent_of[k][i] = j;
      tents[j].members.push_back(i);
      tents[j].volume += s.weight;
    }
  }
  for (std::size_t i = 0; i < m; ++i)
    if (levels == 0 || ts.tent_of[0][i] == kNoIndex) {
      ts.residual.push_back(i);
      ts.residual_volume += cloud.interior[i].weight;
    }
  return ts;
}

/// Kube = tent minus the tents of its children; center sits on the inward
/// normal at half the admissible tent height.
inline void build_kubes(TentSystem& ts, const DyadicSystem& sys, const SampleCloud& cloud) {
  const std::size_t levels = ts.tents.size();
  ts.kubes.assign(levels, {});
  std::vector<char> covered(cloud.size(), 0);
  for (std::size_t k = 0; k < levels; ++k) {
    const double half_height = 0.5 * detail::tent_depth_limit(cloud.domain, sys.scale(static_cast<int>(k)));
    auto& kubes = ts.kubes[k];
    kubes.resize(ts.tents[k].size());
    for (std::size_t j = 0; j < kubes.size(); ++j) {
      const Tent& tent = ts.tents[k][j];
      Kube& kube = kubes[j];
      kube.level = static_cast<int>(k);
      kube.tent = j;
      if (k + 1 < levels)
        for (std::size_t child : sys.levels[k][j].children)
          for (std::size_t i : ts.tents[k + 1][child].members) covered[i] = 1;
      for (std::size_t i : tent.members)
        if (!covered[i]) {
          kube.members.push_back(i);
          kube.volume += cloud.interior[i].weight;
        }
      if (k + 1 < levels)
        for (std::size_t child : sys.levels[k][j].children)
          for (std::size_t i : ts.tents[k + 1][child].members) covered[i] = 0;
      const CPoint& p = cloud.boundary[sys.levels[k][j].ref].q;
      kube.center = p - half_height * outward_normal(cloud.domain, p);
    }
  }
}

inline TentSystem build_tent_system(const DyadicSystem& sys, const SampleCloud& cloud) {
  TentSystem ts = build_tents(sys, cloud);
  build_kubes(ts, sys, cloud);
  return ts;
}

inline std::vector<TentSystem> build_tent_family(const AdjacentFamily& family, const SampleCloud& cloud) {
  std::vector<TentSystem> out;
  out.reserve(family.systems.size());
  for (const auto& sys : family.systems) out.push_back(build_tent_system(sys, cloud));
  return out;
}

/// Kubes together with the residual cover every interior sample exactly once.
inline bool check_kube_partition(const TentSystem& ts, std::size_t interior_count) {
  std::vector<int> hits(interior_count, 0);
  for (const auto& level : ts.kubes)
    for (const auto& kube : level)
      for (std::size_t i : kube.members) ++hits[i];
  for (std::size_t i : ts.residual) ++hits[i];
  return std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; });
}

/// Each tent sits inside the tent of its parent cell.
inline bool check_tent_nesting(const TentSystem& ts, const DyadicSystem& sys) {
  for (std::size_t k = 1; k < ts.tents.size(); ++k)
    for (const auto& tent : ts.tents[k]) {
      const auto& up = ts.tents[k - 1][sys.levels[k][tent.cell].parent].members;
      if (!std::includes(up.begin(), up.end(), tent.members.begin(), tent.members.end())) return false;
    }
  return true;
}

/// Smallest V(kube)/V(tent) over tents with positive volume.
inline double kube_volume_ratio(const TentSystem& ts) {
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < ts.tents.size(); ++k)
    for (std::size_t j = 0; j < ts.tents[k].size(); ++j)
      if (ts.tents[k][j].volume > 0.0) lo = std::min(lo, ts.kubes[k][j].volume / ts.tents[k][j].volume);
  return lo;
}

/// Mean tent volume per level, over tents with positive volume.
inline std::vector<double> mean_tent_volume(const TentSystem& ts) {
  std::vector<double> out;
  for (const auto& level : ts.tents) {
    double acc = 0.0;
    std::size_t count = 0;
    for (const auto& t : level)
      if (t.volume > 0.0) {
        acc += t.volume;
        ++count;
      }
    out.push_back(count ? acc / static_cast<double>(count) : 0.0);
  }
  return out;
}

struct TentSandwichReport {
  std::size_t trials = 0;
  std::size_t successes = 0;
  double threshold = 0.0;
  double worst_factor = 0.0;
  double success_rate() const { return trials ? static_cast<double>(successes) / static_cast<double>(trials) : 0.0; }
};

/// Random sampled tents B#(z, r) over anchors, sandwiched between a dyadic
/// tent inside and one containing it, across all systems. Omega itself is
/// the outer tent of last resort. A non-positive threshold defaults to
/// the volume ratio s^(2n+2) of one level step on the ball.
inline TentSandwichReport verify_tent_sandwich(const AdjacentFamily& family, const std::vector<TentSystem>& tents,
                                               const SampleCloud& cloud, std::size_t trials, std::uint64_t seed,
                                               double threshold = 0.0) {
  const auto& dom = cloud.domain;
  const std::size_t nb = cloud.boundary.size();
  const std::size_t m = cloud.size();
  const double s = family.systems.front().scale_ratio;
  TentSandwichReport rep;
  rep.trials = trials;
  rep.threshold = threshold > 0.0 ? threshold : std::pow(s, dom.is_ball() ? 2 * dom.n + 2 : 4);
  const double r_lo = 3.0 * std::max(boundary_resolution(cloud), cloud.interior_resolution());
  const double r_hi = dom.delta_global;
  const double total = cloud.interior_volume();

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, nb - 1);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<std::pair<std::size_t, double>> draws(trials);
  for (auto& d : draws) {
    d.first = pick(rng);
    d.second = r_lo * std::pow(r_hi / r_lo, unif(rng));
  }
  std::vector<double> factor(trials);
  parallel_for(trials, [&](std::size_t t) {
    const auto [z, r] = draws[t];
    std::vector<double> dist(nb);
    for (std::size_t x = 0; x < nb; ++x) dist[x] = x == z ? 0.0 : cloud.metric(z, x);
    const double height = tent_height(dom, r);
    std::vector<char> in(m, 0);
    std::size_t in_count = 0;
    double vol = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const auto& smp = cloud.interior[i];
      if (smp.in_shell && cloud.anchor[i] != kNoIndex && smp.depth <= height && dist[cloud.anchor[i]] < r) {
        in[i] = 1;
        ++in_count;
        vol += smp.weight;
      }
    }
    if (vol <= 0.0) {
      factor[t] = std::numeric_limits<double>::infinity();
      return;
    }
    double best_inner = std::numeric_limits<double>::infinity();
    double best_outer = total / vol;
    for (const auto& ts : tents)
      for (std::size_t k = 0; k < ts.tents.size(); ++k)
        for (const auto& tent : ts.tents[k]) {
          if (tent.volume <= 0.0) continue;
          bool inside = true;
          for (std::size_t i : tent.members)
            if (!in[i]) {
              inside = false;
              break;
            }
          if (inside) best_inner = std::min(best_inner, vol / tent.volume);
          if (tent.volume < vol) continue;
          std::size_t covered = 0;
          for (std::size_t i : tent.members) covered += static_cast<std::size_t>(in[i]);
          if (covered == in_count) best_outer = std::min(best_outer, tent.volume / vol);
        }
    factor[t] = std::max(best_inner, best_outer);
  });
  for (double f : factor) {
    rep.worst_factor = std::max(rep.worst_factor, f);
    if (f <= rep.threshold) ++rep.successes;
  }
  return rep;
}

struct LocalTentVolume {
  double volume = 0.0;
  double box_volume = 0.0;
  std::size_t hits = 0;
  std::size_t samples = 0;
};

/// Monte-Carlo volume of B#(apex, delta) from uniform draws in a box adapted
/// to the tent. Both model domains are convex, so the inward normal offset
/// spans [-box * height, 0]; the rotational part spans +-box * height and the
/// complex tangent a disc of radius box * tau_2 (box * delta on the ball).
inline LocalTentVolume local_tent_volume(const ModelDomain& dom, const CPoint& apex, double delta,
                                         std::size_t samples, std::uint64_t seed, double box = 2.0) {
  if (dom.is_ball() && dom.n != 2) throw Error(ErrorCode::DomainKindUnsupported, "local tent volume needs two complex dimensions");
  if (!(delta > 0.0 && delta < dom.delta_global))
    throw Error(ErrorCode::InvalidArgument, "delta must lie in (0, delta_global)");
  require_on_boundary(dom, apex, 1e-9);
  const CPoint nu = outward_normal(dom, apex);
  const CPoint e = CPoint(-std::conj(nu[1]), std::conj(nu[0]));
  const double r_normal = box * tent_height(dom, delta);
  const double r_tangent = box * (dom.is_ball() ? delta : tau_scaling(dom, apex, delta, 2));
  LocalTentVolume out;
  out.samples = samples;
  out.box_volume = 2.0 * r_normal * r_normal * kPi * r_tangent * r_tangent;
  std::vector<char> hit(samples, 0);
  std::vector<CPoint> draws(samples);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (auto& z : draws) {
    const cplx a(0.5 * r_normal * (unif(rng) - 1.0), r_normal * unif(rng));
    const double rad = r_tangent * std::sqrt(0.5 * (unif(rng) + 1.0));
    const cplx b = std::polar(rad, kPi * unif(rng));
    z = apex + a * nu + b * e;
  }
  parallel_for(samples, [&](std::size_t t) {
    const CPoint& z = draws[t];
    if (!(defining_function(dom, z) < 0.0)) return;
    const Projection p = nearest_boundary_point(dom, z);
    hit[t] = static_cast<char>(tent_contains(dom, p.point, p.depth, apex, delta));
  });
  for (char h : hit) out.hits += static_cast<std::size_t>(h);
  out.volume = out.box_volume * static_cast<double>(out.hits) / static_cast<double>(samples);
  return out;
}

}  // namespace bergman
