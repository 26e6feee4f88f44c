#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "bergman/core.hpp"
#include "bergman/parallel.hpp"
#include "bergman/sampling.hpp"

namespace bergman {

struct DyadicCell {
  int level = 0;
  std::size_t index = 0;
  std::size_t ref = 0;  // boundary-sample index of the reference point
  std::size_t parent = kNoIndex;  // index in level - 1
  std::vector<std::size_t> children;  // indices in level + 1
  std::vector<std::size_t> members;   // sorted boundary-sample indices
  double measure = 0.0;
};

struct DyadicSystem {
  double scale_ratio = 8.0;
  double top_scale = 0.8;
  int k_max = 3;
  std::uint64_t seed = 0;
  std::vector<std::vector<DyadicCell>> levels;
  std::vector<std::vector<std::size_t>> cell_of;  // [level][boundary sample] -> cell index

  double scale(int k) const { return top_scale * std::pow(scale_ratio, -k); }

  std::size_t cell_count() const {
    std::size_t acc = 0;
    for (const auto& l : levels) acc += l.size();
    return acc;
  }
};

struct AdjacentFamily {
  std::vector<DyadicSystem> systems;
};

namespace detail {

inline std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  return order;
}

// Greedy extension of `net` by points farther than `radius` from all chosen points.
inline void extend_net(const SampleCloud& cloud, std::vector<std::size_t>& net, double radius,
                       const std::vector<std::size_t>& order) {
  std::vector<char> chosen(cloud.boundary.size(), 0);
  for (std::size_t p : net) chosen[p] = 1;
  for (std::size_t cand : order) {
    if (chosen[cand]) continue;
    bool separated = true;
    for (std::size_t p : net)
      if (cloud.metric(cand, p) <= radius) {
        separated = false;
        break;
      }
    if (separated) {
      net.push_back(cand);
      chosen[cand] = 1;
    }
  }
}

// Nearest point of `refs` to `x`, ties to the smaller sample index.
inline std::size_t nearest_ref(const SampleCloud& cloud, std::size_t x, const std::vector<std::size_t>& refs) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < refs.size(); ++j) {
    const double d = refs[j] == x ? 0.0 : cloud.metric(x, refs[j]);
    if (d < best_d || (d == best_d && refs[j] < refs[best])) {
      best_d = d;
      best = j;
    }
  }
  return best;
}

}  // namespace detail

/// Greedy maximal radius-separated subset of the boundary samples, scanned in
/// seeded random order, with radius = delta * s^-k.
inline std::vector<std::size_t> build_net(const SampleCloud& cloud, int k, double s, double delta, std::uint64_t seed) {
  if (!(s > 1.0) || !(delta > 0.0)) throw Error(ErrorCode::InvalidArgument, "need s > 1 and delta > 0");
  std::vector<std::size_t> net;
  detail::extend_net(cloud, net, delta * std::pow(s, -k), detail::seeded_permutation(cloud.boundary.size(), seed));
  return net;
}

/// Nested nets, nearest-parent tree and deepest-level assignment.
/// With `strict`, refuses scales below the boundary-sample resolution.
inline DyadicSystem build_system(const SampleCloud& cloud, double s, double delta, int k_max, std::uint64_t seed,
                                 bool strict = false) {
  if (!(s > 1.0) || !(delta > 0.0) || k_max < 0)
    throw Error(ErrorCode::InvalidArgument, "need s > 1, delta > 0 and k_max >= 0");
  const std::size_t nb = cloud.boundary.size();
  DyadicSystem sys;
  sys.scale_ratio = s;
  sys.top_scale = delta;
  sys.k_max = k_max;
  sys.seed = seed;
  if (strict && sys.scale(k_max) <= boundary_resolution(cloud))
    throw Error(ErrorCode::ResolutionExceeded, "deepest dyadic scale is below the boundary-sample resolution");

  const auto order = detail::seeded_permutation(nb, seed);
  std::vector<std::vector<std::size_t>> nets(static_cast<std::size_t>(k_max) + 1);
  for (int k = 0; k <= k_max; ++k) {
    auto& net = nets[static_cast<std::size_t>(k)];
    if (k > 0) net = nets[static_cast<std::size_t>(k) - 1];
    detail::extend_net(cloud, net, sys.scale(k), order);
    std::sort(net.begin(), net.end());
  }

  sys.levels.resize(nets.size());
  for (std::size_t k = 0; k < nets.size(); ++k) {
    auto& cells = sys.levels[k];
    cells.resize(nets[k].size());
    for (std::size_t j = 0; j < cells.size(); ++j) {
      cells[j].level = static_cast<int>(k);
      cells[j].index = j;
      cells[j].ref = nets[k][j];
    }
    if (k == 0) continue;
    std::vector<std::size_t> parent(cells.size());
    parallel_for(cells.size(), [&](std::size_t j) { parent[j] = detail::nearest_ref(cloud, cells[j].ref, nets[k - 1]); });
    for (std::size_t j = 0; j < cells.size(); ++j) {
      cells[j].parent = parent[j];
      sys.levels[k - 1][parent[j]].children.push_back(j);
    }
  }

  sys.cell_of.assign(nets.size(), std::vector<std::size_t>(nb));
  auto& deepest = sys.cell_of.back();
  parallel_for(nb, [&](std::size_t x) { deepest[x] = detail::nearest_ref(cloud, x, nets.back()); });
  for (std::size_t k = nets.size() - 1; k-- > 0;)
    for (std::size_t x = 0; x < nb; ++x) sys.cell_of[k][x] = sys.levels[k + 1][sys.cell_of[k + 1][x]].parent;

  for (std::size_t k = 0; k < nets.size(); ++k)
    for (std::size_t x = 0; x < nb; ++x) {
      auto& cell = sys.levels[k][sys.cell_of[k][x]];
      cell.members.push_back(x);
      cell.measure += cloud.boundary[x].weight;
    }
  return sys;
}

/// Deepest level whose scale stays above the boundary-sample resolution,
/// capped at `k_max`; 0 when even the top scale is unresolved.
inline int resolved_depth(const SampleCloud& cloud, double s, double delta, int k_max) {
  const double res = boundary_resolution(cloud);
  int k = 0;
  while (k < k_max && delta * std::pow(s, -(k + 1)) > res) ++k;
  return k;
}

inline AdjacentFamily build_adjacent_family(const SampleCloud& cloud, double s, double delta, int k_max, int count,
                                            std::uint64_t base_seed) {
  if (count < 1) throw Error(ErrorCode::InvalidArgument, "an adjacent family needs at least one system");
  AdjacentFamily family;
  family.systems.resize(static_cast<std::size_t>(count));
  // nested parallelism is avoided: the per-system work is already parallel
  for (int l = 0; l < count; ++l)
    family.systems[static_cast<std::size_t>(l)] = build_system(cloud, s, delta, k_max, base_seed + static_cast<std::uint64_t>(l));
  return family;
}

/// Cells of each level are disjoint and cover all boundary samples.
inline bool check_partition(const DyadicSystem& sys, std::size_t boundary_count) {
  for (const auto& cells : sys.levels) {
    std::vector<int> hits(boundary_count, 0);
    for (const auto& c : cells)
      for (std::size_t m : c.members) {
        if (m >= boundary_count) return false;
        ++hits[m];
      }
    if (std::any_of(hits.begin(), hits.end(), [](int h) { return h != 1; })) return false;
  }
  return true;
}

/// Every cell lies inside exactly one cell of the previous level, namely its parent.
inline bool check_nesting(const DyadicSystem& sys) {
  for (std::size_t k = 1; k < sys.levels.size(); ++k)
    for (const auto& c : sys.levels[k]) {
      const auto& up = sys.levels[k - 1][c.parent].members;
      if (!std::includes(up.begin(), up.end(), c.members.begin(), c.members.end())) return false;
    }
  return true;
}

struct SandwichConstants {
  double inner = std::numeric_limits<double>::infinity();  // c
  double outer = 0.0;                                      // C
  double ratio() const { return outer / inner; }
};

/// Largest member distance and smallest non-member distance from the
/// reference point, in units of the level scale, over all cells.
inline SandwichConstants sandwich_constants(const DyadicSystem& sys, const SampleCloud& cloud) {
  SandwichConstants out;
  const std::size_t nb = cloud.boundary.size();
  for (std::size_t k = 0; k < sys.levels.size(); ++k) {
    const auto& cells = sys.levels[k];
    const double scale = sys.scale(static_cast<int>(k));
    std::vector<double> inner(cells.size()), outer(cells.size());
    parallel_for(cells.size(), [&](std::size_t j) {
      double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
      for (std::size_t x = 0; x < nb; ++x) {
        const double d = x == cells[j].ref ? 0.0 : cloud.metric(cells[j].ref, x);
        if (sys.cell_of[k][x] == j) hi = std::max(hi, d);
        else lo = std::min(lo, d);
      }
      inner[j] = lo / scale;
      outer[j] = hi / scale;
    });
    for (std::size_t j = 0; j < cells.size(); ++j) {
      out.inner = std::min(out.inner, inner[j]);
      out.outer = std::max(out.outer, outer[j]);
    }
  }
  return out;
}

/// Largest number of children of any cell, per level (last entry is 0).
inline std::vector<std::size_t> child_counts(const DyadicSystem& sys) {
  std::vector<std::size_t> out;
  for (const auto& cells : sys.levels) {
    std::size_t mx = 0;
    for (const auto& c : cells) mx = std::max(mx, c.children.size());
    out.push_back(mx);
  }
  return out;
}

/// Max over pairs of boundary samples of the quasi-metric.
inline double boundary_diameter(const SampleCloud& cloud) {
  const std::size_t nb = cloud.boundary.size();
  std::vector<double> far(nb, 0.0);
  parallel_for(nb, [&](std::size_t a) {
    for (std::size_t b = a + 1; b < nb; ++b) far[a] = std::max(far[a], cloud.metric(a, b));
  });
  return nb ? *std::max_element(far.begin(), far.end()) : 0.0;
}

struct AdjacencyReport {
  std::size_t trials = 0;
  std::size_t successes = 0;
  double threshold = 0.0;
  double worst_factor = 0.0;      // max over trials of the best achievable factor
  double worst_success_factor = 0.0;
  double success_rate() const { return trials ? static_cast<double>(successes) / static_cast<double>(trials) : 0.0; }
};

/// For random boundary balls B(z, r), look across all systems for a cell
/// inside B and a cell containing B whose measures are within `threshold`
/// of mu(B). The whole boundary counts as the root cell of every system.
/// A non-positive threshold defaults to s^(2n).
inline AdjacencyReport verify_adjacency(const AdjacentFamily& family, const SampleCloud& cloud, std::size_t trials,
                                        std::uint64_t seed, double threshold = 0.0) {
  if (trials < 1) throw Error(ErrorCode::InvalidArgument, "trials must be at least 1");
  if (family.systems.empty()) throw Error(ErrorCode::InvalidArgument, "empty adjacent family");
  const std::size_t nb = cloud.boundary.size();
  const double s = family.systems.front().scale_ratio;
  const int real_dim = cloud.domain.is_ball() ? 2 * cloud.domain.n : 4;
  AdjacencyReport rep;
  rep.trials = trials;
  rep.threshold = threshold > 0.0 ? threshold : std::pow(s, real_dim);
  const double r_lo = 3.0 * boundary_resolution(cloud);
  const double r_hi = boundary_diameter(cloud);
  const double total = cloud.boundary_measure();

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
    double ball = 0.0;
    for (std::size_t x = 0; x < nb; ++x) {
      dist[x] = x == z ? 0.0 : cloud.metric(z, x);
      if (dist[x] < r) ball += cloud.boundary[x].weight;
    }
    double best_inner = std::numeric_limits<double>::infinity();
    double best_outer = total / ball;
    for (const auto& sys : family.systems)
      for (std::size_t k = 0; k < sys.levels.size(); ++k) {
        const auto& cells = sys.levels[k];
        const std::size_t home = sys.cell_of[k][z];
        for (const auto& c : cells) {
          bool inside = true;
          for (std::size_t m : c.members)
            if (!(dist[m] < r)) {
              inside = false;
              break;
            }
          if (inside) best_inner = std::min(best_inner, ball / c.measure);
        }
        bool contains = true;
        for (std::size_t x = 0; x < nb && contains; ++x)
          if (dist[x] < r && sys.cell_of[k][x] != home) contains = false;
        if (contains) best_outer = std::min(best_outer, cells[home].measure / ball);
      }
    factor[t] = std::max(best_inner, best_outer);
  });
  for (double f : factor) {
    rep.worst_factor = std::max(rep.worst_factor, f);
    if (f <= rep.threshold) {
      ++rep.successes;
      rep.worst_success_factor = std::max(rep.worst_success_factor, f);
    }
  }
  return rep;
}

}  // namespace bergman
