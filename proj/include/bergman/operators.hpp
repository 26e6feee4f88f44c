#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "bergman/geometry.hpp"
#include "bergman/parallel.hpp"
#include "bergman/sampling.hpp"
#include "bergman/tents.hpp"
#include "bergman/weights.hpp"

namespace bergman {

namespace detail {

inline double ball_kernel_constant(int n) {
  double c = 1.0;
  for (int i = 2; i <= n; ++i) c *= i;
  return c / std::pow(kPi, n);
}

inline void require_ball(const ModelDomain& dom) {
  if (!dom.is_ball()) throw Error(ErrorCode::DomainKindUnsupported, "no closed-form Bergman kernel for this domain");
}

}  // namespace detail

/// K(z, w) = n!/pi^n (1 - <z, w>)^-(n+1) on the unit ball.
inline cplx bergman_kernel(const ModelDomain& dom, const CPoint& z, const CPoint& w) {
  detail::require_ball(dom);
  return detail::ball_kernel_constant(dom.n) * std::pow(1.0 - hermitian(z, w), -(dom.n + 1));
}

/// Kernel between two interior samples. With stored projections the gap
/// 1 - <z, w> is assembled from boundary and depth parts, which keeps full
/// relative accuracy for samples near the boundary.
inline cplx sample_kernel(const SampleCloud& cloud, std::size_t i, std::size_t j) {
  const auto& a = cloud.interior[i];
  const auto& b = cloud.interior[j];
  cplx gap;
  if (a.has_proj && b.has_proj) {
    const cplx inner = hermitian(a.proj, b.proj);
    gap = ball_gap(a.proj, b.proj) + (a.depth + b.depth - a.depth * b.depth) * inner;
  } else {
    gap = 1.0 - hermitian(a.z, b.z);
  }
  return detail::ball_kernel_constant(cloud.domain.n) * std::pow(gap, -(cloud.domain.n + 1));
}

/// Kernel over interior-sample pairs, dense up to `dense_limit` samples and
/// evaluated on the fly above that.
class KernelMatrix {
 public:
  explicit KernelMatrix(const SampleCloud& cloud, std::size_t dense_limit = 4000) : cloud_(&cloud) {
    detail::require_ball(cloud.domain);
    const std::size_t m = cloud.size();
    if (m <= dense_limit) {
      entries_.resize(m * m);
      parallel_for(m, [&](std::size_t i) {
        for (std::size_t j = 0; j < m; ++j) entries_[i * m + j] = sample_kernel(cloud, i, j);
      });
    }
  }

  std::size_t size() const { return cloud_->size(); }
  bool dense() const { return !entries_.empty(); }
  const SampleCloud& cloud() const { return *cloud_; }

  cplx entry(std::size_t i, std::size_t j) const {
    return dense() ? entries_[i * size() + j] : sample_kernel(*cloud_, i, j);
  }

  /// y_i = sum_j K_ij x_j
  std::vector<cplx> multiply(const std::vector<cplx>& x) const {
    const std::size_t m = size();
    std::vector<cplx> y(m);
    parallel_for(m, [&](std::size_t i) {
      cplx acc = 0.0;
      if (dense()) {
        const cplx* row = &entries_[i * m];
        for (std::size_t j = 0; j < m; ++j) acc += row[j] * x[j];
      } else {
        for (std::size_t j = 0; j < m; ++j) acc += sample_kernel(*cloud_, i, j) * x[j];
      }
      y[i] = acc;
    });
    return y;
  }

  /// y_i = sum_j |K_ij| x_j
  std::vector<double> multiply_abs(const std::vector<double>& x) const {
    const std::size_t m = size();
    std::vector<double> y(m);
    parallel_for(m, [&](std::size_t i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < m; ++j) acc += std::abs(entry(i, j)) * x[j];
      y[i] = acc;
    });
    return y;
  }

  double hermitian_defect() const {
    double worst = 0.0;
    for (std::size_t i = 0; i < size(); ++i)
      for (std::size_t j = 0; j < i; ++j) {
        const cplx a = entry(i, j), b = std::conj(entry(j, i));
        worst = std::max(worst, std::abs(a - b) / std::max(1.0, std::abs(a)));
      }
    return worst;
  }

  const std::vector<cplx>& entries() const { return entries_; }

 private:
  const SampleCloud* cloud_;
  std::vector<cplx> entries_;
};

/// P f (z_i) = sum_j K(z_i, w_j) f(w_j) dV_j
inline std::vector<cplx> apply_P(const KernelMatrix& kernel, const std::vector<cplx>& f) {
  const auto& cloud = kernel.cloud();
  std::vector<cplx> x(f.size());
  for (std::size_t j = 0; j < f.size(); ++j) x[j] = f[j] * cloud.interior[j].weight;
  return kernel.multiply(x);
}

inline std::vector<cplx> apply_P(const KernelMatrix& kernel, const std::vector<double>& f) {
  return apply_P(kernel, std::vector<cplx>(f.begin(), f.end()));
}

inline std::vector<double> apply_Pplus(const KernelMatrix& kernel, const std::vector<double>& f) {
  const auto& cloud = kernel.cloud();
  std::vector<double> x(f.size());
  for (std::size_t j = 0; j < f.size(); ++j) x[j] = f[j] * cloud.interior[j].weight;
  return kernel.multiply_abs(x);
}

/// Which parts of the sparse operator to evaluate.
struct SparseSpec {
  bool global = true;            // include the Omega average
  std::size_t system = kNoIndex;  // single system, or kNoIndex for all
};

/// Q f = <f nu>_Omega (if global) + sum over tents K of 1_K <f nu>_K.
inline std::vector<double> apply_Q_sparse(const SampleCloud& cloud, const std::vector<TentSystem>& tents,
                                          const WeightPair& pair, const std::vector<double>& f,
                                          const SparseSpec& spec = {}) {
  const std::size_t m = cloud.size();
  std::vector<double> fnu(m);
  for (std::size_t i = 0; i < m; ++i) fnu[i] = f[i] * pair.nu.values[i];
  std::vector<double> out(m, 0.0);
  if (spec.global) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      num += fnu[i] * cloud.interior[i].weight;
      den += cloud.interior[i].weight;
    }
    std::fill(out.begin(), out.end(), num / den);
  }
  for (std::size_t l = 0; l < tents.size(); ++l) {
    if (spec.system != kNoIndex && spec.system != l) continue;
    for (const auto& level : tents[l].tents)
      for (const auto& tent : level) {
        if (!(tent.volume > 0.0)) continue;
        double num = 0.0;
        for (std::size_t i : tent.members) num += fnu[i] * cloud.interior[i].weight;
        const double avg = num / tent.volume;
        for (std::size_t i : tent.members) out[i] += avg;
      }
  }
  return out;
}

/// Weighted dyadic maximal function: sup over tents containing z of the
/// sigma dV average of |f|. Zero outside every tent.
inline std::vector<double> maximal(const SampleCloud& cloud, const TentSystem& tents, const Weight& sigma,
                                   const std::vector<double>& f) {
  std::vector<double> out(cloud.size(), 0.0);
  for (const auto& level : tents.tents)
    for (const auto& tent : level) {
      if (tent.members.empty()) continue;
      double num = 0.0, den = 0.0;
      for (std::size_t i : tent.members) {
        const double w = sigma.values[i] * cloud.interior[i].weight;
        num += std::abs(f[i]) * w;
        den += w;
      }
      if (!(den > 0.0)) continue;
      const double avg = num / den;
      for (std::size_t i : tent.members) out[i] = std::max(out[i], avg);
    }
  return out;
}

/// Sparse majorant 1/V(Omega) + sum over common tents of 1/V(tent).
inline double sparse_bound(const SampleCloud& cloud, const std::vector<TentSystem>& tents, std::size_t i, std::size_t j,
                           double total_volume) {
  double acc = 1.0 / total_volume;
  for (const auto& ts : tents)
    for (std::size_t k = 0; k < ts.tent_of.size(); ++k) {
      const std::size_t a = ts.tent_of[k][i];
      if (a != kNoIndex && a == ts.tent_of[k][j]) acc += 1.0 / ts.tents[k][a].volume;
    }
  (void)cloud;
  return acc;
}

struct DominationReport {
  std::size_t pairs = 0;
  double max_ratio = 0.0;           // over random and diagonal pairs
  double max_random_ratio = 0.0;
  double max_diagonal_ratio = 0.0;
  double mean_ratio = 0.0;          // random pairs
  std::size_t worst_i = 0, worst_j = 0;
};

/// |K(z, w)| divided by the sparse majorant, over random sample pairs and
/// over every diagonal pair (z, z), where the kernel peaks.
inline DominationReport check_domination(const SampleCloud& cloud, const std::vector<TentSystem>& tents,
                                         std::size_t pairs, std::uint64_t seed) {
  detail::require_ball(cloud.domain);
  const std::size_t m = cloud.size();
  const double total = cloud.interior_volume();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, m - 1);
  std::vector<std::pair<std::size_t, std::size_t>> draws(pairs + m);
  for (std::size_t t = 0; t < pairs; ++t) draws[t] = {pick(rng), pick(rng)};
  for (std::size_t i = 0; i < m; ++i) draws[pairs + i] = {i, i};
  std::vector<double> ratio(draws.size());
  parallel_for(draws.size(), [&](std::size_t t) {
    const auto [i, j] = draws[t];
    ratio[t] = std::abs(sample_kernel(cloud, i, j)) / sparse_bound(cloud, tents, i, j, total);
  });
  DominationReport rep;
  rep.pairs = pairs;
  double acc = 0.0;
  for (std::size_t t = 0; t < draws.size(); ++t) {
    if (t < pairs) {
      acc += ratio[t];
      rep.max_random_ratio = std::max(rep.max_random_ratio, ratio[t]);
    } else {
      rep.max_diagonal_ratio = std::max(rep.max_diagonal_ratio, ratio[t]);
    }
    if (ratio[t] > rep.max_ratio) {
      rep.max_ratio = ratio[t];
      rep.worst_i = draws[t].first;
      rep.worst_j = draws[t].second;
    }
  }
  rep.mean_ratio = pairs ? acc / static_cast<double>(pairs) : 0.0;
  return rep;
}

}  // namespace bergman
