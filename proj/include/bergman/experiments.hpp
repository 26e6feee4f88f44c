#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "bergman/operators.hpp"
#include "bergman/tents.hpp"
#include "bergman/weights.hpp"

namespace bergman {

/// (sum |f|^p sigma dV)^(1/p)
template <class T>
double weighted_norm(const SampleCloud& cloud, const std::vector<T>& f, const Weight& sigma, double p) {
  double acc = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    acc += std::pow(std::abs(f[i]), p) * sigma.values[i] * cloud.interior[i].weight;
  return std::pow(acc, 1.0 / p);
}

template <class T>
double weighted_norm(const SampleCloud& cloud, const std::vector<T>& f, const WeightPair& pair) {
  return weighted_norm(cloud, f, pair.sigma, pair.p);
}

struct NormEstimate {
  double p = 2.0;
  std::string weight;
  double lower_bound = 0.0;
  double budget = 0.0;  // [sigma]_p when supplied
  std::string method;
  std::size_t iterations = 0;
  std::vector<double> rayleigh;  // p = 2 only
  bool monotone = true;
  std::size_t best_candidate = 0;
  std::vector<cplx> vector;  // maximiser, in the original variables
};

struct PowerOptions {
  std::size_t max_iterations = 500;
  double tolerance = 1e-6;
  std::uint64_t seed = 1;
  bool require_convergence = true;  // otherwise return the last iterate
};

/// Largest singular value of P on L^2(sigma): power iteration on A^*A with
/// A = D K V D^-1 and D = diag(sqrt(sigma dV)).
inline NormEstimate estimate_norm_p2(const KernelMatrix& kernel, const WeightPair& pair, const PowerOptions& opt = {}) {
  if (std::abs(pair.p - 2.0) > 1e-12) throw Error(ErrorCode::InvalidArgument, "power iteration needs p = 2");
  const auto& cloud = kernel.cloud();
  const std::size_t m = cloud.size();
  std::vector<double> d(m), v(m);
  for (std::size_t i = 0; i < m; ++i) {
    v[i] = cloud.interior[i].weight;
    d[i] = std::sqrt(pair.sigma.values[i] * v[i]);
  }
  auto apply_a = [&](const std::vector<cplx>& g) {
    std::vector<cplx> x(m);
    for (std::size_t j = 0; j < m; ++j) x[j] = g[j] * v[j] / d[j];
    auto y = kernel.multiply(x);
    for (std::size_t i = 0; i < m; ++i) y[i] *= d[i];
    return y;
  };
  auto apply_a_adj = [&](const std::vector<cplx>& g) {
    std::vector<cplx> x(m);
    for (std::size_t j = 0; j < m; ++j) x[j] = g[j] * d[j];
    auto y = kernel.multiply(x);
    for (std::size_t i = 0; i < m; ++i) y[i] *= v[i] / d[i];
    return y;
  };
  auto norm2 = [](const std::vector<cplx>& g) {
    double acc = 0.0;
    for (const auto& c : g) acc += std::norm(c);
    return std::sqrt(acc);
  };

  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<cplx> x(m);
  for (auto& c : x) c = cplx(gauss(rng), gauss(rng));
  double nx = norm2(x);
  for (auto& c : x) c /= nx;

  NormEstimate est;
  est.p = 2.0;
  est.weight = pair.sigma.description;
  est.method = "power-iteration";
  double prev = 0.0;
  bool converged = false;
  for (std::size_t it = 0; it < opt.max_iterations; ++it) {
    const auto ax = apply_a(x);
    const double q = std::pow(norm2(ax), 2);  // x has unit norm
    if (!est.rayleigh.empty() && q < est.rayleigh.back() * (1.0 - 1e-10)) est.monotone = false;
    est.rayleigh.push_back(q);
    est.iterations = it + 1;
    if (it > 0 && std::abs(q - prev) <= opt.tolerance * q) {
      converged = true;
      break;
    }
    prev = q;
    x = apply_a_adj(ax);
    nx = norm2(x);
    for (auto& c : x) c /= nx;
  }
  if (!converged && opt.require_convergence)
    throw Error(ErrorCode::NoConvergence, "power iteration did not stabilise");
  est.lower_bound = std::sqrt(est.rayleigh.back());
  est.vector.resize(m);
  for (std::size_t i = 0; i < m; ++i) est.vector[i] = x[i] / d[i];
  return est;
}

/// ||P f|| / ||f|| in L^p(sigma).
inline double norm_ratio(const KernelMatrix& kernel, const WeightPair& pair, const std::vector<cplx>& f) {
  const double fn = weighted_norm(kernel.cloud(), f, pair);
  if (!(fn > 0.0)) return 0.0;
  return weighted_norm(kernel.cloud(), apply_P(kernel, f), pair) / fn;
}

/// nu times the indicator of B#(apex, delta).
inline std::vector<cplx> tent_test_function(const SampleCloud& cloud, const WeightPair& pair, const CPoint& apex,
                                            double delta) {
  std::vector<cplx> f(cloud.size(), 0.0);
  for (std::size_t i : tent_region(cloud, apex, delta)) f[i] = pair.nu.values[i];
  return f;
}

struct CandidateOptions {
  std::vector<double> deltas = {0.05, 0.1, 0.2, 0.3};
  std::size_t apexes = 8;     // equally spaced boundary samples, plus the extra apexes
  std::vector<CPoint> extra_apexes;
  std::size_t bumps = 8;
  std::uint64_t seed = 1;
};

/// Test functions: constants, nu on sampled tents, random smooth bumps.
inline std::vector<std::vector<cplx>> default_candidates(const SampleCloud& cloud, const WeightPair& pair,
                                                         const CandidateOptions& opt = {}) {
  std::vector<std::vector<cplx>> out;
  out.emplace_back(cloud.size(), cplx(1.0));
  std::vector<CPoint> apexes = opt.extra_apexes;
  const std::size_t nb = cloud.boundary.size();
  for (std::size_t a = 0; a < opt.apexes && nb > 0; ++a) apexes.push_back(cloud.boundary[a * nb / opt.apexes].q);
  for (const auto& apex : apexes)
    for (double delta : opt.deltas) {
      auto f = tent_test_function(cloud, pair, apex, delta);
      if (std::any_of(f.begin(), f.end(), [](cplx c) { return c != 0.0; })) out.push_back(std::move(f));
    }
  std::mt19937_64 rng(opt.seed);
  std::uniform_int_distribution<std::size_t> pick(0, cloud.size() - 1);
  std::uniform_real_distribution<double> radius(0.05, 0.5);
  for (std::size_t b = 0; b < opt.bumps; ++b) {
    const CPoint c = cloud.interior[pick(rng)].z;
    const double r = radius(rng);
    std::vector<cplx> f(cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i) f[i] = std::exp(-std::pow(distance(cloud.interior[i].z, c) / r, 2));
    out.push_back(std::move(f));
  }
  return out;
}

/// Best ratio over the candidates; near p = 2 the p = 2 maximiser joins them.
inline NormEstimate estimate_norm_general_p(const KernelMatrix& kernel, const WeightPair& pair,
                                            std::vector<std::vector<cplx>> candidates) {
  if (std::abs(pair.p - 2.0) < 0.25) {
    PowerOptions opt;
    opt.max_iterations = 100;
    opt.require_convergence = false;
    candidates.push_back(estimate_norm_p2(kernel, make_pair(2.0, pair.sigma), opt).vector);
  }
  NormEstimate est;
  est.p = pair.p;
  est.weight = pair.sigma.description;
  est.method = "candidate-max";
  std::vector<double> ratio(candidates.size());
  for (std::size_t c = 0; c < candidates.size(); ++c) ratio[c] = norm_ratio(kernel, pair, candidates[c]);
  for (std::size_t c = 0; c < candidates.size(); ++c)
    if (ratio[c] > est.lower_bound) {
      est.lower_bound = ratio[c];
      est.best_candidate = c;
    }
  est.iterations = candidates.size();
  return est;
}

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // rms in log space
};

/// Least squares of log y against log x.
inline SlopeFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw Error(ErrorCode::InvalidArgument, "slope fit needs at least two points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  SlopeFit fit;
  const double dn = static_cast<double>(n);
  fit.slope = (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
  fit.intercept = (sy - fit.slope * sx) / dn;
  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = std::log(y[i]) - fit.intercept - fit.slope * std::log(x[i]);
    rss += e * e;
  }
  fit.residual = std::sqrt(rss / dn);
  return fit;
}

struct SweepRow {
  double s = 0.0;
  double p = 2.0;
  double bracket = 0.0;
  double bp = 0.0;
  double norm_lb = 0.0;
  double f_norm_p = 0.0;  // ||f||^p
  double pf_norm = 0.0;
  double ratio = 0.0;  // ||Pf|| / ([sigma]_p ||f||)
};

struct SweepReport {
  std::vector<SweepRow> rows;
  SlopeFit bracket_slope;
  SlopeFit f_norm_slope;
  SlopeFit norm_slope;
  double min_ratio = 0.0;
  double max_ratio = 0.0;
};

struct SweepOptions {
  double test_delta = 0.3;
  SharpOptions sharp;
};

/// Sharp weight family over the s grid with the tent test function at the apex.
inline SweepReport run_sharp_sweep(const KernelMatrix& kernel, const std::vector<TentSystem>& tents, double p,
                                   const std::vector<double>& s_grid, const SweepOptions& opt = {}) {
  const auto& cloud = kernel.cloud();
  SweepReport rep;
  for (double s : s_grid) {
    const WeightPair pair = sharp_example_weight(cloud, p, s, opt.sharp);
    SweepRow row;
    row.s = s;
    row.p = p;
    row.bracket = characteristic_bracket(cloud, pair, tents).value;
    row.bp = characteristic_Bp(cloud, pair, tents).value;
    const auto f = tent_test_function(cloud, pair, opt.sharp.apex, opt.test_delta);
    const double fn = weighted_norm(cloud, f, pair);
    row.f_norm_p = std::pow(fn, p);
    row.pf_norm = weighted_norm(cloud, apply_P(kernel, f), pair);
    row.norm_lb = std::max(row.pf_norm / fn, norm_ratio(kernel, pair, std::vector<cplx>(cloud.size(), 1.0)));
    row.ratio = row.pf_norm / (row.bracket * fn);
    rep.rows.push_back(row);
  }
  std::vector<double> xs, br, fnp, nl;
  for (const auto& r : rep.rows) {
    xs.push_back(r.s);
    br.push_back(r.bracket);
    fnp.push_back(r.f_norm_p);
    nl.push_back(r.norm_lb);
  }
  if (xs.size() >= 2) {
    rep.bracket_slope = fit_loglog(xs, br);
    rep.f_norm_slope = fit_loglog(xs, fnp);
    rep.norm_slope = fit_loglog(xs, nl);
  }
  rep.min_ratio = std::numeric_limits<double>::infinity();
  for (const auto& r : rep.rows) {
    rep.min_ratio = std::min(rep.min_ratio, r.ratio);
    rep.max_ratio = std::max(rep.max_ratio, r.ratio);
  }
  return rep;
}

struct LowerBoundReport {
  double bp = 0.0;
  double lhs = 0.0;  // bp^(1/(2p))
  double norm_lb = 0.0;
  double constant = 0.0;  // lhs / norm_lb
};

inline LowerBoundReport check_lower_bound(const SampleCloud& cloud, const WeightPair& pair,
                                          const std::vector<TentSystem>& tents, double norm_lb) {
  if (!cloud.domain.is_ball()) throw Error(ErrorCode::DomainKindUnsupported, "lower bound check runs on the ball");
  LowerBoundReport rep;
  rep.bp = characteristic_Bp(cloud, pair, tents).value;
  rep.lhs = std::pow(rep.bp, 1.0 / (2.0 * pair.p));
  rep.norm_lb = norm_lb;
  rep.constant = rep.lhs / norm_lb;
  return rep;
}

/// sup over lambda of lambda * V({|g| > lambda}), over the achieved values.
inline double weak_quasi_norm(const SampleCloud& cloud, const std::vector<double>& magnitude,
                              const Weight* measure_weight = nullptr) {
  std::vector<std::size_t> order(magnitude.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return magnitude[a] > magnitude[b]; });
  double cum = 0.0, best = 0.0;
  for (std::size_t i : order) {
    cum += cloud.interior[i].weight * (measure_weight ? measure_weight->values[i] : 1.0);
    best = std::max(best, magnitude[i] * cum);
  }
  return best;
}

/// Indicator of B#(apex, sqrt(depth)) normalised to unit L^1 norm.
inline std::vector<double> boundary_bump(const SampleCloud& cloud, const CPoint& apex, double depth) {
  const double delta = cloud.domain.is_ball() ? std::sqrt(depth) : depth;
  const auto region = tent_region(cloud, apex, delta);
  double vol = 0.0;
  for (std::size_t i : region) vol += cloud.interior[i].weight;
  if (!(vol > 0.0)) throw Error(ErrorCode::EmptyRegion, "bump region holds no samples");
  std::vector<double> f(cloud.size(), 0.0);
  for (std::size_t i : region) f[i] = 1.0 / vol;
  return f;
}

struct WeakTypeRow {
  std::string label;
  double quasi_norm = 0.0;  // sup lambda V(|Pf| > lambda) / ||f||_1
  double l1_ratio = 0.0;    // ||Pf||_1 / ||f||_1
};

struct WeakTypeReport {
  std::vector<WeakTypeRow> rows;
  double bound = 0.0;  // largest quasi-norm
};

inline WeakTypeReport check_weak_type(const KernelMatrix& kernel, const std::vector<std::vector<double>>& family,
                                      const std::vector<std::string>& labels = {}) {
  const auto& cloud = kernel.cloud();
  WeakTypeReport rep;
  for (std::size_t k = 0; k < family.size(); ++k) {
    const auto& f = family[k];
    double l1 = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) l1 += std::abs(f[i]) * cloud.interior[i].weight;
    const auto pf = apply_P(kernel, f);
    std::vector<double> mag(pf.size());
    double pl1 = 0.0;
    for (std::size_t i = 0; i < pf.size(); ++i) {
      mag[i] = std::abs(pf[i]);
      pl1 += mag[i] * cloud.interior[i].weight;
    }
    WeakTypeRow row;
    row.label = k < labels.size() ? labels[k] : std::to_string(k);
    row.quasi_norm = weak_quasi_norm(cloud, mag) / l1;
    row.l1_ratio = pl1 / l1;
    rep.bound = std::max(rep.bound, row.quasi_norm);
    rep.rows.push_back(row);
  }
  return rep;
}

/// sup over lambda of lambda sigma({M f > lambda}) / ||f||_{L^1(sigma)}.
inline double maximal_weak_ratio(const SampleCloud& cloud, const TentSystem& tents, const Weight& sigma,
                                 const std::vector<double>& f, const std::vector<double>& lambdas) {
  const auto mf = maximal(cloud, tents, sigma, f);
  double l1 = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) l1 += std::abs(f[i]) * sigma.values[i] * cloud.interior[i].weight;
  double worst = 0.0;
  for (double lambda : lambdas) {
    double level = 0.0;
    for (std::size_t i = 0; i < mf.size(); ++i)
      if (mf[i] > lambda) level += sigma.values[i] * cloud.interior[i].weight;
    worst = std::max(worst, lambda * level / l1);
  }
  return worst;
}

/// ||M f|| / ||f|| in L^p(sigma).
inline double maximal_lp_ratio(const SampleCloud& cloud, const TentSystem& tents, const Weight& sigma,
                               const std::vector<double>& f, double p) {
  return weighted_norm(cloud, maximal(cloud, tents, sigma, f), sigma, p) / weighted_norm(cloud, f, sigma, p);
}

}  // namespace bergman
