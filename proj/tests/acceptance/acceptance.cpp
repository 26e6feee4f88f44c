// Acceptance run: one PASS/FAIL line per criterion. Tolerances are pinned below.
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "bergman/experiments.hpp"

using namespace bergman;

namespace tol {
constexpr double kSandwichRatio = 100.0;
constexpr double kDyadicSeconds = 60.0;
constexpr double kAdjacency = 0.99;
constexpr double kReproduce = 0.01;
constexpr double kUnitNorm = 0.05;
constexpr double kDominationChange = 0.25;
constexpr double kUpperConstant = 1.0;
constexpr double kSlope = 0.2;
constexpr double kRatioSpread = 2.0;
constexpr double kSweepSeconds = 600.0;
constexpr double kLowerConstant = 10.0;
constexpr double kWeakMaximal = 2.0;
constexpr double kStrongMaximal = 1.0;  // multiple of p/(p-1)
constexpr double kWeakTypeBound = 1.0;
constexpr double kTau = 0.01;
constexpr double kVolumeSlope = 0.2;
}  // namespace tol

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double relative_change(double a, double b) { return std::abs(b - a) / std::abs(a); }

// Disc with graded clusters at the origin and at the boundary point 1.
SampleCloud graded_disc(std::size_t interior, bool centre) {
  SamplingOptions opt;
  opt.n_interior = interior;
  opt.n_boundary = 1000;
  if (centre) {
    GradedRefinement in;
    in.center = CPoint(cplx(0));
    in.radius = 0.2;
    in.min_scale = 1e-40;
    in.ratio = 0.25;
    opt.refinements.push_back(in);
  }
  GradedRefinement edge;
  edge.kind = GradedRefinement::Kind::BoundaryPoint;
  edge.center = CPoint(cplx(1));
  edge.radius = 0.1;
  edge.min_scale = 1e-40;
  opt.refinements.push_back(edge);
  return sample(ModelDomain::ball(1), opt);
}

std::vector<TentSystem> resolved_family_tents(const SampleCloud& cloud, double s, int kmax, int systems,
                                              std::uint64_t seed) {
  const int k = resolved_depth(cloud, s, 0.8, kmax);
  return build_tent_family(build_adjacent_family(cloud, s, 0.8, k, systems, seed), cloud);
}

Outcome dyadic_suite() {
  const auto t0 = Clock::now();
  bool ok = true;
  double worst_ratio = 0.0;
  for (int n : {1, 2}) {
    const auto cloud = sample(ModelDomain::ball(n), 500, 2000, 1);
    const auto family = build_adjacent_family(cloud, 8.0, 0.8, 4, 5, 100);
    for (const auto& sys : family.systems) {
      const auto ts = build_tent_system(sys, cloud);
      ok = ok && check_partition(sys, cloud.boundary.size()) && check_nesting(sys) &&
           check_kube_partition(ts, cloud.size()) && check_tent_nesting(ts, sys);
      worst_ratio = std::max(worst_ratio, sandwich_constants(sys, cloud).ratio());
    }
  }
  const double elapsed = seconds_since(t0);
  return {ok && worst_ratio <= tol::kSandwichRatio && elapsed < tol::kDyadicSeconds,
          std::string("partition/nesting/kubes ") + (ok ? "exact" : "broken") + ", max C/c " + fmt("%.3g", worst_ratio) +
              ", " + fmt("%.1f s", elapsed)};
}

Outcome adjacency() {
  bool ok = true;
  std::string detail;
  for (int n : {1, 2}) {
    const auto cloud = sample(ModelDomain::ball(n), 500, 2000, 1);
    const auto many = build_adjacent_family(cloud, 8.0, 0.8, 4, 5, 100);
    const AdjacentFamily one{{many.systems.front()}};
    const double r5 = verify_adjacency(many, cloud, 1000, 9).success_rate();
    const double r1 = verify_adjacency(one, cloud, 1000, 9).success_rate();
    // a saturated single system leaves no room for strict improvement
    const bool saturated = r1 >= 1.0;
    ok = ok && r5 >= tol::kAdjacency && (saturated ? r5 >= r1 : r5 > r1);
    detail += "n=" + std::to_string(n) + ": N=5 " + fmt("%.4f", r5) + " vs N=1 " + fmt("%.4f", r1) +
              (saturated ? " (N=1 saturated)" : "") + (n == 1 ? "; " : "");
  }
  return {ok, detail};
}

Outcome projection_sanity() {
  const auto cloud = sample(ModelDomain::ball(1), 3000, 1000, 1);
  const KernelMatrix kernel(cloud, 6000);
  const auto p1 = apply_P(kernel, std::vector<double>(cloud.size(), 1.0));
  double num = 0.0;
  for (std::size_t i = 0; i < cloud.size(); ++i) num += std::norm(p1[i] - 1.0) * cloud.interior[i].weight;
  const double rel = std::sqrt(num / cloud.interior_volume());
  PowerOptions opt;
  opt.max_iterations = 5000;
  const double norm = estimate_norm_p2(kernel, make_pair(2.0, constant_weight(cloud)), opt).lower_bound;
  return {rel <= tol::kReproduce && std::abs(norm - 1.0) <= tol::kUnitNorm,
          "||P1-1||/||1|| " + fmt("%.4f", rel) + ", norm " + fmt("%.4f", norm)};
}

Outcome sparse_domination() {
  const double s = 3.0;
  const std::size_t nb = 4000, pairs = 100000;
  auto constant = [&](std::size_t interior, int kmax, bool resolved) {
    const auto cloud = sample(ModelDomain::ball(2), interior, nb, 1);
    const auto tents = resolved ? resolved_family_tents(cloud, s, kmax, 5, 1)
                                : build_tent_family(build_adjacent_family(cloud, s, 0.8, kmax, 5, 1), cloud);
    return check_domination(cloud, tents, pairs, 1).max_ratio;
  };
  // sample doubling on resolved levels; k_max 3 -> 5 with every level built
  const double base = constant(3000, 3, true), doubled = constant(6000, 3, true);
  const double shallow = constant(3000, 3, false), deep = constant(3000, 5, false);
  const double dm = relative_change(base, doubled), dk = relative_change(shallow, deep);
  const bool ok = std::isfinite(base) && std::isfinite(doubled) && std::isfinite(deep) &&
                  dm <= tol::kDominationChange && dk <= tol::kDominationChange;
  return {ok, "constant " + fmt("%.4g", base) + " -> " + fmt("%.4g", doubled) + " (M x2, " + fmt("%.1f%%", 100 * dm) +
                  "), " + fmt("%.4g", shallow) + " -> " + fmt("%.4g", deep) + " (k_max 3->5, " +
                  fmt("%.1f%%", 100 * dk) + ")"};
}

struct FamilyResult {
  Outcome upper, lower;
};

FamilyResult weight_family() {
  const auto cloud = graded_disc(3000, true);
  const KernelMatrix kernel(cloud, 6000);
  const auto tents = resolved_family_tents(cloud, 8.0, 4, 5, 100);
  double upper = 0.0, lower = 0.0;
  for (double p : {4.0 / 3.0, 2.0}) {
    std::vector<WeightPair> family = {make_pair(p, constant_weight(cloud)), make_pair(p, power_weight(cloud, -0.5)),
                                      make_pair(p, power_weight(cloud, 0.5))};
    for (double s : {0.4, 0.2, 0.1}) family.push_back(sharp_example_weight(cloud, p, s));
    for (const auto& pair : family) {
      CandidateOptions co;
      co.extra_apexes = {CPoint(cplx(1))};
      const double lb = estimate_norm_general_p(kernel, pair, default_candidates(cloud, pair, co)).lower_bound;
      upper = std::max(upper, lb / characteristic_bracket(cloud, pair, tents).value);
      lower = std::max(lower, check_lower_bound(cloud, pair, tents, lb).constant);
    }
  }
  const std::string m = "M=" + std::to_string(cloud.size());
  return {{upper <= tol::kUpperConstant, m + ": max ||P||_lb/[sigma] = C = " + fmt("%.4f", upper)},
          {lower <= tol::kLowerConstant, m + ": max Bp^(1/2p)/||P||_lb = C = " + fmt("%.4f", lower)}};
}

Outcome sharpness() {
  const auto t0 = Clock::now();
  const auto cloud = graded_disc(3000, true);
  const KernelMatrix kernel(cloud, 6000);
  const auto tents = resolved_family_tents(cloud, 8.0, 4, 5, 100);
  const auto rep = run_sharp_sweep(kernel, tents, 2.0, {0.4, 0.2, 0.1, 0.05});
  const double elapsed = seconds_since(t0);
  const double slope = rep.bracket_slope.slope;
  const bool ok = std::abs(slope + 1.0) <= tol::kSlope && rep.min_ratio > 0.0 &&
                  rep.max_ratio <= tol::kRatioSpread * rep.min_ratio && elapsed < tol::kSweepSeconds;
  return {ok, "slope " + fmt("%.3f", slope) + ", ratio in [" + fmt("%.4g", rep.min_ratio) + ", " +
                  fmt("%.4g", rep.max_ratio) + "], " + fmt("%.1f s", elapsed)};
}

struct MaximalResult {
  Outcome maximal, weak_type;
};

MaximalResult maximal_and_weak_type() {
  const auto cloud = graded_disc(3000, false);
  const auto ts = build_tent_system(build_system(cloud, 8.0, 0.8, 4, 5), cloud);
  const std::vector<Weight> weights = {constant_weight(cloud), power_weight(cloud, -0.5), power_weight(cloud, 0.5),
                                       sharp_example_weight(cloud, 2.0, 0.2).sigma};
  std::mt19937_64 rng(11);
  double weak = 0.0, strong = 0.0;
  for (const auto& w : weights)
    for (int k = 0; k < 20; ++k) {
      std::vector<double> f(cloud.size());
      if (k % 2 == 0) {
        std::lognormal_distribution<double> ln(0.0, 2.0);
        for (double& x : f) x = ln(rng);
      } else {
        std::uniform_int_distribution<std::size_t> pick(0, cloud.size() - 1);
        const std::size_t c = pick(rng);
        for (std::size_t i = 0; i < f.size(); ++i)
          f[i] = distance(cloud.interior[i].z, cloud.interior[c].z) < 0.1 * (1 + k % 5) ? 1.0 : 0.0;
        f[c] = 1.0;
      }
      const auto mf = maximal(cloud, ts, w, f);
      const double hi = *std::max_element(mf.begin(), mf.end());
      double lo = hi;
      for (double v : mf)
        if (v > 0.0) lo = std::min(lo, v);
      std::vector<double> lambdas;
      for (int j = 0; j < 20; ++j) lambdas.push_back(0.999 * lo * std::pow(hi / lo, j / 19.0));
      weak = std::max(weak, maximal_weak_ratio(cloud, ts, w, f, lambdas));
      for (double p : {1.25, 2.0, 4.0}) strong = std::max(strong, maximal_lp_ratio(cloud, ts, w, f, p) / (p / (p - 1.0)));
    }
  MaximalResult out;
  out.maximal = {weak <= tol::kWeakMaximal && strong <= tol::kStrongMaximal,
                 "weak ratio " + fmt("%.4f", weak) + ", max ||M||/(p/(p-1)) " + fmt("%.4f", strong)};

  const KernelMatrix kernel(cloud, 6000);
  std::vector<std::vector<double>> bumps;
  for (double d : {0.1, 0.01, 0.001}) bumps.push_back(boundary_bump(cloud, CPoint(cplx(1)), d));
  const auto rep = check_weak_type(kernel, bumps);
  bool monotone = true;
  std::string detail = "quasi-norms";
  for (std::size_t k = 0; k < rep.rows.size(); ++k) {
    detail += " " + fmt("%.3f", rep.rows[k].quasi_norm);
    if (k > 0) monotone = monotone && rep.rows[k].l1_ratio > rep.rows[k - 1].l1_ratio;
  }
  detail += ", ||Pf||_1/||f||_1";
  for (const auto& r : rep.rows) detail += " " + fmt("%.3f", r.l1_ratio);
  out.weak_type = {rep.bound <= tol::kWeakTypeBound && monotone, detail};
  return out;
}

Outcome egg_geometry() {
  const auto egg = ModelDomain::egg(2);
  const CPoint flat(cplx(1), cplx(0)), round(cplx(0), cplx(1));
  double tau_err = 0.0;
  for (double d : {1e-2, 1e-4, 1e-6}) {
    tau_err = std::max(tau_err, relative_change(std::pow(d, 0.25), tau_scaling(egg, flat, d, 2)));
    tau_err = std::max(tau_err, relative_change(std::pow(d, 0.5), tau_scaling(egg, round, d, 2)));
  }
  const std::vector<double> deltas = {0.1, 0.03, 0.01, 0.003};
  auto slope = [&](const ModelDomain& dom, const CPoint& apex) {
    std::vector<double> v;
    for (double d : deltas) v.push_back(local_tent_volume(dom, apex, d, 40000, 1).volume);
    return fit_loglog(deltas, v).slope;
  };
  const double s_flat = slope(egg, flat), s_round = slope(egg, round), s_ball = slope(ModelDomain::ball(2), flat);
  const bool ok = tau_err <= tol::kTau && std::abs(s_flat - 2.5) <= tol::kVolumeSlope &&
                  std::abs(s_round - 3.0) <= tol::kVolumeSlope && std::abs(s_ball - 6.0) <= tol::kVolumeSlope;
  return {ok, "tau_2 max rel err " + fmt("%.2e", tau_err) + ", volume slopes " + fmt("%.3f", s_flat) + " (2.5), " +
                  fmt("%.3f", s_round) + " (3), ball " + fmt("%.3f", s_ball) + " (6)"};
}

}  // namespace

int main() {
  const auto t0 = Clock::now();
  int failures = 0;
  auto report = [&](int id, const char* name, const Outcome& o) {
    std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str());
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  };
  auto guarded = [](const std::function<Outcome()>& run) {
    try {
      return run();
    } catch (const std::exception& e) {
      return Outcome{false, std::string("exception: ") + e.what()};
    }
  };

  report(1, "dyadic suite", guarded(dyadic_suite));
  report(2, "adjacency", guarded(adjacency));
  report(3, "projection sanity", guarded(projection_sanity));
  report(4, "sparse domination", guarded(sparse_domination));
  FamilyResult fam{{false, "not run"}, {false, "not run"}};
  try {
    fam = weight_family();
  } catch (const std::exception& e) {
    fam = {{false, e.what()}, {false, e.what()}};
  }
  report(5, "upper bound", fam.upper);
  report(6, "sharpness", guarded(sharpness));
  report(7, "lower bound", fam.lower);
  MaximalResult mx{{false, "not run"}, {false, "not run"}};
  try {
    mx = maximal_and_weak_type();
  } catch (const std::exception& e) {
    mx = {{false, e.what()}, {false, e.what()}};
  }
  report(8, "maximal operator", mx.maximal);
  report(9, "weak type (1,1)", mx.weak_type);
  report(10, "egg geometry", guarded(egg_geometry));
  std::printf("%d of 10 criteria passed in %.1f s\n", 10 - failures, seconds_since(t0));
  return failures == 0 ? 0 : 1;
}
