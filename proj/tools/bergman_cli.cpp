#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "bergman/config.hpp"
#include "bergman/io.hpp"

using namespace bergman;
namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitInvariant = 2;

constexpr std::size_t kDenseLimit = 6000;

const char* kHelpFooter = R"(Outputs (all under --out):
  <command>.json      report: version, resolved config, results, checks, status
  weights.csv         index,value                (characteristic, norm)
  sweep.csv           s,p,bracket,bp,norm_lb,f_norm_p,pf_norm,ratio
  slopes.csv          quantity,slope,intercept,residual
  systems/system_K.json  dyadic cells and tents  (dyadic)
  kernel.bin          BKMAT header, uint64 rows, uint64 cols, row-major complex doubles (norm --dump-kernel)

Config file: JSON object with the long flag names as keys (dashes become
underscores); flags given on the command line override file fields.

Exit codes: 0 ok, 1 configuration error, 2 invariant or assertion failure.)";

struct Report {
  std::string command;
  Json body;
  Json checks = Json::object();
  bool ok = true;

  void check(const std::string& name, bool pass) {
    checks[name] = pass;
    ok = ok && pass;
  }
};

std::string version_string() { return std::string("v") + kVersion; }

int finish(const RunConfig& cfg, Report& rep) {
  Json doc = {{"version", version_string()},
              {"command", rep.command},
              {"config", to_json(cfg)},
              {"results", rep.body},
              {"checks", rep.checks},
              {"status", rep.ok ? "pass" : "fail"}};
  write_json(fs::path(cfg.out) / (rep.command + ".json"), doc);
  std::cout << rep.command << ": " << (rep.ok ? "pass" : "fail") << " -> " << (fs::path(cfg.out) / (rep.command + ".json")).string()
            << "\n";
  return rep.ok ? kExitOk : kExitInvariant;
}

SampleCloud make_cloud(const RunConfig& cfg, bool refine_default) {
  return sample(make_domain(cfg.domain), sampling_options(cfg, cfg.refine.value_or(refine_default)));
}

Json depth_json(const RunConfig& cfg, int effective) { return {{"requested", cfg.kmax}, {"effective", effective}}; }

std::vector<TentSystem> resolved_tents(const SampleCloud& cloud, const RunConfig& cfg, int& effective) {
  effective = resolved_depth(cloud, cfg.s, cfg.delta, cfg.kmax);
  const auto family = build_adjacent_family(cloud, cfg.s, cfg.delta, effective, cfg.systems, cfg.seed);
  return build_tent_family(family, cloud);
}

std::vector<std::size_t> cells_per_level(const DyadicSystem& sys) {
  std::vector<std::size_t> out;
  for (const auto& level : sys.levels) out.push_back(level.size());
  return out;
}

CPoint apex_point(const ModelDomain& dom) {
  CPoint q(dom.n);
  q[0] = 1.0;
  return q;
}

int cmd_dyadic(const RunConfig& cfg) {
  Report rep{"dyadic", Json::object()};
  const auto cloud = make_cloud(cfg, false);
  const auto family = build_adjacent_family(cloud, cfg.s, cfg.delta, cfg.kmax, cfg.systems, cfg.seed);
  const auto tents = build_tent_family(family, cloud);
  Json systems = Json::array();
  bool partition = true, nesting = true, kubes = true, tent_nesting = true;
  double ratio = 0.0;
  for (std::size_t l = 0; l < family.systems.size(); ++l) {
    const auto& sys = family.systems[l];
    const auto sc = sandwich_constants(sys, cloud);
    const bool p = check_partition(sys, cloud.boundary.size());
    const bool n = check_nesting(sys);
    const bool k = check_kube_partition(tents[l], cloud.size());
    const bool t = check_tent_nesting(tents[l], sys);
    partition = partition && p;
    nesting = nesting && n;
    kubes = kubes && k;
    tent_nesting = tent_nesting && t;
    ratio = std::max(ratio, sc.ratio());
    systems.push_back({{"seed", sys.seed},
                       {"cells_per_level", cells_per_level(sys)},
                       {"max_children_per_level", child_counts(sys)},
                       {"partition", p},
                       {"nesting", n},
                       {"kube_partition", k},
                       {"tent_nesting", t},
                       {"sandwich", to_json(sc)},
                       {"kube_volume_ratio", kube_volume_ratio(tents[l])}});
    write_json(fs::path(cfg.out) / "systems" / ("system_" + std::to_string(l) + ".json"),
               {{"version", version_string()}, {"dyadic", to_json(sys)}, {"tents", to_json(tents[l])}});
  }
  AdjacentFamily single{{family.systems.front()}};
  const auto adj_n = verify_adjacency(family, cloud, cfg.trials, cfg.seed + 1000);
  const auto adj_1 = verify_adjacency(single, cloud, cfg.trials, cfg.seed + 1000);
  rep.body = {{"samples", {{"interior", cloud.size()}, {"boundary", cloud.boundary.size()}}},
              {"k_max", depth_json(cfg, resolved_depth(cloud, cfg.s, cfg.delta, cfg.kmax))},
              {"boundary_resolution", boundary_resolution(cloud)},
              {"systems", systems},
              {"max_sandwich_ratio", ratio},
              {"adjacency", {{"family", to_json(adj_n)}, {"single", to_json(adj_1)}}}};
  rep.check("partition", partition);
  rep.check("nesting", nesting);
  rep.check("kube_partition", kubes);
  rep.check("tent_nesting", tent_nesting);
  return finish(cfg, rep);
}

int cmd_characteristic(const RunConfig& cfg) {
  Report rep{"characteristic", Json::object()};
  const auto cloud = make_cloud(cfg, false);
  const auto pair = make_weight_pair(cloud, cfg.p, cfg.weight);
  int effective = 0;
  const auto tents = resolved_tents(cloud, cfg, effective);
  const auto br = characteristic_bracket(cloud, pair, tents);
  const auto bp = characteristic_Bp(cloud, pair, tents);
  write_text(fs::path(cfg.out) / "weights.csv", weight_csv(pair.sigma));
  rep.body = {{"weight", pair.sigma.description},
              {"k_max", depth_json(cfg, effective)},
              {"bracket", to_json(br)},
              {"bp", to_json(bp)}};
  rep.check("finite", std::isfinite(br.value) && std::isfinite(bp.value));
  return finish(cfg, rep);
}

int cmd_norm(const RunConfig& cfg) {
  Report rep{"norm", Json::object()};
  const auto cloud = make_cloud(cfg, false);
  const auto pair = make_weight_pair(cloud, cfg.p, cfg.weight);
  const KernelMatrix kernel(cloud, kDenseLimit);
  int effective = 0;
  const auto tents = resolved_tents(cloud, cfg, effective);
  NormEstimate est;
  if (pair.p == 2.0) {
    PowerOptions po;
    po.max_iterations = cfg.max_iter;
    po.seed = cfg.seed;
    est = estimate_norm_p2(kernel, pair, po);
  } else {
    CandidateOptions co;
    co.seed = cfg.seed;
    if (cfg.refine.value_or(false)) co.extra_apexes = {apex_point(cloud.domain)};
    est = estimate_norm_general_p(kernel, pair, default_candidates(cloud, pair, co));
  }
  const auto br = characteristic_bracket(cloud, pair, tents);
  est.budget = br.value;
  const auto lb = check_lower_bound(cloud, pair, tents, est.lower_bound);
  const auto p1 = apply_P(kernel, std::vector<double>(cloud.size(), 1.0));
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    num += std::norm(p1[i] - 1.0) * cloud.interior[i].weight;
    den += cloud.interior[i].weight;
  }
  write_text(fs::path(cfg.out) / "weights.csv", weight_csv(pair.sigma));
  if (cfg.dump_kernel) write_kernel_dump(fs::path(cfg.out) / "kernel.bin", kernel);
  rep.body = {{"weight", pair.sigma.description},
              {"samples", cloud.size()},
              {"k_max", depth_json(cfg, effective)},
              {"estimate", to_json(est)},
              {"bracket", br.value},
              {"norm_over_bracket", est.lower_bound / br.value},
              {"lower_bound", to_json(lb)},
              {"projection_of_one_rel_error", std::sqrt(num / den)},
              {"hermitian_defect", kernel.hermitian_defect()}};
  rep.check("rayleigh_monotone", est.monotone);
  rep.check("finite", std::isfinite(est.lower_bound) && std::isfinite(br.value));
  return finish(cfg, rep);
}

int cmd_sweep(const RunConfig& cfg) {
  Report rep{"sweep", Json::object()};
  const auto cloud = make_cloud(cfg, true);
  const KernelMatrix kernel(cloud, kDenseLimit);
  int effective = 0;
  const auto tents = resolved_tents(cloud, cfg, effective);
  const auto sw = run_sharp_sweep(kernel, tents, cfg.p, cfg.grid);
  write_text(fs::path(cfg.out) / "sweep.csv", sweep_csv(sw));
  write_text(fs::path(cfg.out) / "slopes.csv", slope_csv(sw));
  rep.body = {{"samples", cloud.size()}, {"k_max", depth_json(cfg, effective)}, {"sweep", to_json(sw)}};
  rep.check("bracket_slope_near_minus_one", std::abs(sw.bracket_slope.slope + 1.0) <= 0.2);
  rep.check("ratio_positive", sw.min_ratio > 0.0);
  rep.check("ratio_spread_within_2x", sw.max_ratio <= 2.0 * sw.min_ratio);
  return finish(cfg, rep);
}

int cmd_domination(const RunConfig& cfg) {
  Report rep{"domination", Json::object()};
  Json runs = Json::array();
  std::vector<double> maxima;
  const std::vector<std::pair<std::size_t, int>> legs = {{cfg.interior, cfg.kmax}, {2 * cfg.interior, cfg.kmax},
                                                         {cfg.interior, cfg.kmax + 2}};
  for (const auto& [interior, kmax] : legs) {
    RunConfig c = cfg;
    c.interior = interior;
    c.kmax = kmax;
    const auto cloud = make_cloud(c, false);
    int effective = 0;
    const auto tents = resolved_tents(cloud, c, effective);
    const auto dr = check_domination(cloud, tents, c.pairs, c.seed);
    maxima.push_back(dr.max_ratio);
    runs.push_back({{"interior", cloud.size()}, {"k_max", depth_json(c, effective)}, {"report", to_json(dr)}});
  }
  const double refine_change = std::abs(maxima[1] - maxima[0]) / maxima[0];
  const double depth_change = std::abs(maxima[2] - maxima[0]) / maxima[0];
  rep.body = {{"runs", runs}, {"change_interior_doubled", refine_change}, {"change_kmax_plus_two", depth_change}};
  rep.check("finite", std::isfinite(maxima[0]) && std::isfinite(maxima[1]) && std::isfinite(maxima[2]));
  rep.check("stable_under_refinement", refine_change <= 0.25);
  rep.check("stable_under_depth", depth_change <= 0.25);
  return finish(cfg, rep);
}

int cmd_weaktype(const RunConfig& cfg) {
  Report rep{"weaktype", Json::object()};
  const auto cloud = make_cloud(cfg, true);
  const KernelMatrix kernel(cloud, kDenseLimit);
  std::vector<std::vector<double>> family;
  std::vector<std::string> labels;
  for (double d : cfg.depths) {
    family.push_back(boundary_bump(cloud, apex_point(cloud.domain), d));
    labels.push_back(format_number(d));
  }
  const auto wt = check_weak_type(kernel, family, labels);
  bool monotone = true;
  for (std::size_t k = 1; k < wt.rows.size(); ++k)
    if (cfg.depths[k] < cfg.depths[k - 1]) monotone = monotone && wt.rows[k].l1_ratio > wt.rows[k - 1].l1_ratio;
  rep.body = {{"samples", cloud.size()}, {"weak_type", to_json(wt)}};
  rep.check("finite", std::isfinite(wt.bound));
  rep.check("l1_growth_monotone", monotone);
  return finish(cfg, rep);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weighted Bergman projection experiments"};
  app.footer(kHelpFooter);
  app.set_version_flag("--version", version_string());
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig cli;
  std::string config_path;
  bool refine = false;
  std::vector<std::pair<std::string, CLI::Option*>> given;
  auto track = [&](const std::string& key, CLI::Option* opt) { given.emplace_back(key, opt); };
  app.add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
  track("domain", app.add_option("--domain", cli.domain, "ball:n=K or egg:m=K"));
  track("p", app.add_option("--p", cli.p, "Lebesgue exponent"));
  track("s", app.add_option("--s", cli.s, "dyadic scale ratio"));
  track("delta", app.add_option("--delta", cli.delta, "top dyadic scale"));
  track("kmax", app.add_option("--kmax", cli.kmax, "deepest dyadic level requested"));
  track("systems", app.add_option("--systems", cli.systems, "number of adjacent systems"));
  track("interior", app.add_option("--interior", cli.interior, "interior sample budget"));
  track("boundary", app.add_option("--boundary", cli.boundary, "boundary sample count"));
  track("seed", app.add_option("--seed", cli.seed, "master seed"));
  track("weight", app.add_option("--weight", cli.weight, "one: | power:alpha=X | sharp:s=X"));
  track("out", app.add_option("--out", cli.out, "output directory"));
  track("threads", app.add_option("--threads", cli.threads, "worker cap, 0 for all cores"));
  track("max_iter", app.add_option("--max-iter", cli.max_iter, "power iteration cap"));
  track("trials", app.add_option("--trials", cli.trials, "random balls for the adjacency check"));
  track("pairs", app.add_option("--pairs", cli.pairs, "random pairs for the domination scan"));
  track("grid", app.add_option("--grid", cli.grid, "sharp-weight exponents for the sweep")->delimiter(','));
  track("depths", app.add_option("--depths", cli.depths, "bump depths for the weak-type check")->delimiter(','));
  track("refine", app.add_flag("--refine,!--no-refine", refine, "graded sampling at the boundary point (1)"));
  track("dump_kernel", app.add_flag("--dump-kernel", cli.dump_kernel, "write kernel.bin (norm)"));

  const std::vector<std::pair<std::string, int (*)(const RunConfig&)>> commands = {
      {"dyadic", cmd_dyadic},     {"characteristic", cmd_characteristic}, {"norm", cmd_norm},
      {"sweep", cmd_sweep},       {"domination", cmd_domination},         {"weaktype", cmd_weaktype}};
  std::vector<CLI::App*> subs;
  for (const auto& [name, fn] : commands) {
    (void)fn;
    subs.push_back(app.add_subcommand(name, "run the " + name + " pipeline"));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  RunConfig cfg;
  try {
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      cfg = merge_config(cfg, Json::parse(in));
    }
    cli.refine = refine;
    const Json cj = to_json(cli);
    Json overlay = Json::object();
    for (const auto& [key, opt] : given)
      if (opt->count() > 0) overlay[key] = cj[key];
    cfg = merge_config(cfg, overlay);
    validate(cfg);
  } catch (const Json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  if (cfg.threads > 0) set_worker_cap(static_cast<std::size_t>(cfg.threads));

  try {
    for (std::size_t k = 0; k < subs.size(); ++k)
      if (subs[k]->parsed()) return commands[k].second(cfg);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.code()) {
      case ErrorCode::InvalidArgument:
      case ErrorCode::DomainKindUnsupported:
      case ErrorCode::WrongDomainKind: return kExitConfig;
      default: return kExitInvariant;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvariant;
  }
  return kExitConfig;
}
