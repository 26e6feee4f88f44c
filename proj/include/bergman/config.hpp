#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <regex>
#include <string>
#include <vector>

#include <json.hpp>

#include "bergman/geometry.hpp"
#include "bergman/sampling.hpp"
#include "bergman/weights.hpp"

namespace bergman {

/// Resolved run configuration shared by every subcommand.
struct RunConfig {
  std::string domain = "ball:n=1";
  double p = 2.0;
  double s = 8.0;      // dyadic scale ratio
  double delta = 0.8;  // top dyadic scale
  int kmax = 4;
  int systems = 5;
  std::size_t interior = 3000;
  std::size_t boundary = 1000;
  std::uint64_t seed = 1;
  std::string weight = "one:";
  std::string out = "out";
  int threads = 0;  // 0 keeps the hardware default
  std::size_t max_iter = 5000;
  std::size_t trials = 1000;
  std::size_t pairs = 100000;
  std::vector<double> grid = {0.4, 0.2, 0.1, 0.05};
  std::vector<double> depths = {0.1, 0.01, 0.001};
  std::optional<bool> refine;  // graded cluster at the boundary point (1); per-command default when unset
  bool dump_kernel = false;
};

inline const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {"domain",  "p",      "s",      "delta",   "kmax",  "systems",
                                                "interior", "boundary", "seed",   "weight",  "out",   "threads",
                                                "max_iter", "trials", "pairs",  "grid",    "depths", "refine",
                                                "dump_kernel"};
  return keys;
}

inline nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json j = {{"domain", c.domain},     {"p", c.p},           {"s", c.s},
                      {"delta", c.delta},       {"kmax", c.kmax},     {"systems", c.systems},
                      {"interior", c.interior}, {"boundary", c.boundary}, {"seed", c.seed},
                      {"weight", c.weight},     {"out", c.out},       {"threads", c.threads},
                      {"max_iter", c.max_iter}, {"trials", c.trials}, {"pairs", c.pairs},
                      {"grid", c.grid},         {"depths", c.depths}, {"dump_kernel", c.dump_kernel}};
  j["refine"] = c.refine ? nlohmann::json(*c.refine) : nlohmann::json(nullptr);
  return j;
}

namespace detail {

[[noreturn]] inline void bad_field(const std::string& key, const std::string& why) {
  throw Error(ErrorCode::InvalidArgument, "config field '" + key + "': " + why);
}

template <class T>
T field(const nlohmann::json& j, const std::string& key) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    bad_field(key, "has the wrong type");
  }
}

}  // namespace detail

struct DomainSpec {
  DomainKind kind = DomainKind::Ball;
  int param = 1;  // n for the ball, m for the egg
};

/// "ball:n=K" or "egg:m=K".
inline DomainSpec parse_domain(const std::string& text) {
  static const std::regex re(R"(^(ball):n=(\d+)$|^(egg):m=(\d+)$)");
  std::smatch m;
  if (!std::regex_match(text, m, re)) detail::bad_field("domain", "expected ball:n=K or egg:m=K, got '" + text + "'");
  if (m[1].matched) return {DomainKind::Ball, std::stoi(m[2].str())};
  return {DomainKind::Egg, std::stoi(m[4].str())};
}

inline ModelDomain make_domain(const std::string& text) {
  const DomainSpec spec = parse_domain(text);
  try {
    return spec.kind == DomainKind::Ball ? ModelDomain::ball(spec.param) : ModelDomain::egg(spec.param);
  } catch (const Error& e) {
    detail::bad_field("domain", e.what());
  }
}

struct WeightSpec {
  enum class Kind { One, Power, Sharp } kind = Kind::One;
  double param = 0.0;
};

/// "one:", "power:alpha=X" or "sharp:s=X".
inline WeightSpec parse_weight(const std::string& text) {
  static const std::regex re(R"(^one:?$|^power:alpha=([-+0-9.eE]+)$|^sharp:s=([-+0-9.eE]+)$)");
  std::smatch m;
  if (!std::regex_match(text, m, re))
    detail::bad_field("weight", "expected one:, power:alpha=X or sharp:s=X, got '" + text + "'");
  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || !std::isfinite(v)) detail::bad_field("weight", "'" + s + "' is not a number");
    return v;
  };
  if (m[1].matched) return {WeightSpec::Kind::Power, number(m[1].str())};
  if (m[2].matched) return {WeightSpec::Kind::Sharp, number(m[2].str())};
  return {};
}

inline WeightPair make_weight_pair(const SampleCloud& cloud, double p, const std::string& text) {
  const WeightSpec spec = parse_weight(text);
  switch (spec.kind) {
    case WeightSpec::Kind::Power: return make_pair(p, power_weight(cloud, spec.param));
    case WeightSpec::Kind::Sharp: return sharp_example_weight(cloud, p, spec.param);
    case WeightSpec::Kind::One: break;
  }
  return make_pair(p, constant_weight(cloud));
}

/// Overlay `j` onto `base`, rejecting unknown keys and invalid values with
/// the offending field named.
inline RunConfig merge_config(RunConfig base, const nlohmann::json& j) {
  using detail::bad_field;
  using detail::field;
  if (!j.is_object()) throw Error(ErrorCode::InvalidArgument, "config must be a JSON object");
  const auto& keys = config_keys();
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) bad_field(key, "unknown field");
  }
  auto has = [&](const char* k) { return j.contains(k); };
  if (has("domain")) base.domain = field<std::string>(j, "domain");
  if (has("p")) base.p = field<double>(j, "p");
  if (has("s")) base.s = field<double>(j, "s");
  if (has("delta")) base.delta = field<double>(j, "delta");
  if (has("kmax")) base.kmax = field<int>(j, "kmax");
  if (has("systems")) base.systems = field<int>(j, "systems");
  if (has("interior")) base.interior = field<std::size_t>(j, "interior");
  if (has("boundary")) base.boundary = field<std::size_t>(j, "boundary");
  if (has("seed")) base.seed = field<std::uint64_t>(j, "seed");
  if (has("weight")) base.weight = field<std::string>(j, "weight");
  if (has("out")) base.out = field<std::string>(j, "out");
  if (has("threads")) base.threads = field<int>(j, "threads");
  if (has("max_iter")) base.max_iter = field<std::size_t>(j, "max_iter");
  if (has("trials")) base.trials = field<std::size_t>(j, "trials");
  if (has("pairs")) base.pairs = field<std::size_t>(j, "pairs");
  if (has("grid")) base.grid = field<std::vector<double>>(j, "grid");
  if (has("depths")) base.depths = field<std::vector<double>>(j, "depths");
  if (has("refine")) {
    if (j["refine"].is_null()) base.refine.reset();
    else base.refine = field<bool>(j, "refine");
  }
  if (has("dump_kernel")) base.dump_kernel = field<bool>(j, "dump_kernel");
  return base;
}

inline void validate(const RunConfig& c) {
  using detail::bad_field;
  make_domain(c.domain);
  parse_weight(c.weight);
  if (!(c.p > 1.0) || !std::isfinite(c.p)) bad_field("p", "must be a finite number above 1");
  if (!(c.s > 2.0) || !std::isfinite(c.s)) bad_field("s", "scale ratio must exceed 2");
  if (!(c.delta > 0.0 && c.delta <= 2.0)) bad_field("delta", "must lie in (0, 2]");
  if (c.kmax < 0 || c.kmax > 12) bad_field("kmax", "must lie in [0, 12]");
  if (c.systems < 1 || c.systems > 64) bad_field("systems", "must lie in [1, 64]");
  if (c.interior < 16) bad_field("interior", "needs at least 16 samples");
  if (c.boundary < 16) bad_field("boundary", "needs at least 16 samples");
  if (c.threads < 0) bad_field("threads", "must be non-negative");
  if (c.max_iter < 1) bad_field("max_iter", "must be positive");
  if (c.trials < 1) bad_field("trials", "must be positive");
  if (c.grid.size() < 2) bad_field("grid", "needs at least two values");
  for (double v : c.grid)
    if (!(v > 0.0 && v <= 0.5)) bad_field("grid", "values must lie in (0, 0.5]");
  if (c.depths.empty()) bad_field("depths", "needs at least one value");
  for (double v : c.depths)
    if (!(v > 0.0 && v < 0.5)) bad_field("depths", "values must lie in (0, 0.5)");
  if (c.out.empty()) bad_field("out", "must not be empty");
}

/// Sampling options for a config; the graded cluster is only available on the disc.
inline SamplingOptions sampling_options(const RunConfig& c, bool refine) {
  SamplingOptions opt;
  opt.n_interior = c.interior;
  opt.n_boundary = c.boundary;
  opt.seed = c.seed;
  if (refine) {
    const DomainSpec d = parse_domain(c.domain);
    if (d.kind != DomainKind::Ball || d.param != 1) detail::bad_field("refine", "graded sampling needs ball:n=1");
    GradedRefinement edge;
    edge.kind = GradedRefinement::Kind::BoundaryPoint;
    edge.center = CPoint(cplx(1.0));
    edge.radius = 0.1;
    edge.min_scale = 1e-40;
    opt.refinements.push_back(edge);
  }
  return opt;
}

}  // namespace bergman
