#include <catch_amalgamated.hpp>

#include "bergman/config.hpp"

using namespace bergman;
using nlohmann::json;

namespace {

std::string rejection(const RunConfig& c) {
  try {
    validate(c);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidArgument);
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("defaults validate and serialise every key") {
  const RunConfig c;
  CHECK_NOTHROW(validate(c));
  const json j = to_json(c);
  for (const auto& key : config_keys()) CHECK(j.contains(key));
  CHECK(j.size() == config_keys().size());
  CHECK(j["refine"].is_null());
}

TEST_CASE("merge overlays only the given fields") {
  RunConfig base;
  base.seed = 9;
  const auto merged = merge_config(base, json::parse(R"({"domain": "egg:m=2", "p": 1.5, "grid": [0.3, 0.1], "refine": true})"));
  CHECK(merged.domain == "egg:m=2");
  CHECK(merged.p == 1.5);
  CHECK(merged.grid == std::vector<double>{0.3, 0.1});
  CHECK(merged.refine == true);
  CHECK(merged.seed == 9);
  CHECK(merged.kmax == base.kmax);
  CHECK(to_json(merge_config(base, to_json(merged))) == to_json(merged));
  CHECK_FALSE(merge_config(merged, json::parse(R"({"refine": null})")).refine.has_value());
}

TEST_CASE("merge rejects unknown keys and wrong types") {
  const RunConfig base;
  CHECK_THROWS_WITH(merge_config(base, json::parse(R"({"sigma": 1})")), Catch::Matchers::ContainsSubstring("'sigma'"));
  CHECK_THROWS_WITH(merge_config(base, json::parse(R"({"p": "two"})")), Catch::Matchers::ContainsSubstring("'p'"));
  CHECK_THROWS_AS(merge_config(base, json::parse("[1, 2]")), Error);
}

TEST_CASE("validation names the offending field") {
  auto with = [](auto mutate) {
    RunConfig c;
    mutate(c);
    return rejection(c);
  };
  CHECK_THAT(with([](RunConfig& c) { c.p = 1.0; }), Catch::Matchers::ContainsSubstring("'p'"));
  CHECK_THAT(with([](RunConfig& c) { c.s = 2.0; }), Catch::Matchers::ContainsSubstring("'s'"));
  CHECK_THAT(with([](RunConfig& c) { c.delta = 0.0; }), Catch::Matchers::ContainsSubstring("'delta'"));
  CHECK_THAT(with([](RunConfig& c) { c.kmax = -1; }), Catch::Matchers::ContainsSubstring("'kmax'"));
  CHECK_THAT(with([](RunConfig& c) { c.systems = 0; }), Catch::Matchers::ContainsSubstring("'systems'"));
  CHECK_THAT(with([](RunConfig& c) { c.interior = 3; }), Catch::Matchers::ContainsSubstring("'interior'"));
  CHECK_THAT(with([](RunConfig& c) { c.grid = {0.1}; }), Catch::Matchers::ContainsSubstring("'grid'"));
  CHECK_THAT(with([](RunConfig& c) { c.depths = {0.7}; }), Catch::Matchers::ContainsSubstring("'depths'"));
  CHECK_THAT(with([](RunConfig& c) { c.domain = "ball:n=0"; }), Catch::Matchers::ContainsSubstring("'domain'"));
  CHECK_THAT(with([](RunConfig& c) { c.domain = "torus"; }), Catch::Matchers::ContainsSubstring("'domain'"));
  CHECK_THAT(with([](RunConfig& c) { c.weight = "power:alpha=x"; }), Catch::Matchers::ContainsSubstring("'weight'"));
}

TEST_CASE("domain and weight specs") {
  CHECK(parse_domain("ball:n=2").kind == DomainKind::Ball);
  CHECK(parse_domain("ball:n=2").param == 2);
  CHECK(parse_domain("egg:m=2").kind == DomainKind::Egg);
  CHECK(parse_weight("one:").kind == WeightSpec::Kind::One);
  CHECK(parse_weight("power:alpha=-0.5").param == -0.5);
  CHECK(parse_weight("sharp:s=0.1").kind == WeightSpec::Kind::Sharp);
  CHECK_THROWS_AS(parse_weight("sharp:s="), Error);

  const auto cloud = sample(ModelDomain::ball(1), 100, 40, 1);
  CHECK(make_weight_pair(cloud, 2.0, "power:alpha=0.5").sigma.description == "power:alpha=0.5");
  CHECK(make_weight_pair(cloud, 2.0, "one:").sigma.values.front() == 1.0);
}

TEST_CASE("graded sampling is limited to the disc") {
  RunConfig c;
  CHECK(sampling_options(c, true).refinements.size() == 1);
  CHECK(sampling_options(c, false).refinements.empty());
  c.domain = "ball:n=2";
  CHECK_THROWS_WITH(sampling_options(c, true), Catch::Matchers::ContainsSubstring("'refine'"));
}
