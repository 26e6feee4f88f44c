#include <catch_amalgamated.hpp>

#include "bergman/dyadic.hpp"

using namespace bergman;

namespace {

const SampleCloud& disc_cloud() {
  static const SampleCloud cloud = sample(ModelDomain::ball(1), 200, 600, 4);
  return cloud;
}

const SampleCloud& ball2_cloud() {
  static const SampleCloud cloud = sample(ModelDomain::ball(2), 200, 600, 4);
  return cloud;
}

}  // namespace

TEST_CASE("nets are separated and covering") {
  const auto& cloud = disc_cloud();
  for (int k : {0, 1, 2}) {
    const double r = 0.8 * std::pow(8.0, -k);
    const auto net = build_net(cloud, k, 8.0, 0.8, 9);
    for (std::size_t a = 0; a < net.size(); ++a)
      for (std::size_t b = a + 1; b < net.size(); ++b) CHECK(cloud.metric(net[a], net[b]) > r);
    for (std::size_t x = 0; x < cloud.boundary.size(); ++x) {
      bool covered = false;
      for (std::size_t p : net) covered = covered || p == x || cloud.metric(x, p) <= r;
      REQUIRE(covered);
    }
  }
}

TEST_CASE("dyadic systems partition and nest on both balls") {
  for (const SampleCloud* cloud : {&disc_cloud(), &ball2_cloud()}) {
    const auto sys = build_system(*cloud, 8.0, 0.8, 4, 3);
    CHECK(sys.levels.size() == 5);
    CHECK(check_partition(sys, cloud->boundary.size()));
    CHECK(check_nesting(sys));
    double total = 0.0;
    for (const auto& c : sys.levels[0]) total += c.measure;
    CHECK(total == Catch::Approx(cloud->boundary_measure()).epsilon(1e-12));
    for (std::size_t k = 1; k < sys.levels.size(); ++k)
      CHECK(sys.levels[k].size() >= sys.levels[k - 1].size());
  }
}

TEST_CASE("reference points are nested across levels") {
  const auto sys = build_system(disc_cloud(), 8.0, 0.8, 3, 12);
  for (std::size_t k = 1; k < sys.levels.size(); ++k)
    for (const auto& up : sys.levels[k - 1]) {
      bool found = false;
      for (const auto& c : sys.levels[k]) found = found || c.ref == up.ref;
      CHECK(found);
    }
}

TEST_CASE("systems are deterministic in the seed") {
  const auto a = build_system(disc_cloud(), 8.0, 0.8, 3, 21);
  const auto b = build_system(disc_cloud(), 8.0, 0.8, 3, 21);
  const auto c = build_system(disc_cloud(), 8.0, 0.8, 3, 22);
  CHECK(a.cell_of == b.cell_of);
  CHECK(a.cell_of != c.cell_of);
}

TEST_CASE("strict mode refuses unresolved scales") {
  const auto& cloud = disc_cloud();
  const int k = resolved_depth(cloud, 8.0, 0.8, 6);
  CHECK(k < 6);
  CHECK(0.8 * std::pow(8.0, -k) > boundary_resolution(cloud));
  CHECK_NOTHROW(build_system(cloud, 8.0, 0.8, k, 1, true));
  CHECK_THROWS_AS(build_system(cloud, 8.0, 0.8, 6, 1, true), Error);
  CHECK_NOTHROW(build_system(cloud, 8.0, 0.8, 6, 1, false));
  CHECK_THROWS_AS(build_system(cloud, 1.0, 0.8, 2, 1), Error);
}

TEST_CASE("sandwich constants are bounded") {
  for (const SampleCloud* cloud : {&disc_cloud(), &ball2_cloud()}) {
    const auto sys = build_system(*cloud, 8.0, 0.8, resolved_depth(*cloud, 8.0, 0.8, 4), 5);
    const auto sc = sandwich_constants(sys, *cloud);
    INFO("c = " << sc.inner << ", C = " << sc.outer);
    CHECK(sc.inner > 0.0);
    CHECK(std::isfinite(sc.outer));
    CHECK(sc.ratio() <= 100.0);
  }
}

TEST_CASE("more adjacent systems do not reduce adjacency success") {
  const auto& cloud = disc_cloud();
  const int k = 4;
  const auto family = build_adjacent_family(cloud, 8.0, 0.8, k, 5, 40);
  CHECK(family.systems.size() == 5);
  CHECK(family.systems[3].seed == 43);
  const AdjacentFamily single{{family.systems.front()}};
  const auto many = verify_adjacency(family, cloud, 300, 7);
  const auto one = verify_adjacency(single, cloud, 300, 7);
  INFO("N=5 " << many.success_rate() << ", N=1 " << one.success_rate());
  CHECK(many.threshold == 64.0);
  CHECK(many.success_rate() >= one.success_rate());
  CHECK(many.success_rate() >= 0.8);
  CHECK_THROWS_AS(build_adjacent_family(cloud, 8.0, 0.8, k, 0, 1), Error);
}
