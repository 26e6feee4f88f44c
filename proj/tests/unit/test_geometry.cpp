#include <catch_amalgamated.hpp>

#include <random>

#include "bergman/geometry.hpp"
#include "bergman/quadrature.hpp"
#include "bergman/sampling.hpp"

using namespace bergman;
using Catch::Approx;

namespace {

CPoint egg_boundary_point(int m, double angle, double phase1, double phase2) {
  const double c = std::cos(angle), s = std::sin(angle);
  const double r = detail::egg_profile_radius(m, c, s);
  return CPoint(std::polar(r * c, phase1), std::polar(r * s, phase2));
}

// Smallest grid delta for which eta lies in the polydisc D(zeta, delta).
double polydisc_grid_distance(const ModelDomain& dom, const CPoint& zeta, const CPoint& eta) {
  const CPoint v = eta - zeta;
  const double a = std::abs(hermitian(v, outward_normal(dom, zeta)));
  const double b = std::abs(hermitian(v, egg_tangent(dom, zeta)));
  for (double d = 1e-8; d <= 1.0; d *= 1.02)
    if (a < d && b < tau_scaling(dom, zeta, d, 2)) return d;
  return 1.0;
}

}  // namespace

TEST_CASE("defining function") {
  CHECK(defining_function(ModelDomain::ball(2), CPoint(cplx(0), cplx(0))) == -1.0);
  CHECK(defining_function(ModelDomain::egg(2), CPoint(cplx(1), cplx(0))) == 0.0);
  CHECK(defining_function(ModelDomain::egg(2), CPoint(cplx(0.5), cplx(0.5))) == Approx(-0.6875));
}

TEST_CASE("gauss legendre integrates polynomials") {
  for (int order : {1, 2, 5, 24}) {
    const auto g = gauss_legendre(order, 0.0, 2.0);
    double sum = 0.0, cubic = 0.0;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      sum += g.weights[i];
      cubic += g.weights[i] * g.nodes[i] * g.nodes[i] * g.nodes[i];
    }
    CHECK(sum == Approx(2.0).epsilon(1e-13));
    if (order >= 2) CHECK(cubic == Approx(4.0).epsilon(1e-12));
  }
}

TEST_CASE("ball projection is radial") {
  const auto disc = ModelDomain::ball(1);
  const auto wide = ModelDomain::ball(1, 0.6);
  const auto p = boundary_projection(wide, CPoint(cplx(0.5)));
  CHECK(p.point[0] == cplx(1.0));
  CHECK(p.depth == Approx(0.5));
  const auto b2 = ModelDomain::ball(2, 0.6);
  const auto q = boundary_projection(b2, CPoint(cplx(0.3), cplx(0.4)));
  CHECK(std::abs(q.point[0] - 0.6) < 1e-15);
  CHECK(std::abs(q.point[1] - 0.8) < 1e-15);
  CHECK_THROWS_AS(boundary_projection(b2, CPoint(cplx(0), cplx(0))), Error);
  CHECK_THROWS_AS(boundary_projection(disc, CPoint(cplx(0.2))), Error);
}

TEST_CASE("egg projection beats a brute-force candidate scan") {
  const auto egg = ModelDomain::egg(2);
  for (const CPoint& z : {CPoint(cplx(0.99), cplx(0)), CPoint(cplx(0.8, 0.1), cplx(0.5, -0.2)),
                          CPoint(cplx(0.1), cplx(0.0, 0.95))}) {
    const auto p = boundary_projection(egg, z);
    CHECK(std::abs(defining_function(egg, p.point)) < 1e-12);
    CHECK(std::abs(distance(z, p.point) - p.depth) < 1e-10);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 10000; ++k) {
      const CPoint c = egg_boundary_point(2, 0.5 * kPi * u(rng), 2 * kPi * u(rng), 2 * kPi * u(rng));
      best = std::min(best, distance(z, c));
    }
    CHECK(p.depth <= best + 1e-12);
  }
}

TEST_CASE("projection is idempotent along the inward normal") {
  const auto egg = ModelDomain::egg(2);
  const auto b2 = ModelDomain::ball(2);
  for (double angle : {0.1, 0.7, 1.3}) {
    const CPoint q = egg_boundary_point(2, angle, 0.4, -1.1);
    for (double t : {1e-3, 0.05, 0.15}) {
      const auto p = boundary_projection(egg, q - t * outward_normal(egg, q));
      CHECK(distance(p.point, q) < 1e-8);
      CHECK(p.depth == Approx(t).epsilon(1e-8));
    }
    const CPoint s(cplx(std::cos(angle)), std::polar(std::sin(angle), 0.3));
    const auto p = boundary_projection(b2, s - 0.3 * outward_normal(b2, s));
    CHECK(distance(p.point, s) < 1e-12);
  }
}

TEST_CASE("ball quasi-metric values and quasi-triangle constant") {
  const auto b2 = ModelDomain::ball(2);
  CHECK(quasi_metric(b2, CPoint(cplx(1), cplx(0)), CPoint(cplx(1), cplx(0))) == 0.0);
  CHECK(quasi_metric(b2, CPoint(cplx(1), cplx(0)), CPoint(cplx(0), cplx(1))) == Approx(1.0));
  CHECK_THROWS_AS(quasi_metric(b2, CPoint(cplx(0.5), cplx(0)), CPoint(cplx(1), cplx(0))), Error);

  std::mt19937_64 rng(11);
  double worst = 0.0;
  for (int t = 0; t < 100000; ++t) {
    const CPoint a = detail::random_sphere_point(2, rng), b = detail::random_sphere_point(2, rng),
                 c = detail::random_sphere_point(2, rng);
    const double ab = quasi_metric(b2, a, b), ba = quasi_metric(b2, b, a);
    REQUIRE(ab == ba);
    const double lhs = quasi_metric(b2, a, c), rhs = ab + quasi_metric(b2, b, c);
    if (rhs > 0.0) worst = std::max(worst, lhs / rhs);
  }
  INFO("empirical quasi-triangle constant " << worst);
  CHECK(worst <= 2.0);
}

TEST_CASE("egg quasi-metric agrees with a polydisc grid oracle") {
  const auto egg = ModelDomain::egg(2);
  const CPoint q(cplx(1), cplx(0));
  for (double angle : {0.02, 0.1, 0.3})
    for (double phase : {0.0, 0.05}) {
      const CPoint eta = egg_boundary_point(2, angle, phase, 0.7);
      const double d = quasi_metric(egg, q, eta);
      const double oracle = std::max(polydisc_grid_distance(egg, q, eta), polydisc_grid_distance(egg, eta, q));
      CHECK(d == quasi_metric(egg, eta, q));
      CHECK(d <= 2.0 * oracle);
      CHECK(oracle <= 2.0 * d);
    }
}

TEST_CASE("egg quasi-triangle constant is finite") {
  const auto egg = ModelDomain::egg(2);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto draw = [&] { return egg_boundary_point(2, 0.5 * kPi * u(rng), 2 * kPi * u(rng), 2 * kPi * u(rng)); };
  double worst = 0.0;
  for (int t = 0; t < 2000; ++t) {
    const CPoint a = draw(), b = draw(), c = draw();
    worst = std::max(worst, quasi_metric(egg, a, c) / (quasi_metric(egg, a, b) + quasi_metric(egg, b, c)));
  }
  INFO("egg quasi-triangle constant " << worst);
  CHECK(std::isfinite(worst));
  CHECK(worst >= 0.5);
}

TEST_CASE("scaling functions") {
  const auto b2 = ModelDomain::ball(2);
  const CPoint q(cplx(1), cplx(0));
  CHECK(lambda_scaling(b2, q, 0.1) == Approx(0.01));
  CHECK(lambda_scaling(b2, q, 1.0) == 1.0);
  CHECK(lambda_scaling(b2, q, 0.25) == 0.0625);
  CHECK_THROWS_AS(lambda_scaling(ModelDomain::egg(2), q, 0.1), Error);
  CHECK_THROWS_AS(tau_scaling(b2, q, 0.1, 2), Error);

  const auto egg = ModelDomain::egg(2);
  CHECK(tau_scaling(egg, q, 1e-4, 2) == Approx(0.1).epsilon(1e-7));
  CHECK(tau_scaling(egg, CPoint(cplx(0), cplx(1)), 1e-4, 2) == Approx(0.01).epsilon(1e-7));
  for (double d : {1e-2, 1e-5, 0.3}) CHECK(tau_scaling(egg, egg_boundary_point(2, 0.4, 0, 0), d, 1) == d);
}

TEST_CASE("tau_2 lies between the strictly convex and flat rates") {
  const auto egg = ModelDomain::egg(2);
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (double angle : {0.0, 0.2, 0.6, 1.0, 1.4, 0.5 * kPi})
    for (double d : {1e-2, 1e-4, 1e-6}) {
      const double t = tau_scaling(egg, egg_boundary_point(2, angle, 0.3, 1.2), d, 2);
      lo = std::min(lo, t / std::sqrt(d));
      hi = std::max(hi, t / std::pow(d, 0.25));
    }
  INFO("c = " << lo << ", C = " << hi);
  CHECK(lo >= 0.5);
  CHECK(hi <= 2.0);
}

TEST_CASE("tent membership on the disc") {
  const auto disc = ModelDomain::ball(1);
  CHECK(tent_membership(disc, CPoint(cplx(0.5)), CPoint(cplx(1)), 0.5));  // delta >= delta_global covers Omega
  const auto narrow = ModelDomain::ball(1, 0.6, 0.6);
  CHECK(tent_membership(narrow, CPoint(cplx(0.9)), CPoint(cplx(1)), 0.5));
  CHECK_FALSE(tent_membership(narrow, CPoint(cplx(0.5)), CPoint(cplx(1)), 0.5));
  CHECK(tent_membership(disc, CPoint(cplx(0.0, 0.1)), CPoint(cplx(1)), 0.45));
  CHECK(tent_membership(disc, CPoint(cplx(0.95)), CPoint(cplx(1)), 0.3));
  CHECK_FALSE(tent_membership(disc, CPoint(cplx(-0.95)), CPoint(cplx(1)), 0.3));
}

TEST_CASE("egg balls that meet are swallowed by a fixed dilate") {
  const auto egg = ModelDomain::egg(2);
  const auto cloud = sample(egg, 50, 300, 2);
  const std::size_t nb = cloud.boundary.size();
  std::vector<double> d(nb * nb, 0.0);
  for (std::size_t a = 0; a < nb; ++a)
    for (std::size_t b = a + 1; b < nb; ++b) d[a * nb + b] = d[b * nb + a] = cloud.metric(a, b);
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<std::size_t> pick(0, nb - 1);
  std::uniform_real_distribution<double> u(std::log(0.5), std::log(2.0));
  double worst = 0.0;
  std::size_t meeting = 0;
  for (int t = 0; t < 2000; ++t) {
    const std::size_t q1 = pick(rng), q2 = pick(rng);
    const double r = std::exp(u(rng));
    bool meet = false;
    for (std::size_t x = 0; x < nb && !meet; ++x) meet = d[q1 * nb + x] < r && d[q2 * nb + x] < r;
    if (!meet) continue;
    ++meeting;
    for (std::size_t x = 0; x < nb; ++x)
      if (d[q2 * nb + x] < r) worst = std::max(worst, d[q1 * nb + x] / r);
  }
  double a = 0.0;
  for (int t = 0; t < 200000; ++t) {
    const std::size_t x = pick(rng), y = pick(rng), z = pick(rng);
    const double rhs = d[x * nb + y] + d[y * nb + z];
    if (rhs > 0.0) a = std::max(a, d[x * nb + z] / rhs);
  }
  INFO("covering constant " << worst << " over " << meeting << " meeting pairs, quasi-triangle " << a);
  CHECK(meeting > 100);
  CHECK(std::isfinite(worst));
  CHECK(worst <= a + 2.0 * a * a);
}
