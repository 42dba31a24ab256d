#include <doctest.h>

#include <random>

#include "ferrobvp/bulk_landscape.hpp"
#include "ferrobvp/gamma_metric.hpp"

using namespace ferrobvp;

TEST_CASE("shifted OR potential") {
  for (double c : {0.5, 1.0, 5.0}) {
    const MetricPoints mp = metric_points(c);
    CHECK(f_tilde(mp.p_star, c) <= 1e-12);
    CHECK(f_tilde(mp.p_star_star, c) <= 1e-12);
    CHECK(mp.p_star.q11 == doctest::Approx(rho_star(c)));
  }
  CHECK(f_tilde({1, 1}, 1.0) == doctest::Approx(1.514).epsilon(1e-3));
  CHECK_THROWS_AS(f_tilde({1, 1}, 1.0, 5.0), MetricConsistencyError);
}

TEST_CASE("polyline cost of a straight segment matches fine quadrature") {
  const double c = 1.0;
  const PlanePoint a{0.2, -0.4}, b{1.1, 0.9};
  const int n = 200000;
  double ref = 0.0;
  const double len = std::hypot(b.q11 - a.q11, b.m1 - a.m1);
  for (int k = 0; k < n; ++k) {
    const double t = (k + 0.5) / n;
    ref += std::sqrt(f_tilde({a.q11 + t * (b.q11 - a.q11), a.m1 + t * (b.m1 - a.m1)}, c)) * len / n;
  }
  std::vector<PlanePoint> nodes;
  for (int k = 0; k <= 400; ++k) nodes.push_back({a.q11 + k * (b.q11 - a.q11) / 400, a.m1 + k * (b.m1 - a.m1) / 400});
  CHECK(polyline_cost(nodes, c) == doctest::Approx(ref).epsilon(1e-5));
}

TEST_CASE("metric axioms on sampled points") {
  const double c = 1.0;
  MetricOptions mo;
  mo.grid = 120;
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  auto pt = [&] { return PlanePoint{u(rng), u(rng)}; };
  const PlanePoint a = pt();
  CHECK(transition_cost(a, a, c, mo).cost == 0.0);
  for (int k = 0; k < 20; ++k) {
    const PlanePoint x = pt(), y = pt(), z = pt();
    const auto xy = transition_cost(x, y, c, mo);
    const auto yx = transition_cost(y, x, c, mo);
    const double yz = transition_cost(y, z, c, mo).cost;
    const double xz = transition_cost(x, z, c, mo).cost;
    CHECK(xy.cost >= 0.0);
    CHECK(xy.cost <= xy.grid_cost);
    CHECK(xy.cost == doctest::Approx(yx.cost).epsilon(1e-6));
    CHECK(xz <= xy.cost + yz + 1e-6);
    REQUIRE(xy.path.nodes.size() >= 2);
    CHECK(xy.path.nodes.front().q11 == x.q11);
    CHECK(xy.path.nodes.back().m1 == y.m1);
  }
}

TEST_CASE("costs are stable under grid refinement") {
  MetricOptions coarse, fine;
  coarse.grid = 200;
  fine.grid = 400;
  const LimitCosts a = limit_costs(1.0, coarse);
  const LimitCosts b = limit_costs(1.0, fine);
  for (auto m : {&LimitCosts::star_starstar, &LimitCosts::star_right, &LimitCosts::starstar_left,
                 &LimitCosts::star_left, &LimitCosts::starstar_right})
    CHECK(std::abs(a.*m - b.*m) <= 0.01 * b.*m);
}

TEST_CASE("limit functional arithmetic") {
  LimitCosts lc;
  lc.star_starstar = 3.0;
  lc.star_left = 0.5;
  lc.starstar_left = 2.5;
  lc.star_right = 4.0;
  lc.starstar_right = 2.6;
  const LimitStructure s0 = limit_structure(lc, Phase::Star, 0);
  CHECK(s0.J == doctest::Approx(0.5 + 4.0));
  const LimitStructure s1 = limit_structure(lc, Phase::Star, 1);
  CHECK(s1.J == doctest::Approx(3.0 + 0.5 + 2.6));
  REQUIRE(s1.phases.size() == 2);
  CHECK(s1.phases[1] == Phase::StarStar);
  CHECK(s1.intervals.front().first == -1.0);
  CHECK(s1.intervals.back().second == 1.0);
  const LimitStructure s2 = limit_structure(lc, Phase::StarStar, 2);
  CHECK(s2.J == doctest::Approx(6.0 + 2.5 + 2.6));
  const LimitMinimum m = minimise_limit_functional(lc);
  CHECK(m.best.J == doctest::Approx(4.5));
  CHECK(m.best.jumps == 0);
  CHECK(m.candidates.size() == 6);
  CHECK(m.three_jumps_dominated);
  CHECK_THROWS_AS(limit_structure(lc, Phase::Star, -1), std::invalid_argument);
}

TEST_CASE("option validation") {
  MetricOptions mo;
  mo.grid = 1;
  CHECK_THROWS_AS(mo.validate(), std::invalid_argument);
  CHECK_THROWS_AS(metric_points(-1.0), std::invalid_argument);
  CHECK(to_string(Phase::Star) == "p*");
}
