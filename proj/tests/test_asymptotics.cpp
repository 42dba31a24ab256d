#include <doctest.h>

#include "ferrobvp/asymptotics.hpp"
#include "ferrobvp/bulk_landscape.hpp"
#include "ferrobvp/nonlinear_solver.hpp"
#include "support.hpp"

using namespace ferrobvp;
using testing_support::Frac;

namespace {

using Poly = std::vector<Frac>;

Poly from(const RationalPolynomial& r) {
  Poly p;
  for (auto [n, d] : r.coeffs) p.emplace_back(n, d);
  return p;
}

Poly add(Poly a, const Poly& b) {
  if (b.size() > a.size()) a.resize(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) a[i] = a[i] + b[i];
  return a;
}

Poly mul(const Poly& a, const Poly& b) {
  Poly out(a.size() + b.size() - 1);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] = out[i + j] + a[i] * b[j];
  return out;
}

Poly second_derivative(const Poly& a) {
  Poly out;
  for (std::size_t i = 2; i < a.size(); ++i) out.push_back(a[i] * Frac(std::int64_t(i * (i - 1))));
  return out;
}

Frac eval(const Poly& a, Frac y) {
  Frac acc;
  for (auto it = a.rbegin(); it != a.rend(); ++it) acc = acc * y + *it;
  return acc;
}

bool same(Poly a, Poly b) {
  const std::size_t n = std::max(a.size(), b.size());
  a.resize(n);
  b.resize(n);
  return a == b;
}

}  // namespace

TEST_CASE("correctors vanish at both walls in exact arithmetic") {
  for (const auto* r : {&corrector_f2(), &corrector_f2_star(), &corrector_p(), &corrector_q()}) {
    CHECK(eval(from(*r), Frac(1)) == Frac(0));
    CHECK(eval(from(*r), Frac(-1)) == Frac(0));
  }
}

TEST_CASE("correctors solve the order-by-order equations") {
  // Q'' = c (4 Q (Q^2 - 1) - c M^2), M'' = c (M (M^2 - 1) - 2 c Q M) at l = 1/c,
  // expanded about Q = M = -y.
  const Poly y = {Frac(0), Frac(1)};
  const Poly minus_y = {Frac(0), Frac(-1)};
  const Poly y2 = mul(y, y);
  const Poly y2m1 = add(y2, {Frac(-1)});
  const Poly f2 = from(corrector_f2()), f2s = from(corrector_f2_star());
  CHECK(same(second_derivative(f2), mul({Frac(4)}, mul(minus_y, y2m1))));
  CHECK(same(second_derivative(f2s), mul(minus_y, y2m1)));
  const Poly rhs_p = add(mul(add(mul({Frac(12)}, y2), {Frac(-4)}), f2), mul({Frac(-1)}, y2));
  const Poly rhs_q = add(mul(add(mul({Frac(3)}, y2), {Frac(-1)}), f2s), mul({Frac(-2)}, y2));
  CHECK(same(second_derivative(from(corrector_p())), rhs_p));
  CHECK(same(second_derivative(from(corrector_q())), rhs_q));
}

TEST_CASE("expansion orders") {
  CHECK(or_expansion(0.3, 0.1, 0).q11 == -0.3);
  CHECK(or_expansion(0.3, 0.0, 2).m1 == -0.3);
  CHECK(or_expansion(1.0, 0.2, 2).q11 == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK_THROWS_AS(or_expansion(0.0, 0.1, 3), std::invalid_argument);
}

TEST_CASE("log-log slope of an exact power law") {
  const std::vector<double> x = {1, 2, 4, 8};
  std::vector<double> y;
  for (double v : x) y.push_back(3 * std::pow(v, -1.5));
  CHECK(loglog_slope(x, y) == doctest::Approx(-1.5).epsilon(1e-12));
  CHECK_THROWS_AS(loglog_slope({1}, {1}), std::invalid_argument);
}

TEST_CASE("small convergence study shows the expected orders") {
  const std::vector<double> cs = {0.004, 0.008, 0.016};
  for (int order = 0; order < 3; ++order) {
    const ConvergenceStudy s = convergence_study(cs, order, 400);
    CHECK(s.slope() == doctest::Approx(order + 1).epsilon(0.15));
  }
  CHECK_THROWS_AS(convergence_study({0.0}, 0, 100), std::invalid_argument);
}

TEST_CASE("limit map has bulk magnitudes and an even phase relation") {
  const double c = 2.0;
  const FieldState s = limit_map_l0(make_mesh(40), c, -1);
  const Diagnostics d = diagnostics(s);
  const double rs = rho_star(c);
  for (int i = 0; i < s.n_nodes(); ++i) {
    CHECK(d.q_norm[i] == doctest::Approx(rs).epsilon(1e-13));
    CHECK(d.m_norm[i] * d.m_norm[i] == doctest::Approx(1 + 2 * c * rs).epsilon(1e-13));
    CHECK(std::abs(std::remainder(d.twophi_minus_theta[i], 2 * M_PI)) <= 1e-12);
  }
  CHECK_THROWS_AS(limit_map_l0(make_mesh(4), c, 0), std::invalid_argument);
}

TEST_CASE("Laplace limit is the large-l solution") {
  auto mesh = make_mesh(200);
  const ModelParams p = ModelParams::equal_elastic(100.0, 1.0);
  const auto rep = newton_solve(laplace_limit_state(mesh), p);
  REQUIRE(rep.converged);
  CHECK(sup_distance(rep.final_state, laplace_limit_state(mesh)) < 0.01);
}
