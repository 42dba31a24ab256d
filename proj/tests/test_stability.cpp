#include <doctest.h>

#include <random>

#include <Eigen/Eigenvalues>

#include "ferrobvp/guesses.hpp"
#include "ferrobvp/nonlinear_solver.hpp"
#include "ferrobvp/stability.hpp"
#include "support.hpp"

using namespace ferrobvp;

namespace {

BandedMatrix random_symmetric(int n, int bw, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1, 1);
  BandedMatrix a(n, bw, bw);
  for (int i = 0; i < n; ++i) {
    a(i, i) = 3 * u(rng);
    for (int j = i + 1; j <= std::min(n - 1, i + bw); ++j) a(i, j) = a(j, i) = u(rng);
  }
  return a;
}

}  // namespace

TEST_CASE("Lanczos and dense eigensolvers agree") {
  const BandedMatrix a = random_symmetric(400, 5, 4);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ref(a.to_dense());
  const EigenPairs lz = lowest_eigenpairs(a, 5, true, 0);
  const EigenPairs dn = lowest_eigenpairs(a, 5, true, 10000);
  CHECK_FALSE(lz.dense);
  CHECK(dn.dense);
  for (int k = 0; k < 5; ++k) {
    CHECK(lz.values[k] == doctest::Approx(ref.eigenvalues()[k]).epsilon(1e-9));
    CHECK(dn.values[k] == doctest::Approx(ref.eigenvalues()[k]).epsilon(1e-9));
    const Eigen::VectorXd v = lz.vectors.col(k);
    CHECK((a * v - lz.values[k] * v).norm() <= 1e-8);
  }
}

TEST_CASE("verdict rules") {
  Eigen::VectorXd ev(3);
  ev << 0.1, 0.2, 0.3;
  CHECK(classify(ev, 1e-8).verdict == Verdict::Stable);
  ev << -0.1, -1e-3, 0.3;
  CHECK(classify(ev, 1e-8).verdict == Verdict::Unstable);
  CHECK(classify(ev, 1e-8).index == 2);
  ev << -0.1, 1e-10, 0.3;
  CHECK(classify(ev, 1e-8).verdict == Verdict::Marginal);
  CHECK(to_string(Verdict::Unstable) == "unstable");
}

TEST_CASE("unconverged states are refused") {
  const ModelParams p = ModelParams::equal_elastic(0.5, 1.0);
  const auto s = make_guess<4>("random:1", make_mesh(50), p);
  CHECK_THROWS_AS(hessian_spectrum(s, p), NotConvergedError);
}

TEST_CASE("a large-l solution is stable and OR states are critical in the full system") {
  const ModelParams p = ModelParams::equal_elastic(3.0, 1.0);
  auto mesh = make_mesh(200);
  const auto rep = newton_solve(make_guess<2>("linear", mesh, p), p);
  REQUIRE(rep.converged);
  CHECK(hessian_spectrum(rep.final_state, p).verdict == Verdict::Stable);
  const FieldState e = embed(rep.final_state);
  CHECK(residual(e, p).norm() <= 1e-8);
  CHECK(hessian_spectrum(e, p).verdict == Verdict::Stable);
}

TEST_CASE("cutoff profile") {
  const SecondVariationProbe pr{0.1};
  CHECK(pr.z(0.0) == 1.0);
  CHECK(pr.z(0.8) == 1.0);
  CHECK(pr.z(0.9) == 0.0);
  CHECK(pr.z(-1.0) == 0.0);
  CHECK(pr.z(0.85) == doctest::Approx(0.5));
  CHECK(pr.z(-0.85) == doctest::Approx(0.5));
  CHECK_THROWS_AS((SecondVariationProbe{0.3}.validate()), std::invalid_argument);
}

TEST_CASE("probe integral matches the Hessian quadratic form") {
  const ModelParams p = ModelParams::equal_elastic(0.05, 1.0);
  auto mesh = make_mesh(1000);
  const auto rep = newton_solve(make_guess<2>("plateau-plus", mesh, p), p);
  REQUIRE(rep.converged);
  const SecondVariationProbe pr{0.1};
  const ProbeDirections d = probe_directions(rep.final_state, pr);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(4 * rep.final_state.n_nodes());
  for (int i = 0; i < rep.final_state.n_nodes(); ++i) {
    v[4 * i + 1] = d.h[i];
    v[4 * i + 3] = d.w[i];
  }
  const double probe = or_instability_probe(rep.final_state, p, pr);
  const double form = hessian_quadratic_form(embed(rep.final_state), p, v);
  CHECK(probe == doctest::Approx(form).epsilon(1e-4));
}
