#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>

#include "ferrobvp/asymptotics.hpp"
#include "ferrobvp/bulk_landscape.hpp"
#include "ferrobvp/discretization.hpp"

namespace testing_support {

using namespace ferrobvp;

/// Exact rational with int64 parts, always reduced.
struct Frac {
  std::int64_t n = 0, d = 1;
  Frac(std::int64_t num = 0, std::int64_t den = 1) : n(num), d(den) {
    if (d < 0) n = -n, d = -d;
    const auto g = std::gcd(n, d);
    if (g > 1) n /= g, d /= g;
  }
  friend Frac operator+(Frac a, Frac b) { return {a.n * b.d + b.n * a.d, a.d * b.d}; }
  friend Frac operator*(Frac a, Frac b) { return {a.n * b.n, a.d * b.d}; }
  friend bool operator==(Frac a, Frac b) { return a.n == b.n && a.d == b.d; }
};

/// Exact value of a rational-coefficient polynomial at y.
inline Frac exact_eval(const RationalPolynomial& r, Frac y) {
  Frac acc;
  for (auto it = r.coeffs.rbegin(); it != r.coeffs.rend(); ++it) acc = acc * y + Frac(it->first, it->second);
  return acc;
}

/// Pinned state with smooth random interior values.
template <int Fields>
NodalState<Fields> random_state(int n_cells, std::mt19937_64& rng, double amplitude = 0.7) {
  NodalState<Fields> s(make_mesh(n_cells));
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int f = 0; f < Fields; ++f) {
    const double a1 = amplitude * u(rng), a2 = amplitude * u(rng), a3 = amplitude * u(rng);
    for (int i = 1; i + 1 < s.n_nodes(); ++i) {
      const double y = s.mesh().node(i);
      const double base = NodalState<Fields>::is_transverse(f) ? 0.0 : -y;
      s.table()(i, f) = base + a1 * std::sin(M_PI * (y + 1) / 2) + a2 * std::sin(M_PI * (y + 1)) +
                        a3 * std::sin(1.5 * M_PI * (y + 1)) + 0.05 * u(rng);
    }
  }
  return s;
}

/// Central-difference derivative of g at x along every coordinate.
inline Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& g, const Eigen::VectorXd& x,
                                   double step) {
  Eigen::VectorXd out(x.size());
  Eigen::VectorXd xp = x;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    const double keep = xp[k];
    xp[k] = keep + step;
    const double gp = g(xp);
    xp[k] = keep - step;
    const double gm = g(xp);
    xp[k] = keep;
    out[k] = (gp - gm) / (2 * step);
  }
  return out;
}

/// Bisection for a sign change of f on [a, b].
inline double bisect(const std::function<double(double)>& f, double a, double b) {
  double fa = f(a);
  for (int it = 0; it < 200; ++it) {
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    if ((fm > 0) == (fa > 0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

/// |Q|^2 <= rho*^2 + tol and |M|^2 <= 1 + 2 c rho* + tol at every node.
template <int Fields>
bool within_max_principle(const NodalState<Fields>& s, double c, double tol = 1e-6) {
  const double rs = rho_star(c);
  for (int i = 0; i < s.n_nodes(); ++i) {
    double q2 = 0, m2 = 0;
    if constexpr (Fields == 4) {
      q2 = std::pow(s.table()(i, 0), 2) + std::pow(s.table()(i, 1), 2);
      m2 = std::pow(s.table()(i, 2), 2) + std::pow(s.table()(i, 3), 2);
    } else {
      q2 = std::pow(s.table()(i, 0), 2);
      m2 = std::pow(s.table()(i, 1), 2);
    }
    if (q2 > rs * rs + tol || m2 > 1 + 2 * c * rs + tol) return false;
  }
  return true;
}

}  // namespace testing_support
