#pragma once

#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "ferrobvp/mesh.hpp"
#include "ferrobvp/model.hpp"

namespace ferrobvp {

/// Interpolant of (-y, 0, -y, 0), the large-l limit.
FieldState laplace_limit_state(const std::shared_ptr<const Mesh>& mesh);

/// Polynomial with exact rational coefficients, lowest power first.
struct RationalPolynomial {
  std::vector<std::pair<std::int64_t, std::int64_t>> coeffs;  ///< (numerator, denominator)

  double operator()(double y) const;  ///< Horner evaluation
  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
};

/// Correctors of the OR branch for l = 1/c:
/// Q11 = -y + c f2 + c^2 p, M1 = -y + c f2* + c^2 q.
const RationalPolynomial& corrector_f2();
const RationalPolynomial& corrector_f2_star();
const RationalPolynomial& corrector_p();
const RationalPolynomial& corrector_q();

struct ORPoint {
  double q11;
  double m1;
};

/// Expansion truncated after the c^order term, order in {0, 1, 2}.
ORPoint or_expansion(double y, double c, int order);

/// Geometric grid of 8 couplings from 1e-3 to 1e-1.
std::vector<double> default_c_grid();

struct ConvergenceStudy {
  int order = 0;
  std::vector<double> c;
  std::vector<double> gap_q11;  ///< max over nodes of |Q11 - expansion|
  std::vector<double> gap_m1;
  std::vector<int> iterations;
  double slope_q11 = 0.0;
  double slope_m1 = 0.0;

  /// The Q11 slope.
  double slope() const { return slope_q11; }
};

/// Solves the OR system at l = 1/c for each c (warm start from the linear
/// state) and fits log(gap) against log(c). Throws std::runtime_error if any
/// solve fails.
ConvergenceStudy convergence_study(const std::vector<double>& c_grid, int order, int n_cells = 1000);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// l -> 0 limit map with phi0 = sense * pi (y + 1)/2 and Q phase 2 phi0 at
/// magnitudes rho* and sqrt(1 + 2 c rho*). Not pinned: it is the sharp limit,
/// so Q11 ends at rho* instead of -1.
FieldState limit_map_l0(const std::shared_ptr<const Mesh>& mesh, double c, int sense);

}  // namespace ferrobvp
