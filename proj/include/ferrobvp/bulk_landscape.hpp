#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "ferrobvp/model.hpp"

namespace ferrobvp {

/// Whether 2*phi - theta is an even or an odd multiple of pi.
enum class Parity { Even, Odd, Undetermined };

std::string to_string(Parity p);

/// Bulk density in polar form: Q = rho (cos theta, sin theta), M = sigma (cos phi, sin phi).
template <typename Scalar>
Scalar bulk_energy(Scalar rho, Scalar sigma, Scalar theta, Scalar phi, const ModelParams& p) {
  using std::cos;
  const Scalar r2 = rho * rho - Scalar(1);
  const Scalar s2 = sigma * sigma - Scalar(1);
  return r2 * r2 + Scalar(p.xi / 4.0) * s2 * s2 -
         Scalar(p.c) * rho * sigma * sigma * cos(Scalar(2) * phi - theta);
}

/// Bulk density in Cartesian components (Q11, Q12, M1, M2).
template <typename Scalar>
Scalar bulk_density(Scalar q11, Scalar q12, Scalar m1, Scalar m2, const ModelParams& p) {
  const Scalar q2 = q11 * q11 + q12 * q12 - Scalar(1);
  const Scalar s2 = m1 * m1 + m2 * m2 - Scalar(1);
  return q2 * q2 + Scalar(p.xi / 4.0) * s2 * s2 -
         Scalar(p.c) * (q11 * (m1 * m1 - m2 * m2) + Scalar(2) * q12 * m1 * m2);
}

/// Bulk potential restricted to Q12 = M2 = 0.
template <typename Scalar>
Scalar or_bulk_density(Scalar q11, Scalar m1, const ModelParams& p) {
  return bulk_density(q11, Scalar(0), m1, Scalar(0), p);
}

/// Real roots of rho^3 - rho (1 + c^2 / 2 xi) -+ c/4 = 0 (upper sign for Even).
struct CubicRoots {
  Parity parity = Parity::Even;
  std::vector<double> roots;       ///< real roots, in cube-root-of-unity order
  std::vector<int> omega_index;    ///< k in {1,2,3} that produced each root
  double radicand = 0.0;           ///< c^2/64 - (1/27)(1 + c^2/2xi)^3
  std::array<std::complex<double>, 2> theta_terms{};  ///< (Theta1, Theta2) or (Lambda1, Lambda2)
};

/// Cubic polynomial value for the given parity; used for residual checks.
double branch_cubic(double rho, const ModelParams& p, Parity parity);

CubicRoots solve_branch_cubic(const ModelParams& p, Parity parity);

struct BulkCriticalPoint {
  double rho = 0.0;
  double sigma = 0.0;
  Parity parity = Parity::Undetermined;
  double energy = 0.0;
  std::string label;   ///< trivial-zero | trivial-nematic | coupled-branch-k
  int omega_index = 0; ///< k of the Cardano branch, 0 for trivial points

  bool coupled() const { return omega_index != 0; }
};

/// Max abs residual of the polar critical-point system at (rho, sigma, theta, phi).
double bulk_system_residual(double rho, double sigma, double theta, double phi,
                            const ModelParams& p);

/// Representative angles (theta = 0, phi per parity) used for residual checks.
std::array<double, 2> representative_angles(Parity parity);

/// Trivial points plus every coupled branch with real rho >= 0 and real sigma.
std::vector<BulkCriticalPoint> bulk_critical_points(const ModelParams& p);

/// The lowest-energy entry; ties go to the larger rho.
BulkCriticalPoint bulk_global_minimiser(const ModelParams& p);

/// Largest real root of rho^3 - rho (1 + c^2/2) - c/4.
double rho_star(double c);

enum class AsymptoticRegime { Small, Large };

struct RhoSigmaSq {
  double rho;
  double sigma_sq;
};

RhoSigmaSq asymptotic_minimiser(double c, AsymptoticRegime regime);

struct BulkMinimumInfo {
  double alpha = 0.0;       ///< minimum of the full bulk density
  double beta = 0.0;        ///< minimum of the OR bulk density
  double rho_star = 1.0;
  double m_bound_sq = 1.0;  ///< 1 + 2 c rho_star

  double sigma_star() const { return std::sqrt(m_bound_sq); }
};

/// Constants at xi = 1.
BulkMinimumInfo bulk_minimum_info(double c);

/// Full bulk density shifted by alpha(c); nonnegative.
double shifted_bulk_density(double q11, double q12, double m1, double m2, const BulkMinimumInfo& info,
                            double c);

/// OR bulk density shifted by beta(c); nonnegative.
double shifted_or_bulk_density(double q11, double m1, const BulkMinimumInfo& info, double c);

}  // namespace ferrobvp
