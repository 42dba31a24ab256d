#pragma once

#include <vector>

#include <Eigen/Core>

#include "ferrobvp/banded.hpp"
#include "ferrobvp/mesh.hpp"
#include "ferrobvp/model.hpp"

namespace ferrobvp {

/// Gradient of the bulk density at (Q11, Q12, M1, M2).
Eigen::Vector4d bulk_gradient(const Eigen::Vector4d& u, const ModelParams& p);
Eigen::Matrix4d bulk_hessian(const Eigen::Vector4d& u, const ModelParams& p);

/// Discrete energy: exact gradient terms for P1 fields, bulk terms by
/// two-point Gauss quadrature on each cell. Boundary values are used as
/// stored, so unpinned states are integrated too.
template <int Fields>
double energy(const NodalState<Fields>& s, const ModelParams& p);

inline double or_energy(const ORState& s, const ModelParams& p) { return energy(s, p); }

/// Energy gradient with respect to every nodal unknown (boundary rows included).
template <int Fields>
Eigen::VectorXd energy_gradient(const NodalState<Fields>& s, const ModelParams& p);

/// Energy gradient with the pinned rows set to zero.
template <int Fields>
Eigen::VectorXd residual(const NodalState<Fields>& s, const ModelParams& p);

/// Full energy Hessian, no Dirichlet substitution.
template <int Fields>
BandedMatrix energy_hessian(const NodalState<Fields>& s, const ModelParams& p);

/// Energy Hessian with identity rows and columns at pinned unknowns.
template <int Fields>
BandedMatrix jacobian(const NodalState<Fields>& s, const ModelParams& p);

/// Flat indices of the unknowns on interior nodes.
template <int Fields>
std::vector<int> interior_dofs(int n_nodes);

struct Diagnostics {
  Eigen::VectorXd y;
  Eigen::VectorXd q_norm;
  Eigen::VectorXd m_norm;
  Eigen::VectorXd theta;  ///< continuous phase of (Q11, Q12); NaN where |Q| < 1e-10
  Eigen::VectorXd phi;    ///< continuous phase of (M1, M2); NaN where |M| < 1e-10
  Eigen::VectorXd twophi_minus_theta;
  Eigen::MatrixX2d m_unit;  ///< M / |M|, zero rows where |M| vanishes
};

/// Continuous lift of atan2(b, a) starting from the first node, jumps above
/// pi corrected by multiples of 2 pi. Entries with hypot(a, b) < tol are NaN
/// and the lift carries over from the last defined value.
Eigen::VectorXd unwrapped_phase(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double tol = 1e-10);

Diagnostics diagnostics(const FieldState& s);
Diagnostics diagnostics(const ORState& s);

/// Trapezoid rule for the integral of Q12 over the interval.
double q12_integral(const FieldState& s);

}  // namespace ferrobvp
