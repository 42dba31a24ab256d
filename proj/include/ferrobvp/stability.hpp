#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Core>

#include "ferrobvp/discretization.hpp"

namespace ferrobvp {

struct NotConvergedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Verdict { Stable, Unstable, Marginal };

std::string to_string(Verdict v);

struct EigenPairs {
  Eigen::VectorXd values;   ///< ascending
  Eigen::MatrixXd vectors;  ///< columns, empty unless requested
  bool dense = false;       ///< which solver produced them
};

/// The k algebraically smallest eigenpairs of a symmetric banded matrix.
/// Dense self-adjoint solve when size <= dense_limit, otherwise Lanczos
/// with full reorthogonalisation on (A - s I)^-1, s below the Gershgorin
/// bound, grown until every Ritz residual |A v - lambda v| <= 1e-9.
EigenPairs lowest_eigenpairs(const BandedMatrix& a, int k, bool want_vectors = false, int dense_limit = 2000);

struct StabilityOptions {
  int k = 6;
  double tol = 1e-8;             ///< eigenvalue threshold for the verdict
  double residual_tol = 1e-8;    ///< states above this residual are refused
  int dense_limit = 2000;
};

struct StabilityReport {
  Eigen::VectorXd smallest_eigenvalues;
  int index = 0;  ///< eigenvalues below -tol among those computed
  Verdict verdict = Verdict::Stable;
};

/// Hessian restricted to interior unknowns.
template <int Fields>
BandedMatrix interior_hessian(const NodalState<Fields>& s, const ModelParams& p);

/// Verdict from eigenvalues: marginal if any |lambda| <= tol, otherwise
/// unstable if any lambda < -tol, otherwise stable.
StabilityReport classify(const Eigen::VectorXd& eigenvalues, double tol);

/// Throws NotConvergedError when the state's residual exceeds residual_tol.
template <int Fields>
StabilityReport hessian_spectrum(const NodalState<Fields>& s, const ModelParams& p, const StabilityOptions& opts = {});

/// Smooth cutoff, 1 on |y| <= 1 - 2 eta and 0 on |y| >= 1 - eta, joined by
/// the quintic smoothstep.
struct SecondVariationProbe {
  double eta = 0.1;

  double z(double y) const;
  void validate() const;
};

/// Nodal probe directions h = Q11' z and w = M1' z, derivatives by central
/// differences (one-sided at the ends, where z vanishes anyway).
struct ProbeDirections {
  Eigen::VectorXd h;
  Eigen::VectorXd w;
};
ProbeDirections probe_directions(const ORState& s, const SecondVariationProbe& probe);

/// Second variation of the full energy at an OR state in the transverse
/// direction (0, h, 0, w), integrated with three-point Gauss on each cell:
/// int l1 h'^2 + xi l2 w'^2 + 4 (Q11^2 - 1) h^2 + xi (M1^2 - 1) w^2 + 2 c Q11 w^2 - 4 c M1 h w.
double or_instability_probe(const ORState& s, const ModelParams& p, const SecondVariationProbe& probe);

/// Same integrand for arbitrary nodal h, w.
double transverse_second_variation(const ORState& s, const ModelParams& p, const Eigen::VectorXd& h,
                                   const Eigen::VectorXd& w);

/// v^T H v with the unpinned discrete Hessian.
template <int Fields>
double hessian_quadratic_form(const NodalState<Fields>& s, const ModelParams& p, const Eigen::VectorXd& v);

}  // namespace ferrobvp
