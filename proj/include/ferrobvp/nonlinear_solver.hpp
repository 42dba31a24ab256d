#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ferrobvp/discretization.hpp"

namespace ferrobvp {

enum class Linesearch { L2, None };

struct SolveOptions {
  double abs_tol = 1e-8;
  double rel_tol = 1e-6;
  int max_iters = 100;
  Linesearch linesearch = Linesearch::L2;
  /// Newton steps still allowed once the relative test holds; the solve
  /// only counts as converged when the residual reaches abs_tol.
  int polish_steps = 5;

  void validate() const;
};

template <int Fields>
struct SolveReport {
  bool converged = false;
  int iterations = 0;
  std::vector<double> residual_norms;
  NodalState<Fields> final_state;
  std::string message;

  double final_residual() const { return residual_norms.empty() ? 0.0 : residual_norms.back(); }
};

/// Damped Newton on the pinned energy gradient. With Linesearch::L2 the
/// step length minimises the residual norm over {1, 1/2, ..., 2^-10} and a
/// step that fails to reduce it ends the solve; Linesearch::None takes full
/// steps and stops when the residual grows by 1e8 over its start.
template <int Fields>
SolveReport<Fields> newton_solve(const NodalState<Fields>& initial, const ModelParams& p,
                                 const SolveOptions& opts = {});

namespace detail {

/// Hooks that turn the plain Newton loop into a deflated one.
template <int Fields>
struct NewtonHooks {
  /// Merit used by the linesearch, given the state and its residual.
  std::function<double(const NodalState<Fields>&, const Eigen::VectorXd&)> merit;
  /// Rescales the undamped Newton update.
  std::function<Eigen::VectorXd(const NodalState<Fields>&, const Eigen::VectorXd&)> direction;
};

template <int Fields>
SolveReport<Fields> newton_loop(const NodalState<Fields>& initial, const ModelParams& p, const SolveOptions& opts,
                                const NewtonHooks<Fields>* hooks);

}  // namespace detail

}  // namespace ferrobvp
