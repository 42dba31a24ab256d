#pragma once

#include <string>
#include <vector>

#include "ferrobvp/guesses.hpp"
#include "ferrobvp/nonlinear_solver.hpp"

namespace ferrobvp {

/// Deflation factor M(x) = prod_k (||x - x_k||^-p + shift) with the discrete
/// L2 norm over interior nodal coefficients.
template <int Fields>
class DeflationOperator {
 public:
  explicit DeflationOperator(double power = 2.0, double shift = 1.0);

  void add(const NodalState<Fields>& s) { known_.push_back(s); }
  const std::vector<NodalState<Fields>>& known() const { return known_; }
  double power() const { return power_; }
  double shift() const { return shift_; }

  double factor(const NodalState<Fields>& x) const;
  /// Gradient of M with respect to the flat unknown vector.
  Eigen::VectorXd gradient(const NodalState<Fields>& x) const;
  /// Smallest distance to a known solution (infinity when none are known).
  double min_distance(const NodalState<Fields>& x) const;

 private:
  double power_;
  double shift_;
  std::vector<NodalState<Fields>> known_;
};

/// Distance below which two states count as the same solution.
inline constexpr double kSameSolutionDistance = 1e-4;

/// Newton on M(x) r(x). Success additionally requires the undeflated
/// residual to reach opts.abs_tol and a distance of at least
/// kSameSolutionDistance from every known solution.
template <int Fields>
SolveReport<Fields> deflated_solve(const NodalState<Fields>& initial, const ModelParams& p,
                                   const DeflationOperator<Fields>& op, const SolveOptions& opts = {});

struct DiscoveryOptions {
  int budget = 200;  ///< total number of deflated solves
  SolveOptions solve;
  /// Every guess is tried once per entry; the monotone L2 search stalls at
  /// small l where full steps still reach further basins.
  std::vector<Linesearch> linesearches = {Linesearch::L2, Linesearch::None};
  /// Add the (Q12, M2) sign flip of every new four-field solution after
  /// checking its residual.
  bool include_flips = true;
};

template <int Fields>
struct Discovery {
  std::vector<NodalState<Fields>> solutions;
  /// Guess name that produced each entry ("/none" appended for full-step
  /// starts), "flip:<i>" for mirrored ones.
  std::vector<std::string> sources;
  int attempts = 0;
};

/// Deflation sweep over a guess suite. Every (linesearch, guess) pair is a
/// start; each round solves the still-active starts against the current
/// known set (concurrently), then merges the new solutions in start order.
/// A start retires after its first failure.
/// `seed_solutions` are deflated from the start and are not returned.
template <int Fields>
Discovery<Fields> discover_solutions(const ModelParams& p, const std::vector<NamedGuess<Fields>>& guesses,
                                     const DiscoveryOptions& opts = {},
                                     const std::vector<NodalState<Fields>>& seed_solutions = {});

}  // namespace ferrobvp
