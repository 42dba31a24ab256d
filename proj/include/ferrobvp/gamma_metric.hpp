#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ferrobvp {

/// Point p = (Q11, M1) of the order-reconstruction plane.
struct PlanePoint {
  double q11 = 0.0;
  double m1 = 0.0;
};

struct PlanePath {
  std::vector<PlanePoint> nodes;
  double cost = 0.0;
};

struct MetricConsistencyError : std::logic_error {
  using std::logic_error::logic_error;
};

/// (Q11^2 - 1)^2 + (M1^2 - 1)^2 / 4 - c Q11 M1^2 - beta(c), with beta the
/// minimum of the OR bulk density at xi = 1. Round-off below zero (down to
/// -1e-12) is clamped; anything under -1e-9 throws MetricConsistencyError.
double f_tilde(const PlanePoint& p, double c);

/// f_tilde with a precomputed beta.
double f_tilde(const PlanePoint& p, double c, double beta);

struct MetricOptions {
  int grid = 400;           ///< cells per side of the search grid
  double padding = 0.5;     ///< margin around p0, p1, p*, p**
  double refine_tol = 1e-8; ///< stop refining when a sweep gains less than this
  int max_sweeps = 200000;

  void validate() const;
};

struct TransitionCost {
  double grid_cost = 0.0;  ///< shortest path on the 8-neighbour grid
  double cost = 0.0;       ///< after polyline refinement, never above grid_cost
  PlanePath path;
};

/// Cost of the cheapest path from p0 to p1 under the degenerate weight
/// sqrt(f_tilde): Dijkstra on a grid with trapezoidal edge weights, then
/// local descent on the interior polyline nodes.
TransitionCost transition_cost(const PlanePoint& p0, const PlanePoint& p1, double c, const MetricOptions& opts = {});

/// Trapezoidal cost of a polyline.
double polyline_cost(const std::vector<PlanePoint>& nodes, double c);

struct MetricPoints {
  PlanePoint p_star;        ///< (rho*, +sqrt(1 + 2 c rho*))
  PlanePoint p_star_star;   ///< (rho*, -sqrt(1 + 2 c rho*))
  PlanePoint p_left;        ///< boundary data at y = -1: (1, 1)
  PlanePoint p_right;       ///< boundary data at y = +1: (-1, -1)
};
MetricPoints metric_points(double c);

enum class Phase { Star, StarStar };
std::string to_string(Phase p);

/// The five costs entering J.
struct LimitCosts {
  double c = 0.0;
  double star_starstar = 0.0;
  double star_right = 0.0;
  double starstar_left = 0.0;
  double star_left = 0.0;
  double starstar_right = 0.0;

  double boundary(Phase phase, bool right) const;
};

/// Computes the five costs concurrently.
LimitCosts limit_costs(double c, const MetricOptions& opts = {});

struct LimitStructure {
  std::vector<std::pair<double, double>> intervals;  ///< partition of (-1, 1)
  std::vector<Phase> phases;
  int jumps = 0;
  double J = 0.0;
};

/// J = jumps * d(p*, p**) + d(first phase, p_b(-1)) + d(last phase, p_b(1)).
/// Interval lengths do not enter J; the partition returned is uniform.
LimitStructure limit_structure(const LimitCosts& costs, Phase first, int jumps);

struct LimitMinimum {
  LimitStructure best;
  std::vector<LimitStructure> candidates;  ///< jumps in {0, 1, 2}, both starting phases
  /// Every three-jump structure costs more than the best one-jump structure.
  bool three_jumps_dominated = false;
};

LimitMinimum minimise_limit_functional(const LimitCosts& costs);
LimitMinimum minimise_limit_functional(double c, const MetricOptions& opts = {});

}  // namespace ferrobvp
