#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ferrobvp/deflation.hpp"
#include "ferrobvp/stability.hpp"

namespace ferrobvp {

template <int Fields>
struct BranchPoint {
  int step = 0;  ///< index on the continuation grid
  double l = 0.0;
  double energy = 0.0;
  double functional = 0.0;  ///< integral of Q12 (zero for the two-field system)
  double lambda_min = 0.0;
  Verdict verdict = Verdict::Stable;
  double residual = 0.0;
  NodalState<Fields> state;  ///< empty unless ContinuationOptions::keep_states
};

template <int Fields>
struct Branch {
  int id = 0;
  std::vector<BranchPoint<Fields>> points;  ///< ordered along the continuation direction
  std::optional<int> parent_event;
  std::string origin;      ///< guess or perturbation that first produced it
  std::string start_note;  ///< why backward tracing stopped
  std::string end_note;    ///< why forward tracing stopped ("" if it reached the end)
  std::optional<int> merged_into_at_start;
};

enum class EventKind { Pitchfork, Fold, Unclassified };

std::string to_string(EventKind k);

struct BifurcationEvent {
  double l_lo = 0.0;
  double l_hi = 0.0;
  EventKind kind = EventKind::Unclassified;
  std::vector<int> branch_ids;
  std::string note;
};

struct ContinuationOptions {
  int n_cells = 1000;
  double xi = 1.0;
  SolveOptions solve;
  StabilityOptions stability{.k = 4, .dense_limit = 0};
  /// Full guess-suite deflation every this many steps (and at the start).
  int discovery_every = 10;
  int guess_suite_size = 40;
  int discovery_budget = 160;
  std::uint64_t seed = 0;
  /// Eigen-direction kicks are tried on points whose lambda_min is below this.
  double kick_threshold = 1e-4;
  double kick_size = 0.2;  ///< L2 size of the kick
  /// A warm-started step moving further than jump_factor times the previous
  /// step's change (plus jump_floor) counts as a branch switch and ends the branch.
  double jump_factor = 8.0;
  double jump_floor = 0.2;
  /// Steps within which a birth and an eigenvalue sign change are matched.
  int pitchfork_window = 2;
  bool keep_states = true;
};

template <int Fields>
struct ContinuationResult {
  double c = 0.0;
  std::vector<double> grid;
  std::vector<Branch<Fields>> branches;
  std::vector<BifurcationEvent> events;
};

/// Natural continuation in l = l1 = l2 from l_start to l_end (either
/// direction). Branches warm-start from their previous point with a secant
/// predictor; new branches come from deflation and from kicks along the
/// lowest Hessian eigenvector, and are traced backwards to locate their
/// birth. Events: sign changes of lambda_min, births and terminations.
template <int Fields>
ContinuationResult<Fields> continue_in_l(double c, double l_start, double l_end, double step,
                                         const ContinuationOptions& opts = {});

/// Number of stable branch points at grid index `step`.
template <int Fields>
int stable_count(const ContinuationResult<Fields>& r, int step);

/// Writes branches.csv (branch_id, l, functional, energy, stability,
/// lambda_min) and events.csv (l_lo, l_hi, kind, branches, note).
template <int Fields>
void diagram_emit(const std::vector<Branch<Fields>>& branches, const std::vector<BifurcationEvent>& events,
                  const std::filesystem::path& dir);

}  // namespace ferrobvp
