#include "ferrobvp/nonlinear_solver.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ferrobvp {

void SolveOptions::validate() const {
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) throw std::invalid_argument("solver tolerances must be positive");
  if (max_iters < 0) throw std::invalid_argument("max_iters must be nonnegative");
  if (polish_steps < 0) throw std::invalid_argument("polish_steps must be nonnegative");
}

namespace detail {

constexpr double kDivergenceFactor = 1e8;

template <int Fields>
SolveReport<Fields> newton_loop(const NodalState<Fields>& initial, const ModelParams& p, const SolveOptions& opts,
                                const NewtonHooks<Fields>* hooks) {
  opts.validate();
  p.validate();
  if (!initial.pinned()) throw std::invalid_argument("initial state does not satisfy the boundary data");

  SolveReport<Fields> rep;
  NodalState<Fields> x = initial;
  Eigen::VectorXd r = residual(x, p);
  double norm = r.norm();
  auto merit_of = [&](const NodalState<Fields>& s, const Eigen::VectorXd& res) {
    return hooks ? hooks->merit(s, res) : res.norm();
  };
  double merit = merit_of(x, r);
  const double r0 = norm;
  rep.residual_norms.push_back(norm);

  int polish_left = opts.polish_steps;
  while (true) {
    if (!std::isfinite(norm)) {
      rep.converged = false;
      rep.message = "residual is not finite";
      break;
    }
    if (norm <= opts.abs_tol) {
      rep.converged = true;
      break;
    }
    // The relative test only opens a short polishing phase: a state is
    // reported converged once the absolute test holds.
    if (norm <= opts.rel_tol * r0 && polish_left-- <= 0) {
      rep.message = "relative reduction reached but residual stayed above abs_tol";
      break;
    }
    if (norm > kDivergenceFactor * std::max(r0, 1.0)) {
      rep.message = "residual diverged";
      break;
    }
    if (rep.iterations >= opts.max_iters) {
      rep.message = "maximum iterations reached";
      break;
    }

    Eigen::VectorXd du;
    try {
      BandedLU lu(jacobian(x, p));
      du = lu.solve(-r);
    } catch (const SingularMatrixError& e) {
      rep.message = std::string("singular Jacobian: ") + e.what();
      break;
    }
    if (hooks) du = hooks->direction(x, du);
    if (!du.allFinite()) {
      rep.message = "Newton update is not finite";
      break;
    }

    NodalState<Fields> best_x;
    Eigen::VectorXd best_r;
    double best_merit = std::numeric_limits<double>::infinity();
    const int trials = opts.linesearch == Linesearch::L2 ? 11 : 1;
    double lambda = 1.0;
    for (int k = 0; k < trials; ++k, lambda *= 0.5) {
      NodalState<Fields> trial = x;
      trial.flat() += lambda * du;
      Eigen::VectorXd rt = residual(trial, p);
      const double mt = merit_of(trial, rt);
      if (std::isfinite(mt) && mt < best_merit) {
        best_merit = mt;
        best_x = std::move(trial);
        best_r = std::move(rt);
      }
    }
    if (best_r.size() == 0 || (opts.linesearch == Linesearch::L2 && !(best_merit < merit))) {
      rep.message = "linesearch could not reduce the residual";
      break;
    }
    x = std::move(best_x);
    r = std::move(best_r);
    merit = best_merit;
    norm = r.norm();
    ++rep.iterations;
    rep.residual_norms.push_back(norm);
  }
  rep.final_state = std::move(x);
  return rep;
}

template SolveReport<2> newton_loop<2>(const NodalState<2>&, const ModelParams&, const SolveOptions&,
                                       const NewtonHooks<2>*);
template SolveReport<4> newton_loop<4>(const NodalState<4>&, const ModelParams&, const SolveOptions&,
                                       const NewtonHooks<4>*);

}  // namespace detail

template <int Fields>
SolveReport<Fields> newton_solve(const NodalState<Fields>& initial, const ModelParams& p, const SolveOptions& opts) {
  return detail::newton_loop<Fields>(initial, p, opts, nullptr);
}

template SolveReport<2> newton_solve<2>(const NodalState<2>&, const ModelParams&, const SolveOptions&);
template SolveReport<4> newton_solve<4>(const NodalState<4>&, const ModelParams&, const SolveOptions&);

}  // namespace ferrobvp
