#include "ferrobvp/deflation.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "ferrobvp/parallel.hpp"

namespace ferrobvp {

template <int Fields>
DeflationOperator<Fields>::DeflationOperator(double power, double shift) : power_(power), shift_(shift) {
  if (!(power > 0.0)) throw std::invalid_argument("deflation power must be positive");
  if (!(shift >= 0.0)) throw std::invalid_argument("deflation shift must be nonnegative");
}

template <int Fields>
double DeflationOperator<Fields>::factor(const NodalState<Fields>& x) const {
  double m = 1.0;
  for (const auto& k : known_) {
    const double d = interior_l2_distance(x, k);
    if (d == 0.0) return std::numeric_limits<double>::infinity();
    m *= std::pow(d, -power_) + shift_;
  }
  return m;
}

template <int Fields>
Eigen::VectorXd DeflationOperator<Fields>::gradient(const NodalState<Fields>& x) const {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(x.size());
  if (known_.empty()) return g;
  const double h = x.mesh().h();
  for (const auto& k : known_) {
    const double d = interior_l2_distance(x, k);
    if (d == 0.0) return Eigen::VectorXd::Constant(x.size(), std::numeric_limits<double>::quiet_NaN());
    const double term = std::pow(d, -power_) + shift_;
    const double coef = -power_ * h * std::pow(d, -power_ - 2.0) / term;
    g += coef * (x.flat() - k.flat());
  }
  // Differences on pinned nodes vanish for pinned states; zero them anyway so
  // the norm's interior restriction is honoured.
  g.template head<Fields>().setZero();
  g.template tail<Fields>().setZero();
  return factor(x) * g;
}

template <int Fields>
double DeflationOperator<Fields>::min_distance(const NodalState<Fields>& x) const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& k : known_) best = std::min(best, interior_l2_distance(x, k));
  return best;
}

template <int Fields>
SolveReport<Fields> deflated_solve(const NodalState<Fields>& initial, const ModelParams& p,
                                   const DeflationOperator<Fields>& op, const SolveOptions& opts) {
  for (const auto& k : op.known()) {
    if (k.n_nodes() != initial.n_nodes()) throw std::invalid_argument("known solution lives on a different mesh");
  }
  if (op.known().empty()) return newton_solve(initial, p, opts);

  detail::NewtonHooks<Fields> hooks;
  hooks.merit = [&op](const NodalState<Fields>& x, const Eigen::VectorXd& r) { return op.factor(x) * r.norm(); };
  hooks.direction = [&op](const NodalState<Fields>& x, const Eigen::VectorXd& du) -> Eigen::VectorXd {
    const double m = op.factor(x);
    const double denom = 1.0 - op.gradient(x).dot(du) / m;
    if (!std::isfinite(denom) || std::abs(denom) < 1e-12) return du;
    return du / denom;
  };
  SolveReport<Fields> rep = detail::newton_loop<Fields>(initial, p, opts, &hooks);
  if (rep.converged) {
    if (op.min_distance(rep.final_state) < kSameSolutionDistance) {
      rep.converged = false;
      rep.message = "converged onto a known solution";
    }
  }
  return rep;
}

template <int Fields>
Discovery<Fields> discover_solutions(const ModelParams& p, const std::vector<NamedGuess<Fields>>& guesses,
                                     const DiscoveryOptions& opts,
                                     const std::vector<NodalState<Fields>>& seed_solutions) {
  Discovery<Fields> out;
  DeflationOperator<Fields> op;
  for (const auto& s : seed_solutions) op.add(s);

  auto admit = [&](const NodalState<Fields>& s, const std::string& source) {
    if (op.min_distance(s) < kSameSolutionDistance) return false;
    op.add(s);
    out.solutions.push_back(s);
    out.sources.push_back(source);
    return true;
  };

  const int n_guess = static_cast<int>(guesses.size());
  std::vector<int> active(n_guess * opts.linesearches.size());
  for (std::size_t i = 0; i < active.size(); ++i) active[i] = static_cast<int>(i);
  auto start_options = [&](int start) {
    SolveOptions o = opts.solve;
    o.linesearch = opts.linesearches[start / n_guess];
    return o;
  };
  auto start_name = [&](int start) {
    const std::string& base = guesses[start % n_guess].name;
    return opts.linesearches[start / n_guess] == Linesearch::None ? base + "/none" : base;
  };

  while (!active.empty() && out.attempts < opts.budget) {
    const int n = std::min<int>(static_cast<int>(active.size()), opts.budget - out.attempts);
    std::vector<SolveReport<Fields>> reports(n);
    parallel_for(n, [&](int j) { reports[j] = deflated_solve(guesses[active[j] % n_guess].state, p, op, start_options(active[j])); });
    out.attempts += n;

    std::vector<int> still;
    for (int j = 0; j < n; ++j) {
      const auto& rep = reports[j];
      if (!rep.converged) continue;
      // Undeflated re-check: the deflated loop already demands abs_tol, keep
      // the test explicit since it is the contract of this function.
      if (residual(rep.final_state, p).norm() > opts.solve.abs_tol) continue;
      still.push_back(active[j]);
      if (!admit(rep.final_state, start_name(active[j]))) continue;
      if constexpr (Fields == 4) {
        if (opts.include_flips && !is_or_state(rep.final_state, 1e-8)) {
          FieldState mirrored = flip(rep.final_state);
          if (residual(mirrored, p).norm() <= opts.solve.abs_tol) {
            admit(mirrored, "flip:" + std::to_string(out.solutions.size() - 1));
          }
        }
      }
    }
    active = std::move(still);
  }
  return out;
}

template class DeflationOperator<2>;
template class DeflationOperator<4>;
template SolveReport<2> deflated_solve<2>(const NodalState<2>&, const ModelParams&, const DeflationOperator<2>&,
                                          const SolveOptions&);
template SolveReport<4> deflated_solve<4>(const NodalState<4>&, const ModelParams&, const DeflationOperator<4>&,
                                          const SolveOptions&);
template Discovery<2> discover_solutions<2>(const ModelParams&, const std::vector<NamedGuess<2>>&,
                                            const DiscoveryOptions&, const std::vector<NodalState<2>>&);
template Discovery<4> discover_solutions<4>(const ModelParams&, const std::vector<NamedGuess<4>>&,
                                            const DiscoveryOptions&, const std::vector<NodalState<4>>&);

}  // namespace ferrobvp
