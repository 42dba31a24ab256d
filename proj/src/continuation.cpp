#include "ferrobvp/continuation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <stdexcept>

#include "ferrobvp/parallel.hpp"

namespace ferrobvp {

std::string to_string(EventKind k) {
  switch (k) {
    case EventKind::Pitchfork: return "pitchfork";
    case EventKind::Fold: return "fold";
    default: return "unclassified";
  }
}

namespace {

template <int Fields>
double functional_of(const NodalState<Fields>& s) {
  if constexpr (Fields == 4) {
    return q12_integral(s);
  } else {
    (void)s;
    return 0.0;
  }
}

template <int Fields>
struct Evaluated {
  bool ok = false;
  BranchPoint<Fields> point;
  int index = 0;              ///< negative eigenvalues among those computed
  Eigen::VectorXd kick_dir;   ///< lowest eigenvector on the full flat layout
};

template <int Fields>
Evaluated<Fields> evaluate(const NodalState<Fields>& s, const ModelParams& p, int step,
                           const ContinuationOptions& opts) {
  Evaluated<Fields> ev;
  const double r = residual(s, p).norm();
  if (!(r <= opts.stability.residual_tol)) return ev;
  const EigenPairs pairs =
      lowest_eigenpairs(interior_hessian(s, p), opts.stability.k, true, opts.stability.dense_limit);
  const StabilityReport rep = classify(pairs.values, opts.stability.tol);
  ev.ok = true;
  ev.index = rep.index;
  auto& pt = ev.point;
  pt.step = step;
  pt.l = p.l1;
  pt.energy = energy(s, p);
  pt.functional = functional_of(s);
  pt.lambda_min = pairs.values[0];
  pt.verdict = rep.verdict;
  pt.residual = r;
  pt.state = s;
  const std::vector<int> dofs = interior_dofs<Fields>(s.n_nodes());
  ev.kick_dir = Eigen::VectorXd::Zero(s.size());
  for (std::size_t i = 0; i < dofs.size(); ++i) ev.kick_dir[dofs[i]] = pairs.vectors(static_cast<int>(i), 0);
  return ev;
}

/// Working copy of a branch while the sweep runs.
template <int Fields>
struct Track {
  Branch<Fields> branch;
  std::vector<int> index;  ///< Hessian index per point
  bool active = true;
  std::map<int, Eigen::VectorXd> kick;  ///< eigenvector at the latest step only
};

template <int Fields>
class Sweep {
 public:
  Sweep(double c, std::vector<double> grid, const ContinuationOptions& opts)
      : c_(c), grid_(std::move(grid)), opts_(opts), mesh_(make_mesh(opts.n_cells)) {}

  ContinuationResult<Fields> run();

 private:
  ModelParams params(int step) const { return ModelParams::equal_elastic(grid_[step], c_, opts_.xi); }

  struct Step {
    std::optional<NodalState<Fields>> state;
    bool jumped = false;
  };
  /// Newton from a secant prediction, falling back to a plain warm start.
  /// A converged state that moved too far is still returned, flagged, so the
  /// caller can tell a merge into a known branch from a switch.
  Step continue_from(const std::vector<const BranchPoint<Fields>*>& recent, int step) const;
  bool jumped(const NodalState<Fields>& next, const std::vector<const BranchPoint<Fields>*>& recent) const;
  /// Branch (other than `self`) holding a point at `step` within the
  /// same-solution distance of `s`.
  std::optional<int> coincident(const NodalState<Fields>& s, int step, int self) const;
  std::vector<NodalState<Fields>> states_at(int step) const;

  void advance(int step);
  void discover(int step, bool full);
  void add_branch(const NodalState<Fields>& s, int step, const std::string& origin);
  void trace_back(Track<Fields>& t);
  std::vector<BifurcationEvent> classify_events() const;

  const BranchPoint<Fields>* point_at(const Track<Fields>& t, int step) const {
    for (const auto& pt : t.branch.points)
      if (pt.step == step) return &pt;
    return nullptr;
  }

  double c_;
  std::vector<double> grid_;
  ContinuationOptions opts_;
  std::shared_ptr<const Mesh> mesh_;
  std::vector<Track<Fields>> tracks_;
};

template <int Fields>
typename Sweep<Fields>::Step Sweep<Fields>::continue_from(const std::vector<const BranchPoint<Fields>*>& recent,
                                                          int step) const {
  const ModelParams p = params(step);
  const auto& last = recent.front()->state;
  Step fallback;
  if (recent.size() > 1 && std::abs(recent[0]->step - recent[1]->step) == 1) {
    NodalState<Fields> pred = last;
    pred.flat() += last.flat() - recent[1]->state.flat();
    pred.apply_dirichlet();
    auto rep = newton_solve(pred, p, opts_.solve);
    if (rep.converged) {
      if (!jumped(rep.final_state, recent)) return {std::move(rep.final_state), false};
      fallback = {std::move(rep.final_state), true};
    }
  }
  auto rep = newton_solve(last, p, opts_.solve);
  if (rep.converged) {
    if (!jumped(rep.final_state, recent)) return {std::move(rep.final_state), false};
    if (!fallback.state) fallback = {std::move(rep.final_state), true};
  }
  return fallback;
}

template <int Fields>
bool Sweep<Fields>::jumped(const NodalState<Fields>& next, const std::vector<const BranchPoint<Fields>*>& recent) const {
  double prev = 0.0;
  if (recent.size() > 1) prev = interior_l2_distance(recent[0]->state, recent[1]->state);
  return interior_l2_distance(next, recent[0]->state) > opts_.jump_factor * prev + opts_.jump_floor;
}

template <int Fields>
std::optional<int> Sweep<Fields>::coincident(const NodalState<Fields>& s, int step, int self) const {
  for (const auto& t : tracks_) {
    if (t.branch.id == self) continue;
    const auto* pt = point_at(t, step);
    if (pt && interior_l2_distance(pt->state, s) < kSameSolutionDistance) return t.branch.id;
  }
  return std::nullopt;
}

template <int Fields>
std::vector<NodalState<Fields>> Sweep<Fields>::states_at(int step) const {
  std::vector<NodalState<Fields>> out;
  for (const auto& t : tracks_)
    if (const auto* pt = point_at(t, step)) out.push_back(pt->state);
  return out;
}

template <int Fields>
void Sweep<Fields>::advance(int step) {
  std::vector<int> live;
  for (int i = 0; i < static_cast<int>(tracks_.size()); ++i)
    if (tracks_[i].active) live.push_back(i);

  std::vector<Evaluated<Fields>> results(live.size());
  std::vector<std::string> failure(live.size());
  std::vector<char> jumps(live.size(), 0);
  parallel_for(static_cast<int>(live.size()), [&](int k) {
    const auto& pts = tracks_[live[k]].branch.points;
    std::vector<const BranchPoint<Fields>*> recent{&pts.back()};
    if (pts.size() > 1) recent.push_back(&pts[pts.size() - 2]);
    auto next = continue_from(recent, step);
    if (!next.state) {
      failure[k] = "newton failed";
      return;
    }
    jumps[k] = next.jumped;
    results[k] = evaluate(*next.state, params(step), step, opts_);
    if (!results[k].ok) failure[k] = "residual above classification tolerance";
  });

  for (std::size_t k = 0; k < live.size(); ++k) {
    auto& t = tracks_[live[k]];
    t.kick.clear();
    if (!results[k].ok) {
      t.active = false;
      t.branch.end_note = failure[k];
      continue;
    }
    if (auto other = coincident(results[k].point.state, step, t.branch.id)) {
      t.active = false;
      t.branch.end_note = "merged into branch " + std::to_string(*other);
      continue;
    }
    if (jumps[k]) {
      t.active = false;
      t.branch.end_note = "switched branch";
      continue;
    }
    t.branch.points.push_back(std::move(results[k].point));
    t.index.push_back(results[k].index);
    t.kick[step] = std::move(results[k].kick_dir);
  }
}

template <int Fields>
void Sweep<Fields>::trace_back(Track<Fields>& t) {
  const int dir = -1;  // towards the start of the grid
  while (true) {
    const auto& first = t.branch.points.front();
    const int step = first.step + dir;
    if (step < 0) {
      t.branch.start_note = "reached start";
      return;
    }
    std::vector<const BranchPoint<Fields>*> recent{&first};
    if (t.branch.points.size() > 1) recent.push_back(&t.branch.points[1]);
    auto prev = continue_from(recent, step);
    if (!prev.state) {
      t.branch.start_note = "newton failed";
      return;
    }
    if (auto other = coincident(*prev.state, step, t.branch.id)) {
      t.branch.start_note = "merged into branch " + std::to_string(*other);
      t.branch.merged_into_at_start = *other;
      return;
    }
    if (prev.jumped) {
      t.branch.start_note = "switched branch";
      return;
    }
    auto ev = evaluate(*prev.state, params(step), step, opts_);
    if (!ev.ok) {
      t.branch.start_note = "residual above classification tolerance";
      return;
    }
    t.branch.points.insert(t.branch.points.begin(), std::move(ev.point));
    t.index.insert(t.index.begin(), ev.index);
  }
}

template <int Fields>
void Sweep<Fields>::add_branch(const NodalState<Fields>& s, int step, const std::string& origin) {
  auto ev = evaluate(s, params(step), step, opts_);
  if (!ev.ok) return;
  Track<Fields> t;
  t.branch.id = static_cast<int>(tracks_.size());
  t.branch.origin = origin;
  t.branch.points.push_back(std::move(ev.point));
  t.index.push_back(ev.index);
  t.kick[step] = std::move(ev.kick_dir);
  if (step == 0) t.branch.start_note = "present at start";
  tracks_.push_back(std::move(t));
  if (step == 0) return;
  trace_back(tracks_.back());

  // Traced back onto the last point of a branch that stopped there: it is the
  // same branch, which lost its way at this step.
  auto& fresh = tracks_.back();
  if (!fresh.branch.merged_into_at_start) return;
  auto& old = tracks_[*fresh.branch.merged_into_at_start];
  const int joint = fresh.branch.points.front().step - 1;
  if (old.active || old.branch.points.back().step != joint) return;
  for (std::size_t i = 0; i < fresh.branch.points.size(); ++i) {
    old.branch.points.push_back(std::move(fresh.branch.points[i]));
    old.index.push_back(fresh.index[i]);
  }
  old.kick = std::move(fresh.kick);
  old.active = true;
  old.branch.end_note.clear();
  tracks_.pop_back();
}

template <int Fields>
void Sweep<Fields>::discover(int step, bool full) {
  const ModelParams p = params(step);
  std::vector<NamedGuess<Fields>> guesses;
  DiscoveryOptions dopts;
  dopts.solve = opts_.solve;
  if (full) {
    guesses = guess_suite<Fields>(mesh_, p, opts_.guess_suite_size, opts_.seed + static_cast<std::uint64_t>(step));
    dopts.budget = opts_.discovery_budget;
  } else {
    dopts.linesearches = {Linesearch::L2};
  }
  const double scale = opts_.kick_size / std::sqrt(mesh_->h());
  for (const auto& t : tracks_) {
    const auto* pt = point_at(t, step);
    auto it = t.kick.find(step);
    if (!pt || it == t.kick.end() || !(pt->lambda_min < opts_.kick_threshold)) continue;
    for (int sign : {1, -1}) {
      NodalState<Fields> g = pt->state;
      g.flat() += sign * scale * it->second;
      g.apply_dirichlet();
      guesses.push_back({"kick:" + std::to_string(t.branch.id) + (sign > 0 ? ":+" : ":-"), std::move(g)});
    }
  }
  if (guesses.empty()) return;
  if (!full) dopts.budget = static_cast<int>(guesses.size()) * 2;

  const Discovery<Fields> found = discover_solutions(p, guesses, dopts, states_at(step));
  for (std::size_t i = 0; i < found.solutions.size(); ++i) {
    // An earlier birth in this loop may already have traced through it.
    if (coincident(found.solutions[i], step, -1)) continue;
    add_branch(found.solutions[i], step, found.sources[i]);
  }
}

template <int Fields>
ContinuationResult<Fields> Sweep<Fields>::run() {
  const int n = static_cast<int>(grid_.size());
  discover(0, true);
  for (int step = 1; step < n; ++step) {
    advance(step);
    const bool full = opts_.discovery_every > 0 && (step % opts_.discovery_every == 0 || step == n - 1);
    discover(step, full);
  }

  ContinuationResult<Fields> out;
  out.c = c_;
  out.grid = grid_;
  out.events = classify_events();
  for (auto& t : tracks_) {
    if (!opts_.keep_states)
      for (auto& pt : t.branch.points) pt.state = NodalState<Fields>();
    out.branches.push_back(std::move(t.branch));
  }
  return out;
}

template <int Fields>
bool mutual_flips(const Branch<Fields>& a, const Branch<Fields>& b) {
  for (const auto& pa : a.points) {
    for (const auto& pb : b.points) {
      if (pa.step != pb.step) continue;
      if constexpr (Fields == 4) {
        if (pa.state.size() > 0 && pb.state.size() > 0) return interior_l2_distance(flip(pa.state), pb.state) <= 1e-6;
      }
      return std::abs(pa.energy - pb.energy) <= 1e-9 * std::max(1.0, std::abs(pa.energy)) &&
             std::abs(pa.functional + pb.functional) <= 1e-6;
    }
  }
  return false;
}

template <int Fields>
std::vector<BifurcationEvent> Sweep<Fields>::classify_events() const {
  const int n = static_cast<int>(grid_.size());
  auto bracket = [&](int s0, int s1, EventKind kind, std::vector<int> ids, std::string note) {
    BifurcationEvent e;
    s0 = std::clamp(s0, 0, n - 1);
    s1 = std::clamp(s1, 0, n - 1);
    e.l_lo = std::min(grid_[s0], grid_[s1]);
    e.l_hi = std::max(grid_[s0], grid_[s1]);
    e.kind = kind;
    std::sort(ids.begin(), ids.end());
    e.branch_ids = std::move(ids);
    e.note = std::move(note);
    return e;
  };

  struct Birth {
    int branch;
    int step;  // first step where the branch exists
    std::optional<int> parent;
    bool used = false;
  };
  std::vector<Birth> births;
  for (const auto& t : tracks_) {
    const auto& b = t.branch;
    if (b.points.empty() || b.points.front().step == 0) continue;
    births.push_back({b.id, b.points.front().step, b.merged_into_at_start});
  }

  std::vector<BifurcationEvent> events;

  // Index changes along each branch, skipping marginal points.
  for (const auto& t : tracks_) {
    const auto& pts = t.branch.points;
    int last = -1;
    for (int i = 0; i < static_cast<int>(pts.size()); ++i) {
      if (pts[i].verdict == Verdict::Marginal) continue;
      if (last >= 0 && t.index[i] != t.index[last]) {
        const int s0 = pts[last].step;
        const int s1 = pts[i].step;
        std::vector<int> kids;
        for (auto& b : births) {
          if (b.used || b.parent != t.branch.id) continue;
          if (b.step >= std::min(s0, s1) - opts_.pitchfork_window && b.step <= std::max(s0, s1) + opts_.pitchfork_window)
            kids.push_back(static_cast<int>(&b - births.data()));
        }
        EventKind kind = EventKind::Unclassified;
        std::string note = "index " + std::to_string(t.index[last]) + " -> " + std::to_string(t.index[i]);
        std::vector<int> ids{t.branch.id};
        for (std::size_t a = 0; a < kids.size() && kind != EventKind::Pitchfork; ++a) {
          for (std::size_t c = a + 1; c < kids.size(); ++c) {
            const auto& ba = tracks_[births[kids[a]].branch].branch;
            const auto& bc = tracks_[births[kids[c]].branch].branch;
            if (mutual_flips(ba, bc)) {
              kind = EventKind::Pitchfork;
              births[kids[a]].used = births[kids[c]].used = true;
              ids.push_back(ba.id);
              ids.push_back(bc.id);
              note += "; symmetric pair born";
              break;
            }
          }
        }
        if (kind != EventKind::Pitchfork) {
          for (int k : kids) {
            births[k].used = true;
            ids.push_back(births[k].branch);
          }
          if (!kids.empty()) note += "; asymmetric birth";
        }
        events.push_back(bracket(s0, s1, kind, ids, note));
      }
      last = i;
    }
  }

  // Remaining births: group by birth step. Those not attached to a parent
  // appear in pairs out of nothing, a fold.
  std::map<int, std::vector<int>> folds;
  for (auto& b : births) {
    if (b.used) continue;
    if (!b.parent) {
      folds[b.step].push_back(b.branch);
    } else {
      events.push_back(bracket(b.step - 1, b.step, EventKind::Unclassified, {*b.parent, b.branch},
                               "birth from branch without index change"));
    }
  }
  for (auto& [step, ids] : folds) events.push_back(bracket(step - 1, step, EventKind::Fold, ids, "branches born"));

  // Terminations before the end of the grid.
  std::map<int, std::vector<int>> ends;
  for (const auto& t : tracks_) {
    const auto& b = t.branch;
    if (b.end_note.empty() || b.points.empty()) continue;
    ends[b.points.back().step].push_back(b.id);
  }
  for (auto& [step, ids] : ends) events.push_back(bracket(step, step + 1, EventKind::Fold, ids, "branches end"));

  std::sort(events.begin(), events.end(), [](const auto& a, const auto& b) { return a.l_lo < b.l_lo; });
  return events;
}

}  // namespace

template <int Fields>
ContinuationResult<Fields> continue_in_l(double c, double l_start, double l_end, double step,
                                         const ContinuationOptions& opts) {
  if (!(step > 0.0) || !std::isfinite(step)) throw std::invalid_argument("continuation step must be positive");
  if (!(l_start > 0.0) || !(l_end > 0.0)) throw std::invalid_argument("continuation range must lie in l > 0");
  opts.solve.validate();
  const int n = static_cast<int>(std::llround(std::abs(l_end - l_start) / step));
  std::vector<double> grid(n + 1);
  const double dir = l_end >= l_start ? 1.0 : -1.0;
  for (int i = 0; i <= n; ++i) grid[i] = l_start + dir * step * i;
  grid[n] = l_end;
  ModelParams::equal_elastic(l_start, c, opts.xi).validate();
  return Sweep<Fields>(c, std::move(grid), opts).run();
}

template <int Fields>
int stable_count(const ContinuationResult<Fields>& r, int step) {
  int count = 0;
  for (const auto& b : r.branches)
    for (const auto& pt : b.points)
      if (pt.step == step && pt.verdict == Verdict::Stable) ++count;
  return count;
}

template <int Fields>
void diagram_emit(const std::vector<Branch<Fields>>& branches, const std::vector<BifurcationEvent>& events,
                  const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream b(dir / "branches.csv");
  if (!b) throw std::runtime_error("cannot write " + (dir / "branches.csv").string());
  b << std::setprecision(17);
  b << "branch_id,l,functional,energy,stability,lambda_min\n";
  for (const auto& br : branches)
    for (const auto& pt : br.points)
      b << br.id << ',' << pt.l << ',' << pt.functional << ',' << pt.energy << ',' << to_string(pt.verdict) << ','
        << pt.lambda_min << '\n';

  std::ofstream e(dir / "events.csv");
  if (!e) throw std::runtime_error("cannot write " + (dir / "events.csv").string());
  e << std::setprecision(17);
  e << "l_lo,l_hi,kind,branches,note\n";
  for (const auto& ev : events) {
    e << ev.l_lo << ',' << ev.l_hi << ',' << to_string(ev.kind) << ',';
    for (std::size_t i = 0; i < ev.branch_ids.size(); ++i) e << (i ? ";" : "") << ev.branch_ids[i];
    e << ",\"" << ev.note << "\"\n";
  }
}

template ContinuationResult<2> continue_in_l<2>(double, double, double, double, const ContinuationOptions&);
template ContinuationResult<4> continue_in_l<4>(double, double, double, double, const ContinuationOptions&);
template int stable_count<2>(const ContinuationResult<2>&, int);
template int stable_count<4>(const ContinuationResult<4>&, int);
template void diagram_emit<2>(const std::vector<Branch<2>>&, const std::vector<BifurcationEvent>&,
                              const std::filesystem::path&);
template void diagram_emit<4>(const std::vector<Branch<4>>&, const std::vector<BifurcationEvent>&,
                              const std::filesystem::path&);

}  // namespace ferrobvp
