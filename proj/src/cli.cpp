#include "ferrobvp/cli.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "ferrobvp/asymptotics.hpp"
#include "ferrobvp/bulk_landscape.hpp"
#include "ferrobvp/continuation.hpp"
#include "ferrobvp/deflation.hpp"
#include "ferrobvp/gamma_metric.hpp"
#include "ferrobvp/io.hpp"
#include "ferrobvp/parallel.hpp"
#include "ferrobvp/stability.hpp"

#ifndef FERROBVP_VERSION
#define FERROBVP_VERSION "0.0.0"
#endif

namespace ferrobvp::cli {

namespace fs = std::filesystem;
using nlohmann::json;

const std::vector<std::string>& reproducible_figures() {
  static const std::vector<std::string> ids = {"fig1", "fig3", "fig4", "fig5",  "fig6",  "fig7",
                                               "fig8", "fig9", "fig10", "fig11", "fig12"};
  return ids;
}

namespace {

struct Common {
  int n_cells = 1000;
  double xi = 1.0;
  std::uint64_t seed = 0;
  std::string out;
};

void add_common(CLI::App* app, Common& c, bool out_required) {
  app->add_option("--n-cells", c.n_cells, "mesh cells")->check(CLI::Range(2, 10000000));
  app->add_option("--xi", c.xi, "magnetic weight xi")->check(CLI::PositiveNumber);
  app->add_option("--seed", c.seed, "seed for random guesses");
  auto* o = app->add_option("--out", c.out, "output directory");
  if (out_required) o->required();
}

json common_json(const Common& c) { return {{"n_cells", c.n_cells}, {"xi", c.xi}, {"seed", c.seed}, {"out", c.out}}; }

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void write_manifest(const fs::path& dir, const std::string& command, const std::vector<std::string>& argv,
                    const json& config, double seconds, const json& summary = json::object()) {
  json m;
  m["tool"] = "ferrobvp";
  m["version"] = FERROBVP_VERSION;
  m["command"] = command;
  m["argv"] = argv;
  m["config"] = config;
  m["threads"] = worker_limit();
  m["timings"] = {{"total_seconds", seconds}};
  m["summary"] = summary;
  write_json(dir / "manifest.json", m);
}

/// "a:b" -> (a, b); "a:b:n" -> (a, b, n).
std::vector<double> split_numbers(const std::string& s, std::size_t expected, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, ':')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(part, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != part.size() || part.empty()) throw std::invalid_argument(what + ": '" + s + "' is not numeric");
    out.push_back(v);
  }
  if (out.size() != expected) throw std::invalid_argument(what + ": expected " + std::to_string(expected) + " fields");
  return out;
}

std::string stem(int i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "solution_%03d", i);
  return buf;
}

// ---------------------------------------------------------------- bulk

void bulk_rows(std::ostream& os, const std::vector<double>& cs, double xi) {
  os << std::setprecision(17) << "c,branch,parity,rho,sigma,energy\n";
  for (double c : cs) {
    const ModelParams p = ModelParams::make(1.0, 1.0, c, xi);
    for (const auto& cp : bulk_critical_points(p))
      os << c << ',' << cp.label << ',' << to_string(cp.parity) << ',' << cp.rho << ',' << cp.sigma << ','
         << cp.energy << '\n';
  }
}

std::vector<double> sweep_values(const std::string& sweep) {
  const auto v = split_numbers(sweep, 3, "--sweep");
  const int n = static_cast<int>(v[2]);
  if (n < 1 || v[2] != n) throw std::invalid_argument("--sweep: point count must be a positive integer");
  std::vector<double> cs(n);
  for (int i = 0; i < n; ++i) cs[i] = n == 1 ? v[0] : v[0] + (v[1] - v[0]) * i / (n - 1);
  return cs;
}

// ---------------------------------------------------------------- solutions

template <int Fields>
json stability_json(const NodalState<Fields>& s, const ModelParams& p, int k) {
  StabilityOptions so;
  so.k = k;
  const StabilityReport rep = hessian_spectrum(s, p, so);
  return {{"eigenvalues", std::vector<double>(rep.smallest_eigenvalues.data(),
                                              rep.smallest_eigenvalues.data() + rep.smallest_eigenvalues.size())},
          {"index", rep.index},
          {"verdict", to_string(rep.verdict)}};
}

template <int Fields>
void write_solution(const fs::path& dir, const std::string& name, const NodalState<Fields>& s, const ModelParams& p,
                    const json& extra) {
  write_solution_csv(dir / (name + ".csv"), s);
  write_json(dir / (name + ".json"), solution_sidecar(s, p, extra));
}

template <int Fields>
NodalState<Fields> load_guess(const std::string& guess, const std::shared_ptr<const Mesh>& mesh, const ModelParams& p) {
  if (fs::exists(guess)) {
    FieldState s = read_solution_csv(guess);
    if constexpr (Fields == 2) {
      return restrict_to_or(s);
    } else {
      return s;
    }
  }
  return make_guess<Fields>(guess, mesh, p);
}

struct SolveArgs {
  Common common;
  double l = 0.0;
  double c = 0.0;
  bool or_system = false;
  std::string guess = "linear";
  std::string linesearch = "l2";
  int max_iters = 100;
};

template <int Fields>
int solve_impl(const SolveArgs& a, const ModelParams& p, const fs::path& dir, json& summary) {
  auto mesh = make_mesh(a.common.n_cells);
  SolveOptions so;
  so.max_iters = a.max_iters;
  so.linesearch = a.linesearch == "none" ? Linesearch::None : Linesearch::L2;
  const SolveReport<Fields> rep = newton_solve(load_guess<Fields>(a.guess, mesh, p), p, so);
  json extra = {{"converged", rep.converged},
                {"iterations", rep.iterations},
                {"residual_norms", rep.residual_norms},
                {"message", rep.message},
                {"source", a.guess}};
  write_solution(dir, "solution", rep.final_state, p, extra);
  summary = {{"converged", rep.converged}, {"iterations", rep.iterations}, {"residual", rep.final_residual()}};
  if (!rep.converged) {
    std::cerr << "solve: no convergence: " << rep.message << '\n';
    return 1;
  }
  std::cout << "converged in " << rep.iterations << " iterations, residual " << rep.final_residual() << ", energy "
            << energy(rep.final_state, p) << '\n';
  return 0;
}

/// Deflation sweep written as solution_NNN.{csv,json} plus index.json.
template <int Fields>
json deflation_run(const ModelParams& p, int n_cells, int suite_size, int budget, std::uint64_t seed,
                   const fs::path& dir, bool classify, const std::vector<NodalState<Fields>>& seeds = {}) {
  auto mesh = make_mesh(n_cells);
  DiscoveryOptions dopts;
  dopts.budget = budget;
  const Discovery<Fields> found = discover_solutions(p, guess_suite<Fields>(mesh, p, suite_size, seed), dopts, seeds);
  json index;
  index["params"] = params_to_json(p);
  index["system"] = Fields == 4 ? "full" : "or";
  index["count"] = found.solutions.size();
  index["attempts"] = found.attempts;
  index["solutions"] = json::array();
  for (std::size_t i = 0; i < found.solutions.size(); ++i) {
    const auto& s = found.solutions[i];
    json extra = {{"source", found.sources[i]}};
    json stab = nullptr;
    if (classify) {
      stab = stability_json(s, p, 6);
      extra["stability"] = stab;
    }
    write_solution(dir, stem(static_cast<int>(i)), s, p, extra);
    index["solutions"].push_back({{"file", stem(static_cast<int>(i)) + ".csv"},
                                  {"source", found.sources[i]},
                                  {"energy", energy(s, p)},
                                  {"stability", classify ? stab["verdict"] : json(nullptr)}});
  }
  write_json(dir / "index.json", index);
  return index;
}

struct DeflateArgs {
  Common common;
  double l = 0.0;
  double c = 0.0;
  bool or_system = false;
  int budget = 200;
  int suite_size = 40;
  bool classify = false;
};

// ---------------------------------------------------------------- stability

int stability_dir(const fs::path& dir, int k) {
  if (!fs::is_directory(dir)) throw std::invalid_argument("--in: " + dir.string() + " is not a directory");
  std::vector<fs::path> sidecars;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() != ".json") continue;
    const auto name = e.path().filename().string();
    if (name == "index.json" || name == "manifest.json") continue;
    if (fs::exists(fs::path(e.path()).replace_extension(".csv"))) sidecars.push_back(e.path());
  }
  std::sort(sidecars.begin(), sidecars.end());
  if (sidecars.empty()) throw std::runtime_error("no solution files in " + dir.string());

  std::map<std::string, std::string> verdicts;
  for (const auto& sc : sidecars) {
    json j = read_json(sc);
    const ModelParams p = params_from_json(j.at("params"));
    const FieldState full = read_solution_csv(fs::path(sc).replace_extension(".csv"));
    json stab = j.value("system", "full") == "or" ? stability_json(restrict_to_or(full), p, k)
                                                  : stability_json(full, p, k);
    j["stability"] = stab;
    write_json(sc, j);
    verdicts[fs::path(sc).replace_extension(".csv").filename().string()] = stab["verdict"];
    std::cout << sc.filename().string() << ": " << stab["verdict"].get<std::string>() << ", lambda_min "
              << stab["eigenvalues"][0].get<double>() << '\n';
  }
  const auto index_path = dir / "index.json";
  if (fs::exists(index_path)) {
    json index = read_json(index_path);
    for (auto& entry : index["solutions"]) {
      auto it = verdicts.find(entry.value("file", ""));
      if (it != verdicts.end()) entry["stability"] = it->second;
    }
    write_json(index_path, index);
  }
  return 0;
}

// ---------------------------------------------------------------- continuation

struct ContinueArgs {
  Common common;
  double c = 1.0;
  std::string range;
  double step = 0.01;
  bool or_system = false;
  bool dump_states = false;
  int discovery_every = 10;
  int suite_size = 40;
  int budget = 160;
};

template <int Fields>
json continue_impl(double c, double l0, double l1, double step, const ContinuationOptions& opts, const fs::path& dir,
                   bool dump_states) {
  const auto r = continue_in_l<Fields>(c, l0, l1, step, opts);
  diagram_emit(r.branches, r.events, dir);
  if (dump_states) {
    const fs::path sd = dir / "states";
    fs::create_directories(sd);
    for (const auto& b : r.branches) {
      for (const auto& pt : b.points) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "branch_%03d_step_%05d.csv", b.id, pt.step);
        write_solution_csv(sd / buf, pt.state);
      }
    }
  }
  json summary;
  summary["branches"] = r.branches.size();
  summary["events"] = json::array();
  for (const auto& e : r.events)
    summary["events"].push_back({{"l_lo", e.l_lo}, {"l_hi", e.l_hi}, {"kind", to_string(e.kind)}, {"branches", e.branch_ids}});
  for (const auto& e : r.events)
    std::cout << to_string(e.kind) << " in [" << e.l_lo << ", " << e.l_hi << "] (" << e.note << ")\n";
  return summary;
}

ContinuationOptions continuation_options(const ContinueArgs& a) {
  ContinuationOptions o;
  o.n_cells = a.common.n_cells;
  o.xi = a.common.xi;
  o.seed = a.common.seed;
  o.discovery_every = a.discovery_every;
  o.guess_suite_size = a.suite_size;
  o.discovery_budget = a.budget;
  return o;
}

// ---------------------------------------------------------------- metric

struct NamedPair {
  std::string name;
  PlanePoint a;
  PlanePoint b;
};

std::vector<NamedPair> metric_pairs(const std::string& selection, double c) {
  const MetricPoints mp = metric_points(c);
  const std::vector<NamedPair> all = {{"star-starstar", mp.p_star, mp.p_star_star},
                                      {"star-right", mp.p_star, mp.p_right},
                                      {"starstar-left", mp.p_star_star, mp.p_left},
                                      {"star-left", mp.p_star, mp.p_left},
                                      {"starstar-right", mp.p_star_star, mp.p_right}};
  if (selection == "all") return all;
  std::vector<NamedPair> out;
  std::stringstream ss(selection);
  std::string item;
  while (std::getline(ss, item, ';')) {
    auto it = std::find_if(all.begin(), all.end(), [&](const auto& p) { return p.name == item; });
    if (it != all.end()) {
      out.push_back(*it);
      continue;
    }
    // Explicit "q0,m0:q1,m1".
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw std::invalid_argument("--pairs: unknown pair '" + item + "'");
    auto point = [&](const std::string& s) {
      const auto comma = s.find(',');
      if (comma == std::string::npos) throw std::invalid_argument("--pairs: expected q11,m1 in '" + s + "'");
      return PlanePoint{std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1))};
    };
    out.push_back({"custom" + std::to_string(out.size()), point(item.substr(0, colon)), point(item.substr(colon + 1))});
  }
  return out;
}

json metric_run(double c, const std::string& pairs, const MetricOptions& mo, const fs::path& dir, bool paths,
                std::ostream* table) {
  const auto list = metric_pairs(pairs, c);
  std::vector<TransitionCost> costs(list.size());
  parallel_for(static_cast<int>(list.size()),
               [&](int k) { costs[k] = transition_cost(list[k].a, list[k].b, c, mo); });
  std::ostringstream csv;
  csv << std::setprecision(17) << "pair,cost,grid_cost\n";
  json summary = json::object();
  for (std::size_t k = 0; k < list.size(); ++k) {
    csv << list[k].name << ',' << costs[k].cost << ',' << costs[k].grid_cost << '\n';
    summary[list[k].name] = costs[k].cost;
  }
  if (table) *table << csv.str();
  if (!dir.empty()) {
    std::ofstream(dir / "metric.csv") << csv.str();
    if (paths) {
      for (std::size_t k = 0; k < list.size(); ++k) {
        std::ofstream out(dir / ("path_" + list[k].name + ".csv"));
        out << std::setprecision(17) << "q11,m1\n";
        for (const auto& pt : costs[k].path.nodes) out << pt.q11 << ',' << pt.m1 << '\n';
      }
    }
    if (pairs == "all") {
      LimitCosts lc;
      lc.c = c;
      lc.star_starstar = costs[0].cost;
      lc.star_right = costs[1].cost;
      lc.starstar_left = costs[2].cost;
      lc.star_left = costs[3].cost;
      lc.starstar_right = costs[4].cost;
      const LimitMinimum lm = minimise_limit_functional(lc);
      json cands = json::array();
      for (const auto& s : lm.candidates) {
        std::vector<std::string> ph;
        for (auto p : s.phases) ph.push_back(to_string(p));
        cands.push_back({{"jumps", s.jumps}, {"phases", ph}, {"J", s.J}});
      }
      std::vector<std::string> best;
      for (auto p : lm.best.phases) best.push_back(to_string(p));
      summary["limit"] = {{"best_phases", best},
                          {"best_jumps", lm.best.jumps},
                          {"J", lm.best.J},
                          {"three_jumps_dominated", lm.three_jumps_dominated},
                          {"candidates", cands}};
      write_json(dir / "limit.json", summary["limit"]);
    }
  }
  return summary;
}

// ---------------------------------------------------------------- asymptotics

json asymptotic_study(int order, int n_cells, const fs::path& dir) {
  const ConvergenceStudy s = convergence_study(default_c_grid(), order, n_cells);
  const std::string name = "study_order" + std::to_string(order);
  std::ofstream out(dir / (name + ".csv"));
  out << std::setprecision(17) << "c,gap_q11,gap_m1,iterations\n";
  for (std::size_t i = 0; i < s.c.size(); ++i)
    out << s.c[i] << ',' << s.gap_q11[i] << ',' << s.gap_m1[i] << ',' << s.iterations[i] << '\n';
  json j = {{"order", order}, {"slope_q11", s.slope_q11}, {"slope_m1", s.slope_m1}, {"c", s.c}};
  write_json(dir / (name + ".json"), j);
  std::cout << "order " << order << ": slope Q11 " << s.slope_q11 << ", M1 " << s.slope_m1 << '\n';
  return j;
}

int parse_order(const std::string& s) {
  if (s == "order0") return 0;
  if (s == "order1") return 1;
  if (s == "order2") return 2;
  throw std::invalid_argument("--study must be order0, order1, order2 or all");
}

// ---------------------------------------------------------------- reproduce

json reproduce(const std::string& fig, const Common& common, const fs::path& dir) {
  const int n = common.n_cells;
  const auto seed = common.seed;
  if (fig == "fig1") {
    std::vector<double> cs;
    for (int i = 0; i <= 500; ++i) cs.push_back(0.01 * i);
    std::ofstream out(dir / "bulk_energy_vs_c.csv");
    bulk_rows(out, cs, common.xi);
    return {{"points", cs.size()}};
  }
  if (fig == "fig3") {
    json j;
    for (int o = 0; o < 3; ++o) j["order" + std::to_string(o)] = asymptotic_study(o, n, dir);
    return j;
  }
  if (fig == "fig4") {
    MetricOptions mo;
    json j;
    j["c1"] = metric_run(1.0, "all", mo, dir, true, &std::cout);
    std::ofstream sweep(dir / "coupling_sweep.csv");
    sweep << std::setprecision(17) << "c,star-starstar,star-right,starstar-left,star-left,starstar-right\n";
    for (double c : {0.5, 1.0, 2.0, 5.0}) {
      const LimitCosts lc = limit_costs(c, mo);
      sweep << c << ',' << lc.star_starstar << ',' << lc.star_right << ',' << lc.starstar_left << ','
            << lc.star_left << ',' << lc.starstar_right << '\n';
    }
    return j;
  }
  auto deflate_fig = [&](double l, double c, bool full, int suite, int budget) {
    const ModelParams p = ModelParams::equal_elastic(l, c, common.xi);
    return full ? deflation_run<4>(p, n, suite, budget, seed, dir, true)
                : deflation_run<2>(p, n, suite, budget, seed, dir, true);
  };
  if (fig == "fig5") return deflate_fig(10.0, 1.0, false, 20, 200);
  if (fig == "fig6") return deflate_fig(0.01, 1.0, false, 40, 200);
  if (fig == "fig7") return deflate_fig(0.01, 5.0, false, 40, 200);
  if (fig == "fig9") return deflate_fig(0.2, 1.0, true, 40, 200);
  if (fig == "fig12") return deflate_fig(4.43, 5.0, true, 40, 200);
  if (fig == "fig10") {
    json j;
    for (double c : {1.0, 5.0}) {
      const fs::path sub = dir / ("c" + std::to_string(static_cast<int>(c)));
      fs::create_directories(sub);
      const ModelParams p = ModelParams::equal_elastic(0.01, c, common.xi);
      j["c" + std::to_string(static_cast<int>(c))] = deflation_run<4>(p, n, 40, 200, seed, sub, true);
    }
    return j;
  }
  if (fig == "fig8" || fig == "fig11") {
    ContinuationOptions o;
    o.n_cells = n;
    o.xi = common.xi;
    o.seed = seed;
    return fig == "fig8" ? continue_impl<4>(1.0, 3.0, 0.2, 0.01, o, dir, false)
                         : continue_impl<4>(5.0, 5.0, 3.0, 0.015, o, dir, false);
  }
  throw std::invalid_argument("unknown figure '" + fig + "'");
}

}  // namespace

int run(int argc, char** argv) {
  const std::vector<std::string> args(argv, argv + argc);
  CLI::App app{"Ferronematic channel boundary-value problem: solutions, stability, continuation, limits"};
  app.require_subcommand(1);
  app.set_version_flag("--version", FERROBVP_VERSION);

  struct {
    std::vector<double> c{1.0};
    double xi = 1.0;
    std::string sweep;
    std::string out;
  } bulk;
  auto* bulk_cmd = app.add_subcommand("bulk", "bulk critical points as CSV");
  bulk_cmd->add_option("--c", bulk.c, "coupling value(s)")->check(CLI::NonNegativeNumber);
  bulk_cmd->add_option("--xi", bulk.xi, "magnetic weight xi")->check(CLI::PositiveNumber);
  bulk_cmd->add_option("--sweep", bulk.sweep, "c0:c1:n sweep instead of --c");
  bulk_cmd->add_option("--out", bulk.out, "output directory (stdout when omitted)");

  SolveArgs solve;
  auto* solve_cmd = app.add_subcommand("solve", "damped Newton from one initial guess");
  add_common(solve_cmd, solve.common, true);
  solve_cmd->add_option("--l", solve.l, "elastic constant l = l1 = l2")->required();
  solve_cmd->add_option("--c", solve.c, "coupling")->required();
  solve_cmd->add_flag("--or", solve.or_system, "two-field (Q11, M1) system");
  solve_cmd->add_option("--guess", solve.guess, "guess name or solution CSV");
  solve_cmd->add_option("--linesearch", solve.linesearch, "l2 or none")->check(CLI::IsMember({"l2", "none"}));
  solve_cmd->add_option("--max-iters", solve.max_iters, "Newton iteration cap")->check(CLI::PositiveNumber);

  DeflateArgs deflate;
  auto* deflate_cmd = app.add_subcommand("deflate", "deflation sweep over a guess suite");
  add_common(deflate_cmd, deflate.common, true);
  deflate_cmd->add_option("--l", deflate.l, "elastic constant")->required();
  deflate_cmd->add_option("--c", deflate.c, "coupling")->required();
  deflate_cmd->add_flag("--or", deflate.or_system, "two-field system");
  deflate_cmd->add_option("--budget", deflate.budget, "deflated solves allowed")->check(CLI::PositiveNumber);
  deflate_cmd->add_option("--suite-size", deflate.suite_size, "guesses in the suite")->check(CLI::PositiveNumber);
  deflate_cmd->add_flag("--stability", deflate.classify, "classify every solution immediately");

  struct {
    std::string in;
    int k = 6;
  } stab;
  auto* stab_cmd = app.add_subcommand("stability", "Hessian spectrum of saved solutions");
  stab_cmd->add_option("--in", stab.in, "solution directory")->required();
  stab_cmd->add_option("--k", stab.k, "eigenvalues to compute")->check(CLI::PositiveNumber);

  ContinueArgs cont;
  auto* cont_cmd = app.add_subcommand("continue", "natural continuation in l");
  add_common(cont_cmd, cont.common, true);
  cont_cmd->add_option("--c", cont.c, "coupling")->required();
  cont_cmd->add_option("--l-range", cont.range, "start:end")->required();
  cont_cmd->add_option("--step", cont.step, "step in l")->check(CLI::PositiveNumber);
  cont_cmd->add_flag("--or", cont.or_system, "two-field system");
  cont_cmd->add_flag("--dump-states", cont.dump_states, "write every branch point as CSV");
  cont_cmd->add_option("--discovery-every", cont.discovery_every, "steps between full deflation passes")
      ->check(CLI::NonNegativeNumber);
  cont_cmd->add_option("--suite-size", cont.suite_size, "guesses per deflation pass")->check(CLI::PositiveNumber);
  cont_cmd->add_option("--budget", cont.budget, "solves per deflation pass")->check(CLI::PositiveNumber);

  struct {
    double c = 1.0;
    std::string pairs = "all";
    int grid = 400;
    std::string out;
    bool paths = false;
  } metric;
  auto* metric_cmd = app.add_subcommand("metric", "transition costs of the degenerate metric");
  metric_cmd->add_option("--c", metric.c, "coupling")->check(CLI::NonNegativeNumber);
  metric_cmd->add_option("--pairs", metric.pairs, "all, or ';'-separated names or q0,m0:q1,m1");
  metric_cmd->add_option("--grid", metric.grid, "grid cells per side")->check(CLI::Range(2, 20000));
  metric_cmd->add_option("--out", metric.out, "output directory (stdout when omitted)");
  metric_cmd->add_flag("--paths", metric.paths, "write path polylines");

  struct {
    std::string study = "all";
    int n_cells = 1000;
    std::string out;
  } asym;
  auto* asym_cmd = app.add_subcommand("asymptotics", "convergence of the small-c expansions");
  asym_cmd->add_option("--study", asym.study, "order0|order1|order2|all");
  asym_cmd->add_option("--n-cells", asym.n_cells, "mesh cells")->check(CLI::Range(2, 10000000));
  asym_cmd->add_option("--out", asym.out, "output directory")->required();

  struct {
    std::string figure;
    Common common;
  } repro;
  auto* repro_cmd = app.add_subcommand("reproduce", "regenerate the data behind one figure");
  repro_cmd->add_option("figure", repro.figure, "figure id")->required()->check(CLI::IsMember(reproducible_figures()));
  add_common(repro_cmd, repro.common, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  const Timer timer;
  try {
    if (bulk_cmd->parsed()) {
      std::vector<double> cs = bulk.sweep.empty() ? bulk.c : sweep_values(bulk.sweep);
      if (bulk.out.empty()) {
        bulk_rows(std::cout, cs, bulk.xi);
        return 0;
      }
      ensure_writable_dir(bulk.out);
      std::ofstream out(fs::path(bulk.out) / "bulk.csv");
      bulk_rows(out, cs, bulk.xi);
      write_manifest(bulk.out, "bulk", args, {{"c", cs}, {"xi", bulk.xi}}, timer.seconds());
      return 0;
    }
    if (solve_cmd->parsed()) {
      const ModelParams p = ModelParams::equal_elastic(solve.l, solve.c, solve.common.xi);
      p.validate();
      ensure_writable_dir(solve.common.out);
      json summary;
      const int rc = solve.or_system ? solve_impl<2>(solve, p, solve.common.out, summary)
                                     : solve_impl<4>(solve, p, solve.common.out, summary);
      json cfg = common_json(solve.common);
      cfg.update({{"l", solve.l}, {"c", solve.c}, {"or", solve.or_system}, {"guess", solve.guess},
                  {"linesearch", solve.linesearch}, {"max_iters", solve.max_iters}});
      write_manifest(solve.common.out, "solve", args, cfg, timer.seconds(), summary);
      return rc;
    }
    if (deflate_cmd->parsed()) {
      const ModelParams p = ModelParams::equal_elastic(deflate.l, deflate.c, deflate.common.xi);
      ensure_writable_dir(deflate.common.out);
      const auto& d = deflate;
      const json index =
          d.or_system ? deflation_run<2>(p, d.common.n_cells, d.suite_size, d.budget, d.common.seed, d.common.out,
                                         d.classify)
                      : deflation_run<4>(p, d.common.n_cells, d.suite_size, d.budget, d.common.seed, d.common.out,
                                         d.classify);
      json cfg = common_json(d.common);
      cfg.update({{"l", d.l}, {"c", d.c}, {"or", d.or_system}, {"budget", d.budget}, {"suite_size", d.suite_size},
                  {"stability", d.classify}});
      write_manifest(d.common.out, "deflate", args, cfg, timer.seconds(), {{"count", index["count"]}});
      std::cout << index["count"].get<int>() << " solutions\n";
      return 0;
    }
    if (stab_cmd->parsed()) return stability_dir(stab.in, stab.k);
    if (cont_cmd->parsed()) {
      const auto range = split_numbers(cont.range, 2, "--l-range");
      ensure_writable_dir(cont.common.out);
      const ContinuationOptions o = continuation_options(cont);
      const json summary = cont.or_system
                               ? continue_impl<2>(cont.c, range[0], range[1], cont.step, o, cont.common.out, cont.dump_states)
                               : continue_impl<4>(cont.c, range[0], range[1], cont.step, o, cont.common.out, cont.dump_states);
      json cfg = common_json(cont.common);
      cfg.update({{"c", cont.c}, {"l_range", range}, {"step", cont.step}, {"or", cont.or_system},
                  {"dump_states", cont.dump_states}, {"discovery_every", cont.discovery_every},
                  {"suite_size", cont.suite_size}, {"budget", cont.budget}});
      write_manifest(cont.common.out, "continue", args, cfg, timer.seconds(), summary);
      return 0;
    }
    if (metric_cmd->parsed()) {
      MetricOptions mo;
      mo.grid = metric.grid;
      fs::path dir;
      if (!metric.out.empty()) {
        dir = metric.out;
        ensure_writable_dir(dir);
      }
      const json summary = metric_run(metric.c, metric.pairs, mo, dir, metric.paths, &std::cout);
      if (!dir.empty())
        write_manifest(dir, "metric", args, {{"c", metric.c}, {"pairs", metric.pairs}, {"grid", metric.grid}},
                       timer.seconds(), summary);
      return 0;
    }
    if (asym_cmd->parsed()) {
      ensure_writable_dir(asym.out);
      json summary;
      if (asym.study == "all") {
        for (int o = 0; o < 3; ++o) summary["order" + std::to_string(o)] = asymptotic_study(o, asym.n_cells, asym.out);
      } else {
        summary = asymptotic_study(parse_order(asym.study), asym.n_cells, asym.out);
      }
      write_manifest(asym.out, "asymptotics", args, {{"study", asym.study}, {"n_cells", asym.n_cells}},
                     timer.seconds(), summary);
      return 0;
    }
    if (repro_cmd->parsed()) {
      ensure_writable_dir(repro.common.out);
      const json summary = reproduce(repro.figure, repro.common, repro.common.out);
      json cfg = common_json(repro.common);
      cfg["figure"] = repro.figure;
      write_manifest(repro.common.out, "reproduce", args, cfg, timer.seconds(), summary);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}

}  // namespace ferrobvp::cli
