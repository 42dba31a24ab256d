#include "ferrobvp/gamma_metric.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>

#include "ferrobvp/bulk_landscape.hpp"
#include "ferrobvp/parallel.hpp"

namespace ferrobvp {

double f_tilde(const PlanePoint& p, double c, double beta) {
  const double q = p.q11;
  const double m2 = p.m1 * p.m1;
  const double v = (q * q - 1.0) * (q * q - 1.0) + 0.25 * (m2 - 1.0) * (m2 - 1.0) - c * q * m2 - beta;
  if (v < -1e-9) {
    throw MetricConsistencyError("f_tilde = " + std::to_string(v) + " at (" + std::to_string(p.q11) + ", " +
                                 std::to_string(p.m1) + "): beta is not the OR bulk minimum");
  }
  return v < 0.0 ? 0.0 : v;
}

double f_tilde(const PlanePoint& p, double c) {
  if (!(c >= 0.0)) throw std::invalid_argument("coupling c must be nonnegative");
  return f_tilde(p, c, bulk_minimum_info(c).beta);
}

void MetricOptions::validate() const {
  if (grid < 2) throw std::invalid_argument("metric grid needs at least 2 cells per side");
  if (!(padding >= 0.0)) throw std::invalid_argument("metric padding must be nonnegative");
  if (!(refine_tol > 0.0)) throw std::invalid_argument("refine_tol must be positive");
}

namespace {

struct Weight {
  double c;
  double beta;

  double g(const PlanePoint& p) const { return std::sqrt(f_tilde(p, c, beta)); }

  /// Gradient of sqrt(f_tilde); zero where f_tilde vanishes.
  std::array<double, 2> grad_g(const PlanePoint& p) const {
    const double gv = g(p);
    if (gv < 1e-300) return {0.0, 0.0};
    const double q = p.q11;
    const double m = p.m1;
    const double m2 = m * m;
    const double fq = 4.0 * q * (q * q - 1.0) - c * m2;
    const double fm = m * (m2 - 1.0) - 2.0 * c * q * m;
    return {fq / (2.0 * gv), fm / (2.0 * gv)};
  }

  double segment(const PlanePoint& a, double ga, const PlanePoint& b, double gb) const {
    return 0.5 * (ga + gb) * std::hypot(b.q11 - a.q11, b.m1 - a.m1);
  }
};

constexpr double kGaussT[3] = {0.11270166537925831148, 0.5, 0.88729833462074168852};
constexpr double kGaussW[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};

/// Three-point Gauss cost of the segment a-b; sampling inside the segment
/// keeps the descent from parking nodes in the zero set of the weight while
/// the segments between them cross a barrier.
double gauss_segment(const Weight& w, const PlanePoint& a, const PlanePoint& b) {
  const double len = std::hypot(b.q11 - a.q11, b.m1 - a.m1);
  double s = 0.0;
  for (int q = 0; q < 3; ++q)
    s += kGaussW[q] * w.g({a.q11 + kGaussT[q] * (b.q11 - a.q11), a.m1 + kGaussT[q] * (b.m1 - a.m1)});
  return len * s;
}

/// Gradient of gauss_segment(a, b) with respect to a.
std::array<double, 2> gauss_segment_grad(const Weight& w, const PlanePoint& a, const PlanePoint& b) {
  const double dq = a.q11 - b.q11;
  const double dm = a.m1 - b.m1;
  const double len = std::hypot(dq, dm);
  std::array<double, 2> out{0.0, 0.0};
  for (int q = 0; q < 3; ++q) {
    const PlanePoint x{a.q11 + kGaussT[q] * (b.q11 - a.q11), a.m1 + kGaussT[q] * (b.m1 - a.m1)};
    const double gx = w.g(x);
    const auto dg = w.grad_g(x);
    if (len > 0.0) {
      out[0] += kGaussW[q] * gx * dq / len;
      out[1] += kGaussW[q] * gx * dm / len;
    }
    out[0] += kGaussW[q] * len * (1.0 - kGaussT[q]) * dg[0];
    out[1] += kGaussW[q] * len * (1.0 - kGaussT[q]) * dg[1];
  }
  return out;
}

double refine(const Weight& w, std::vector<PlanePoint>& nodes, const MetricOptions& opts) {
  const std::size_t n = nodes.size();
  auto total = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) s += gauss_segment(w, nodes[i], nodes[i + 1]);
    return s;
  };
  double cost = total();
  if (n < 3) return cost;

  std::vector<double> step(n, 1e-3);
  for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const PlanePoint x = nodes[i];
      const auto ga = gauss_segment_grad(w, x, nodes[i + 1]);
      const auto gb = gauss_segment_grad(w, x, nodes[i - 1]);
      const double gq = ga[0] + gb[0];
      const double gm = ga[1] + gb[1];
      const double gn = std::hypot(gq, gm);
      if (gn == 0.0) continue;
      const double before = gauss_segment(w, nodes[i - 1], x) + gauss_segment(w, x, nodes[i + 1]);
      for (int tries = 0; tries < 8; ++tries) {
        const PlanePoint y{x.q11 - step[i] * gq / gn, x.m1 - step[i] * gm / gn};
        if (gauss_segment(w, nodes[i - 1], y) + gauss_segment(w, y, nodes[i + 1]) < before) {
          nodes[i] = y;
          step[i] *= 1.5;
          break;
        }
        step[i] = std::max(step[i] * 0.25, 1e-14);
      }
    }
    const double next = total();
    const double gain = cost - next;
    cost = next;
    if (gain < opts.refine_tol) break;
  }
  return cost;
}

/// Points at equal arclength along a polyline.
std::vector<PlanePoint> resample(const std::vector<PlanePoint>& nodes, int count) {
  std::vector<double> s(nodes.size(), 0.0);
  for (std::size_t i = 1; i < nodes.size(); ++i)
    s[i] = s[i - 1] + std::hypot(nodes[i].q11 - nodes[i - 1].q11, nodes[i].m1 - nodes[i - 1].m1);
  std::vector<PlanePoint> out(count);
  std::size_t seg = 0;
  for (int k = 0; k < count; ++k) {
    const double target = s.back() * k / (count - 1);
    while (seg + 2 < nodes.size() && s[seg + 1] < target) ++seg;
    const double len = s[seg + 1] - s[seg];
    const double t = len > 0.0 ? std::clamp((target - s[seg]) / len, 0.0, 1.0) : 0.0;
    out[k] = {nodes[seg].q11 + t * (nodes[seg + 1].q11 - nodes[seg].q11),
              nodes[seg].m1 + t * (nodes[seg + 1].m1 - nodes[seg].m1)};
  }
  out.front() = nodes.front();
  out.back() = nodes.back();
  return out;
}

std::vector<PlanePoint> bisect(const std::vector<PlanePoint>& nodes) {
  std::vector<PlanePoint> out;
  out.reserve(2 * nodes.size() - 1);
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    out.push_back(nodes[i]);
    out.push_back({0.5 * (nodes[i].q11 + nodes[i + 1].q11), 0.5 * (nodes[i].m1 + nodes[i + 1].m1)});
  }
  out.push_back(nodes.back());
  return out;
}

/// Composite trapezoid with every segment split into kFineSplit pieces.
constexpr int kFineSplit = 16;

double fine_cost(const Weight& w, const std::vector<PlanePoint>& nodes) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    const PlanePoint& a = nodes[i];
    const PlanePoint& b = nodes[i + 1];
    double prev = w.g(a);
    for (int k = 1; k <= kFineSplit; ++k) {
      const double t = static_cast<double>(k) / kFineSplit;
      const PlanePoint x{a.q11 + t * (b.q11 - a.q11), a.m1 + t * (b.m1 - a.m1)};
      const double gx = w.g(x);
      s += w.segment(k == 1 ? a : PlanePoint{a.q11 + (t - 1.0 / kFineSplit) * (b.q11 - a.q11),
                                              a.m1 + (t - 1.0 / kFineSplit) * (b.m1 - a.m1)},
                     prev, x, gx);
      prev = gx;
    }
  }
  return s;
}

/// Descent on 9 equally spaced nodes, then repeated midpoint insertion and
/// descent up to kFinestNodes nodes.
constexpr int kCoarsestNodes = 9;
constexpr int kFinestNodes = 513;

double multilevel_refine(const Weight& w, std::vector<PlanePoint>& nodes, const MetricOptions& opts) {
  std::vector<PlanePoint> level = resample(nodes, kCoarsestNodes);
  refine(w, level, opts);
  while (static_cast<int>(level.size()) < kFinestNodes) {
    level = resample(bisect(level), 2 * static_cast<int>(level.size()) - 1);
    refine(w, level, opts);
  }
  nodes = std::move(level);
  return fine_cost(w, nodes);
}

}  // namespace

double polyline_cost(const std::vector<PlanePoint>& nodes, double c) {
  const Weight w{c, bulk_minimum_info(c).beta};
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) s += w.segment(nodes[i], w.g(nodes[i]), nodes[i + 1], w.g(nodes[i + 1]));
  return s;
}

MetricPoints metric_points(double c) {
  const BulkMinimumInfo info = bulk_minimum_info(c);
  const double s = info.sigma_star();
  return {{info.rho_star, s}, {info.rho_star, -s}, {1.0, 1.0}, {-1.0, -1.0}};
}

TransitionCost transition_cost(const PlanePoint& p0, const PlanePoint& p1, double c, const MetricOptions& opts) {
  if (!(c >= 0.0)) throw std::invalid_argument("coupling c must be nonnegative");
  opts.validate();
  const Weight w{c, bulk_minimum_info(c).beta};
  TransitionCost out;
  if (p0.q11 == p1.q11 && p0.m1 == p1.m1) {
    out.path.nodes = {p0};
    return out;
  }

  const MetricPoints mp = metric_points(c);
  double x0 = std::min({p0.q11, p1.q11, mp.p_star.q11}) - opts.padding;
  double x1 = std::max({p0.q11, p1.q11, mp.p_star.q11}) + opts.padding;
  double y0 = std::min({p0.m1, p1.m1, mp.p_star_star.m1}) - opts.padding;
  double y1 = std::max({p0.m1, p1.m1, mp.p_star.m1}) + opts.padding;
  const int n = opts.grid;
  const double hx = (x1 - x0) / n;
  const double hy = (y1 - y0) / n;
  const int side = n + 1;
  auto at = [&](int i, int j) { return PlanePoint{x0 + i * hx, y0 + j * hy}; };
  auto nearest = [&](const PlanePoint& p) {
    const int i = std::clamp(static_cast<int>(std::lround((p.q11 - x0) / hx)), 0, n);
    const int j = std::clamp(static_cast<int>(std::lround((p.m1 - y0) / hy)), 0, n);
    return j * side + i;
  };

  std::vector<double> g(static_cast<std::size_t>(side) * side);
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) g[j * side + i] = w.g(at(i, j));

  const int src = nearest(p0);
  const int dst = nearest(p1);
  std::vector<double> dist(g.size(), std::numeric_limits<double>::infinity());
  std::vector<int> prev(g.size(), -1);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[src] = 0.0;
  heap.push({0.0, src});
  static const int di[8] = {1, -1, 0, 0, 1, 1, -1, -1};
  static const int dj[8] = {0, 0, 1, -1, 1, -1, 1, -1};
  while (!heap.empty()) {
    auto [d, k] = heap.top();
    heap.pop();
    if (d > dist[k]) continue;
    if (k == dst) break;
    const int i = k % side;
    const int j = k / side;
    for (int e = 0; e < 8; ++e) {
      const int ii = i + di[e];
      const int jj = j + dj[e];
      if (ii < 0 || jj < 0 || ii > n || jj > n) continue;
      const int kk = jj * side + ii;
      const double len = std::hypot(di[e] * hx, dj[e] * hy);
      const double nd = d + 0.5 * (g[k] + g[kk]) * len;
      if (nd < dist[kk]) {
        dist[kk] = nd;
        prev[kk] = k;
        heap.push({nd, kk});
      }
    }
  }

  std::vector<PlanePoint> nodes;
  for (int k = dst; k != -1; k = prev[k]) nodes.push_back(at(k % side, k / side));
  std::reverse(nodes.begin(), nodes.end());
  // Exact endpoints replace the snapped grid nodes.
  nodes.front() = p0;
  nodes.back() = p1;
  if (nodes.size() == 1) nodes.push_back(p1);

  out.grid_cost = polyline_cost(nodes, c);
  std::vector<PlanePoint> refined = nodes;
  const double refined_cost = multilevel_refine(w, refined, opts);
  if (refined_cost < out.grid_cost) {
    out.cost = refined_cost;
    nodes = std::move(refined);
  } else {
    out.cost = out.grid_cost;
  }
  out.path.nodes = std::move(nodes);
  out.path.cost = out.cost;
  return out;
}

std::string to_string(Phase p) { return p == Phase::Star ? "p*" : "p**"; }

double LimitCosts::boundary(Phase phase, bool right) const {
  if (phase == Phase::Star) return right ? star_right : star_left;
  return right ? starstar_right : starstar_left;
}

LimitCosts limit_costs(double c, const MetricOptions& opts) {
  const MetricPoints mp = metric_points(c);
  const std::array<std::pair<PlanePoint, PlanePoint>, 5> pairs = {{{mp.p_star, mp.p_star_star},
                                                                   {mp.p_star, mp.p_right},
                                                                   {mp.p_star_star, mp.p_left},
                                                                   {mp.p_star, mp.p_left},
                                                                   {mp.p_star_star, mp.p_right}}};
  std::array<double, 5> d{};
  parallel_for(5, [&](int k) { d[k] = transition_cost(pairs[k].first, pairs[k].second, c, opts).cost; });
  LimitCosts out;
  out.c = c;
  out.star_starstar = d[0];
  out.star_right = d[1];
  out.starstar_left = d[2];
  out.star_left = d[3];
  out.starstar_right = d[4];
  return out;
}

LimitStructure limit_structure(const LimitCosts& costs, Phase first, int jumps) {
  if (jumps < 0) throw std::invalid_argument("jump count must be nonnegative");
  LimitStructure s;
  s.jumps = jumps;
  Phase ph = first;
  for (int k = 0; k <= jumps; ++k) {
    const double a = -1.0 + 2.0 * k / (jumps + 1);
    const double b = -1.0 + 2.0 * (k + 1) / (jumps + 1);
    s.intervals.emplace_back(a, b);
    s.phases.push_back(ph);
    ph = ph == Phase::Star ? Phase::StarStar : Phase::Star;
  }
  s.J = jumps * costs.star_starstar + costs.boundary(s.phases.front(), false) + costs.boundary(s.phases.back(), true);
  return s;
}

LimitMinimum minimise_limit_functional(const LimitCosts& costs) {
  LimitMinimum out;
  for (int jumps = 0; jumps <= 2; ++jumps)
    for (Phase first : {Phase::Star, Phase::StarStar}) out.candidates.push_back(limit_structure(costs, first, jumps));
  out.best = *std::min_element(out.candidates.begin(), out.candidates.end(),
                               [](const auto& a, const auto& b) { return a.J < b.J; });
  double one = std::numeric_limits<double>::infinity();
  for (const auto& s : out.candidates)
    if (s.jumps == 1) one = std::min(one, s.J);
  out.three_jumps_dominated = limit_structure(costs, Phase::Star, 3).J > one &&
                              limit_structure(costs, Phase::StarStar, 3).J > one;
  return out;
}

LimitMinimum minimise_limit_functional(double c, const MetricOptions& opts) {
  return minimise_limit_functional(limit_costs(c, opts));
}

}  // namespace ferrobvp
