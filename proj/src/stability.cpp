#include "ferrobvp/stability.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <Eigen/Eigenvalues>

namespace ferrobvp {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Stable: return "stable";
    case Verdict::Unstable: return "unstable";
    default: return "marginal";
  }
}

namespace {

EigenPairs dense_pairs(const BandedMatrix& a, int k, bool want_vectors) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a.to_dense(),
                                                    want_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  EigenPairs out;
  out.dense = true;
  out.values = es.eigenvalues().head(k);
  if (want_vectors) out.vectors = es.eigenvectors().leftCols(k);
  return out;
}

struct LanczosResult {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
  double worst_residual = 0.0;
};

LanczosResult shift_invert_lanczos(const BandedMatrix& a, const BandedLU& lu, int k, int m) {
  const int n = a.size();
  std::mt19937_64 rng(20240611);
  std::normal_distribution<double> normal;
  auto random_unit = [&] {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = normal(rng);
    return Eigen::VectorXd(v / v.norm());
  };

  Eigen::MatrixXd V(n, m);
  Eigen::VectorXd alpha(m), beta(m);
  V.col(0) = random_unit();
  int steps = 0;
  for (int j = 0; j < m; ++j) {
    Eigen::VectorXd w = lu.solve(V.col(j));
    alpha[j] = V.col(j).dot(w);
    // Full reorthogonalisation, applied twice.
    for (int pass = 0; pass < 2; ++pass) w -= V.leftCols(j + 1) * (V.leftCols(j + 1).transpose() * w);
    steps = j + 1;
    if (j + 1 == m) break;
    double b = w.norm();
    if (b < 1e-14 * std::abs(alpha[j])) {
      // Invariant subspace: continue with a fresh direction orthogonal to V.
      w = random_unit();
      for (int pass = 0; pass < 2; ++pass) w -= V.leftCols(j + 1) * (V.leftCols(j + 1).transpose() * w);
      b = 0.0;
      V.col(j + 1) = w / w.norm();
    } else {
      V.col(j + 1) = w / b;
    }
    beta[j] = b;
  }

  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(steps, steps);
  for (int j = 0; j < steps; ++j) {
    T(j, j) = alpha[j];
    if (j + 1 < steps) T(j, j + 1) = T(j + 1, j) = beta[j];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
  // Largest eigenvalues of the inverse are the lowest of A.
  const int kk = std::min(k, steps);
  Eigen::MatrixXd ritz = V.leftCols(steps) * es.eigenvectors().rightCols(kk);

  LanczosResult out;
  out.values.resize(kk);
  out.vectors.resize(n, kk);
  std::vector<std::pair<double, int>> order;
  for (int i = 0; i < kk; ++i) {
    Eigen::VectorXd v = ritz.col(i);
    v /= v.norm();
    const Eigen::VectorXd av = a * v;
    const double lambda = v.dot(av);
    out.worst_residual = std::max(out.worst_residual, (av - lambda * v).norm());
    order.emplace_back(lambda, i);
    out.vectors.col(i) = v;
  }
  std::sort(order.begin(), order.end());
  Eigen::MatrixXd sorted(n, kk);
  for (int i = 0; i < kk; ++i) {
    out.values[i] = order[i].first;
    sorted.col(i) = out.vectors.col(order[i].second);
  }
  out.vectors = std::move(sorted);
  return out;
}

}  // namespace

EigenPairs lowest_eigenpairs(const BandedMatrix& a, int k, bool want_vectors, int dense_limit) {
  const int n = a.size();
  if (n == 0) return {};
  k = std::clamp(k, 1, n);
  if (n <= dense_limit) return dense_pairs(a, k, want_vectors);

  const double g = a.gershgorin_lower();
  const double sigma = g - 1e-3 * std::max(1.0, std::abs(g));
  BandedMatrix shifted = a;
  shifted.add_to_diagonal(-sigma);
  const BandedLU lu(shifted);

  int m = std::min(n, std::max(4 * k + 40, 80));
  LanczosResult res;
  while (true) {
    res = shift_invert_lanczos(a, lu, k, m);
    if (res.worst_residual <= 1e-9 || m == n) break;
    m = std::min(n, 2 * m);
  }
  EigenPairs out;
  out.values = res.values;
  if (want_vectors) out.vectors = res.vectors;
  return out;
}

template <int Fields>
BandedMatrix interior_hessian(const NodalState<Fields>& s, const ModelParams& p) {
  return energy_hessian(s, p).submatrix(interior_dofs<Fields>(s.n_nodes()));
}

StabilityReport classify(const Eigen::VectorXd& eigenvalues, double tol) {
  StabilityReport rep;
  rep.smallest_eigenvalues = eigenvalues;
  bool marginal = false;
  for (double v : eigenvalues) {
    if (v < -tol) ++rep.index;
    if (std::abs(v) <= tol) marginal = true;
  }
  rep.verdict = marginal ? Verdict::Marginal : (rep.index > 0 ? Verdict::Unstable : Verdict::Stable);
  return rep;
}

template <int Fields>
StabilityReport hessian_spectrum(const NodalState<Fields>& s, const ModelParams& p, const StabilityOptions& opts) {
  const double r = residual(s, p).norm();
  if (!(r <= opts.residual_tol)) {
    throw NotConvergedError("state residual " + std::to_string(r) + " exceeds " + std::to_string(opts.residual_tol) +
                            "; refusing to classify");
  }
  const EigenPairs ep = lowest_eigenpairs(interior_hessian(s, p), opts.k, false, opts.dense_limit);
  return classify(ep.values, opts.tol);
}

double SecondVariationProbe::z(double y) const {
  const double a = std::abs(y);
  if (a <= 1.0 - 2.0 * eta) return 1.0;
  if (a >= 1.0 - eta) return 0.0;
  const double t = (1.0 - eta - a) / eta;
  return t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
}

void SecondVariationProbe::validate() const {
  if (!(eta > 0.0 && eta < 0.25)) throw std::invalid_argument("probe cutoff eta must lie in (0, 1/4)");
}

ProbeDirections probe_directions(const ORState& s, const SecondVariationProbe& probe) {
  probe.validate();
  const int n = s.n_nodes();
  const double h = s.mesh().h();
  ProbeDirections d;
  d.h.resize(n);
  d.w.resize(n);
  for (int i = 0; i < n; ++i) {
    const int lo = std::max(i - 1, 0);
    const int hi = std::min(i + 1, n - 1);
    const double span = (hi - lo) * h;
    const double z = probe.z(s.mesh().node(i));
    d.h[i] = z * (s.table()(hi, 0) - s.table()(lo, 0)) / span;
    d.w[i] = z * (s.table()(hi, 1) - s.table()(lo, 1)) / span;
  }
  return d;
}

double transverse_second_variation(const ORState& s, const ModelParams& p, const Eigen::VectorXd& h,
                                   const Eigen::VectorXd& w) {
  static const double gx[3] = {-0.77459666924148337704, 0.0, 0.77459666924148337704};
  static const double gw[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  const double dx = s.mesh().h();
  const auto& t = s.table();
  double total = 0.0;
  for (int e = 0; e + 1 < s.n_nodes(); ++e) {
    const double dh = (h[e + 1] - h[e]) / dx;
    const double dw = (w[e + 1] - w[e]) / dx;
    total += dx * (p.l1 * dh * dh + p.xi * p.l2 * dw * dw);
    for (int q = 0; q < 3; ++q) {
      const double nb = 0.5 * (1.0 + gx[q]);
      const double na = 1.0 - nb;
      const double q11 = na * t(e, 0) + nb * t(e + 1, 0);
      const double m1 = na * t(e, 1) + nb * t(e + 1, 1);
      const double hv = na * h[e] + nb * h[e + 1];
      const double wv = na * w[e] + nb * w[e + 1];
      const double f = 4.0 * (q11 * q11 - 1.0) * hv * hv + p.xi * (m1 * m1 - 1.0) * wv * wv +
                       2.0 * p.c * q11 * wv * wv - 4.0 * p.c * m1 * hv * wv;
      total += 0.5 * dx * gw[q] * f;
    }
  }
  return total;
}

double or_instability_probe(const ORState& s, const ModelParams& p, const SecondVariationProbe& probe) {
  const ProbeDirections d = probe_directions(s, probe);
  return transverse_second_variation(s, p, d.h, d.w);
}

template <int Fields>
double hessian_quadratic_form(const NodalState<Fields>& s, const ModelParams& p, const Eigen::VectorXd& v) {
  return v.dot(energy_hessian(s, p) * v);
}

template BandedMatrix interior_hessian<2>(const NodalState<2>&, const ModelParams&);
template BandedMatrix interior_hessian<4>(const NodalState<4>&, const ModelParams&);
template StabilityReport hessian_spectrum<2>(const NodalState<2>&, const ModelParams&, const StabilityOptions&);
template StabilityReport hessian_spectrum<4>(const NodalState<4>&, const ModelParams&, const StabilityOptions&);
template double hessian_quadratic_form<2>(const NodalState<2>&, const ModelParams&, const Eigen::VectorXd&);
template double hessian_quadratic_form<4>(const NodalState<4>&, const ModelParams&, const Eigen::VectorXd&);

}  // namespace ferrobvp
