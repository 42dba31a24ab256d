#include "ferrobvp/discretization.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "ferrobvp/bulk_landscape.hpp"

namespace ferrobvp {

namespace {

constexpr double kGauss = 0.57735026918962576451;  // 1/sqrt(3)

// Position of each stored field inside (Q11, Q12, M1, M2).
template <int Fields>
constexpr int component(int f) {
  if constexpr (Fields == 4) return f;
  else return f == 0 ? field::q11 : field::m1;
}

template <int Fields>
double stiffness(int f, const ModelParams& p) {
  return component<Fields>(f) >= field::m1 ? p.xi * p.l2 : p.l1;
}

template <int Fields>
Eigen::Vector4d lift(const Eigen::Matrix<double, 1, Fields>& u) {
  Eigen::Vector4d full = Eigen::Vector4d::Zero();
  for (int f = 0; f < Fields; ++f) full[component<Fields>(f)] = u[f];
  return full;
}

// Shape function values at the two Gauss points of the reference cell.
constexpr double kNa[2] = {0.5 * (1.0 + kGauss), 0.5 * (1.0 - kGauss)};
constexpr double kNb[2] = {0.5 * (1.0 - kGauss), 0.5 * (1.0 + kGauss)};

}  // namespace

Eigen::Vector4d bulk_gradient(const Eigen::Vector4d& u, const ModelParams& p) {
  const double q11 = u[0], q12 = u[1], m1 = u[2], m2 = u[3];
  const double qs = q11 * q11 + q12 * q12 - 1.0;
  const double ms = m1 * m1 + m2 * m2 - 1.0;
  const double c = p.c;
  return {4.0 * q11 * qs - c * (m1 * m1 - m2 * m2),
          4.0 * q12 * qs - 2.0 * c * m1 * m2,
          p.xi * m1 * ms - 2.0 * c * q11 * m1 - 2.0 * c * q12 * m2,
          p.xi * m2 * ms + 2.0 * c * q11 * m2 - 2.0 * c * q12 * m1};
}

Eigen::Matrix4d bulk_hessian(const Eigen::Vector4d& u, const ModelParams& p) {
  const double q11 = u[0], q12 = u[1], m1 = u[2], m2 = u[3];
  const double qs = q11 * q11 + q12 * q12 - 1.0;
  const double ms = m1 * m1 + m2 * m2 - 1.0;
  const double c = p.c, xi = p.xi;
  Eigen::Matrix4d h;
  h(0, 0) = 4.0 * qs + 8.0 * q11 * q11;
  h(0, 1) = 8.0 * q11 * q12;
  h(1, 1) = 4.0 * qs + 8.0 * q12 * q12;
  h(0, 2) = -2.0 * c * m1;
  h(0, 3) = 2.0 * c * m2;
  h(1, 2) = -2.0 * c * m2;
  h(1, 3) = -2.0 * c * m1;
  h(2, 2) = xi * ms + 2.0 * xi * m1 * m1 - 2.0 * c * q11;
  h(2, 3) = 2.0 * xi * m1 * m2 - 2.0 * c * q12;
  h(3, 3) = xi * ms + 2.0 * xi * m2 * m2 + 2.0 * c * q11;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < i; ++j) h(i, j) = h(j, i);
  return h;
}

template <int Fields>
double energy(const NodalState<Fields>& s, const ModelParams& p) {
  const auto& t = s.table();
  const double h = s.mesh().h();
  double elastic = 0.0;
  double bulk = 0.0;
  for (int e = 0; e + 1 < s.n_nodes(); ++e) {
    for (int f = 0; f < Fields; ++f) {
      const double d = t(e + 1, f) - t(e, f);
      elastic += 0.5 * stiffness<Fields>(f, p) * d * d / h;
    }
    for (int g = 0; g < 2; ++g) {
      const Eigen::Vector4d u = lift<Fields>(kNa[g] * t.row(e) + kNb[g] * t.row(e + 1));
      bulk += 0.5 * h * bulk_density(u[0], u[1], u[2], u[3], p);
    }
  }
  return elastic + bulk;
}

template <int Fields>
Eigen::VectorXd energy_gradient(const NodalState<Fields>& s, const ModelParams& p) {
  const auto& t = s.table();
  const double h = s.mesh().h();
  Eigen::VectorXd g = Eigen::VectorXd::Zero(s.size());
  for (int e = 0; e + 1 < s.n_nodes(); ++e) {
    const int a = e * Fields;
    const int b = a + Fields;
    for (int f = 0; f < Fields; ++f) {
      const double flux = stiffness<Fields>(f, p) * (t(e + 1, f) - t(e, f)) / h;
      g[a + f] -= flux;
      g[b + f] += flux;
    }
    for (int q = 0; q < 2; ++q) {
      const Eigen::Vector4d u = lift<Fields>(kNa[q] * t.row(e) + kNb[q] * t.row(e + 1));
      const Eigen::Vector4d gb = bulk_gradient(u, p);
      for (int f = 0; f < Fields; ++f) {
        const double v = 0.5 * h * gb[component<Fields>(f)];
        g[a + f] += kNa[q] * v;
        g[b + f] += kNb[q] * v;
      }
    }
  }
  return g;
}

template <int Fields>
Eigen::VectorXd residual(const NodalState<Fields>& s, const ModelParams& p) {
  Eigen::VectorXd r = energy_gradient(s, p);
  r.head<Fields>().setZero();
  r.tail<Fields>().setZero();
  return r;
}

template <int Fields>
BandedMatrix energy_hessian(const NodalState<Fields>& s, const ModelParams& p) {
  const auto& t = s.table();
  const double h = s.mesh().h();
  const int bw = 2 * Fields - 1;
  BandedMatrix H(s.size(), bw, bw);
  for (int e = 0; e + 1 < s.n_nodes(); ++e) {
    const int a = e * Fields;
    const int b = a + Fields;
    for (int f = 0; f < Fields; ++f) {
      const double k = stiffness<Fields>(f, p) / h;
      H(a + f, a + f) += k;
      H(b + f, b + f) += k;
      H(a + f, b + f) -= k;
      H(b + f, a + f) -= k;
    }
    for (int q = 0; q < 2; ++q) {
      const Eigen::Vector4d u = lift<Fields>(kNa[q] * t.row(e) + kNb[q] * t.row(e + 1));
      const Eigen::Matrix4d hb = bulk_hessian(u, p);
      const double w = 0.5 * h;
      for (int f = 0; f < Fields; ++f) {
        for (int g = 0; g < Fields; ++g) {
          const double v = w * hb(component<Fields>(f), component<Fields>(g));
          H(a + f, a + g) += kNa[q] * kNa[q] * v;
          H(a + f, b + g) += kNa[q] * kNb[q] * v;
          H(b + f, a + g) += kNb[q] * kNa[q] * v;
          H(b + f, b + g) += kNb[q] * kNb[q] * v;
        }
      }
    }
  }
  return H;
}

template <int Fields>
BandedMatrix jacobian(const NodalState<Fields>& s, const ModelParams& p) {
  BandedMatrix J = energy_hessian(s, p);
  const int n = s.size();
  for (int f = 0; f < Fields; ++f) {
    J.pin(f);
    J.pin(n - Fields + f);
  }
  return J;
}

template <int Fields>
std::vector<int> interior_dofs(int n_nodes) {
  std::vector<int> idx;
  idx.reserve((n_nodes - 2) * Fields);
  for (int k = Fields; k < (n_nodes - 1) * Fields; ++k) idx.push_back(k);
  return idx;
}

Eigen::VectorXd unwrapped_phase(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double tol) {
  const int n = static_cast<int>(a.size());
  Eigen::VectorXd out(n);
  double last = std::numeric_limits<double>::quiet_NaN();
  for (int i = 0; i < n; ++i) {
    if (std::hypot(a[i], b[i]) < tol) {
      out[i] = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    double v = std::atan2(b[i], a[i]);
    if (!std::isnan(last)) {
      const double two_pi = 2.0 * std::numbers::pi;
      v += two_pi * std::round((last - v) / two_pi);
    }
    out[i] = v;
    last = v;
  }
  return out;
}

Diagnostics diagnostics(const FieldState& s) {
  Diagnostics d;
  d.y = s.mesh().nodes();
  const Eigen::VectorXd q11 = s.field(field::q11), q12 = s.field(field::q12);
  const Eigen::VectorXd m1 = s.field(field::m1), m2 = s.field(field::m2);
  d.q_norm = (q11.array().square() + q12.array().square()).sqrt();
  d.m_norm = (m1.array().square() + m2.array().square()).sqrt();
  d.theta = unwrapped_phase(q11, q12);
  d.phi = unwrapped_phase(m1, m2);
  d.twophi_minus_theta = 2.0 * d.phi - d.theta;
  d.m_unit = Eigen::MatrixX2d::Zero(s.n_nodes(), 2);
  for (int i = 0; i < s.n_nodes(); ++i) {
    if (d.m_norm[i] > 0.0) d.m_unit.row(i) << m1[i] / d.m_norm[i], m2[i] / d.m_norm[i];
  }
  return d;
}

Diagnostics diagnostics(const ORState& s) { return diagnostics(embed(s)); }

double q12_integral(const FieldState& s) {
  const auto q = s.field(field::q12);
  const int n = s.n_nodes();
  double sum = 0.5 * (q[0] + q[n - 1]);
  for (int i = 1; i + 1 < n; ++i) sum += q[i];
  return sum * s.mesh().h();
}

template double energy<2>(const NodalState<2>&, const ModelParams&);
template double energy<4>(const NodalState<4>&, const ModelParams&);
template Eigen::VectorXd energy_gradient<2>(const NodalState<2>&, const ModelParams&);
template Eigen::VectorXd energy_gradient<4>(const NodalState<4>&, const ModelParams&);
template Eigen::VectorXd residual<2>(const NodalState<2>&, const ModelParams&);
template Eigen::VectorXd residual<4>(const NodalState<4>&, const ModelParams&);
template BandedMatrix energy_hessian<2>(const NodalState<2>&, const ModelParams&);
template BandedMatrix energy_hessian<4>(const NodalState<4>&, const ModelParams&);
template BandedMatrix jacobian<2>(const NodalState<2>&, const ModelParams&);
template BandedMatrix jacobian<4>(const NodalState<4>&, const ModelParams&);
template std::vector<int> interior_dofs<2>(int);
template std::vector<int> interior_dofs<4>(int);

}  // namespace ferrobvp
