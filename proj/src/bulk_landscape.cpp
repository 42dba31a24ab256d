#include "ferrobvp/bulk_landscape.hpp"

#include <algorithm>
#include <limits>
#include <numbers>

namespace ferrobvp {

namespace {

using cplx = std::complex<double>;

const std::array<cplx, 3> kUnityRoots = {
    cplx(1.0, 0.0),
    cplx(-0.5, std::numbers::sqrt3 / 2.0),
    cplx(-0.5, -std::numbers::sqrt3 / 2.0),
};

double linear_coefficient(const ModelParams& p) { return 1.0 + p.c * p.c / (2.0 * p.xi); }

cplx principal_cbrt(cplx z) {
  if (z == cplx(0.0, 0.0)) return z;
  return std::polar(std::cbrt(std::abs(z)), std::arg(z) / 3.0);
}

double polish(double rho, const ModelParams& p, Parity parity) {
  const double a = linear_coefficient(p);
  for (int it = 0; it < 3; ++it) {
    const double g = branch_cubic(rho, p, parity);
    const double dg = 3.0 * rho * rho - a;
    if (g == 0.0 || dg == 0.0) break;
    const double next = rho - g / dg;
    if (std::abs(branch_cubic(next, p, parity)) >= std::abs(g)) break;
    rho = next;
  }
  return rho;
}

}  // namespace

std::string to_string(Parity p) {
  switch (p) {
    case Parity::Even: return "even";
    case Parity::Odd: return "odd";
    default: return "undetermined";
  }
}

double branch_cubic(double rho, const ModelParams& p, Parity parity) {
  const double sign = parity == Parity::Odd ? 1.0 : -1.0;
  return rho * rho * rho - rho * linear_coefficient(p) + sign * p.c / 4.0;
}

CubicRoots solve_branch_cubic(const ModelParams& p, Parity parity) {
  if (parity == Parity::Undetermined) throw std::invalid_argument("branch cubic needs a parity");
  p.validate();
  CubicRoots out;
  out.parity = parity;
  const double a = linear_coefficient(p);
  const double half_b = parity == Parity::Even ? p.c / 8.0 : -p.c / 8.0;
  out.radicand = p.c * p.c / 64.0 - a * a * a / 27.0;
  const cplx root_rad = out.radicand >= 0.0 ? cplx(std::sqrt(out.radicand), 0.0)
                                            : cplx(0.0, std::sqrt(-out.radicand));
  // S T = a/3 fixes the second cube root once the first is chosen, which is
  // the omega_j omega_k = 1 pairing.
  const cplx first = principal_cbrt(half_b + root_rad);
  const cplx second = (a / 3.0) / first;
  out.theta_terms = {first, second};

  for (int k = 0; k < 3; ++k) {
    const cplx w = kUnityRoots[k];
    const cplx rho = w * first + w * w * second;
    const double scale = std::max(1.0, std::abs(rho));
    if (std::abs(rho.imag()) > 1e-10 * scale) continue;
    out.roots.push_back(polish(rho.real(), p, parity));
    out.omega_index.push_back(k + 1);
  }
  return out;
}

std::array<double, 2> representative_angles(Parity parity) {
  // theta = 0; 2 phi - theta = 0 or pi.
  return {0.0, parity == Parity::Odd ? std::numbers::pi / 2.0 : 0.0};
}

double bulk_system_residual(double rho, double sigma, double theta, double phi,
                            const ModelParams& p) {
  const double c = p.c;
  const double r1 = 4.0 * rho * std::cos(theta) * (rho * rho - 1.0) - c * sigma * sigma * std::cos(2.0 * phi);
  const double r2 = 4.0 * rho * std::sin(theta) * (rho * rho - 1.0) - c * sigma * sigma * std::sin(2.0 * phi);
  const double r3 = p.xi * sigma * std::cos(phi) * (sigma * sigma - 1.0) - 2.0 * sigma * rho * c * std::cos(theta - phi);
  const double r4 = p.xi * sigma * std::sin(phi) * (sigma * sigma - 1.0) - 2.0 * sigma * rho * c * std::sin(theta - phi);
  return std::max({std::abs(r1), std::abs(r2), std::abs(r3), std::abs(r4)});
}

std::vector<BulkCriticalPoint> bulk_critical_points(const ModelParams& p) {
  p.validate();
  std::vector<BulkCriticalPoint> out;
  out.push_back({0.0, 0.0, Parity::Undetermined, bulk_energy(0.0, 0.0, 0.0, 0.0, p), "trivial-zero", 0});
  out.push_back({1.0, 0.0, Parity::Undetermined, bulk_energy(1.0, 0.0, 0.0, 0.0, p), "trivial-nematic", 0});

  for (Parity parity : {Parity::Even, Parity::Odd}) {
    const CubicRoots cr = solve_branch_cubic(p, parity);
    const double sign = parity == Parity::Even ? 1.0 : -1.0;
    for (std::size_t i = 0; i < cr.roots.size(); ++i) {
      double rho = cr.roots[i];
      if (rho < -1e-12) continue;
      rho = std::max(rho, 0.0);
      const double sigma_sq = 1.0 + sign * 2.0 * p.c * rho / p.xi;
      if (sigma_sq < -1e-12) continue;
      const double sigma = std::sqrt(std::max(sigma_sq, 0.0));
      const auto ang = representative_angles(parity);
      BulkCriticalPoint bp;
      bp.rho = rho;
      bp.sigma = sigma;
      bp.parity = parity;
      bp.energy = bulk_energy(rho, sigma, ang[0], ang[1], p);
      bp.omega_index = cr.omega_index[i];
      bp.label = "coupled-branch-" + std::to_string(bp.omega_index);
      out.push_back(bp);
    }
  }
  return out;
}

BulkCriticalPoint bulk_global_minimiser(const ModelParams& p) {
  const auto pts = bulk_critical_points(p);
  const BulkCriticalPoint* best = &pts.front();
  for (const auto& bp : pts) {
    if (bp.energy < best->energy || (bp.energy == best->energy && bp.rho > best->rho)) best = &bp;
  }
  return *best;
}

double rho_star(double c) {
  if (!(c >= 0.0)) throw std::invalid_argument("rho_star requires c >= 0");
  const CubicRoots cr = solve_branch_cubic(ModelParams::make(1.0, 1.0, c, 1.0), Parity::Even);
  return *std::max_element(cr.roots.begin(), cr.roots.end());
}

RhoSigmaSq asymptotic_minimiser(double c, AsymptoticRegime regime) {
  if (regime == AsymptoticRegime::Small) return {1.0 + c / 8.0, 1.0 + 2.0 * c + c * c / 4.0};
  return {std::cbrt(std::numbers::sqrt2 / 4.0) * c, 1.0 + std::numbers::sqrt2 * c * c};
}

BulkMinimumInfo bulk_minimum_info(double c) {
  const ModelParams p = ModelParams::make(1.0, 1.0, c, 1.0);
  BulkMinimumInfo info;
  info.rho_star = rho_star(c);
  info.m_bound_sq = 1.0 + 2.0 * c * info.rho_star;
  info.alpha = std::numeric_limits<double>::infinity();
  for (const auto& bp : bulk_critical_points(p)) info.alpha = std::min(info.alpha, bp.energy);
  info.beta = or_bulk_density(info.rho_star, info.sigma_star(), p);
  return info;
}

double shifted_bulk_density(double q11, double q12, double m1, double m2, const BulkMinimumInfo& info,
                            double c) {
  return bulk_density(q11, q12, m1, m2, ModelParams{1.0, 1.0, c, 1.0}) - info.alpha;
}

double shifted_or_bulk_density(double q11, double m1, const BulkMinimumInfo& info, double c) {
  return or_bulk_density(q11, m1, ModelParams{1.0, 1.0, c, 1.0}) - info.beta;
}

}  // namespace ferrobvp
