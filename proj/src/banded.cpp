#include "ferrobvp/banded.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ferrobvp {

Eigen::VectorXd BandedMatrix::operator*(const Eigen::VectorXd& x) const {
  Eigen::VectorXd y = Eigen::VectorXd::Zero(n_);
  for (int j = 0; j < n_; ++j) {
    const int i0 = std::max(0, j - ku_);
    const int i1 = std::min(n_ - 1, j + kl_);
    for (int i = i0; i <= i1; ++i) y[i] += band_(ku_ + i - j, j) * x[j];
  }
  return y;
}

Eigen::MatrixXd BandedMatrix::to_dense() const {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n_, n_);
  for (int j = 0; j < n_; ++j) {
    for (int i = std::max(0, j - ku_); i <= std::min(n_ - 1, j + kl_); ++i) d(i, j) = band_(ku_ + i - j, j);
  }
  return d;
}

void BandedMatrix::pin(int k) {
  for (int j = std::max(0, k - ku_); j <= std::min(n_ - 1, k + kl_); ++j) (*this)(k, j) = 0.0;
  for (int i = std::max(0, k - ku_); i <= std::min(n_ - 1, k + kl_); ++i) (*this)(i, k) = 0.0;
  (*this)(k, k) = 1.0;
}

BandedMatrix BandedMatrix::submatrix(const std::vector<int>& keep) const {
  const int m = static_cast<int>(keep.size());
  BandedMatrix out(m, kl_, ku_);
  for (int a = 0; a < m; ++a) {
    for (int b = std::max(0, a - kl_); b <= std::min(m - 1, a + ku_); ++b) {
      out(a, b) = (*this)(keep[a], keep[b]);
    }
  }
  return out;
}

void BandedMatrix::add_to_diagonal(double shift) {
  for (int i = 0; i < n_; ++i) band_(ku_, i) += shift;
}

double BandedMatrix::norm_inf() const {
  double best = 0.0;
  for (int i = 0; i < n_; ++i) {
    double row = 0.0;
    for (int j = std::max(0, i - kl_); j <= std::min(n_ - 1, i + ku_); ++j) row += std::abs((*this)(i, j));
    best = std::max(best, row);
  }
  return best;
}

double BandedMatrix::gershgorin_lower() const {
  double lo = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n_; ++i) {
    double radius = 0.0;
    for (int j = std::max(0, i - kl_); j <= std::min(n_ - 1, i + ku_); ++j) {
      if (j != i) radius += std::abs((*this)(i, j));
    }
    lo = std::min(lo, (*this)(i, i) - radius);
  }
  return lo;
}

double BandedMatrix::max_asymmetry() const {
  double worst = 0.0;
  for (int i = 0; i < n_; ++i) {
    for (int j = i + 1; j <= std::min(n_ - 1, i + ku_); ++j) {
      worst = std::max(worst, std::abs((*this)(i, j) - (*this)(j, i)));
    }
  }
  return worst;
}

void BandedLU::compute(const BandedMatrix& a) {
  n_ = a.size();
  kl_ = a.lower();
  kv_ = a.upper() + a.lower();
  const int ku = a.upper();
  // Row kv + i - j of column j holds entry (i, j); the extra kl rows on top
  // take the fill-in created by row interchanges.
  lu_ = Eigen::MatrixXd::Zero(2 * kl_ + ku + 1, n_);
  for (int j = 0; j < n_; ++j) {
    for (int i = std::max(0, j - ku); i <= std::min(n_ - 1, j + kl_); ++i) lu_(kv_ + i - j, j) = a(i, j);
  }
  pivots_.assign(n_, 0);

  auto at = [this](int i, int j) -> double& { return lu_(kv_ + i - j, j); };
  int ju = 0;
  for (int j = 0; j < n_; ++j) {
    const int km = std::min(kl_, n_ - 1 - j);
    int p = 0;
    double best = std::abs(at(j, j));
    for (int r = 1; r <= km; ++r) {
      const double v = std::abs(at(j + r, j));
      if (v > best) {
        best = v;
        p = r;
      }
    }
    pivots_[j] = j + p;
    if (best == 0.0 || !std::isfinite(best)) {
      throw SingularMatrixError("zero pivot in banded LU at column " + std::to_string(j));
    }
    ju = std::max(ju, std::min(j + ku + p, n_ - 1));
    if (p != 0) {
      for (int col = j; col <= ju; ++col) std::swap(at(j, col), at(j + p, col));
    }
    const double pivot = at(j, j);
    for (int r = 1; r <= km; ++r) at(j + r, j) /= pivot;
    for (int col = j + 1; col <= ju; ++col) {
      const double u = at(j, col);
      if (u == 0.0) continue;
      for (int r = 1; r <= km; ++r) at(j + r, col) -= at(j + r, j) * u;
    }
  }
}

Eigen::VectorXd BandedLU::solve(const Eigen::VectorXd& b) const {
  if (b.size() != n_) throw std::invalid_argument("banded solve: rhs length mismatch");
  Eigen::VectorXd x = b;
  for (int j = 0; j < n_; ++j) {
    if (pivots_[j] != j) std::swap(x[j], x[pivots_[j]]);
    const int km = std::min(kl_, n_ - 1 - j);
    const double xj = x[j];
    for (int r = 1; r <= km; ++r) x[j + r] -= lu_(kv_ + r, j) * xj;
  }
  for (int j = n_ - 1; j >= 0; --j) {
    x[j] /= lu_(kv_, j);
    const double xj = x[j];
    for (int i = std::max(0, j - kv_); i < j; ++i) x[i] -= lu_(kv_ + i - j, j) * xj;
  }
  return x;
}

Eigen::VectorXd banded_solve(const BandedMatrix& a, const Eigen::VectorXd& rhs) {
  if (rhs.size() != a.size()) throw std::invalid_argument("banded solve: rhs length mismatch");
  return BandedLU(a).solve(rhs);
}

}  // namespace ferrobvp
