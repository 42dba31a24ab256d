#pragma once

#include <stdexcept>
#include <vector>

#include <Eigen/Core>

namespace ferrobvp {

struct SingularMatrixError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Square matrix with `kl` sub- and `ku` super-diagonals. Entry (i, j) lives
/// in column j of the band table at row ku + i - j.
class BandedMatrix {
 public:
  BandedMatrix() = default;
  BandedMatrix(int n, int kl, int ku) : n_(n), kl_(kl), ku_(ku), band_(Eigen::MatrixXd::Zero(kl + ku + 1, n)) {}

  int size() const { return n_; }
  int lower() const { return kl_; }
  int upper() const { return ku_; }

  bool in_band(int i, int j) const { return j - i <= ku_ && i - j <= kl_; }

  double& operator()(int i, int j) { return band_(ku_ + i - j, j); }
  double operator()(int i, int j) const { return in_band(i, j) ? band_(ku_ + i - j, j) : 0.0; }

  Eigen::VectorXd operator*(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd to_dense() const;

  /// Replaces row and column k by the unit vector e_k.
  void pin(int k);

  /// Copy of the principal submatrix over `keep` (sorted, contiguous band preserved
  /// as long as removed indices only shrink distances).
  BandedMatrix submatrix(const std::vector<int>& keep) const;

  void add_to_diagonal(double shift);

  double norm_inf() const;
  /// min_i (a_ii - sum_{j != i} |a_ij|), a lower bound on the spectrum when symmetric.
  double gershgorin_lower() const;
  double max_asymmetry() const;

  const Eigen::MatrixXd& band() const { return band_; }

 private:
  int n_ = 0;
  int kl_ = 0;
  int ku_ = 0;
  Eigen::MatrixXd band_;
};

/// LU factorization with partial pivoting, kept in band form.
class BandedLU {
 public:
  BandedLU() = default;
  explicit BandedLU(const BandedMatrix& a) { compute(a); }

  /// Throws SingularMatrixError on an exactly zero pivot.
  void compute(const BandedMatrix& a);
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;

  int size() const { return n_; }

 private:
  int n_ = 0;
  int kl_ = 0;
  int kv_ = 0;  // ku + kl: upper bandwidth of U
  Eigen::MatrixXd lu_;
  std::vector<int> pivots_;
};

Eigen::VectorXd banded_solve(const BandedMatrix& a, const Eigen::VectorXd& rhs);

}  // namespace ferrobvp
