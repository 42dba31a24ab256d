#pragma once

#include <cmath>
#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace ferrobvp {

/// Uniform partition of [-1, 1].
class Mesh {
 public:
  explicit Mesh(int n_cells) : n_cells_(n_cells) {
    if (n_cells < 2) throw std::invalid_argument("mesh needs at least 2 cells, got " + std::to_string(n_cells));
    nodes_.resize(n_cells + 1);
    for (int i = 0; i <= n_cells; ++i) nodes_[i] = -1.0 + 2.0 * i / n_cells;
    nodes_[0] = -1.0;
    nodes_[n_cells] = 1.0;
  }

  int n_cells() const { return n_cells_; }
  int n_nodes() const { return n_cells_ + 1; }
  double h() const { return 2.0 / n_cells_; }
  const Eigen::VectorXd& nodes() const { return nodes_; }
  double node(int i) const { return nodes_[i]; }

  bool operator==(const Mesh& other) const { return n_cells_ == other.n_cells_; }

 private:
  int n_cells_;
  Eigen::VectorXd nodes_;
};

inline std::shared_ptr<const Mesh> make_mesh(int n_cells) { return std::make_shared<const Mesh>(n_cells); }

/// Nodal P1 coefficients of `Fields` unknowns per node, stored node-major so
/// that the flat vector interleaves the fields node by node.
///
/// Fields == 4: (Q11, Q12, M1, M2); Fields == 2: (Q11, M1).
template <int Fields>
class NodalState {
 public:
  static constexpr int kFields = Fields;
  using Table = Eigen::Matrix<double, Eigen::Dynamic, Fields, Eigen::RowMajor>;

  NodalState() = default;
  explicit NodalState(std::shared_ptr<const Mesh> mesh) : mesh_(std::move(mesh)) {
    values_ = Table::Zero(mesh_->n_nodes(), Fields);
    apply_dirichlet();
  }

  const Mesh& mesh() const { return *mesh_; }
  const std::shared_ptr<const Mesh>& mesh_ptr() const { return mesh_; }
  int n_nodes() const { return static_cast<int>(values_.rows()); }
  int size() const { return static_cast<int>(values_.size()); }

  Table& table() { return values_; }
  const Table& table() const { return values_; }
  auto field(int f) { return values_.col(f); }
  auto field(int f) const { return values_.col(f); }

  Eigen::Map<Eigen::VectorXd> flat() { return {values_.data(), values_.size()}; }
  Eigen::Map<const Eigen::VectorXd> flat() const { return {values_.data(), values_.size()}; }

  /// Boundary values: first field of each pair is +1 at y=-1 and -1 at y=1,
  /// transverse components vanish.
  static double dirichlet_value(int field, bool right_end) {
    if (is_transverse(field)) return 0.0;
    return right_end ? -1.0 : 1.0;
  }

  static bool is_transverse(int field) { return Fields == 4 && (field == 1 || field == 3); }

  void apply_dirichlet() {
    const int last = n_nodes() - 1;
    for (int f = 0; f < Fields; ++f) {
      values_(0, f) = dirichlet_value(f, false);
      values_(last, f) = dirichlet_value(f, true);
    }
  }

  bool pinned() const {
    const int last = n_nodes() - 1;
    for (int f = 0; f < Fields; ++f) {
      if (values_(0, f) != dirichlet_value(f, false) || values_(last, f) != dirichlet_value(f, true)) return false;
    }
    return true;
  }

  /// Flat index of (node, field).
  static int dof(int node, int field) { return node * Fields + field; }
  bool is_boundary_dof(int k) const {
    const int node = k / Fields;
    return node == 0 || node == n_nodes() - 1;
  }

 private:
  std::shared_ptr<const Mesh> mesh_;
  Table values_;
};

using FieldState = NodalState<4>;
using ORState = NodalState<2>;

namespace field {
inline constexpr int q11 = 0;
inline constexpr int q12 = 1;
inline constexpr int m1 = 2;
inline constexpr int m2 = 3;
}  // namespace field

/// (Q11, M1) -> (Q11, 0, M1, 0).
FieldState embed(const ORState& s);

/// Drops Q12 and M2.
ORState restrict_to_or(const FieldState& s);

/// (Q11, Q12, M1, M2) -> (Q11, -Q12, M1, -M2).
FieldState flip(const FieldState& s);

/// Discrete L2 norm sqrt(h * sum over interior nodal coefficients).
template <int Fields>
double interior_l2_distance(const NodalState<Fields>& a, const NodalState<Fields>& b) {
  const int n = a.n_nodes();
  const auto diff = (a.table().middleRows(1, n - 2) - b.table().middleRows(1, n - 2)).eval();
  return std::sqrt(a.mesh().h() * diff.squaredNorm());
}

/// Largest nodal deviation over all fields.
template <int Fields>
double sup_distance(const NodalState<Fields>& a, const NodalState<Fields>& b) {
  return (a.table() - b.table()).cwiseAbs().maxCoeff();
}

/// Whether Q12 and M2 vanish to the given tolerance.
bool is_or_state(const FieldState& s, double tol = 1e-10);

}  // namespace ferrobvp
