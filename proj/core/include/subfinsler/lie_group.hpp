#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "subfinsler/types.hpp"

namespace subfinsler {

/// Group element stored as a matrix in the faithful chart of its group.
class GroupElement {
 public:
  GroupElement() = default;
  GroupElement(std::string group, Matrix m) : group_(std::move(group)), m_(std::move(m)) {}

  const std::string& group() const noexcept { return group_; }
  const Matrix& matrix() const noexcept { return m_; }

  GroupElement operator*(const GroupElement& other) const;
  GroupElement inverse() const;

 private:
  std::string group_;
  Matrix m_;
};

/// Frobenius distance between chart matrices.
double chart_distance(const GroupElement& a, const GroupElement& b);

/// Lie group given by a faithful matrix chart: basis matrices of the algebra,
/// structure constants derived from their commutators, and a polarization V
/// spanned by a subset of the basis.
///
/// Shipped charts:
///   abelian n          translations [[I, x], [0, 1]]
///   heisenberg         X1 = E12, X2 = E23, X3 = E13, V = span(X1, X2, X3)
///   heisenberg_carnot  same algebra, V = span(X1, X2)
///   affine             [[t, x], [0, 1]], basis (E12, E11), product (x + t y, t s)
///   so3                e1 = E12 - E21, e2 = E13 - E31, e3 = E23 - E32
class GroupSpec {
 public:
  enum class Kind { kAbelian, kHeisenberg, kAffine, kSO3, kGeneric };

  static GroupSpec abelian(int n);
  static GroupSpec heisenberg();
  static GroupSpec heisenberg_carnot();
  static GroupSpec affine();
  static GroupSpec so3();
  /// Generic matrix group; exp falls back to scaling and squaring.
  static GroupSpec from_basis(std::string name, std::vector<Matrix> basis, std::vector<int> polarization);
  /// Registry lookup; dim is only used for "abelian".
  static GroupSpec by_name(const std::string& name, int dim = 0);

  const std::string& name() const noexcept { return name_; }
  Kind kind() const noexcept { return kind_; }
  int dim() const noexcept { return static_cast<int>(basis_.size()); }
  int chart_dim() const noexcept { return static_cast<int>(basis_.front().rows()); }
  const std::vector<Matrix>& basis() const noexcept { return basis_; }
  const std::vector<int>& polarization() const noexcept { return polarization_; }
  int rank() const noexcept { return static_cast<int>(polarization_.size()); }
  bool is_finsler() const noexcept { return rank() == dim(); }

  /// c^k_{ij}: coefficient of e_k in [e_i, e_j].
  double structure_constant(int i, int j, int k) const { return ad_basis_[static_cast<std::size_t>(i)](k, j); }
  /// Matrix of ad_{e_i}.
  const Matrix& ad_matrix(int i) const { return ad_basis_.at(static_cast<std::size_t>(i)); }

  double antisymmetry_defect() const;
  double jacobi_defect() const;
  bool bracket_generating() const;
  bool is_abelian() const;
  /// All brackets are central.
  bool is_step_two() const;

  /// Chart matrix of an algebra vector.
  Matrix to_matrix(const Vector& x) const;
  /// Algebra coordinates of a chart matrix; throws InternalError when the
  /// matrix is not in the span of the basis within 1e-9.
  Vector from_matrix(const Matrix& m) const;

  Vector embed(const Vector& v) const;
  Covector restrict(const Covector& lambda) const;

  Vector ad(const Vector& x, const Vector& y) const;
  Matrix ad_operator(const Vector& x) const;

  GroupElement identity() const;
  GroupElement element(Matrix m) const;
  /// True when m lies on the group within tol (orthogonality, unipotency, ...).
  bool on_group(const Matrix& m, double tol = 1e-9) const;

  GroupElement exp(const Vector& x) const;
  Vector Ad(const GroupElement& g, const Vector& y) const;
  Matrix Ad_operator(const GroupElement& g) const;
  /// Y -> lambda(Ad_g Y), restricted to V.
  Covector coadjoint_dual_point(const Covector& lambda, const GroupElement& g) const;

  nlohmann::json to_json() const;
  static GroupSpec from_json(const nlohmann::json& j);

 private:
  GroupSpec() = default;
  void finalize();

  std::string name_;
  Kind kind_ = Kind::kGeneric;
  std::vector<Matrix> basis_;
  std::vector<int> polarization_;
  std::vector<Matrix> ad_basis_;
  Matrix pullback_;  // dim x chart_dim^2 pseudo-inverse of the vectorized basis
  Matrix basis_cols_;
};

}  // namespace subfinsler
