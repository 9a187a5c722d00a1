#include "subfinsler/lie_group.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/LU>
#include <Eigen/QR>
#include <nlohmann/json.hpp>
#include <unsupported/Eigen/MatrixFunctions>

#include "subfinsler/errors.hpp"

namespace subfinsler {
namespace {

constexpr double kPullbackTol = 1e-9;

Matrix unit(int n, int i, int j) {
  Matrix m = Matrix::Zero(n, n);
  m(i, j) = 1.0;
  return m;
}

Eigen::Map<const Vector> vectorized(const Matrix& m) { return {m.data(), m.size()}; }

}  // namespace

GroupElement GroupElement::operator*(const GroupElement& other) const {
  if (group_ != other.group_) throw InputError("product of elements of different groups");
  return {group_, m_ * other.m_};
}

GroupElement GroupElement::inverse() const { return {group_, m_.inverse()}; }

double chart_distance(const GroupElement& a, const GroupElement& b) {
  if (a.matrix().rows() != b.matrix().rows()) throw InputError("chart distance between different charts");
  return (a.matrix() - b.matrix()).norm();
}

GroupSpec GroupSpec::abelian(int n) {
  if (n < 1) throw InputError("abelian group dimension must be positive");
  GroupSpec g;
  g.name_ = "abelian";
  g.kind_ = Kind::kAbelian;
  for (int i = 0; i < n; ++i) {
    g.basis_.push_back(unit(n + 1, i, n));
    g.polarization_.push_back(i);
  }
  g.finalize();
  return g;
}

GroupSpec GroupSpec::heisenberg() {
  GroupSpec g;
  g.name_ = "heisenberg";
  g.kind_ = Kind::kHeisenberg;
  g.basis_ = {unit(3, 0, 1), unit(3, 1, 2), unit(3, 0, 2)};
  g.polarization_ = {0, 1, 2};
  g.finalize();
  return g;
}

GroupSpec GroupSpec::heisenberg_carnot() {
  GroupSpec g = heisenberg();
  g.name_ = "heisenberg_carnot";
  g.polarization_ = {0, 1};
  return g;
}

GroupSpec GroupSpec::affine() {
  GroupSpec g;
  g.name_ = "affine";
  g.kind_ = Kind::kAffine;
  g.basis_ = {unit(2, 0, 1), unit(2, 0, 0)};
  g.polarization_ = {0, 1};
  g.finalize();
  return g;
}

GroupSpec GroupSpec::so3() {
  GroupSpec g;
  g.name_ = "so3";
  g.kind_ = Kind::kSO3;
  g.basis_ = {unit(3, 0, 1) - unit(3, 1, 0), unit(3, 0, 2) - unit(3, 2, 0), unit(3, 1, 2) - unit(3, 2, 1)};
  g.polarization_ = {0, 1, 2};
  g.finalize();
  return g;
}

GroupSpec GroupSpec::from_basis(std::string name, std::vector<Matrix> basis, std::vector<int> polarization) {
  if (basis.empty()) throw InputError("group needs a nonempty basis");
  const auto n = basis.front().rows();
  for (const auto& b : basis) {
    if (b.rows() != n || b.cols() != n) throw InputError("basis matrices must be square of equal size");
    if (!b.allFinite()) throw InputError("basis matrix with non-finite entries");
  }
  std::sort(polarization.begin(), polarization.end());
  polarization.erase(std::unique(polarization.begin(), polarization.end()), polarization.end());
  for (int i : polarization) {
    if (i < 0 || i >= static_cast<int>(basis.size())) throw InputError("polarization index out of range");
  }
  if (polarization.empty()) throw InputError("polarization must be nonempty");
  GroupSpec g;
  g.name_ = std::move(name);
  g.kind_ = Kind::kGeneric;
  g.basis_ = std::move(basis);
  g.polarization_ = std::move(polarization);
  try {
    g.finalize();
  } catch (const InternalError&) {
    throw InputError("basis matrices are not closed under the commutator");
  }
  if (!g.bracket_generating()) throw InputError("polarization is not bracket generating");
  return g;
}

GroupSpec GroupSpec::by_name(const std::string& name, int dim) {
  if (name == "abelian") return abelian(dim);
  if (name == "heisenberg") return heisenberg();
  if (name == "heisenberg_carnot") return heisenberg_carnot();
  if (name == "affine") return affine();
  if (name == "so3") return so3();
  throw InputError("unknown group '" + name + "'");
}

void GroupSpec::finalize() {
  const int n = dim();
  const int c = chart_dim();
  basis_cols_.resize(static_cast<Eigen::Index>(c) * c, n);
  for (int i = 0; i < n; ++i) basis_cols_.col(i) = vectorized(basis_[static_cast<std::size_t>(i)]);
  Eigen::ColPivHouseholderQR<Matrix> qr(basis_cols_);
  if (qr.rank() < n) throw InputError("basis matrices are linearly dependent");
  pullback_ = basis_cols_.completeOrthogonalDecomposition().pseudoInverse();

  ad_basis_.assign(static_cast<std::size_t>(n), Matrix::Zero(n, n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Matrix& a = basis_[static_cast<std::size_t>(i)];
      const Matrix& b = basis_[static_cast<std::size_t>(j)];
      ad_basis_[static_cast<std::size_t>(i)].col(j) = from_matrix(a * b - b * a);
    }
  }
  // Shipped constants are small integers; remove pseudo-inverse round-off.
  for (auto& m : ad_basis_) m = m.unaryExpr([](double x) {
    const double r = std::round(x);
    return std::abs(x - r) < 1e-12 ? r : x;
  });
}

double GroupSpec::antisymmetry_defect() const {
  double worst = 0.0;
  for (int i = 0; i < dim(); ++i) {
    for (int j = 0; j < dim(); ++j) {
      for (int k = 0; k < dim(); ++k) {
        worst = std::max(worst, std::abs(structure_constant(i, j, k) + structure_constant(j, i, k)));
      }
    }
  }
  return worst;
}

double GroupSpec::jacobi_defect() const {
  // ad_[x,y] = [ad_x, ad_y] on basis pairs is equivalent to the Jacobi identity.
  double worst = 0.0;
  for (int i = 0; i < dim(); ++i) {
    for (int j = 0; j < dim(); ++j) {
      const Vector bracket = ad_matrix(i).col(j);
      const Matrix lhs = ad_operator(bracket);
      const Matrix rhs = ad_matrix(i) * ad_matrix(j) - ad_matrix(j) * ad_matrix(i);
      worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

bool GroupSpec::bracket_generating() const {
  const int n = dim();
  auto rank_of = [](const Matrix& m) {
    if (m.cols() == 0) return Eigen::Index{0};
    Eigen::FullPivLU<Matrix> lu(m);
    lu.setThreshold(1e-10);
    return lu.rank();
  };
  std::vector<Vector> layer;
  for (int i : polarization_) layer.push_back(Vector::Unit(n, i));
  std::vector<Vector> all = layer;
  for (int step = 0; step < n; ++step) {
    std::vector<Vector> next;
    for (const auto& x : layer) {
      for (int i : polarization_) next.push_back(ad(Vector::Unit(n, i), x));
    }
    all.insert(all.end(), next.begin(), next.end());
    layer = std::move(next);
  }
  Matrix m(n, static_cast<Eigen::Index>(all.size()));
  for (std::size_t i = 0; i < all.size(); ++i) m.col(static_cast<Eigen::Index>(i)) = all[i];
  return rank_of(m) == n;
}

bool GroupSpec::is_abelian() const {
  return std::all_of(ad_basis_.begin(), ad_basis_.end(), [](const Matrix& m) { return m.isZero(0.0); });
}

bool GroupSpec::is_step_two() const {
  for (const auto& a : ad_basis_) {
    for (const auto& b : ad_basis_) {
      if (!(a * b).isZero(1e-12)) return false;
    }
  }
  return true;
}

Matrix GroupSpec::to_matrix(const Vector& x) const {
  if (x.size() != dim()) throw InputError("algebra vector dimension mismatch");
  Matrix m = Matrix::Zero(chart_dim(), chart_dim());
  for (int i = 0; i < dim(); ++i) m += x(i) * basis_[static_cast<std::size_t>(i)];
  return m;
}

Vector GroupSpec::from_matrix(const Matrix& m) const {
  const auto flat = vectorized(m);
  Vector x = pullback_ * flat;
  const double residual = (basis_cols_ * x - flat).norm();
  if (residual > kPullbackTol * std::max(1.0, flat.norm())) {
    throw InternalError("matrix is not in the span of the " + name_ + " algebra (residual " +
                        std::to_string(residual) + ")");
  }
  return x;
}

Vector GroupSpec::embed(const Vector& v) const {
  if (v.size() != rank()) throw InputError("polarization vector dimension mismatch");
  Vector x = Vector::Zero(dim());
  for (int i = 0; i < rank(); ++i) x(polarization_[static_cast<std::size_t>(i)]) = v(i);
  return x;
}

Covector GroupSpec::restrict(const Covector& lambda) const {
  if (lambda.size() != dim()) throw InputError("algebra covector dimension mismatch");
  Covector r(rank());
  for (int i = 0; i < rank(); ++i) r(i) = lambda(polarization_[static_cast<std::size_t>(i)]);
  return r;
}

Matrix GroupSpec::ad_operator(const Vector& x) const {
  if (x.size() != dim()) throw InputError("algebra vector dimension mismatch");
  Matrix m = Matrix::Zero(dim(), dim());
  for (int i = 0; i < dim(); ++i) m += x(i) * ad_basis_[static_cast<std::size_t>(i)];
  return m;
}

Vector GroupSpec::ad(const Vector& x, const Vector& y) const {
  if (y.size() != dim()) throw InputError("algebra vector dimension mismatch");
  return ad_operator(x) * y;
}

GroupElement GroupSpec::identity() const { return {name_, Matrix::Identity(chart_dim(), chart_dim())}; }

GroupElement GroupSpec::element(Matrix m) const {
  if (m.rows() != chart_dim() || m.cols() != chart_dim()) throw InputError("chart matrix has the wrong size");
  if (!on_group(m)) throw InputError("matrix does not lie on the " + name_ + " group");
  return {name_, std::move(m)};
}

bool GroupSpec::on_group(const Matrix& m, double tol) const {
  if (m.rows() != chart_dim() || m.cols() != chart_dim() || !m.allFinite()) return false;
  const int n = chart_dim();
  switch (kind_) {
    case Kind::kAbelian: {
      Matrix d = m - Matrix::Identity(n, n);
      d.col(n - 1).head(n - 1).setZero();
      return d.cwiseAbs().maxCoeff() <= tol;
    }
    case Kind::kHeisenberg:
      return std::abs(m(0, 0) - 1) <= tol && std::abs(m(1, 1) - 1) <= tol && std::abs(m(2, 2) - 1) <= tol &&
             std::abs(m(1, 0)) <= tol && std::abs(m(2, 0)) <= tol && std::abs(m(2, 1)) <= tol;
    case Kind::kAffine:
      return m(0, 0) > 0.0 && std::abs(m(1, 0)) <= tol && std::abs(m(1, 1) - 1) <= tol;
    case Kind::kSO3:
      return (m.transpose() * m - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() <= tol &&
             std::abs(m.determinant() - 1.0) <= tol;
    case Kind::kGeneric:
      return std::abs(m.determinant()) > tol;
  }
  return false;
}

GroupElement GroupSpec::exp(const Vector& x) const {
  const Matrix a = to_matrix(x);
  const int n = chart_dim();
  switch (kind_) {
    case Kind::kAbelian:
      return {name_, Matrix::Identity(n, n) + a};
    case Kind::kHeisenberg:
      return {name_, Matrix::Identity(n, n) + a + 0.5 * a * a};
    case Kind::kAffine: {
      // x = (b, s): [[s, b], [0, 0]] exponentiates to [[e^s, b (e^s - 1)/s], [0, 1]].
      const double b = x(0);
      const double s = x(1);
      Matrix m = Matrix::Identity(2, 2);
      m(0, 0) = std::exp(s);
      m(0, 1) = std::abs(s) < 1e-8 ? b * (1.0 + s / 2.0 + s * s / 6.0) : b * std::expm1(s) / s;
      return {name_, m};
    }
    case Kind::kSO3: {
      const double theta = x.norm();
      const Matrix a2 = a * a;
      double c1 = 1.0;
      double c2 = 0.5;
      if (theta > 1e-6) {
        c1 = std::sin(theta) / theta;
        c2 = (1.0 - std::cos(theta)) / (theta * theta);
      } else {
        c1 = 1.0 - theta * theta / 6.0;
        c2 = 0.5 - theta * theta / 24.0;
      }
      return {name_, Matrix::Identity(3, 3) + c1 * a + c2 * a2};
    }
    case Kind::kGeneric:
      return {name_, a.exp()};
  }
  throw InternalError("unknown group kind");
}

Vector GroupSpec::Ad(const GroupElement& g, const Vector& y) const {
  return from_matrix(g.matrix() * to_matrix(y) * g.matrix().inverse());
}

Matrix GroupSpec::Ad_operator(const GroupElement& g) const {
  const Matrix ginv = g.matrix().inverse();
  Matrix out(dim(), dim());
  for (int j = 0; j < dim(); ++j) out.col(j) = from_matrix(g.matrix() * basis_[static_cast<std::size_t>(j)] * ginv);
  return out;
}

Covector GroupSpec::coadjoint_dual_point(const Covector& lambda, const GroupElement& g) const {
  if (lambda.size() != dim()) throw InputError("algebra covector dimension mismatch");
  const Matrix ginv = g.matrix().inverse();
  Covector xi(rank());
  for (int i = 0; i < rank(); ++i) {
    const Matrix& e = basis_[static_cast<std::size_t>(polarization_[static_cast<std::size_t>(i)])];
    xi(i) = lambda.dot(from_matrix(g.matrix() * e * ginv).transpose());
  }
  return xi;
}

nlohmann::json GroupSpec::to_json() const {
  nlohmann::json constants = nlohmann::json::array();
  for (int i = 0; i < dim(); ++i) {
    for (int j = 0; j < dim(); ++j) {
      for (int k = 0; k < dim(); ++k) {
        const double c = structure_constant(i, j, k);
        if (c != 0.0) constants.push_back({i, j, k, c});
      }
    }
  }
  nlohmann::json chart = nlohmann::json::array();
  for (const auto& b : basis_) {
    nlohmann::json rows = nlohmann::json::array();
    for (int r = 0; r < b.rows(); ++r) {
      std::vector<double> row(static_cast<std::size_t>(b.cols()));
      for (int c = 0; c < b.cols(); ++c) row[static_cast<std::size_t>(c)] = b(r, c);
      rows.push_back(row);
    }
    chart.push_back(rows);
  }
  return {{"name", name_},
          {"dim", dim()},
          {"structure_constants", constants},
          {"polarization", polarization_},
          {"chart_basis", chart}};
}

GroupSpec GroupSpec::from_json(const nlohmann::json& j) {
  if (j.is_string()) return by_name(j.get<std::string>());
  if (!j.is_object() || !j.contains("name")) throw InputError("group JSON needs a name");
  const auto name = j.at("name").get<std::string>();
  if (!j.contains("chart_basis")) {
    GroupSpec g = by_name(name, j.value("dim", 0));
    if (j.contains("polarization")) {
      auto pol = j.at("polarization").get<std::vector<int>>();
      std::sort(pol.begin(), pol.end());
      if (pol != g.polarization_) throw InputError("registry group '" + name + "' has a fixed polarization");
    }
    return g;
  }
  std::vector<Matrix> basis;
  for (const auto& bj : j.at("chart_basis")) {
    const auto rows = bj.get<std::vector<std::vector<double>>>();
    Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != rows.size()) throw InputError("chart basis matrices must be square");
      for (std::size_t c = 0; c < rows.size(); ++c) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
    basis.push_back(m);
  }
  std::vector<int> pol;
  if (j.contains("polarization")) {
    pol = j.at("polarization").get<std::vector<int>>();
  } else {
    for (int i = 0; i < static_cast<int>(basis.size()); ++i) pol.push_back(i);
  }
  // Registry names keep their closed-form kernels when the chart matches.
  const std::vector<std::string> registry{"abelian", "heisenberg", "heisenberg_carnot", "affine", "so3"};
  if (std::find(registry.begin(), registry.end(), name) != registry.end()) {
    GroupSpec g = by_name(name, static_cast<int>(basis.size()));
    std::vector<int> sorted = pol;
    std::sort(sorted.begin(), sorted.end());
    bool same = g.basis_.size() == basis.size() && sorted == g.polarization_;
    for (std::size_t i = 0; same && i < basis.size(); ++i) {
      same = g.basis_[i].rows() == basis[i].rows() && g.basis_[i] == basis[i];
    }
    if (same) return g;
  }
  return from_basis(name, std::move(basis), std::move(pol));
}

}  // namespace subfinsler
