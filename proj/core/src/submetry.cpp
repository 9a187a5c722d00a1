#include "subfinsler/submetry.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/LU>
#include <Eigen/QR>

#include "geometry.hpp"
#include "subfinsler/errors.hpp"

namespace subfinsler {
namespace {

constexpr double kHomTol = 1e-12;

// Minimizes a convex function of z in R^k by cyclic golden-section line
// searches along the coordinate axes.
Vector coordinate_descent(const std::function<double(const Vector&)>& f, int k) {
  Vector z = Vector::Zero(k);
  double best = f(z);
  for (int sweep = 0; sweep < 200; ++sweep) {
    const double before = best;
    for (int j = 0; j < k; ++j) {
      auto line = [&](double s) {
        Vector y = z;
        y(j) += s;
        return f(y);
      };
      double reach = 1.0;
      while ((line(reach) < best || line(-reach) < best) && reach < 1e12) reach *= 2.0;
      const double s = detail::golden_section_argmin(line, -reach, reach, 1e-14);
      const double value = line(s);
      if (value < best) {
        z(j) += s;
        best = value;
      }
    }
    if (before - best <= 1e-15 * std::max(1.0, best)) break;
  }
  return z;
}

}  // namespace

SubmetryData pushforward(const GroupSpec& source, const GroupSpec& target, const Matrix& dpi, const NormSpec& norm_v) {
  if (dpi.rows() != target.dim() || dpi.cols() != source.dim()) throw InputError("differential has the wrong shape");
  if (norm_v.dim() != source.rank()) throw InputError("norm dimension does not match the source polarization");
  Eigen::FullPivLU<Matrix> lu(dpi);
  lu.setThreshold(1e-10);
  if (lu.rank() < target.dim()) throw InputError("differential is not surjective");

  const int n = source.dim();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Vector lhs = dpi * source.ad(Vector::Unit(n, i), Vector::Unit(n, j));
      const Vector rhs = target.ad(dpi.col(i), dpi.col(j));
      if ((lhs - rhs).cwiseAbs().maxCoeff() > kHomTol) throw InputError("differential is not a Lie algebra homomorphism");
    }
  }

  SubmetryData sub(source, target, dpi, norm_v);
  const auto& tpol = target.polarization();
  Matrix dv(target.rank(), source.rank());
  for (int i = 0; i < source.rank(); ++i) {
    const Vector image = dpi.col(source.polarization()[static_cast<std::size_t>(i)]);
    Vector rest = image;
    for (int k = 0; k < target.rank(); ++k) {
      dv(k, i) = image(tpol[static_cast<std::size_t>(k)]);
      rest(tpol[static_cast<std::size_t>(k)]) = 0.0;
    }
    if (rest.cwiseAbs().maxCoeff() > kHomTol) throw InputError("dpi(V) leaves the target polarization");
  }
  Eigen::FullPivLU<Matrix> lv(dv);
  lv.setThreshold(1e-10);
  if (lv.rank() < target.rank()) throw InputError("dpi(V) does not span the target polarization");
  sub.dpi_v_ = dv;
  sub.kernel_v_ = lv.rank() < dv.cols() ? Matrix(lv.kernel()) : Matrix(dv.cols(), 0);
  sub.right_inv_ = dv.completeOrthogonalDecomposition().pseudoInverse();

  if (norm_v.is_polyhedral()) {
    std::vector<Vector> pts;
    for (const auto& v : norm_v.polyhedron().vertices()) pts.push_back(dv * v);
    sub.pushed_ = NormSpec::polyhedral(Polyhedron::from_vertices(std::move(pts)));
  }
  return sub;
}

Vector SubmetryData::minimal_preimage(const Vector& w) const {
  if (w.size() != dpi_v_.rows()) throw InputError("target vector dimension mismatch");
  const Vector v0 = right_inv_ * w;
  const int k = static_cast<int>(kernel_v_.cols());
  if (k == 0) return v0;
  if (norm_.is_polyhedral()) {
    const auto& funcs = norm_.polyhedron().functionals();
    Matrix rows(static_cast<Eigen::Index>(funcs.size()), k);
    Vector offsets(static_cast<Eigen::Index>(funcs.size()));
    for (std::size_t j = 0; j < funcs.size(); ++j) {
      rows.row(static_cast<Eigen::Index>(j)) = funcs[j] * kernel_v_;
      offsets(static_cast<Eigen::Index>(j)) = funcs[j].dot(v0.transpose());
    }
    return v0 + kernel_v_ * detail::minimize_pwl_max(rows, offsets).argmin;
  }
  const Vector z = coordinate_descent([&](const Vector& y) { return norm_.norm(v0 + kernel_v_ * y); }, k);
  return v0 + kernel_v_ * z;
}

double SubmetryData::pushed_norm(const Vector& w) const {
  if (pushed_) return pushed_->norm(w);
  return norm_.norm(minimal_preimage(w));
}

double SubmetryData::pushed_dual_norm(const Covector& beta) const {
  if (beta.size() != dpi_v_.rows()) throw InputError("target covector dimension mismatch");
  if (pushed_) return pushed_->dual_norm(beta);
  return norm_.dual_norm(beta * dpi_v_);
}

Covector SubmetryData::lift_covector(const Covector& beta) const {
  if (beta.size() != dpi_.rows()) throw InputError("target covector dimension mismatch");
  return beta * dpi_;
}

GroupElement SubmetryData::project(const GroupElement& g) const {
  if (!project_) throw UnsupportedError("no closed-form projection for this submetry");
  return target_.element(project_(g.matrix()));
}

SubmetryData heisenberg_abelianization(const NormSpec& norm_v, bool carnot) {
  const GroupSpec source = carnot ? GroupSpec::heisenberg_carnot() : GroupSpec::heisenberg();
  Matrix dpi = Matrix::Zero(2, 3);
  dpi(0, 0) = 1.0;
  dpi(1, 1) = 1.0;
  SubmetryData sub = pushforward(source, GroupSpec::abelian(2), dpi, norm_v);
  sub.project_ = [](const Matrix& m) {
    Matrix out = Matrix::Identity(3, 3);
    out(0, 2) = m(0, 1);
    out(1, 2) = m(1, 2);
    return out;
  };
  return sub;
}

SubmetryData abelian_projection(int n, int m, const NormSpec& norm_v) {
  if (m < 1 || m > n) throw InputError("projection target dimension out of range");
  Matrix dpi = Matrix::Zero(m, n);
  dpi.leftCols(m).setIdentity();
  SubmetryData sub = pushforward(GroupSpec::abelian(n), GroupSpec::abelian(m), dpi, norm_v);
  sub.project_ = [n, m](const Matrix& a) {
    Matrix out = Matrix::Identity(m + 1, m + 1);
    out.col(m).head(m) = a.col(n).head(m);
    return out;
  };
  return sub;
}

Trajectory lift_curve(const SubmetryData& sub, const Trajectory& curve, const GroupElement& g0) {
  if (curve.size() == 0) throw InputError("cannot lift an empty curve");
  if (curve.u.size() != curve.size()) throw InputError("curve has no controls to lift");
  const GroupSpec& source = sub.source();
  if (!source.on_group(g0.matrix())) throw InputError("lift start point is not on the source group");
  Trajectory out;
  out.group = source.name();
  out.norm = sub.source_norm().to_json();
  out.h = curve.h;
  out.rule = "lift";
  out.lambda = curve.lambda.size() == sub.target().dim() ? sub.lift_covector(curve.lambda)
                                                          : Covector::Zero(source.dim());
  GroupElement g = g0;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const Vector lifted = sub.minimal_preimage(curve.u[i]);
    out.t.push_back(curve.t[i]);
    out.g.push_back(g);
    out.u.push_back(lifted);
    out.face.push_back(-1);
    if (i + 1 < curve.size()) g = g * source.exp(source.embed((curve.t[i + 1] - curve.t[i]) * lifted));
  }
  out.speed = out.u.empty() ? 0.0 : sub.source_norm().norm(out.u.front());
  return out;
}

}  // namespace subfinsler
