#include "geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/LU>
#include <Eigen/QR>

#include "subfinsler/errors.hpp"

namespace subfinsler::detail {

void for_each_combination(int n, int k, const std::function<bool(std::span<const int>)>& fn) {
  if (k < 0 || k > n) return;
  std::vector<int> idx(static_cast<std::size_t>(k));
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    if (!fn(idx)) return;
    int i = k - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) return;
    ++idx[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
}

std::vector<Covector> hull_facets(const std::vector<Vector>& points, double tol) {
  if (points.empty()) throw ConstructionError("hull of an empty point set");
  const int d = static_cast<int>(points.front().size());
  const int n = static_cast<int>(points.size());
  if (n < d + 1) throw ConstructionError("too few points for a full-dimensional hull");

  if (affine_rank(points) < d) throw ConstructionError("degenerate (not full-dimensional) hull");

  std::vector<Covector> facets;
  Matrix a(d, d);
  for_each_combination(n, d, [&](std::span<const int> idx) {
    for (int r = 0; r < d; ++r) a.row(r) = points[static_cast<std::size_t>(idx[static_cast<std::size_t>(r)])].transpose();
    Eigen::FullPivLU<Matrix> lu(a);
    lu.setThreshold(1e-10);
    if (lu.rank() < d) return true;
    Vector lam = lu.solve(Vector::Ones(d));
    if (!lam.allFinite()) return true;
    for (const auto& p : points) {
      if (lam.dot(p) > 1.0 + tol) return true;
    }
    Covector row = lam.transpose();
    const bool seen = std::any_of(facets.begin(), facets.end(), [&](const Covector& f) {
      return (f - row).lpNorm<Eigen::Infinity>() <= 1e-9 * std::max(1.0, row.lpNorm<Eigen::Infinity>());
    });
    if (!seen) facets.push_back(row);
    return true;
  });

  // Facets through the origin cannot be written with right-hand side 1; if
  // any exist the normals found here fail to bound the hull.
  if (facets.size() < static_cast<std::size_t>(d + 1)) {
    throw ConstructionError("origin is not an interior point of the hull");
  }
  return facets;
}

int affine_rank(const std::vector<Vector>& points, double tol) {
  if (points.size() <= 1) return 0;
  const int d = static_cast<int>(points.front().size());
  Matrix diffs(d, static_cast<int>(points.size()) - 1);
  for (std::size_t i = 1; i < points.size(); ++i) diffs.col(static_cast<int>(i) - 1) = points[i] - points.front();
  Eigen::FullPivLU<Matrix> lu(diffs);
  lu.setThreshold(tol);
  return static_cast<int>(lu.rank());
}

namespace {

struct Projection {
  double distance = std::numeric_limits<double>::infinity();
  std::vector<int> support;
  std::vector<double> weights;
};

Projection project_onto_hull(const Vector& x, const std::vector<Vector>& points) {
  const int n = static_cast<int>(points.size());
  const int d = static_cast<int>(x.size());
  Projection best;
  for (int k = 1; k <= std::min(n, d + 1); ++k) {
    for_each_combination(n, k, [&](std::span<const int> idx) {
      const Vector& p0 = points[static_cast<std::size_t>(idx[0])];
      std::vector<double> mu(static_cast<std::size_t>(k), 0.0);
      Vector nearest = p0;
      if (k == 1) {
        mu[0] = 1.0;
      } else {
        Matrix b(d, k - 1);
        for (int j = 1; j < k; ++j) b.col(j - 1) = points[static_cast<std::size_t>(idx[static_cast<std::size_t>(j)])] - p0;
        Eigen::ColPivHouseholderQR<Matrix> qr(b);
        qr.setThreshold(1e-12);
        if (qr.rank() < k - 1) return true;
        Vector c = qr.solve(x - p0);
        double first = 1.0 - c.sum();
        if (first < -1e-13) return true;
        for (int j = 0; j < k - 1; ++j) {
          if (c(j) < -1e-13) return true;
        }
        mu[0] = first;
        for (int j = 1; j < k; ++j) mu[static_cast<std::size_t>(j)] = c(j - 1);
        nearest = p0 + b * c;
      }
      const double dist = (x - nearest).norm();
      if (dist < best.distance) {
        best.distance = dist;
        best.support.assign(idx.begin(), idx.end());
        best.weights = mu;
      }
      return true;
    });
  }
  return best;
}

}  // namespace

double hull_distance(const Vector& x, const std::vector<Vector>& points) {
  if (points.empty()) throw InputError("distance to an empty hull");
  return project_onto_hull(x, points).distance;
}

std::vector<double> hull_projection_weights(const Vector& x, const std::vector<Vector>& points) {
  if (points.empty()) throw InputError("projection onto an empty hull");
  const Projection pr = project_onto_hull(x, points);
  std::vector<double> w(points.size(), 0.0);
  for (std::size_t i = 0; i < pr.support.size(); ++i) {
    w[static_cast<std::size_t>(pr.support[i])] = std::max(0.0, pr.weights[i]);
  }
  return w;
}

PwlMinimum minimize_pwl_max(const Matrix& rows, const Vector& offsets) {
  const int m = static_cast<int>(rows.rows());
  const int k = static_cast<int>(rows.cols());
  if (m == 0) throw InputError("empty piecewise-linear function");
  auto eval = [&](const Vector& z) { return (rows * z + offsets).maxCoeff(); };
  if (k == 0) return {Vector(0), offsets.maxCoeff()};

  PwlMinimum best{Vector::Zero(k), std::numeric_limits<double>::infinity()};
  Matrix sys(k + 1, k + 1);
  Vector rhs(k + 1);
  for_each_combination(m, k + 1, [&](std::span<const int> idx) {
    for (int r = 0; r <= k; ++r) {
      const int i = idx[static_cast<std::size_t>(r)];
      sys.row(r).head(k) = rows.row(i);
      sys(r, k) = -1.0;
      rhs(r) = -offsets(i);
    }
    Eigen::FullPivLU<Matrix> lu(sys);
    lu.setThreshold(1e-12);
    if (lu.rank() < k + 1) return true;
    Vector sol = lu.solve(rhs);
    Vector z = sol.head(k);
    const double v = eval(z);
    if (v < best.value) {
      best.value = v;
      best.argmin = z;
    }
    return true;
  });
  if (!std::isfinite(best.value)) throw InternalError("piecewise-linear minimization found no vertex");
  return best;
}

double golden_section_argmin(const std::function<double(double)>& f, double lo, double hi, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol * std::max(1.0, std::abs(a) + std::abs(b))) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace subfinsler::detail
