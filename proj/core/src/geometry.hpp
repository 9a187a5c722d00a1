#pragma once

#include <functional>
#include <span>
#include <vector>

#include "subfinsler/types.hpp"

namespace subfinsler::detail {

/// Calls fn(indices) for every k-subset of {0..n-1} in lexicographic order.
/// Stops early when fn returns false.
void for_each_combination(int n, int k, const std::function<bool(std::span<const int>)>& fn);

/// Supporting functionals of the facets of conv(points), normalized so that
/// lambda(p) <= 1 on every point with equality on the facet. Requires the
/// origin in the interior; throws ConstructionError otherwise.
std::vector<Covector> hull_facets(const std::vector<Vector>& points, double tol = 1e-10);

/// Dimension of the affine hull of the points.
int affine_rank(const std::vector<Vector>& points, double tol = 1e-10);

/// Euclidean distance from x to conv(points); exact by enumeration of
/// affinely independent subsets, intended for small point sets.
double hull_distance(const Vector& x, const std::vector<Vector>& points);

/// Convex combination weights of the nearest point of conv(points) to x.
std::vector<double> hull_projection_weights(const Vector& x, const std::vector<Vector>& points);

struct PwlMinimum {
  Vector argmin;
  double value = 0.0;
};

/// Minimizes z -> max_i (rows(i) . z + offsets(i)) over R^k, where k is the
/// number of columns. The function must be bounded below with trivial
/// lineality (true for norms restricted to an affine fiber).
PwlMinimum minimize_pwl_max(const Matrix& rows, const Vector& offsets);

/// Golden-section minimization of a unimodal function on [lo, hi].
double golden_section_argmin(const std::function<double(double)>& f, double lo, double hi,
                             double tol = 1e-12);

}  // namespace subfinsler::detail
