#pragma once

#include <Eigen/Core>

namespace subfinsler {

/// Coordinates of a vector in a fixed basis (column vector).
using Vector = Eigen::VectorXd;

/// Coordinates of a covector in the dual basis (row vector), so that the
/// pairing <eta, v> is the matrix product eta * v.
using Covector = Eigen::RowVectorXd;

using Matrix = Eigen::MatrixXd;

inline double pairing(const Covector& eta, const Vector& v) { return eta.dot(v.transpose()); }

inline Covector flat(const Vector& v) { return v.transpose(); }
inline Vector sharp(const Covector& eta) { return eta.transpose(); }

/// Absolute band used on the defining equalities of subdifferentials.
inline constexpr double kMembershipTol = 1e-9;

/// Relative band on the support gap separating face vertices from near misses.
inline constexpr double kFaceTol = 1e-9;

}  // namespace subfinsler
