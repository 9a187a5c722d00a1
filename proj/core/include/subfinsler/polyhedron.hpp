#pragma once

#include <map>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "subfinsler/types.hpp"

namespace subfinsler {

/// A face of the unit sphere S of a polyhedral norm.
struct Face {
  int id = -1;
  /// Supporting covector on S*: the barycenter of the functionals of the
  /// facets containing the face, so the face is exactly its argmax set.
  Covector witness;
  /// Indices into Polyhedron::vertices(), sorted.
  std::vector<int> vertices;
  int dim = 0;
};

/// Centrally symmetric polytope with the origin in its interior, carried in
/// both representations: the vertex list and the minimal functional list
/// Lambda with ||v|| = max_{lambda in Lambda} lambda(v).
class Polyhedron {
 public:
  /// Dimensions supported by the enumeration routines.
  static constexpr int kMaxDim = 4;

  /// Non-extreme input points are dropped.
  static Polyhedron from_vertices(std::vector<Vector> points);
  static Polyhedron from_functionals(std::vector<Covector> functionals);

  int dim() const noexcept { return dim_; }
  const std::vector<Vector>& vertices() const noexcept { return vertices_; }
  const std::vector<Covector>& functionals() const noexcept { return functionals_; }

  double norm(const Vector& v) const;
  double dual_norm(const Covector& eta) const;

  /// Complete face lattice of S, sorted by dimension and then by vertex set;
  /// the id of a face is its position in this list.
  const std::vector<Face>& faces() const noexcept { return faces_; }
  const Face& face(int id) const;

  /// Face of S determined by xi (scale invariant). If the tolerance band
  /// selects a vertex set that is not a face, the smallest face containing it
  /// is returned.
  const Face& face_of(const Covector& xi) const;

  /// Smallest face containing v/||v|| (v != 0).
  const Face& face_containing(const Vector& v) const;

  /// Functionals attaining ||v|| at v, as indices into functionals().
  std::vector<int> active_functionals(const Vector& v) const;

  /// True iff face_of(xi) is contained in face_of(eta).
  bool star_contains(const Covector& eta, const Covector& xi) const;

  /// Unit ball of the dual norm, with vertices and functionals swapped.
  Polyhedron dual() const;

  nlohmann::json to_json() const;
  static Polyhedron from_json(const nlohmann::json& j);

 private:
  Polyhedron() = default;
  void build_faces();

  int dim_ = 0;
  std::vector<Vector> vertices_;
  std::vector<Covector> functionals_;
  std::vector<Face> faces_;
  std::map<std::vector<int>, int> face_index_;
};

/// Open covering of the dual sphere by the stars of the facet functionals.
struct StarCovering {
  std::vector<Covector> base;
  /// Face id of the facet supported by each base covector.
  std::vector<int> base_faces;
  /// Certified lower bound on the Lebesgue number, in dual-norm length.
  double delta = 0.0;

  /// Indices of the stars containing xi.
  std::vector<int> stars_containing(const Polyhedron& p, const Covector& xi) const;
};

/// The covering by facet stars. delta is (1/d) times the smallest positive
/// gap 1 - lambda(v) over facet functionals lambda and vertices v: every
/// point of S* has a barycentric weight of at least 1/d on some facet
/// functional, and moving less than delta in dual norm cannot bring a vertex
/// outside that facet onto the face.
StarCovering star_covering(const Polyhedron& p);

}  // namespace subfinsler
