#include "subfinsler/polyhedron.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <Eigen/LU>
#include <nlohmann/json.hpp>

#include "geometry.hpp"
#include "subfinsler/errors.hpp"

namespace subfinsler {
namespace {

constexpr double kSymmetryTol = 1e-9;
constexpr double kVertexTol = 1e-10;

double max_abs(const std::vector<Vector>& pts) {
  double s = 0.0;
  for (const auto& p : pts) s = std::max(s, p.lpNorm<Eigen::Infinity>());
  return s;
}

void check_symmetric(const std::vector<Vector>& pts) {
  const double tol = kSymmetryTol * std::max(1.0, max_abs(pts));
  for (const auto& p : pts) {
    const bool mirrored = std::any_of(pts.begin(), pts.end(), [&](const Vector& q) {
      return (p + q).lpNorm<Eigen::Infinity>() <= tol;
    });
    if (!mirrored) throw ConstructionError("point set is not centrally symmetric");
  }
}

int rank_of(const std::vector<Covector>& rows, int d) {
  if (rows.empty()) return 0;
  Matrix m(static_cast<int>(rows.size()), d);
  for (std::size_t i = 0; i < rows.size(); ++i) m.row(static_cast<int>(i)) = rows[i];
  Eigen::FullPivLU<Matrix> lu(m);
  lu.setThreshold(1e-10);
  return static_cast<int>(lu.rank());
}

bool is_subset(const std::vector<int>& a, const std::vector<int>& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

std::vector<double> coords(const Eigen::Ref<const Eigen::VectorXd>& v) {
  return {v.data(), v.data() + v.size()};
}

}  // namespace

Polyhedron Polyhedron::from_vertices(std::vector<Vector> points) {
  if (points.empty()) throw ConstructionError("polyhedron needs vertices");
  const int d = static_cast<int>(points.front().size());
  if (d < 1 || d > kMaxDim) throw ConstructionError("polyhedron dimension must be between 1 and 4");
  for (const auto& p : points) {
    if (p.size() != d) throw ConstructionError("vertices of mixed dimension");
    if (!p.allFinite()) throw ConstructionError("vertex with non-finite coordinates");
  }
  check_symmetric(points);

  Polyhedron poly;
  poly.dim_ = d;
  poly.functionals_ = detail::hull_facets(points);

  // Keep extreme points only, without duplicates.
  for (const auto& p : points) {
    std::vector<Covector> tight;
    for (const auto& f : poly.functionals_) {
      if (f.dot(p.transpose()) >= 1.0 - kVertexTol) tight.push_back(f);
    }
    if (rank_of(tight, d) < d) continue;
    const bool dup = std::any_of(poly.vertices_.begin(), poly.vertices_.end(), [&](const Vector& q) {
      return (p - q).lpNorm<Eigen::Infinity>() <= kSymmetryTol * std::max(1.0, p.lpNorm<Eigen::Infinity>());
    });
    if (!dup) poly.vertices_.push_back(p);
  }
  poly.build_faces();
  return poly;
}

Polyhedron Polyhedron::from_functionals(std::vector<Covector> functionals) {
  if (functionals.empty()) throw ConstructionError("polyhedron needs functionals");
  std::vector<Vector> pts;
  pts.reserve(functionals.size());
  for (const auto& f : functionals) pts.push_back(f.transpose());
  // The functionals are the vertices of the dual ball; its facets are the
  // vertices of the primal ball.
  const Polyhedron dual_ball = from_vertices(std::move(pts));
  return dual_ball.dual();
}

void Polyhedron::build_faces() {
  const int nv = static_cast<int>(vertices_.size());
  std::vector<std::vector<int>> facet_sets;
  for (const auto& f : functionals_) {
    std::vector<int> s;
    for (int i = 0; i < nv; ++i) {
      if (f.dot(vertices_[static_cast<std::size_t>(i)].transpose()) >= 1.0 - kVertexTol) s.push_back(i);
    }
    facet_sets.push_back(std::move(s));
  }

  // Every face is an intersection of facets; close the facet sets under
  // pairwise intersection.
  std::set<std::vector<int>> lattice(facet_sets.begin(), facet_sets.end());
  std::vector<std::vector<int>> frontier(lattice.begin(), lattice.end());
  while (!frontier.empty()) {
    std::vector<std::vector<int>> next;
    for (const auto& a : frontier) {
      for (const auto& b : facet_sets) {
        std::vector<int> c;
        std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(c));
        if (!c.empty() && lattice.insert(c).second) next.push_back(std::move(c));
      }
    }
    frontier = std::move(next);
  }

  faces_.clear();
  for (const auto& s : lattice) {
    Face f;
    f.vertices = s;
    std::vector<Vector> pts;
    for (int i : s) pts.push_back(vertices_[static_cast<std::size_t>(i)]);
    f.dim = detail::affine_rank(pts);
    Covector w = Covector::Zero(dim_);
    int count = 0;
    for (std::size_t j = 0; j < facet_sets.size(); ++j) {
      if (is_subset(s, facet_sets[j])) {
        w += functionals_[j];
        ++count;
      }
    }
    f.witness = w / static_cast<double>(count);
    faces_.push_back(std::move(f));
  }
  std::stable_sort(faces_.begin(), faces_.end(), [](const Face& a, const Face& b) {
    if (a.dim != b.dim) return a.dim < b.dim;
    return a.vertices < b.vertices;
  });
  face_index_.clear();
  for (std::size_t i = 0; i < faces_.size(); ++i) {
    faces_[i].id = static_cast<int>(i);
    face_index_[faces_[i].vertices] = static_cast<int>(i);
  }
}

double Polyhedron::norm(const Vector& v) const {
  if (v.size() != dim_) throw InputError("vector dimension does not match polyhedron");
  double best = 0.0;
  for (const auto& f : functionals_) best = std::max(best, f.dot(v.transpose()));
  return best;
}

double Polyhedron::dual_norm(const Covector& eta) const {
  if (eta.size() != dim_) throw InputError("covector dimension does not match polyhedron");
  double best = 0.0;
  for (const auto& v : vertices_) best = std::max(best, eta.dot(v.transpose()));
  return best;
}

const Face& Polyhedron::face(int id) const {
  if (id < 0 || id >= static_cast<int>(faces_.size())) throw InputError("face id out of range");
  return faces_[static_cast<std::size_t>(id)];
}

const Face& Polyhedron::face_of(const Covector& xi) const {
  const double n = dual_norm(xi);
  if (!(n > 0.0)) throw InputError("face of the zero covector is undefined");
  std::vector<int> s;
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    if (n - xi.dot(vertices_[i].transpose()) <= kFaceTol * n) s.push_back(static_cast<int>(i));
  }
  if (auto it = face_index_.find(s); it != face_index_.end()) return faces_[static_cast<std::size_t>(it->second)];
  for (const auto& f : faces_) {
    if (is_subset(s, f.vertices)) return f;
  }
  throw InternalError("active vertex set lies in no face");
}

const Face& Polyhedron::face_containing(const Vector& v) const {
  const std::vector<int> active = active_functionals(v);
  if (active.empty()) throw InputError("face containing the zero vector is undefined");
  std::vector<int> s;
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    const bool on_all = std::all_of(active.begin(), active.end(), [&](int j) {
      return functionals_[static_cast<std::size_t>(j)].dot(vertices_[i].transpose()) >= 1.0 - kVertexTol;
    });
    if (on_all) s.push_back(static_cast<int>(i));
  }
  if (auto it = face_index_.find(s); it != face_index_.end()) return faces_[static_cast<std::size_t>(it->second)];
  throw InternalError("active functionals do not cut out a face");
}

std::vector<int> Polyhedron::active_functionals(const Vector& v) const {
  const double n = norm(v);
  std::vector<int> out;
  if (!(n > 0.0)) return out;
  for (std::size_t j = 0; j < functionals_.size(); ++j) {
    if (n - functionals_[j].dot(v.transpose()) <= kFaceTol * n) out.push_back(static_cast<int>(j));
  }
  return out;
}

bool Polyhedron::star_contains(const Covector& eta, const Covector& xi) const {
  return is_subset(face_of(xi).vertices, face_of(eta).vertices);
}

Polyhedron Polyhedron::dual() const {
  Polyhedron d;
  d.dim_ = dim_;
  for (const auto& f : functionals_) d.vertices_.push_back(f.transpose());
  for (const auto& v : vertices_) d.functionals_.push_back(v.transpose());
  d.build_faces();
  return d;
}

nlohmann::json Polyhedron::to_json() const {
  nlohmann::json verts = nlohmann::json::array();
  for (const auto& v : vertices_) verts.push_back(coords(v));
  nlohmann::json funcs = nlohmann::json::array();
  for (const auto& f : functionals_) funcs.push_back(coords(f.transpose()));
  return {{"vertices", verts}, {"functionals", funcs}};
}

Polyhedron Polyhedron::from_json(const nlohmann::json& j) {
  auto read_rows = [](const nlohmann::json& arr) {
    std::vector<Vector> out;
    for (const auto& row : arr) {
      const auto c = row.get<std::vector<double>>();
      out.push_back(Eigen::Map<const Vector>(c.data(), static_cast<Eigen::Index>(c.size())));
    }
    return out;
  };
  if (j.contains("vertices")) {
    Polyhedron p = from_vertices(read_rows(j.at("vertices")));
    if (j.contains("functionals")) {
      for (const auto& f : read_rows(j.at("functionals"))) {
        const double scale = std::max(1.0, f.lpNorm<Eigen::Infinity>());
        const bool found = std::any_of(p.functionals_.begin(), p.functionals_.end(), [&](const Covector& g) {
          return (g.transpose() - f).lpNorm<Eigen::Infinity>() <= 1e-9 * scale;
        });
        if (!found) throw ConstructionError("functionals do not describe the hull of the vertices");
      }
    }
    return p;
  }
  if (j.contains("functionals")) {
    std::vector<Covector> funcs;
    for (const auto& v : read_rows(j.at("functionals"))) funcs.push_back(v.transpose());
    return from_functionals(std::move(funcs));
  }
  throw InputError("polyhedron JSON needs vertices or functionals");
}

std::vector<int> StarCovering::stars_containing(const Polyhedron& p, const Covector& xi) const {
  const Face& f = p.face_of(xi);
  std::vector<int> out;
  for (std::size_t i = 0; i < base_faces.size(); ++i) {
    if (is_subset(f.vertices, p.face(base_faces[i]).vertices)) out.push_back(static_cast<int>(i));
  }
  return out;
}

StarCovering star_covering(const Polyhedron& p) {
  StarCovering c;
  double min_gap = std::numeric_limits<double>::infinity();
  for (const auto& f : p.functionals()) {
    c.base.push_back(f);
    c.base_faces.push_back(p.face_of(f).id);
    for (const auto& v : p.vertices()) {
      const double gap = 1.0 - f.dot(v.transpose());
      if (gap > kVertexTol) min_gap = std::min(min_gap, gap);
    }
  }
  c.delta = min_gap / static_cast<double>(p.dim());
  return c;
}

}  // namespace subfinsler
