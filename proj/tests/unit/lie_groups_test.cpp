#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "oracles.hpp"
#include "subfinsler/errors.hpp"
#include "subfinsler/lie_group.hpp"
#include "subfinsler/norm.hpp"

using namespace subfinsler;

namespace {

Vector vec(std::initializer_list<double> c) {
  Vector v(static_cast<Eigen::Index>(c.size()));
  Eigen::Index i = 0;
  for (double x : c) v(i++) = x;
  return v;
}

Matrix unit_matrix(int n, int r, int c) {
  Matrix m = Matrix::Zero(n, n);
  m(r, c) = 1.0;
  return m;
}

// Chart bases written out independently of the registry.
std::vector<Matrix> heisenberg_basis() { return {unit_matrix(3, 0, 1), unit_matrix(3, 1, 2), unit_matrix(3, 0, 2)}; }
std::vector<Matrix> affine_basis() { return {unit_matrix(2, 0, 1), unit_matrix(2, 0, 0)}; }
std::vector<Matrix> so3_basis() {
  return {unit_matrix(3, 0, 1) - unit_matrix(3, 1, 0), unit_matrix(3, 0, 2) - unit_matrix(3, 2, 0),
          unit_matrix(3, 1, 2) - unit_matrix(3, 2, 1)};
}

struct Shipped {
  GroupSpec group;
  std::vector<Matrix> basis;
};

std::vector<Shipped> shipped() {
  return {{GroupSpec::heisenberg(), heisenberg_basis()},
          {GroupSpec::heisenberg_carnot(), heisenberg_basis()},
          {GroupSpec::affine(), affine_basis()},
          {GroupSpec::so3(), so3_basis()},
          {GroupSpec::abelian(3), {}}};
}

Matrix chart(const std::vector<Matrix>& basis, const Vector& x) {
  Matrix m = Matrix::Zero(basis[0].rows(), basis[0].cols());
  for (std::size_t i = 0; i < basis.size(); ++i) m += x(static_cast<Eigen::Index>(i)) * basis[i];
  return m;
}

}  // namespace

TEST(Bracket, MatchesMatrixCommutator) {
  for (const auto& s : shipped()) {
    if (s.basis.empty()) continue;
    const int n = s.group.dim();
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const Vector want = oracle::commutator_coords(s.basis, s.basis[static_cast<std::size_t>(i)],
                                                      s.basis[static_cast<std::size_t>(j)]);
        const Vector got = s.group.ad(Vector::Unit(n, i), Vector::Unit(n, j));
        EXPECT_NEAR((got - want).norm(), 0.0, 1e-14) << s.group.name() << " " << i << " " << j;
        for (int k = 0; k < n; ++k) EXPECT_EQ(s.group.structure_constant(i, j, k), got(k));
      }
    }
  }
}

TEST(Bracket, HeisenbergRelations) {
  const GroupSpec h = GroupSpec::heisenberg();
  EXPECT_EQ(h.ad(vec({1, 0, 0}), vec({0, 1, 0})), vec({0, 0, 1}));
  std::mt19937_64 rng(31);
  for (int i = 0; i < 20; ++i) EXPECT_TRUE(h.ad(vec({0, 0, 1}), oracle::random_vec(rng, 3)).isZero(0.0));
}

TEST(Bracket, AbelianIsZero) {
  const GroupSpec a = GroupSpec::abelian(4);
  std::mt19937_64 rng(32);
  EXPECT_TRUE(a.ad(oracle::random_vec(rng, 4), oracle::random_vec(rng, 4)).isZero(0.0));
  EXPECT_TRUE(a.is_abelian());
}

TEST(StructureConstants, JacobiAndAntisymmetryExact) {
  for (const auto& s : shipped()) {
    EXPECT_EQ(s.group.antisymmetry_defect(), 0.0) << s.group.name();
    EXPECT_EQ(s.group.jacobi_defect(), 0.0) << s.group.name();
  }
}

TEST(StructureConstants, Classification) {
  EXPECT_TRUE(GroupSpec::heisenberg().is_step_two());
  EXPECT_TRUE(GroupSpec::heisenberg_carnot().bracket_generating());
  EXPECT_EQ(GroupSpec::heisenberg_carnot().rank(), 2);
  EXPECT_TRUE(GroupSpec::heisenberg().is_finsler());
  EXPECT_FALSE(GroupSpec::so3().is_step_two());
  EXPECT_FALSE(GroupSpec::affine().is_abelian());
  EXPECT_THROW(GroupSpec::from_basis("line", {unit_matrix(3, 0, 1), unit_matrix(3, 1, 2), unit_matrix(3, 0, 2)}, {0}),
               InputError);
}

TEST(Exp, MatchesTaylorOracle) {
  std::mt19937_64 rng(33);
  for (const auto& s : shipped()) {
    for (int i = 0; i < 20; ++i) {
      const Vector x = oracle::random_vec(rng, s.group.dim(), 1.5);
      const Matrix got = s.group.exp(x).matrix();
      const Matrix want = oracle::expm(s.group.to_matrix(x));
      EXPECT_NEAR((got - want).norm(), 0.0, 1e-11 * (1 + want.norm())) << s.group.name();
    }
  }
}

TEST(Exp, AffineOneParameterSubgroup) {
  const GroupSpec a = GroupSpec::affine();
  for (double t : {-1.0, 0.0, 0.5, std::log(2.0), 3.0}) {
    const Matrix m = a.exp(vec({0, t})).matrix();
    EXPECT_NEAR(m(0, 0), std::exp(t), 1e-14 * std::exp(t));
    EXPECT_EQ(m(0, 1), 0.0);
    EXPECT_EQ(m(1, 0), 0.0);
    EXPECT_EQ(m(1, 1), 1.0);
  }
}

TEST(Exp, HeisenbergCenter) {
  const GroupSpec h = GroupSpec::heisenberg();
  std::mt19937_64 rng(34);
  for (int i = 0; i < 20; ++i) {
    const double a = oracle::random_vec(rng, 1)(0);
    const double b = oracle::random_vec(rng, 1)(0);
    const Matrix prod = (h.exp(vec({0, 0, a})) * h.exp(vec({0, 0, b}))).matrix();
    EXPECT_NEAR((prod - h.exp(vec({0, 0, a + b})).matrix()).norm(), 0.0, 1e-14);
    const GroupElement g = h.exp(oracle::random_vec(rng, 3));
    const GroupElement z = h.exp(vec({0, 0, a}));
    EXPECT_NEAR(((g * z).matrix() - (z * g).matrix()).norm(), 0.0, 1e-13);
  }
}

TEST(Exp, So3RotationBlock) {
  const GroupSpec g = GroupSpec::so3();
  for (double t : {0.1, 1.0, 2.5, -4.0}) {
    Matrix want = Matrix::Identity(3, 3);
    want(0, 0) = std::cos(t);
    want(0, 1) = std::sin(t);
    want(1, 0) = -std::sin(t);
    want(1, 1) = std::cos(t);
    EXPECT_NEAR((g.exp(vec({t, 0, 0})).matrix() - want).norm(), 0.0, 1e-14);
  }
}

TEST(Adjoint, So3ConjugationOfE2AndE3) {
  // Direct conjugation R e R^{-1} with the displayed rotation matrices.
  const GroupSpec g = GroupSpec::so3();
  const auto b = so3_basis();
  std::mt19937_64 rng(35);
  std::uniform_real_distribution<double> ts(-6.0, 6.0);
  for (int i = 0; i < 100; ++i) {
    const double t = ts(rng);
    Matrix r(3, 3);
    r << std::cos(t), std::sin(t), 0, -std::sin(t), std::cos(t), 0, 0, 0, 1;
    const Vector conj2 = g.from_matrix(r * b[1] * r.transpose());
    const Vector conj3 = g.from_matrix(r * b[2] * r.transpose());
    const GroupElement x = g.exp(vec({t, 0, 0}));
    EXPECT_NEAR((g.Ad(x, vec({0, 1, 0})) - conj2).norm(), 0.0, 1e-13);
    EXPECT_NEAR((g.Ad(x, vec({0, 0, 1})) - conj3).norm(), 0.0, 1e-13);
    EXPECT_NEAR((conj3 - vec({0, std::sin(t), std::cos(t)})).norm(), 0.0, 1e-13);
    EXPECT_NEAR((conj2 - vec({0, std::cos(t), -std::sin(t)})).norm(), 0.0, 1e-13);
    EXPECT_NEAR((g.Ad(x, vec({1, 0, 0})) - vec({1, 0, 0})).norm(), 0.0, 1e-13);
  }
}

TEST(Adjoint, HeisenbergFixesCenterAndIdentityActsTrivially) {
  const GroupSpec h = GroupSpec::heisenberg();
  std::mt19937_64 rng(36);
  for (int i = 0; i < 20; ++i) {
    const GroupElement g = h.exp(oracle::random_vec(rng, 3, 2.0));
    EXPECT_NEAR((h.Ad(g, vec({0, 0, 1})) - vec({0, 0, 1})).norm(), 0.0, 1e-13);
  }
  for (const auto& s : shipped()) {
    const Vector y = oracle::random_vec(rng, s.group.dim());
    EXPECT_NEAR((s.group.Ad(s.group.identity(), y) - y).norm(), 0.0, 1e-15);
  }
}

TEST(Adjoint, EqualsExponentialOfAd) {
  std::mt19937_64 rng(37);
  for (const auto& s : shipped()) {
    for (int i = 0; i < 10; ++i) {
      const Vector x = oracle::random_vec(rng, s.group.dim());
      Matrix adx(s.group.dim(), s.group.dim());
      for (int j = 0; j < s.group.dim(); ++j) {
        adx.col(j) = s.basis.empty()
                         ? Vector::Zero(s.group.dim())
                         : oracle::commutator_coords(s.basis, chart(s.basis, x), s.basis[static_cast<std::size_t>(j)]);
      }
      EXPECT_NEAR((s.group.Ad_operator(s.group.exp(x)) - oracle::expm(adx)).norm(), 0.0, 1e-9) << s.group.name();
    }
  }
}

TEST(Adjoint, Homomorphism) {
  std::mt19937_64 rng(38);
  for (const auto& s : shipped()) {
    for (int i = 0; i < 10; ++i) {
      const GroupElement g = s.group.exp(oracle::random_vec(rng, s.group.dim()));
      const GroupElement h = s.group.exp(oracle::random_vec(rng, s.group.dim()));
      const Matrix lhs = s.group.Ad_operator(g * h);
      const Matrix rhs = s.group.Ad_operator(g) * s.group.Ad_operator(h);
      EXPECT_NEAR((lhs - rhs).norm(), 0.0, 1e-9 * (1 + rhs.norm())) << s.group.name();
    }
  }
}

TEST(Adjoint, So3RotationAboutE1IsIsometry) {
  const GroupSpec g = GroupSpec::so3();
  const NormSpec n = NormSpec::so3();
  std::mt19937_64 rng(39);
  for (int i = 0; i < 100; ++i) {
    const Vector v = oracle::random_vec(rng, 3);
    const double t = 3.0 * oracle::random_vec(rng, 1)(0);
    EXPECT_NEAR(n.norm(g.Ad(g.exp(vec({t, 0, 0})), v)), n.norm(v), 1e-12 * (1 + n.norm(v)));
  }
}

TEST(Adjoint, HeisenbergUnboundedOrbit) {
  const GroupSpec h = GroupSpec::heisenberg();
  const Covector lam = vec({0, 0, 1}).transpose();
  std::mt19937_64 rng(40);
  for (int i = 0; i < 100; ++i) {
    const Vector x = oracle::random_vec(rng, 2, 3.0);
    const Vector y = vec({-x(1), x(0), 1.0});
    const double v = lam.dot(h.Ad(h.exp(vec({x(0), x(1), 0})), y).transpose());
    EXPECT_NEAR(v, x.squaredNorm() + 1.0, 1e-10 * (1 + x.squaredNorm()));
  }
}

TEST(CoadjointDualPoint, Examples) {
  const GroupSpec h = GroupSpec::heisenberg();
  std::mt19937_64 rng(41);
  const Covector x3 = vec({0, 0, 1}).transpose();
  for (int i = 0; i < 10; ++i) {
    const Vector x = oracle::random_vec(rng, 3);
    const Covector xi = h.coadjoint_dual_point(x3, h.exp(x));
    // X3* reads the (0, 2) entry of G Y G^-1.
    const oracle::Mat g = oracle::expm(h.to_matrix(x));
    for (int j = 0; j < 3; ++j) {
      const oracle::Mat conj = g * h.basis()[static_cast<std::size_t>(j)] * g.inverse();
      EXPECT_NEAR(xi(j), conj(0, 2), 1e-12);
    }
    EXPECT_NEAR(xi(2), 1.0, 1e-14);
  }
  const GroupSpec a = GroupSpec::affine();
  const Covector lam = vec({0.5, 1.0}).transpose();
  const Covector xi = a.coadjoint_dual_point(lam, a.exp(vec({0, std::log(2.0)})));
  EXPECT_NEAR(std::abs(xi(1) / xi(0)), 1.0, 1e-14);
  EXPECT_EQ(a.coadjoint_dual_point(lam, a.identity()), lam);
  const GroupSpec c = GroupSpec::heisenberg_carnot();
  EXPECT_EQ(c.coadjoint_dual_point(vec({0.2, 0.3, 1}).transpose(), c.identity()).size(), 2);
}

TEST(GenericGroup, So3FromBasisAgreesWithRegistry) {
  const GroupSpec generic = GroupSpec::from_basis("rotations", so3_basis(), {0, 1, 2});
  const GroupSpec reg = GroupSpec::so3();
  std::mt19937_64 rng(42);
  for (int i = 0; i < 10; ++i) {
    const Vector x = oracle::random_vec(rng, 3);
    EXPECT_NEAR((generic.exp(x).matrix() - reg.exp(x).matrix()).norm(), 0.0, 1e-12);
  }
}

TEST(GroupJson, RoundTrip) {
  for (const auto& s : shipped()) {
    const nlohmann::json j = s.group.to_json();
    const GroupSpec back = GroupSpec::from_json(nlohmann::json::parse(j.dump()));
    EXPECT_EQ(back.to_json(), j);
  }
  const GroupSpec generic = GroupSpec::from_basis("rotations", so3_basis(), {0, 1});
  const GroupSpec back = GroupSpec::from_json(generic.to_json());
  EXPECT_EQ(back.polarization(), generic.polarization());
  EXPECT_EQ(back.ad_matrix(0), generic.ad_matrix(0));
}

TEST(GroupErrors, Rejections) {
  const GroupSpec h = GroupSpec::heisenberg();
  EXPECT_THROW(GroupSpec::by_name("engel"), InputError);
  EXPECT_THROW(h.from_matrix(Matrix::Identity(3, 3)), InternalError);
  EXPECT_THROW(h.exp(vec({1, 2})), InputError);
  EXPECT_FALSE(h.on_group(Matrix::Zero(3, 3)));
}
