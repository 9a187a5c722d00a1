#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "oracles.hpp"
#include "subfinsler/errors.hpp"
#include "subfinsler/norm.hpp"

using namespace subfinsler;

namespace {

Vector vec(std::initializer_list<double> c) {
  Vector v(static_cast<Eigen::Index>(c.size()));
  Eigen::Index i = 0;
  for (double x : c) v(i++) = x;
  return v;
}
Covector cov(std::initializer_list<double> c) { return vec(c).transpose(); }

const double kS3 = std::sqrt(3.0) / 2.0;

NormSpec hexagon() {
  return NormSpec::polyhedral(Polyhedron::from_vertices(
      {vec({1, 0}), vec({0.5, kS3}), vec({-0.5, kS3}), vec({-1, 0}), vec({-0.5, -kS3}), vec({0.5, -kS3})}));
}

// Primal norms written out by hand, used as the oracle side.
struct Case {
  NormSpec norm;
  oracle::NormFn primal;
};

std::vector<Case> all_cases() {
  auto corner_fn = [](int axis) {
    return [axis](const Vector& v) {
      const double a = v(axis);
      double r2 = v.squaredNorm() - a * a;
      const double rho = std::sqrt(std::max(0.0, r2));
      return rho + std::sqrt(a * a + rho * rho);
    };
  };
  std::vector<Case> out;
  out.push_back({NormSpec::euclidean(2), [](const Vector& v) { return v.norm(); }});
  out.push_back({NormSpec::euclidean(vec({1.0, 4.0, 0.25})),
                 [](const Vector& v) { return std::sqrt(v(0) * v(0) + 4 * v(1) * v(1) + 0.25 * v(2) * v(2)); }});
  out.push_back({NormSpec::l1(2), [](const Vector& v) { return v.lpNorm<1>(); }});
  out.push_back({NormSpec::l1(3), [](const Vector& v) { return v.lpNorm<1>(); }});
  out.push_back({NormSpec::linf(3), [](const Vector& v) { return v.lpNorm<Eigen::Infinity>(); }});
  out.push_back({hexagon(), [](const Vector& v) {
                   double m = 0.0;
                   for (int k = 0; k < 6; ++k) {
                     const double a = std::numbers::pi / 6.0 + k * std::numbers::pi / 3.0;
                     m = std::max(m, (std::cos(a) * v(0) + std::sin(a) * v(1)) / kS3);
                   }
                   return m;
                 }});
  out.push_back({NormSpec::corner(2, 1), corner_fn(1)});
  out.push_back({NormSpec::so3(), corner_fn(0)});
  out.push_back({NormSpec::root_sum(2), [](const Vector& v) {
                   return std::sqrt(v.lpNorm<1>() * v.lpNorm<1>() + v.squaredNorm());
                 }});
  out.push_back({NormSpec::root_sum(3), [](const Vector& v) {
                   return std::sqrt(v.lpNorm<1>() * v.lpNorm<1>() + v.squaredNorm());
                 }});
  return out;
}

}  // namespace

TEST(NormEval, HandValues) {
  EXPECT_DOUBLE_EQ(NormSpec::linf(3).norm(vec({0, 0, 1})), 1.0);
  EXPECT_DOUBLE_EQ(NormSpec::linf(3).energy(vec({0, 0, 1})), 0.5);
  EXPECT_DOUBLE_EQ(NormSpec::corner(2, 1).norm(vec({1, 0})), 2.0);
  EXPECT_DOUBLE_EQ(NormSpec::l1(2).energy(vec({3, -4})), 24.5);
}

TEST(NormEval, MatchesHandWrittenPrimal) {
  std::mt19937_64 rng(11);
  for (const auto& c : all_cases()) {
    for (int i = 0; i < 50; ++i) {
      const Vector v = oracle::random_vec(rng, c.norm.dim());
      EXPECT_NEAR(c.norm.norm(v), c.primal(v), 1e-12 * (1 + v.norm())) << to_string(c.norm.family());
    }
  }
}

TEST(DualNorm, HandValues) {
  EXPECT_DOUBLE_EQ(NormSpec::l1(2).dual_norm(cov({3, -4})), 4.0);
  EXPECT_NEAR(NormSpec::corner(2, 1).dual_norm(cov({0.5, 1})), 1.0, 1e-15);
  for (const auto& c : all_cases()) EXPECT_EQ(c.norm.dual_norm(Covector::Zero(c.norm.dim())), 0.0);
}

TEST(DualNorm, MatchesSphereSearch) {
  std::mt19937_64 rng(12);
  for (const auto& c : all_cases()) {
    for (int i = 0; i < 6; ++i) {
      const Covector eta = oracle::random_vec(rng, c.norm.dim()).transpose();
      const double want = oracle::dual_norm(c.primal, eta);
      EXPECT_NEAR(c.norm.dual_norm(eta), want, 1e-7 * (1 + want)) << to_string(c.norm.family());
    }
  }
}

TEST(DualNorm, FenchelConjugateBySphereSearch) {
  // E*(eta) = sup_v eta(v) - |v|^2/2 = (sup_{|s|=1} eta(s))^2 / 2.
  std::mt19937_64 rng(13);
  for (const auto& c : all_cases()) {
    const Covector eta = oracle::random_vec(rng, c.norm.dim()).transpose();
    const double s = oracle::dual_norm(c.primal, eta);
    EXPECT_NEAR(c.norm.dual_energy(eta), 0.5 * s * s, 1e-6) << to_string(c.norm.family());
  }
}

TEST(SubdiffEnergy, LinfAtX3ContainsX3Star) {
  const auto s = NormSpec::linf(3).subdiff_energy(vec({0, 0, 1}));
  EXPECT_TRUE(s.contains(vec({0, 0, 1})));
}

TEST(SubdiffEnergy, So3AtE1ContainsOpenFamily) {
  const NormSpec n = NormSpec::so3();
  const auto s = n.subdiff_energy(vec({1, 0, 0}));
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> ab(-0.5, 0.5);
  for (int i = 0; i < 200; ++i) {
    const Vector lam = vec({1.0, ab(rng), ab(rng)});
    EXPECT_TRUE(s.contains(lam));
    EXPECT_NEAR(n.dual_norm(lam.transpose()), 1.0, 1e-12);
  }
  EXPECT_FALSE(s.contains(vec({1.0, 0.9, 0.9})));
}

TEST(SubdiffEnergy, EuclideanIsRieszCovector) {
  const auto s = NormSpec::euclidean(vec({1.0, 2.0})).subdiff_energy(vec({3, -1}));
  ASSERT_EQ(s.kind(), ConvexSet::Kind::kSingleton);
  EXPECT_NEAR((s.point() - vec({3, -2})).norm(), 0.0, 1e-15);
}

TEST(SubdiffEnergy, AtZeroIsZero) {
  for (const auto& c : all_cases()) {
    const auto s = c.norm.subdiff_energy(Vector::Zero(c.norm.dim()));
    EXPECT_TRUE(s.contains(Vector::Zero(c.norm.dim())));
    std::mt19937_64 rng(15);
    EXPECT_NEAR(s.sample(rng).norm(), 0.0, 1e-15);
  }
}

TEST(SubdiffDualEnergy, L1Faces) {
  const NormSpec n = NormSpec::l1(2);
  auto verts = n.subdiff_dual_energy(cov({1, 1})).vertices();
  ASSERT_EQ(verts.size(), 2u);
  std::sort(verts.begin(), verts.end(), [](const Vector& a, const Vector& b) { return a(0) > b(0); });
  EXPECT_EQ(verts[0], vec({1, 0}));
  EXPECT_EQ(verts[1], vec({0, 1}));
  const auto single = n.subdiff_dual_energy(cov({1, 0})).vertices();
  ASSERT_EQ(single.size(), 1u);
  EXPECT_EQ(single[0], vec({1, 0}));
}

TEST(SubdiffDualEnergy, CornerSupportingSetGivesAxis) {
  const NormSpec n = NormSpec::corner(2, 1);
  for (double x : {-0.9, -0.5, 0.0, 0.3, 0.5}) {
    const Covector lam = cov({x, 1.0});
    const double s = n.dual_norm(lam);
    const Vector u = n.dual_gradient(lam / s);
    EXPECT_NEAR((u - vec({0, 1})).norm(), 0.0, 1e-12) << x;
  }
}

TEST(DualityInversion, Examples) {
  const auto r = NormSpec::linf(3).check_duality_inversion(vec({0, 0, 1}), cov({0, 0, 1}), 1e-9);
  EXPECT_TRUE(r.eta_in_subdiff_energy && r.fenchel_equality && r.u_in_subdiff_dual_energy);
  const auto q = NormSpec::euclidean(2).check_duality_inversion(vec({1, 0}), cov({0, 1}), 1e-9);
  EXPECT_FALSE(q.eta_in_subdiff_energy || q.fenchel_equality || q.u_in_subdiff_dual_energy);
}

TEST(DualityInversion, RandomPairsAgree) {
  std::mt19937_64 rng(16);
  auto cases = all_cases();
  for (int i = 0; i < 1000; ++i) {
    const NormSpec& n = cases[static_cast<std::size_t>(i) % cases.size()].norm;
    const Vector u = oracle::random_vec(rng, n.dim());
    const Vector eta = n.subdiff_energy(u).sample(rng);
    const double nu = n.norm(u);
    ASSERT_NEAR(n.dual_norm(eta.transpose()), nu, 1e-9 * std::max(1.0, nu)) << to_string(n.family());
    ASSERT_NEAR(eta.dot(u), nu * nu, 1e-9 * std::max(1.0, nu * nu)) << to_string(n.family());
    const auto r = n.check_duality_inversion(u, eta.transpose(), 1e-9);
    ASSERT_TRUE(r.agree()) << to_string(n.family());
    ASSERT_TRUE(r.eta_in_subdiff_energy);
  }
}

TEST(DualityInversion, RejectsPerturbedCovectors) {
  std::mt19937_64 rng(17);
  for (const auto& c : all_cases()) {
    const Vector u = oracle::random_vec(rng, c.norm.dim());
    const Vector eta = 1.01 * c.norm.subdiff_energy(u).sample(rng);
    const auto r = c.norm.check_duality_inversion(u, eta.transpose(), 1e-9);
    EXPECT_TRUE(r.agree());
    EXPECT_FALSE(r.fenchel_equality);
  }
}

TEST(SubdiffEnergy, Homogeneity) {
  std::mt19937_64 rng(18);
  for (const auto& c : all_cases()) {
    const Vector u = oracle::random_vec(rng, c.norm.dim());
    const auto base = c.norm.subdiff_energy(u);
    for (double alpha : {0.3, 2.5}) {
      const auto scaled = c.norm.subdiff_energy(alpha * u);
      for (int k = 0; k < 10; ++k) {
        const Vector d = oracle::random_vec(rng, c.norm.dim());
        EXPECT_NEAR(scaled.support(d), alpha * base.support(d), 1e-9 * (1 + std::abs(base.support(d))));
      }
    }
  }
}

TEST(SubdiffEnergy, RootSumContainsSumOfParts) {
  // |v|^2 = |v|_1^2 + |v|_2^2, so dE = dE_1 + dE_2.
  std::mt19937_64 rng(19);
  const NormSpec rs = NormSpec::root_sum(3);
  const NormSpec l1 = NormSpec::l1(3);
  const NormSpec l2 = NormSpec::euclidean(3);
  for (int i = 0; i < 50; ++i) {
    Vector u = oracle::random_vec(rng, 3);
    if (i % 5 == 0) u(1) = 0.0;  // set-valued dE_1
    const auto sum = minkowski_sum(l1.subdiff_energy(u), l2.subdiff_energy(u));
    const auto target = rs.subdiff_energy(u);
    for (const Vector& m : sum.members()) EXPECT_TRUE(target.contains(m, 1e-9));
    for (int k = 0; k < 10; ++k) EXPECT_TRUE(target.contains(sum.sample(rng), 1e-9));
  }
}

TEST(ConvexityClass, Families) {
  EXPECT_EQ(NormSpec::l1(2).convexity_class(), ConvexityClass::kPolyhedral);
  EXPECT_EQ(NormSpec::root_sum(2).convexity_class(), ConvexityClass::kStronglyConvex);
  EXPECT_EQ(NormSpec::corner(2, 1).convexity_class(), ConvexityClass::kStronglyConvex);
  EXPECT_EQ(NormSpec::euclidean(3).convexity_class(), ConvexityClass::kSmoothStronglyConvex);
}

TEST(NormSpecJson, RoundTrip) {
  for (const auto& c : all_cases()) {
    const nlohmann::json j = c.norm.to_json();
    EXPECT_TRUE(NormSpec::from_json(j) == c.norm) << j.dump();
    EXPECT_EQ(NormSpec::from_json(nlohmann::json::parse(j.dump())).to_json(), j);
  }
}

TEST(NormSpecErrors, Rejections) {
  EXPECT_THROW(NormSpec::l1(2).norm(vec({1, 2, 3})), InputError);
  EXPECT_THROW(NormSpec::corner(1, 0), InputError);
  EXPECT_THROW(NormSpec::euclidean(vec({1.0, -1.0})), InputError);
  EXPECT_THROW(NormSpec::from_json(nlohmann::json{{"family", "lp"}}), UnsupportedError);
  EXPECT_THROW(NormSpec::l1(2).dual_gradient(cov({1, 1})), UnsupportedError);
  EXPECT_THROW(star_covering(NormSpec::euclidean(2)), UnsupportedError);
}
