#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "subfinsler/errors.hpp"
#include "subfinsler/normal_flow.hpp"
#include "subfinsler/submetry.hpp"

using namespace subfinsler;

namespace {

Vector vec(std::initializer_list<double> c) {
  Vector v(static_cast<Eigen::Index>(c.size()));
  Eigen::Index i = 0;
  for (double x : c) v(i++) = x;
  return v;
}

// inf over the X3 fiber of the L-infinity norm, by a fine scan.
double fiber_min_linf(const Vector& w) {
  double best = 1e300;
  for (int k = -4000; k <= 4000; ++k) {
    const double z = k * 1e-3;
    best = std::min(best, std::max({std::abs(w(0)), std::abs(w(1)), std::abs(z)}));
  }
  return best;
}

}  // namespace

TEST(Pushforward, HeisenbergFinslerToPlane) {
  const auto sub = heisenberg_abelianization(NormSpec::linf(3), false);
  std::mt19937_64 rng(51);
  for (int i = 0; i < 50; ++i) {
    const Vector w = oracle::random_vec(rng, 2);
    EXPECT_NEAR(sub.pushed_norm(w), fiber_min_linf(w), 1e-9);
    const Vector pre = sub.minimal_preimage(w);
    EXPECT_NEAR((sub.differential_on_polarization() * pre - w).norm(), 0.0, 1e-12);
    EXPECT_NEAR(NormSpec::linf(3).norm(pre), sub.pushed_norm(w), 1e-9);
  }
  ASSERT_TRUE(sub.pushed_polyhedral().has_value());
  EXPECT_EQ(sub.pushed_polyhedral()->polyhedron().faces().size(), 8u);
}

TEST(Pushforward, CarnotPolarizationIsIdentityOnV) {
  const auto sub = heisenberg_abelianization(NormSpec::linf(2), true);
  std::mt19937_64 rng(52);
  for (int i = 0; i < 20; ++i) {
    const Vector w = oracle::random_vec(rng, 2);
    EXPECT_NEAR(sub.pushed_norm(w), w.lpNorm<Eigen::Infinity>(), 1e-12);
  }
}

TEST(Pushforward, AbelianL1Projection) {
  const auto sub = abelian_projection(2, 1, NormSpec::l1(2));
  for (double w : {-2.0, -0.3, 0.0, 1.7}) EXPECT_NEAR(sub.pushed_norm(vec({w})), std::abs(w), 1e-12);
}

TEST(Pushforward, StrictlyConvexSourceNorm) {
  const auto sub = abelian_projection(3, 2, NormSpec::euclidean(vec({1.0, 2.0, 3.0})));
  std::mt19937_64 rng(53);
  for (int i = 0; i < 20; ++i) {
    const Vector w = oracle::random_vec(rng, 2);
    EXPECT_NEAR(sub.pushed_norm(w), std::sqrt(w(0) * w(0) + 2 * w(1) * w(1)), 1e-8);
  }
}

TEST(Pushforward, DualIsIsometricEmbedding) {
  std::mt19937_64 rng(54);
  for (const auto& sub : {heisenberg_abelianization(NormSpec::linf(3), false),
                          heisenberg_abelianization(NormSpec::root_sum(3), false),
                          abelian_projection(3, 2, NormSpec::so3())}) {
    for (int i = 0; i < 5; ++i) {
      const Covector beta = oracle::random_vec(rng, 2).transpose();
      const double want = oracle::dual_norm([&](const Vector& w) { return sub.pushed_norm(w); }, beta);
      EXPECT_NEAR(sub.pushed_dual_norm(beta), want, 1e-6 * (1 + want));
      const Covector lifted = sub.lift_covector(beta);
      EXPECT_NEAR(sub.source_norm().dual_norm(sub.source().restrict(lifted)), sub.pushed_dual_norm(beta), 1e-12);
    }
  }
}

TEST(Pushforward, Rejections) {
  const GroupSpec h = GroupSpec::heisenberg();
  const GroupSpec r2 = GroupSpec::abelian(2);
  Matrix not_hom = Matrix::Zero(2, 3);
  not_hom(0, 2) = 1.0;
  not_hom(1, 1) = 1.0;
  EXPECT_THROW(pushforward(h, r2, not_hom, NormSpec::linf(3)), InputError);
  Matrix rank_one = Matrix::Zero(2, 3);
  rank_one(0, 0) = 1.0;
  EXPECT_THROW(pushforward(h, r2, rank_one, NormSpec::linf(3)), InputError);
  EXPECT_THROW(pushforward(h, r2, Matrix::Zero(3, 3), NormSpec::linf(3)), InputError);
}

TEST(LiftCurve, SegmentLiftsToHorizontalLine) {
  const auto sub = heisenberg_abelianization(NormSpec::linf(2), true);
  const Vector w = vec({0.6, -0.8});
  const Trajectory seg = one_parameter_trajectory(GroupSpec::abelian(2), w, GroupSpec::abelian(2).identity(), 2.0, 0.01);
  const Trajectory lift = lift_curve(sub, seg, sub.source().identity());
  ASSERT_EQ(lift.size(), seg.size());
  for (std::size_t i = 0; i < lift.size(); ++i) {
    const double t = lift.t[i];
    Matrix want = Matrix::Identity(3, 3);
    want(0, 1) = t * w(0);
    want(1, 2) = t * w(1);
    want(0, 2) = 0.5 * t * t * w(0) * w(1);
    EXPECT_NEAR((lift.g[i].matrix() - want).norm(), 0.0, 1e-12);
    EXPECT_NEAR(chart_distance(sub.project(lift.g[i]), seg.g[i]), 0.0, 1e-12);
  }
}
