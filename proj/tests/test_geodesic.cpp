#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "cvf/error.hpp"
#include "cvf/geodesic.hpp"
#include "cvf/models.hpp"

using namespace cvf;

namespace {

Point P(std::initializer_list<double> v) {
  Point p(static_cast<int>(v.size()));
  int i = 0;
  for (double x : v) p[i++] = x;
  return p;
}

}  // namespace

TEST(IntegrateGeodesic, EuclideanStraightLine) {
  const Chart e3 = models::euclidean(3);
  const Point x = P({0.1, -0.2, 0.3});
  const Vector v = P({1, 2, 2}) / 3.0;
  const auto traj = integrate_geodesic(e3, x, v, 1.0, 10);
  ASSERT_EQ(traj.size(), 11u);
  for (const GeodesicState& s : traj) {
    EXPECT_NEAR((s.position - (x + s.t * v)).norm(), 0.0, 1e-15);
    EXPECT_TRUE(s.frame.isIdentity());
  }
}

TEST(IntegrateGeodesic, SphereGreatCircleFromOrigin) {
  // Unit-speed great circle from the pole: chart radius tan(t / 2).
  const Chart s3 = models::sphere_stereographic(3);
  const Vector v = P({0.48, -0.6, 0.64});
  for (const GeodesicState& s : integrate_geodesic(s3, Point::Zero(3), v, 2.0, 400)) {
    EXPECT_NEAR(s.position.norm(), std::tan(s.t / 2), 1e-9);
    EXPECT_NEAR((s.position.normalized() - v.normalized()).norm() * (s.t > 0), 0.0, 1e-12);
    const Matrix g = metric_value(s3, s.position);
    EXPECT_NEAR(std::sqrt(s.velocity.dot(g * s.velocity)), 1.0, 1e-9);
  }
}

TEST(IntegrateGeodesic, SpeedAndFrameInvariants) {
  const Chart s3 = models::sphere_stereographic(3);
  const auto traj = integrate_geodesic(s3, P({0.3, -0.5, 0.2}), P({0.2, 1, -0.4}), 1.0, 1000);
  for (const GeodesicState& s : traj) {
    const Matrix g = metric_value(s3, s.position);
    EXPECT_LT(std::abs(std::sqrt(s.velocity.dot(g * s.velocity)) - 1.0), 1e-8);
    EXPECT_LT((s.frame.transpose() * g * s.frame - Matrix::Identity(3, 3)).norm(), 1e-7);
  }
}

TEST(IntegrateGeodesic, TruncatesAtDomainExit) {
  const Chart e2 = models::euclidean(2);
  const auto traj = integrate_geodesic(e2, P({1.5, 0}), P({1, 0}), 2.0, 20);
  ASSERT_FALSE(traj.empty());
  EXPECT_LT(traj.size(), 21u);
  for (const GeodesicState& s : traj) EXPECT_TRUE(e2.contains(s.position));
  EXPECT_TRUE(integrate_geodesic(e2, P({3, 0}), P({1, 0}), 1.0, 10).empty());
  EXPECT_THROW(integrate_geodesic(e2, P({0, 0}), P({0, 0}), 1.0, 10), PreconditionError);
}

// Property: RK4 convergence when halving the step.
TEST(IntegrateGeodesic, FourthOrderConvergence) {
  const Chart s3 = models::sphere_stereographic(3);
  const Vector v = P({1, 0, 0});
  auto err = [&](int steps) {
    return std::abs(integrate_geodesic(s3, Point::Zero(3), v, 1.0, steps).back().position.norm() - std::tan(0.5));
  };
  const double e1 = err(20), e2 = err(40), e3 = err(80);
  EXPECT_GE(e1 / e2, 8 * 0.9);
  EXPECT_GE(e2 / e3, 8 * 0.9);
  EXPECT_GE(std::log2(e1 / e2), 3.5);
}

TEST(ExpMap, Examples) {
  const Chart s3 = models::sphere_stereographic(3);
  const Point x = P({0.2, 0.1, -0.3});
  EXPECT_EQ(exp_map(s3, x, Vector::Zero(3)), x);
  const Chart e3 = models::euclidean(3);
  const Vector v = P({0.3, -0.4, 0.5});
  EXPECT_NEAR((exp_map(e3, x, v) - (x + v)).norm(), 0.0, 1e-15);
  // |v|_g = pi / 2 at the origin where g = 4 Id.
  const Point eq = exp_map(s3, Point::Zero(3), P({std::numbers::pi / 4, 0, 0}));
  EXPECT_NEAR(eq.norm(), 1.0, 1e-9);
}

TEST(ExpMap, DomainExitIsAnError) {
  EXPECT_THROW(exp_map(models::euclidean(2), P({1.5, 0}), P({1, 0})), ChartError);
}

TEST(TaylorScalar, Examples) {
  const Chart e3 = models::euclidean(3);
  const Point o = Point::Zero(3);
  const ScalarTaylorCheck rot = taylor_scalar_check(e3, models::rotation(3, 0, 1), o, P({0.6, 0.8, 0}));
  EXPECT_EQ(rot.f_prime, 0.0);
  EXPECT_EQ(rot.first_residual, 0.0);

  const ScalarTaylorCheck k = taylor_scalar_check(e3, models::special_conformal(3, 0), o, Vector::Unit(3, 0));
  EXPECT_NEAR(k.f_prime, 0.0, 1e-10);
  EXPECT_NEAR(k.f_second, -2.0, 1e-8);
  EXPECT_LT(k.first_residual, 1e-6);
  EXPECT_GE(k.remainder_order, 2.7);

  const ScalarTaylorCheck eu = taylor_scalar_check(e3, models::euler(3), o, P({0, 0.6, 0.8}));
  EXPECT_NEAR(eu.f_prime, 1.0, 1e-10);
  EXPECT_EQ(eu.phi, 1.0);
  EXPECT_LT(eu.first_residual, 1e-6);
}

TEST(TaylorScalar, RemarkRemainderIsThirdOrder) {
  const models::Scenario r = models::remark_scenario(3);
  const ScalarTaylorCheck c = taylor_scalar_check(r.chart, r.field, Point::Zero(3), P({0.3, -0.5, 0.8}));
  EXPECT_LT(c.first_residual, 1e-6);
  EXPECT_GE(c.remainder_order, 2.7);
  EXPECT_TRUE(std::isfinite(c.remainder_order));
}

TEST(TaylorScalar, RequiresZero) {
  EXPECT_THROW(taylor_scalar_check(models::euclidean(3), models::euler(3), P({0.5, 0, 0}), P({1, 0, 0})),
               PreconditionError);
  EXPECT_THROW(taylor_vector_check(models::euclidean(3), models::euler(3), P({0.5, 0, 0}), P({1, 0, 0})),
               PreconditionError);
}

TEST(TaylorVector, SpecialConformalHandOracle) {
  const Chart e3 = models::euclidean(3);
  const VectorField k = models::special_conformal(3, 0);
  const VectorTaylorCheck along = taylor_vector_check(e3, k, Point::Zero(3), Vector::Unit(3, 0));
  EXPECT_NEAR((along.second_derivative - Vector(-2 * Vector::Unit(3, 0))).norm(), 0.0, 1e-5);
  EXPECT_LT(along.second_residual, 1e-5);
  EXPECT_LT(along.first_residual, 1e-6);
  const VectorTaylorCheck across = taylor_vector_check(e3, k, Point::Zero(3), Vector::Unit(3, 2));
  EXPECT_NEAR((across.second_derivative - Vector(2 * Vector::Unit(3, 0))).norm(), 0.0, 1e-5);
  EXPECT_LT(across.second_residual, 1e-5);
}

TEST(TaylorVector, RotationIsLinear) {
  const Chart e3 = models::euclidean(3);
  const Vector v = P({0.6, 0, 0.8});
  const VectorTaylorCheck c = taylor_vector_check(e3, models::rotation(3, 0, 1), Point::Zero(3), v);
  // Half of dxi applied to v is the rotation itself: (0, 0.6, 0).
  EXPECT_NEAR((c.predicted_first - P({0, 0.6, 0})).norm(), 0.0, 1e-15);
  EXPECT_LT(c.first_residual, 1e-10);
  EXPECT_LT(c.second_derivative.norm(), 1e-6);
  EXPECT_LT(c.second_residual, 1e-6);
}

TEST(TaylorVector, CurvedZeroSets) {
  const Chart s3 = models::sphere_stereographic(3);
  const VectorTaylorCheck c = taylor_vector_check(s3, models::sphere_killing(3, 2, 3), P({0.6, 0.8, 0}), P({0.3, -0.5, 0.8}));
  EXPECT_LT(c.first_residual, 1e-6);
  EXPECT_LT(c.second_residual, 1e-4);
  const models::Scenario r = models::remark_scenario(4);
  const VectorTaylorCheck e = taylor_vector_check(r.chart, r.field, Point::Zero(4), P({0.1, 0.7, -0.2, 0.3}));
  EXPECT_LT(e.first_residual, 1e-6);
  EXPECT_LT(e.second_residual, 1e-4);
}

TEST(DxiIdentity, Examples) {
  const Chart e3 = models::euclidean(3);
  PointSampler ps(1);
  for (int k = 0; k < 10; ++k) {
    const Point p = ps.interior_point(e3, 0.05);
    const Vector X = ps.unit_vector(LocalGeometry(e3, p, 0));
    EXPECT_LT(lemma_dxi_residual(e3, models::rotation(3, 1, 2), p, X), 1e-10);
    const LemmaTerms t = lemma_dxi_terms(e3, models::special_conformal(3, 0), p, X);
    EXPECT_LT(t.residual, 1e-8);
    EXPECT_EQ(t.curvature.norm(), 0.0);
    EXPECT_GT(t.nabla_dxi.norm(), 0.1);
  }
  const Chart s3 = models::sphere_stereographic(3);
  for (int k = 0; k < 10; ++k) {
    const Point p = ps.interior_point(s3, 0.05);
    const Vector X = ps.unit_vector(LocalGeometry(s3, p, 0));
    const LemmaTerms t = lemma_dxi_terms(s3, models::sphere_killing(3, 0, 3), p, X);
    EXPECT_LT(t.residual, 1e-7);
    EXPECT_LT(t.wedge.norm(), 1e-12);
  }
}

TEST(DxiIdentity, DetectsNonConformalFields) {
  const Chart s3 = models::sphere_stereographic(3);
  std::vector<Expr> c = {parse("x1^2", 3), parse("x3", 3), parse("0", 3)};
  EXPECT_GT(lemma_dxi_residual(s3, VectorField("bad", c), P({0.3, 0.2, -0.1}), P({1, 0, 0})), 1e-3);
}

// Property: the identity holds for every catalog field at 50 random pairs.
TEST(GeodesicProperty, DxiIdentityOnCatalog) {
  for (int n : {2, 3, 4})
    for (const auto& s : models::catalog_scenarios(n)) {
      PointSampler ps(50 + n);
      double worst = 0.0;
      for (int k = 0; k < 50; ++k) {
        const Point p = ps.interior_point(s.chart, 0.05);
        const Vector X = ps.unit_vector(LocalGeometry(s.chart, p, 0));
        worst = std::max(worst, lemma_dxi_residual(s.chart, s.field, p, X));
      }
      EXPECT_LT(worst, 1e-7) << s.name;
    }
}
