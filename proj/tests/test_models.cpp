#include <gtest/gtest.h>

#include <cmath>

#include "cvf/conformal.hpp"
#include "cvf/error.hpp"
#include "cvf/essential.hpp"
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

TEST(MakeChart, Examples) {
  const Chart e = models::make_chart("euclidean", 3);
  EXPECT_EQ(e.box().lower, Point::Constant(3, -2));
  EXPECT_EQ(e.box().upper, Point::Constant(3, 2));
  EXPECT_TRUE(metric_value(e, P({1, -1, 0.5})).isIdentity());

  const Chart s = models::make_chart("sphere_stereographic", 2);
  const LocalGeometry gs(s, Point::Zero(2), 2);
  EXPECT_TRUE(gs.metric().isApprox(4 * Matrix::Identity(2, 2)));
  EXPECT_NEAR(sectional_curvature(gs, Vector::Unit(2, 0), Vector::Unit(2, 1)), 1.0, 1e-12);
  EXPECT_EQ(s.ball_radius(), 3.0);

  const Chart h = models::make_chart("hyperbolic_ball", 2);
  const LocalGeometry gh(h, Point::Zero(2), 2);
  EXPECT_TRUE(gh.metric().isApprox(4 * Matrix::Identity(2, 2)));
  EXPECT_NEAR(sectional_curvature(gh, Vector::Unit(2, 0), Vector::Unit(2, 1)), -1.0, 1e-12);
}

TEST(MakeChart, Errors) {
  EXPECT_THROW(models::make_chart("torus", 3), PreconditionError);
  EXPECT_THROW(models::make_chart("euclidean", 1), PreconditionError);
}

TEST(MakeField, Examples) {
  const int rot[] = {1, 2};
  EXPECT_EQ(field_value(models::make_field("rotation", 2, rot), P({1, 0})), P({0, 1}));
  const int e1[] = {1};
  EXPECT_EQ(field_value(models::make_field("special_conformal", 3, e1), P({1, 0, 0})), P({-1, 0, 0}));
  const models::Scenario r = models::remark_scenario(3);
  EXPECT_EQ(r.chart.name(), "sphere_stereographic(3)");
  EXPECT_LT(is_conformal(r.chart, r.field, sample_interior(r.chart, 50, 0), 1e-7).max_residual, 1e-7);
  EXPECT_EQ(field_value(r.field, Point::Zero(3)), Point::Zero(3));
}

TEST(MakeField, Errors) {
  EXPECT_THROW(models::make_field("boost", 3, {}), PreconditionError);
  const int same[] = {1, 1};
  EXPECT_THROW(models::make_field("rotation", 3, same), PreconditionError);
  const int far[] = {1, 5};
  EXPECT_THROW(models::make_field("sphere_killing", 3, far), PreconditionError);
  const int one[] = {1};
  EXPECT_THROW(models::make_field("rotation", 3, one), PreconditionError);
}

TEST(Inversion, Examples) {
  EXPECT_EQ(models::inversion_transition(P({1, 0, 0})), P({1, 0, 0}));
  EXPECT_EQ(models::inversion_transition(P({2, 0, 0})), P({0.5, 0, 0}));
  EXPECT_THROW(models::inversion_transition(Point::Zero(3)), PreconditionError);
  PointSampler ps(5);
  for (int k = 0; k < 20; ++k) {
    Point p(3);
    for (int i = 0; i < 3; ++i) p[i] = ps.uniform(-2, 2);
    EXPECT_NEAR((models::inversion_transition(models::inversion_transition(p)) - p).norm(), 0.0, 1e-12);
  }
}

TEST(Inversion, TranslationPushesForwardToSpecialConformal) {
  const VectorField pushed = models::pushforward_under_inversion(models::translation(3, 0));
  const VectorField k = models::special_conformal(3, 0);
  PointSampler ps(6);
  for (int n = 0; n < 20; ++n) {
    Point y(3);
    for (int i = 0; i < 3; ++i) y[i] = ps.uniform(-2, 2);
    EXPECT_NEAR((field_value(pushed, y) - field_value(k, y)).norm(), 0.0, 1e-10);
    // Oracle: differentiate the inversion numerically at x = y / |y|^2.
    const Point x = models::inversion_transition(y);
    const double h = 1e-6;
    const Vector fd = (models::inversion_transition(x + h * Vector::Unit(3, 0)) -
                       models::inversion_transition(x - h * Vector::Unit(3, 0))) /
                      (2 * h);
    EXPECT_NEAR((fd - field_value(k, y)).norm(), 0.0, 1e-6 * (1 + fd.norm()));
  }
}

// Property: every catalog pair is conformal at 1e-7 on 100 samples.
TEST(ModelsProperty, CatalogConformal) {
  for (int n : {2, 3, 4})
    for (const auto& s : models::catalog_scenarios(n)) {
      const ConformalReport r = is_conformal(s.chart, s.field, sample_interior(s.chart, 100, 1), 1e-7);
      EXPECT_TRUE(r.conformal) << s.name << " " << r.max_residual;
    }
}

// Property: sphere Killing fields are isometries of the sphere chart.
TEST(ModelsProperty, SphereKillingHasZeroFactor) {
  for (int n : {2, 3, 4}) {
    const Chart s = models::sphere_stereographic(n);
    for (int i = 0; i <= n; ++i)
      for (int j = i + 1; j <= n; ++j) {
        const VectorField k = models::sphere_killing(n, i, j);
        for (const Point& p : sample_interior(s, 20, 3)) EXPECT_LT(std::abs(conformal_factor(s, k, p)), 1e-9) << k.name();
      }
  }
}

TEST(ModelsProperty, RemarkRegression) {
  const models::Scenario r = models::remark_scenario(3);
  const Point o = Point::Zero(3);
  const ZeroClassification c = classify_zero(r.chart, r.field, o);
  EXPECT_LT(c.dxi_norm, 1e-8);
  EXPECT_LT(std::abs(c.phi), 1e-8);
  EXPECT_GE(c.dphi_norm, 0.1);
  EXPECT_EQ(c.verdict, Verdict::Essential);
}
