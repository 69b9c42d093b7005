#pragma once

#include <cstddef>
#include <vector>

#include "cvf/geometry.hpp"

namespace cvf {

/// Outcome of sampling the conformal Killing residual of a field.
struct ConformalReport {
  std::string field;
  std::vector<Point> points;
  std::vector<double> residuals;
  double max_residual = 0.0;
  std::size_t worst_index = 0;
  double tolerance = 0.0;
  bool conformal = false;
};

/// phi(p) = tr(nabla xi) / n, the function with L_xi g = 2 phi g for conformal xi.
double conformal_factor(const Chart& chart, const VectorField& xi, const Point& p);

/// g-norm of L_xi g - 2 phi g at p. Zero exactly when xi is conformal at p.
double conformal_residual(const Chart& chart, const VectorField& xi, const Point& p);
double conformal_residual(const LocalGeometry& geo, const LocalField& xi);

/// Verdict `conformal` iff the maximum residual over `samples` is below tol.
ConformalReport is_conformal(const Chart& chart, const VectorField& xi, const std::vector<Point>& samples,
                             double tol = 1e-7);

/// Chart with metric exp(2 f) g, built as expressions so jets stay exact.
Chart rescale_metric(const Chart& chart, const ScalarField& f);

/// Frobenius norm of Gamma'(rescaled) - (Gamma + df (x) Id + Id (x) df - g grad f) at p.
double connection_change_residual(const Chart& chart, const ScalarField& f, const Point& p);

}  // namespace cvf
