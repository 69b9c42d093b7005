#include "cvf/conformal.hpp"

#include <cmath>

#include "cvf/error.hpp"

namespace cvf {

double conformal_factor(const Chart& chart, const VectorField& xi, const Point& p) {
  LocalGeometry geo(chart, p, 1);
  LocalField f(xi, p, 1);
  return conformal_factor(geo, f);
}

double conformal_residual(const LocalGeometry& geo, const LocalField& xi) {
  const Matrix traceless = lie_derivative(geo, xi) - 2.0 * conformal_factor(geo, xi) * geo.metric();
  return geo.form_norm(traceless);
}

double conformal_residual(const Chart& chart, const VectorField& xi, const Point& p) {
  LocalGeometry geo(chart, p, 1);
  LocalField f(xi, p, 1);
  return conformal_residual(geo, f);
}

ConformalReport is_conformal(const Chart& chart, const VectorField& xi, const std::vector<Point>& samples, double tol) {
  if (samples.empty()) throw PreconditionError("is_conformal needs at least one sample point");
  if (!(tol > 0.0)) throw PreconditionError("tolerance must be positive");
  ConformalReport report;
  report.field = xi.name();
  report.points = samples;
  report.tolerance = tol;
  report.residuals.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double r = conformal_residual(chart, xi, samples[i]);
    report.residuals.push_back(r);
    // NaN residuals count as worst.
    if (!(r <= report.max_residual)) {
      report.max_residual = r;
      report.worst_index = i;
    }
  }
  report.conformal = report.max_residual < tol;
  return report;
}

Chart rescale_metric(const Chart& chart, const ScalarField& f) {
  const int n = chart.dim();
  if (f.expr().max_variable() >= n) throw PreconditionError("rescaling function uses a variable beyond the chart dimension");
  const Expr factor = exp(Expr::constant(2.0) * f.expr());
  std::vector<Expr> metric(static_cast<std::size_t>(n * n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) metric[i * n + j] = factor * chart.metric_expr(i, j);
  return Chart(chart.name() + "*exp(2 " + f.name() + ")", chart.box(), std::move(metric), chart.ball_radius());
}

double connection_change_residual(const Chart& chart, const ScalarField& f, const Point& p) {
  const int n = chart.dim();
  const Chart rescaled = rescale_metric(chart, f);
  LocalGeometry base(chart, p, 1);
  LocalGeometry conf(rescaled, p, 1);
  const Jet fj = eval_jet(f.expr(), std::span<const double>(p.data(), static_cast<std::size_t>(n)), 1);
  Vector df(n);
  for (int i = 0; i < n; ++i) df[i] = fj.d1(i);
  const Vector grad_f = base.sharp(df);
  double sum = 0.0;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double predicted = base.gamma(k, i, j) + (k == i ? df[j] : 0.0) + (k == j ? df[i] : 0.0) -
                                 base.metric()(i, j) * grad_f[k];
        const double diff = conf.gamma(k, i, j) - predicted;
        sum += diff * diff;
      }
  return std::sqrt(sum);
}

}  // namespace cvf
