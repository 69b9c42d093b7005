#include "cvf/geodesic.hpp"

#include <cmath>
#include <limits>

#include "cvf/error.hpp"

namespace cvf {

namespace {

struct Phase {
  Point x;
  Vector v;
  Matrix e;
};

// d/dt of (x, v, E) under the geodesic and parallel transport equations.
Phase rate(const Chart& chart, const Phase& s) {
  const LocalGeometry geo(chart, s.x, 1);
  const int n = chart.dim();
  Phase d{s.v, Vector::Zero(n), Matrix::Zero(n, n)};
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double gk = geo.gamma(k, i, j);
        if (gk == 0.0) continue;
        d.v[k] -= gk * s.v[i] * s.v[j];
        d.e.row(k) -= gk * s.v[i] * s.e.row(j);
      }
  return d;
}

Phase axpy(const Phase& s, double h, const Phase& d) { return {s.x + h * d.x, s.v + h * d.v, s.e + h * d.e}; }

Matrix orthonormal_frame(const Matrix& g) {
  const int n = static_cast<int>(g.rows());
  Matrix e = Matrix::Identity(n, n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < a; ++b) e.col(a) -= e.col(b).dot(g * e.col(a)) * e.col(b);
    e.col(a) /= std::sqrt(e.col(a).dot(g * e.col(a)));
  }
  return e;
}

}  // namespace

std::vector<GeodesicState> integrate_geodesic(const Chart& chart, const Point& x, const Vector& v, double T,
                                              int steps) {
  if (steps < 1) throw PreconditionError("geodesic integration needs at least one step");
  if (!(T >= 0.0)) throw PreconditionError("geodesic time must be non-negative");
  if (!chart.contains(x)) return {};
  const LocalGeometry geo(chart, x, 0);
  const double speed = geo.norm(v);
  if (!(speed > 0.0)) throw PreconditionError("geodesic direction must be non-zero");

  Phase s{x, v / speed, orthonormal_frame(geo.metric())};
  std::vector<GeodesicState> out{{0.0, s.x, s.v, s.e}};
  const double h = T / steps;
  for (int i = 0; i < steps; ++i) {
    try {
      const Phase k1 = rate(chart, s);
      const Phase k2 = rate(chart, axpy(s, h / 2, k1));
      const Phase k3 = rate(chart, axpy(s, h / 2, k2));
      const Phase k4 = rate(chart, axpy(s, h, k3));
      Phase next{s.x + h / 6 * (k1.x + 2 * k2.x + 2 * k3.x + k4.x),
                 s.v + h / 6 * (k1.v + 2 * k2.v + 2 * k3.v + k4.v),
                 s.e + h / 6 * (k1.e + 2 * k2.e + 2 * k3.e + k4.e)};
      if (!chart.contains(next.x)) break;
      s = std::move(next);
    } catch (const ChartError&) {
      break;
    }
    out.push_back({(i + 1) * h, s.x, s.v, s.e});
  }
  return out;
}

GeodesicState geodesic_state_at(const Chart& chart, const Point& x, const Vector& v, double t, int steps_per_unit) {
  const double T = std::abs(t);
  const int steps = std::max(1, static_cast<int>(std::ceil(T * steps_per_unit)));
  const auto traj = integrate_geodesic(chart, x, t < 0.0 ? Vector(-v) : v, T, steps);
  if (traj.empty()) throw ChartError("geodesic start point lies outside chart " + chart.name());
  if (static_cast<int>(traj.size()) != steps + 1)
    throw ChartError("geodesic left chart " + chart.name() + " before time " + std::to_string(T));
  GeodesicState s = traj.back();
  s.t = t;
  if (t < 0.0) s.velocity = -s.velocity;
  return s;
}

Point exp_map(const Chart& chart, const Point& x, const Vector& v, int steps_per_unit) {
  if (!chart.contains(x)) throw ChartError("exp_map base point lies outside chart " + chart.name());
  const LocalGeometry geo(chart, x, 0);
  const double len = geo.norm(v);
  if (len == 0.0) return x;
  return geodesic_state_at(chart, x, v, len, steps_per_unit).position;
}

namespace {

void require_zero(const Chart& chart, const VectorField& xi, const Point& x, double tol) {
  const double r = field_norm(chart, xi, x);
  if (!(r < tol)) throw PreconditionError("Taylor checks need a zero of the field (|xi|_g = " + std::to_string(r) + ")");
}

double scalar_along(const Chart& chart, const VectorField& xi, const GeodesicState& s) {
  return field_value(xi, s.position).dot(metric_value(chart, s.position) * s.velocity);
}

Vector frame_along(const Chart& chart, const VectorField& xi, const GeodesicState& s) {
  return s.frame.transpose() * (metric_value(chart, s.position) * field_value(xi, s.position));
}

// Richardson-extrapolated central first and second derivatives at 0 from
// samples at -2h, -h, 0, h, 2h.
template <typename T>
std::pair<T, T> central(const T& m2, const T& m1, const T& z, const T& p1, const T& p2, double h) {
  const T d1h = (p1 - m1) / (2 * h);
  const T d12h = (p2 - m2) / (4 * h);
  const T s1h = (p1 - 2 * z + m1) / (h * h);
  const T s12h = (p2 - 2 * z + m2) / (4 * h * h);
  return {(4 * d1h - d12h) / 3, (4 * s1h - s12h) / 3};
}

}  // namespace

ScalarTaylorCheck taylor_scalar_check(const Chart& chart, const VectorField& xi, const Point& x, const Vector& v,
                                      const TaylorOptions& opts) {
  require_zero(chart, xi, x, opts.zero_tol);
  ScalarTaylorCheck out;
  {
    const LocalGeometry geo(chart, x, 1);
    const LocalField f(xi, x, 1);
    out.phi = conformal_factor(geo, f);
  }
  const double h = opts.fd_step;
  auto f = [&](double t) { return scalar_along(chart, xi, geodesic_state_at(chart, x, v, t, opts.steps_per_unit)); };
  const auto [d1, d2] = central(f(-2 * h), f(-h), f(0.0), f(h), f(2 * h), h);
  out.f_prime = d1;
  out.f_second = d2;
  out.first_residual = std::abs(d1 - out.phi);

  constexpr double kFloor = 1e-10;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int used = 0;
  for (std::size_t i = 0; i < out.times.size(); ++i) {
    const double t = out.times[i];
    out.remainders[i] = f(t) - t * d1 - 0.5 * t * t * d2;
    const double r = std::abs(out.remainders[i]);
    if (r < kFloor) continue;
    const double lx = std::log(t), ly = std::log(r);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++used;
  }
  if (used < 2)
    out.remainder_order = std::numeric_limits<double>::infinity();
  else
    out.remainder_order = (used * sxy - sx * sy) / (used * sxx - sx * sx);
  return out;
}

VectorTaylorCheck taylor_vector_check(const Chart& chart, const VectorField& xi, const Point& x, const Vector& v,
                                      const TaylorOptions& opts) {
  require_zero(chart, xi, x, opts.zero_tol);
  const LocalGeometry geo(chart, x, 2);
  const LocalField f(xi, x, 2);
  const Vector u = v / geo.norm(v);
  const double phi = conformal_factor(geo, f);
  const Matrix dxi = exterior_derivative(geo, f);
  const Vector dphi = conformal_factor_differential(geo, f);

  const GeodesicState s0 = geodesic_state_at(chart, x, u, 0.0, opts.steps_per_unit);
  const Matrix to_frame = s0.frame.transpose() * geo.metric();
  const Vector first = 0.5 * geo.sharp(dxi.transpose() * u) + phi * u;
  const Vector second = 2.0 * dphi.dot(u) * u - geo.sharp(dphi);

  const double h = opts.fd_step;
  auto w = [&](double t) { return frame_along(chart, xi, geodesic_state_at(chart, x, u, t, opts.steps_per_unit)); };
  const auto [d1, d2] = central<Vector>(w(-2 * h), w(-h), w(0.0), w(h), w(2 * h), h);

  VectorTaylorCheck out;
  out.first_derivative = d1;
  out.second_derivative = d2;
  out.predicted_first = to_frame * first;
  out.predicted_second = to_frame * second;
  out.first_residual = (d1 - out.predicted_first).norm();
  out.second_residual = (d2 - out.predicted_second).norm();
  return out;
}

LemmaTerms lemma_dxi_terms(const Chart& chart, const VectorField& xi, const Point& p, const Vector& X) {
  const int n = chart.dim();
  const LocalGeometry geo(chart, p, 2);
  const LocalField f(xi, p, 2);
  const LoweredField low = lower_field(geo, f);
  const Matrix dxi = low.d1 - low.d1.transpose();
  const Vector dphi = conformal_factor_differential(geo, f);
  const Vector Xflat = geo.flat(X);

  LemmaTerms out;
  out.nabla_dxi = Matrix::Zero(n, n);
  out.curvature = Matrix::Zero(n, n);
  for (int b = 0; b < n; ++b)
    for (int c = 0; c < n; ++c) {
      double nab = 0.0;
      for (int a = 0; a < n; ++a) {
        double term = low.d2[a](b, c) - low.d2[a](c, b);
        for (int m = 0; m < n; ++m) term -= geo.gamma(m, a, b) * dxi(m, c) + geo.gamma(m, a, c) * dxi(b, m);
        nab += X[a] * term;
      }
      out.nabla_dxi(b, c) = nab;
      double curv = 0.0;
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) curv += geo.riemann_lowered(c, b, k, l) * X[k] * f.value[l];
      out.curvature(b, c) = curv;
    }
  out.wedge = dphi * Xflat.transpose() - Xflat * dphi.transpose();
  out.residual = geo.form_norm(out.nabla_dxi - 2.0 * out.curvature - 2.0 * out.wedge);
  return out;
}

double lemma_dxi_residual(const Chart& chart, const VectorField& xi, const Point& p, const Vector& X) {
  return lemma_dxi_terms(chart, xi, p, X).residual;
}

}  // namespace cvf
