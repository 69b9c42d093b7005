#pragma once

#include <array>
#include <vector>

#include "cvf/geometry.hpp"

namespace cvf {

struct GeodesicState {
  double t = 0.0;
  Point position;
  Vector velocity;
  Matrix frame;  // columns: parallel transported g-orthonormal frame
};

/// Unit-speed geodesic from x in direction v (normalized in g), integrated by
/// classical RK4 with `steps` steps on [0, T] together with a parallel frame
/// started from the g-orthonormalized coordinate basis. The trajectory stops
/// early when a stage leaves the chart; an empty result means x itself is
/// outside.
std::vector<GeodesicState> integrate_geodesic(const Chart& chart, const Point& x, const Vector& v, double T,
                                              int steps);

/// Geodesic state at signed time t; negative t integrates along -v and flips
/// the velocity back. Throws ChartError if the chart is left before |t|.
GeodesicState geodesic_state_at(const Chart& chart, const Point& x, const Vector& v, double t,
                                int steps_per_unit = 200);

/// exp_x(v): position at time |v|_g along the geodesic with direction v.
Point exp_map(const Chart& chart, const Point& x, const Vector& v, int steps_per_unit = 200);

struct TaylorOptions {
  double fd_step = 1e-3;
  int steps_per_unit = 200;
  double zero_tol = 1e-8;
};

/// f(t) = g(xi(c(t)), c'(t)) along the unit geodesic c from a zero x.
struct ScalarTaylorCheck {
  double phi = 0.0;
  double f_prime = 0.0;
  double f_second = 0.0;
  double first_residual = 0.0;  // |f'(0) - phi(x)|
  std::array<double, 4> times{0.1, 0.05, 0.025, 0.0125};
  std::array<double, 4> remainders{};
  double remainder_order = 0.0;  // +inf when every remainder is below the floor
};

ScalarTaylorCheck taylor_scalar_check(const Chart& chart, const VectorField& xi, const Point& x, const Vector& v,
                                      const TaylorOptions& opts = {});

/// xi along the geodesic in the parallel frame, differentiated at t = 0.
/// Predictions: xi'(0) = 1/2 (v -| dxi)^# + phi(x) v and
/// xi''(0) = 2 dphi(v) v - grad phi, all in frame components.
struct VectorTaylorCheck {
  Vector first_derivative;
  Vector predicted_first;
  Vector second_derivative;
  Vector predicted_second;
  double first_residual = 0.0;
  double second_residual = 0.0;
};

VectorTaylorCheck taylor_vector_check(const Chart& chart, const VectorField& xi, const Point& x, const Vector& v,
                                      const TaylorOptions& opts = {});

/// Terms of nabla_X dxi = 2 R(X, xi, ., .) + 2 dphi ^ X as (0,2) tensors at p:
///   curvature(Y, Z) = g(R(X, xi) Y, Z), wedge(Y, Z) = dphi(Y) g(X, Z) - dphi(Z) g(X, Y).
struct LemmaTerms {
  Matrix nabla_dxi;
  Matrix curvature;
  Matrix wedge;
  double residual = 0.0;  // g-norm of nabla_dxi - 2 curvature - 2 wedge
};

LemmaTerms lemma_dxi_terms(const Chart& chart, const VectorField& xi, const Point& p, const Vector& X);
double lemma_dxi_residual(const Chart& chart, const VectorField& xi, const Point& p, const Vector& X);

}  // namespace cvf
