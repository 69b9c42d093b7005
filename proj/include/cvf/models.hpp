#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cvf/geometry.hpp"

/// Builtin charts and conformal vector fields.
///
/// C++ entry points take 0-based axis indices; the name-based constructors
/// (make_chart / make_field) use 1-based indices like the manifest format.
namespace cvf::models {

/// Flat metric on [-2, 2]^n.
Chart euclidean(int n);
/// Round sphere through stereographic projection: 4 / (1 + |x|^2)^2 delta on
/// the ball of radius 3 (reaching past the equator |x| = 1).
Chart sphere_stereographic(int n);
/// Poincare ball: 4 / (1 - |x|^2)^2 delta on the ball of radius 0.9.
Chart hyperbolic_ball(int n);

/// Constant field e_axis.
VectorField translation(int n, int axis);
/// x_i d_j - x_j d_i.
VectorField rotation(int n, int i, int j);
/// sum_k x_k d_k.
VectorField euler(int n);
/// |x|^2 e - 2 <x, e> x with e = e_axis.
VectorField special_conformal(int n, int axis);
/// Infinitesimal rotation of S^n in the ambient (i, j) plane of R^(n+1), in
/// the stereographic chart. For j < n this is rotation(n, i, j); j == n is the
/// axis through the projection pole, giving 1/2 ((1 - |x|^2) e_i + 2 x_i x).
VectorField sphere_killing(int n, int i, int j);
/// special_conformal(n, 0): the stereographic image of a translation, with
/// its single zero at the pole sitting at the chart origin.
VectorField remark_example(int n);

Chart make_chart(std::string_view name, int n);
VectorField make_field(std::string_view name, int n, std::span<const int> params);

std::vector<std::string> chart_names();
std::vector<std::string> field_names();

struct Scenario {
  std::string name;
  Chart chart;
  VectorField field;
};

/// sphere_stereographic(n) carrying remark_example(n).
Scenario remark_scenario(int n);

/// Every builtin chart paired with every builtin field family in dimension n.
std::vector<Scenario> catalog_scenarios(int n);

/// Transition x -> x / |x|^2 between the two stereographic charts.
Point inversion_transition(const Point& p);

/// Pushforward of a field through the transition, as expression trees:
/// (F_* eta)^i(x) = (delta_ij |x|^2 - 2 x_i x_j) eta^j(x / |x|^2).
VectorField pushforward_under_inversion(const VectorField& field);

}  // namespace cvf::models
