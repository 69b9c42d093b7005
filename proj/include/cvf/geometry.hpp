#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cvf/expr.hpp"

namespace cvf {

using Point = Eigen::VectorXd;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

struct Box {
  Point lower;
  Point upper;
};

/// A coordinate domain carrying a Riemannian metric given by expressions.
///
/// The domain is an open axis-aligned box, optionally intersected with the
/// open ball of radius `ball_radius` about the origin.
class Chart {
 public:
  /// `metric` holds n*n expressions in row-major order; only the upper
  /// triangle is read, the lower one is taken to mirror it.
  Chart(std::string name, Box domain, std::vector<Expr> metric, std::optional<double> ball_radius = std::nullopt);

  const std::string& name() const { return name_; }
  int dim() const { return dim_; }
  const Box& box() const { return box_; }
  std::optional<double> ball_radius() const { return ball_radius_; }
  const Expr& metric_expr(int i, int j) const;

  /// Signed distance to the domain boundary (positive inside).
  double boundary_distance(const Point& p) const;
  bool contains(const Point& p) const { return p.size() == dim_ && boundary_distance(p) > 0.0; }

 private:
  std::string name_;
  int dim_;
  Box box_;
  std::vector<Expr> metric_;
  std::optional<double> ball_radius_;
};

class VectorField {
 public:
  VectorField(std::string name, std::vector<Expr> components);
  const std::string& name() const { return name_; }
  int dim() const { return static_cast<int>(components_.size()); }
  const Expr& component(int i) const { return components_[i]; }
  const std::vector<Expr>& components() const { return components_; }

 private:
  std::string name_;
  std::vector<Expr> components_;
};

class ScalarField {
 public:
  ScalarField(std::string name, Expr expr) : name_(std::move(name)), expr_(std::move(expr)) {}
  const std::string& name() const { return name_; }
  const Expr& expr() const { return expr_; }

 private:
  std::string name_;
  Expr expr_;
};

enum class Slot { Up, Down };

/// Dense tensor components at a point. Index order follows the valence list;
/// the component array is row-major with n^rank entries.
class TensorValue {
 public:
  TensorValue(Point point, std::vector<Slot> valence);

  static TensorValue from_matrix(Point point, std::vector<Slot> valence, const Matrix& m);
  static TensorValue from_vector(Point point, Slot slot, const Vector& v);

  int dim() const { return dim_; }
  int rank() const { return static_cast<int>(valence_.size()); }
  const Point& point() const { return point_; }
  const std::vector<Slot>& valence() const { return valence_; }
  const std::vector<double>& data() const { return data_; }

  template <typename... I>
  double operator()(I... idx) const { return data_[offset({static_cast<int>(idx)...})]; }
  template <typename... I>
  double& operator()(I... idx) { return data_[offset({static_cast<int>(idx)...})]; }

  Matrix matrix() const;  // rank 2 only
  Vector vector() const;  // rank 1 only

 private:
  std::size_t offset(std::initializer_list<int> idx) const;

  Point point_;
  std::vector<Slot> valence_;
  int dim_;
  std::vector<double> data_;
};

/// Metric jets and derived connection data at one point.
///
/// derivative_order 1 gives Christoffel symbols; 2 adds their derivatives and
/// the curvature tensor. Construction validates the point and the metric:
/// ChartError for points outside the domain, non-positive-definite values, or
/// condition number above kMaxCondition.
class LocalGeometry {
 public:
  static constexpr double kMaxCondition = 1e12;

  LocalGeometry(const Chart& chart, const Point& p, int derivative_order = 2);

  int dim() const { return n_; }
  const Point& point() const { return point_; }
  int derivative_order() const { return order_; }

  const Matrix& metric() const { return g_; }
  const Matrix& inverse() const { return ginv_; }
  double dg(int k, int i, int j) const { return dg_[k](i, j); }
  double ddg(int k, int l, int i, int j) const { return ddg_[k * n_ + l](i, j); }

  /// Gamma^k_ij.
  double gamma(int k, int i, int j) const { return gamma_[(k * n_ + i) * n_ + j]; }
  /// d_l Gamma^k_ij.
  double dgamma(int l, int k, int i, int j) const { return dgamma_[((l * n_ + k) * n_ + i) * n_ + j]; }
  /// R^i_jkl with R(d_k, d_l) d_j = R^i_jkl d_i and R(X,Y) = [nabla_X, nabla_Y] - nabla_[X,Y].
  double riemann(int i, int j, int k, int l) const;
  /// R_mjkl = g_mi R^i_jkl = g(R(d_k, d_l) d_j, d_m).
  double riemann_lowered(int m, int j, int k, int l) const;

  Vector flat(const Vector& v) const { return g_ * v; }
  Vector sharp(const Vector& w) const { return ginv_ * w; }
  double inner(const Vector& a, const Vector& b) const { return a.dot(g_ * b); }
  double norm(const Vector& v) const;
  double covector_norm(const Vector& w) const;
  /// g-norm of a (0,2) tensor, indices raised with g^-1.
  double form_norm(const Matrix& t) const;

  /// Cholesky factor L with g = L L^T; L^T maps components to an orthonormal frame.
  const Matrix& cholesky() const { return chol_; }

 private:
  int n_;
  int order_;
  Point point_;
  Matrix g_;
  Matrix ginv_;
  Matrix chol_;
  std::vector<Matrix> dg_;
  std::vector<Matrix> ddg_;
  std::vector<double> gamma_;
  std::vector<double> dgamma_;
};

/// Values and coordinate partials of a vector field at one point.
struct LocalField {
  LocalField(const VectorField& field, const Point& p, int order);

  Vector value;            // xi^i
  Matrix d1;               // d1(i, j) = d_j xi^i
  std::vector<Matrix> d2;  // d2[i](j, k) = d_j d_k xi^i (order 2 only)
};

// Pointwise quantities from local data. Index conventions:
//   covariant_derivative(i, j)        = (nabla_j xi)^i
//   lowered_covariant_derivative(a,b) = g(nabla_a xi, d_b)
//   exterior_derivative(a, b)         = d_a xi_b - d_b xi_a, xi_b = g_bk xi^k
Matrix covariant_derivative(const LocalGeometry& geo, const LocalField& xi);
Matrix lowered_covariant_derivative(const LocalGeometry& geo, const LocalField& xi);
Matrix exterior_derivative(const LocalGeometry& geo, const LocalField& xi);
/// (L_xi g)_ab = xi^k d_k g_ab + g_kb d_a xi^k + g_ak d_b xi^k (no Christoffels).
Matrix lie_derivative(const LocalGeometry& geo, const LocalField& xi);
/// tr(nabla xi) / n.
double conformal_factor(const LocalGeometry& geo, const LocalField& xi);
/// d(phi) as a covector; needs second-order geometry and field data.
Vector conformal_factor_differential(const LocalGeometry& geo, const LocalField& xi);

/// Coordinate partials of the one-form xi_c = g_ck xi^k.
struct LoweredField {
  Vector value;            // xi_c
  Matrix d1;               // d1(b, c) = d_b xi_c
  std::vector<Matrix> d2;  // d2[a](b, c) = d_a d_b xi_c (second-order data only)
};
LoweredField lower_field(const LocalGeometry& geo, const LocalField& xi);

// Chart-level operations.
TensorValue metric_at(const Chart& chart, const Point& p);
TensorValue christoffel(const Chart& chart, const Point& p);
TensorValue covariant_derivative_field(const Chart& chart, const VectorField& xi, const Point& p);
TensorValue riemann(const Chart& chart, const Point& p);
TensorValue exterior_derivative_dual(const Chart& chart, const VectorField& xi, const Point& p);
TensorValue lie_derivative_metric(const Chart& chart, const VectorField& xi, const Point& p);
/// tr(nabla xi).
double divergence(const Chart& chart, const VectorField& xi, const Point& p);
/// delta^g xi = -tr(nabla xi), so that phi = -delta^g xi / n.
double codifferential(const Chart& chart, const VectorField& xi, const Point& p);
TensorValue grad(const Chart& chart, const ScalarField& f, const Point& p);
TensorValue sharp(const Chart& chart, const TensorValue& covector);
TensorValue flat(const Chart& chart, const TensorValue& vector);

/// Values of a vector field at p.
Vector field_value(const VectorField& xi, const Point& p);
/// Metric values at p without the validation LocalGeometry performs.
Matrix metric_value(const Chart& chart, const Point& p);
/// |xi(p)|_g.
double field_norm(const Chart& chart, const VectorField& xi, const Point& p);

/// Sectional curvature of the plane spanned by x, y.
double sectional_curvature(const LocalGeometry& geo, const Vector& x, const Vector& y);

/// Deterministic uniform sampler: std::mt19937_64 seeded with `seed`, each
/// coordinate drawn as lower + (upper - lower) * ((word >> 11) * 2^-53).
class PointSampler {
 public:
  explicit PointSampler(std::uint64_t seed);
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Rejection sample of the chart domain keeping boundary_distance > margin.
  Point interior_point(const Chart& chart, double margin);
  /// Uniform direction, normalized in the g-norm of `geo`.
  Vector unit_vector(const LocalGeometry& geo);

 private:
  std::mt19937_64 engine_;
};

std::vector<Point> sample_interior(const Chart& chart, std::size_t count, std::uint64_t seed, double margin = 0.05);

}  // namespace cvf
