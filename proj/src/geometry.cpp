#include "cvf/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "cvf/error.hpp"

namespace cvf {

Chart::Chart(std::string name, Box domain, std::vector<Expr> metric, std::optional<double> ball_radius)
    : name_(std::move(name)),
      dim_(static_cast<int>(domain.lower.size())),
      box_(std::move(domain)),
      metric_(std::move(metric)),
      ball_radius_(ball_radius) {
  if (dim_ < 2) throw ChartError("chart dimension must be at least 2");
  if (box_.upper.size() != dim_) throw ChartError("domain bounds have mismatched dimensions");
  for (int i = 0; i < dim_; ++i)
    if (!(box_.upper[i] > box_.lower[i])) throw ChartError("domain box must have positive volume");
  if (ball_radius_ && !(*ball_radius_ > 0.0)) throw ChartError("ball radius must be positive");
  if (static_cast<int>(metric_.size()) != dim_ * dim_)
    throw ChartError("metric needs " + std::to_string(dim_ * dim_) + " entries");
  for (const Expr& e : metric_)
    if (e.max_variable() >= dim_) throw ChartError("metric entry " + e.str() + " uses a variable beyond the chart dimension");
}

const Expr& Chart::metric_expr(int i, int j) const {
  if (i > j) std::swap(i, j);
  return metric_[i * dim_ + j];
}

double Chart::boundary_distance(const Point& p) const {
  double d = std::numeric_limits<double>::infinity();
  for (int i = 0; i < dim_; ++i) d = std::min({d, p[i] - box_.lower[i], box_.upper[i] - p[i]});
  if (ball_radius_) d = std::min(d, *ball_radius_ - p.norm());
  return d;
}

VectorField::VectorField(std::string name, std::vector<Expr> components)
    : name_(std::move(name)), components_(std::move(components)) {
  if (components_.empty()) throw PreconditionError("vector field needs at least one component");
  for (const Expr& e : components_)
    if (e.max_variable() >= dim())
      throw PreconditionError("field component " + e.str() + " uses a variable beyond the field dimension");
}

// ---------------------------------------------------------------------------

TensorValue::TensorValue(Point point, std::vector<Slot> valence)
    : point_(std::move(point)), valence_(std::move(valence)), dim_(static_cast<int>(point_.size())) {
  std::size_t size = 1;
  for (std::size_t r = 0; r < valence_.size(); ++r) size *= static_cast<std::size_t>(dim_);
  data_.assign(size, 0.0);
}

TensorValue TensorValue::from_matrix(Point point, std::vector<Slot> valence, const Matrix& m) {
  TensorValue t(std::move(point), std::move(valence));
  if (t.rank() != 2 || m.rows() != t.dim_ || m.cols() != t.dim_) throw std::invalid_argument("from_matrix: shape mismatch");
  for (int i = 0; i < t.dim_; ++i)
    for (int j = 0; j < t.dim_; ++j) t(i, j) = m(i, j);
  return t;
}

TensorValue TensorValue::from_vector(Point point, Slot slot, const Vector& v) {
  TensorValue t(std::move(point), {slot});
  if (v.size() != t.dim_) throw std::invalid_argument("from_vector: shape mismatch");
  for (int i = 0; i < t.dim_; ++i) t(i) = v[i];
  return t;
}

std::size_t TensorValue::offset(std::initializer_list<int> idx) const {
  if (idx.size() != valence_.size()) throw std::out_of_range("tensor index count does not match rank");
  std::size_t off = 0;
  for (int i : idx) off = off * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(i);
  return off;
}

Matrix TensorValue::matrix() const {
  if (rank() != 2) throw std::logic_error("matrix() needs a rank-2 tensor");
  Matrix m(dim_, dim_);
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) m(i, j) = data_[i * dim_ + j];
  return m;
}

Vector TensorValue::vector() const {
  if (rank() != 1) throw std::logic_error("vector() needs a rank-1 tensor");
  return Eigen::Map<const Vector>(data_.data(), dim_);
}

// ---------------------------------------------------------------------------

LocalGeometry::LocalGeometry(const Chart& chart, const Point& p, int derivative_order)
    : n_(chart.dim()), order_(derivative_order), point_(p) {
  if (derivative_order < 0 || derivative_order > 2) throw std::invalid_argument("derivative_order must be 0, 1 or 2");
  if (p.size() != n_) throw ChartError("point has wrong dimension for chart " + chart.name());
  if (!chart.contains(p)) throw ChartError("point outside the domain of chart " + chart.name());
  const int n = n_;
  g_ = Matrix::Zero(n, n);
  dg_.assign(order_ >= 1 ? n : 0, Matrix::Zero(n, n));
  ddg_.assign(order_ >= 2 ? n * n : 0, Matrix::Zero(n, n));
  const std::span<const double> coords(p.data(), static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      const Jet jet = eval_jet(chart.metric_expr(i, j), coords, order_);
      g_(i, j) = g_(j, i) = jet.value();
      for (int k = 0; k < n && order_ >= 1; ++k) dg_[k](i, j) = dg_[k](j, i) = jet.d1(k);
      for (int k = 0; k < n && order_ >= 2; ++k)
        for (int l = 0; l < n; ++l) ddg_[k * n + l](i, j) = ddg_[k * n + l](j, i) = jet.d2(k, l);
    }

  Eigen::SelfAdjointEigenSolver<Matrix> eig(g_, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0)) throw ChartError("metric of chart " + chart.name() + " is not positive definite at this point");
  if (hi / lo > kMaxCondition) throw ChartError("metric of chart " + chart.name() + " is ill-conditioned at this point");
  Eigen::LLT<Matrix> llt(g_);
  if (llt.info() != Eigen::Success) throw ChartError("Cholesky factorization of the metric failed");
  chol_ = llt.matrixL();
  ginv_ = llt.solve(Matrix::Identity(n, n));
  ginv_ = 0.5 * (ginv_ + ginv_.transpose());

  if (order_ < 1) return;

  // Gamma_mij = 1/2 (d_i g_jm + d_j g_im - d_m g_ij), then raised.
  std::vector<double> lowered(static_cast<std::size_t>(n * n * n));
  auto low = [&](int m, int i, int j) -> double& { return lowered[(m * n + i) * n + j]; };
  for (int m = 0; m < n; ++m)
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) low(m, i, j) = low(m, j, i) = 0.5 * (dg_[i](j, m) + dg_[j](i, m) - dg_[m](i, j));
  gamma_.assign(static_cast<std::size_t>(n * n * n), 0.0);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        double s = 0.0;
        for (int m = 0; m < n; ++m) s += ginv_(k, m) * low(m, i, j);
        gamma_[(k * n + i) * n + j] = gamma_[(k * n + j) * n + i] = s;
      }

  if (order_ < 2) return;

  // d_l g^km = -g^ka d_l g_ab g^bm
  std::vector<Matrix> dginv(n);
  for (int l = 0; l < n; ++l) dginv[l] = -ginv_ * dg_[l] * ginv_;
  dgamma_.assign(static_cast<std::size_t>(n * n * n * n), 0.0);
  for (int l = 0; l < n; ++l)
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
          double s = 0.0;
          for (int m = 0; m < n; ++m) {
            const double dlow =
                0.5 * (ddg_[l * n + i](j, m) + ddg_[l * n + j](i, m) - ddg_[l * n + m](i, j));
            s += dginv[l](k, m) * low(m, i, j) + ginv_(k, m) * dlow;
          }
          dgamma_[((l * n + k) * n + i) * n + j] = dgamma_[((l * n + k) * n + j) * n + i] = s;
        }
}

double LocalGeometry::riemann(int i, int j, int k, int l) const {
  if (order_ < 2) throw std::logic_error("curvature needs second-order metric data");
  double r = dgamma(k, i, l, j) - dgamma(l, i, k, j);
  for (int m = 0; m < n_; ++m) r += gamma(i, k, m) * gamma(m, l, j) - gamma(i, l, m) * gamma(m, k, j);
  return r;
}

double LocalGeometry::riemann_lowered(int m, int j, int k, int l) const {
  double r = 0.0;
  for (int i = 0; i < n_; ++i) r += g_(m, i) * riemann(i, j, k, l);
  return r;
}

double LocalGeometry::norm(const Vector& v) const { return std::sqrt(std::max(0.0, inner(v, v))); }

double LocalGeometry::covector_norm(const Vector& w) const { return std::sqrt(std::max(0.0, w.dot(ginv_ * w))); }

double LocalGeometry::form_norm(const Matrix& t) const {
  const double s = (ginv_ * t * ginv_ * t.transpose()).trace();
  return std::sqrt(std::max(0.0, s));
}

LocalField::LocalField(const VectorField& field, const Point& p, int order) {
  const int n = static_cast<int>(p.size());
  if (field.dim() != n) throw PreconditionError("field " + field.name() + " has wrong dimension for this point");
  value = Vector::Zero(n);
  d1 = Matrix::Zero(n, n);
  if (order >= 2) d2.assign(n, Matrix::Zero(n, n));
  const std::span<const double> coords(p.data(), static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const Jet jet = eval_jet(field.component(i), coords, order);
    value[i] = jet.value();
    for (int j = 0; j < n && order >= 1; ++j) d1(i, j) = jet.d1(j);
    for (int j = 0; j < n && order >= 2; ++j)
      for (int k = 0; k < n; ++k) d2[i](j, k) = jet.d2(j, k);
  }
}

// ---------------------------------------------------------------------------

Matrix covariant_derivative(const LocalGeometry& geo, const LocalField& xi) {
  const int n = geo.dim();
  Matrix a = xi.d1;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) a(i, j) += geo.gamma(i, j, k) * xi.value[k];
  return a;
}

Matrix lowered_covariant_derivative(const LocalGeometry& geo, const LocalField& xi) {
  // M(a, b) = g_bk A(k, a)
  return (geo.metric() * covariant_derivative(geo, xi)).transpose();
}

LoweredField lower_field(const LocalGeometry& geo, const LocalField& xi) {
  const int n = geo.dim();
  const Matrix& g = geo.metric();
  LoweredField out;
  out.value = g * xi.value;
  out.d1 = Matrix::Zero(n, n);
  for (int b = 0; b < n; ++b)
    for (int c = 0; c < n; ++c) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) s += geo.dg(b, c, k) * xi.value[k] + g(c, k) * xi.d1(k, b);
      out.d1(b, c) = s;
    }
  if (geo.derivative_order() < 2 || xi.d2.empty()) return out;
  out.d2.assign(n, Matrix::Zero(n, n));
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        double s = 0.0;
        for (int k = 0; k < n; ++k)
          s += geo.ddg(a, b, c, k) * xi.value[k] + geo.dg(b, c, k) * xi.d1(k, a) + geo.dg(a, c, k) * xi.d1(k, b) +
               g(c, k) * xi.d2[k](a, b);
        out.d2[a](b, c) = out.d2[b](a, c) = s;
      }
  return out;
}

Matrix exterior_derivative(const LocalGeometry& geo, const LocalField& xi) {
  const Matrix d = lower_field(geo, xi).d1;
  return d - d.transpose();
}

Matrix lie_derivative(const LocalGeometry& geo, const LocalField& xi) {
  const int n = geo.dim();
  const Matrix& g = geo.metric();
  Matrix out(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) s += xi.value[k] * geo.dg(k, a, b) + g(k, b) * xi.d1(k, a) + g(a, k) * xi.d1(k, b);
      out(a, b) = out(b, a) = s;
    }
  return out;
}

double conformal_factor(const LocalGeometry& geo, const LocalField& xi) {
  return covariant_derivative(geo, xi).trace() / geo.dim();
}

Vector conformal_factor_differential(const LocalGeometry& geo, const LocalField& xi) {
  if (geo.derivative_order() < 2 || xi.d2.empty())
    throw std::logic_error("d(phi) needs second-order geometry and field data");
  const int n = geo.dim();
  Vector dphi = Vector::Zero(n);
  for (int a = 0; a < n; ++a) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      s += xi.d2[i](a, i);
      for (int k = 0; k < n; ++k) s += geo.dgamma(a, i, i, k) * xi.value[k] + geo.gamma(i, i, k) * xi.d1(k, a);
    }
    dphi[a] = s / n;
  }
  return dphi;
}

double sectional_curvature(const LocalGeometry& geo, const Vector& x, const Vector& y) {
  const int n = geo.dim();
  double r = 0.0;
  for (int m = 0; m < n; ++m)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) r += geo.riemann_lowered(m, j, k, l) * x[k] * y[l] * y[j] * x[m];
  const double area = geo.inner(x, x) * geo.inner(y, y) - std::pow(geo.inner(x, y), 2);
  if (!(area > 1e-14 * geo.inner(x, x) * geo.inner(y, y)))
    throw PreconditionError("sectional curvature needs linearly independent vectors");
  return r / area;
}

// ---------------------------------------------------------------------------

TensorValue metric_at(const Chart& chart, const Point& p) {
  LocalGeometry geo(chart, p, 0);
  return TensorValue::from_matrix(p, {Slot::Down, Slot::Down}, geo.metric());
}

TensorValue christoffel(const Chart& chart, const Point& p) {
  LocalGeometry geo(chart, p, 1);
  TensorValue t(p, {Slot::Up, Slot::Down, Slot::Down});
  const int n = chart.dim();
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) t(k, i, j) = geo.gamma(k, i, j);
  return t;
}

TensorValue covariant_derivative_field(const Chart& chart, const VectorField& xi, const Point& p) {
  LocalGeometry geo(chart, p, 1);
  LocalField f(xi, p, 1);
  return TensorValue::from_matrix(p, {Slot::Up, Slot::Down}, covariant_derivative(geo, f));
}

TensorValue riemann(const Chart& chart, const Point& p) {
  LocalGeometry geo(chart, p, 2);
  TensorValue t(p, {Slot::Up, Slot::Down, Slot::Down, Slot::Down});
  const int n = chart.dim();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) t(i, j, k, l) = geo.riemann(i, j, k, l);
  return t;
}

TensorValue exterior_derivative_dual(const Chart& chart, const VectorField& xi, const Point& p) {
  LocalGeometry geo(chart, p, 1);
  LocalField f(xi, p, 1);
  return TensorValue::from_matrix(p, {Slot::Down, Slot::Down}, exterior_derivative(geo, f));
}

TensorValue lie_derivative_metric(const Chart& chart, const VectorField& xi, const Point& p) {
  LocalGeometry geo(chart, p, 1);
  LocalField f(xi, p, 1);
  return TensorValue::from_matrix(p, {Slot::Down, Slot::Down}, lie_derivative(geo, f));
}

double divergence(const Chart& chart, const VectorField& xi, const Point& p) {
  LocalGeometry geo(chart, p, 1);
  LocalField f(xi, p, 1);
  return covariant_derivative(geo, f).trace();
}

double codifferential(const Chart& chart, const VectorField& xi, const Point& p) { return -divergence(chart, xi, p); }

TensorValue grad(const Chart& chart, const ScalarField& f, const Point& p) {
  LocalGeometry geo(chart, p, 0);
  const int n = chart.dim();
  const Jet jet = eval_jet(f.expr(), std::span<const double>(p.data(), static_cast<std::size_t>(n)), 1);
  Vector df(n);
  for (int i = 0; i < n; ++i) df[i] = jet.d1(i);
  return TensorValue::from_vector(p, Slot::Up, geo.sharp(df));
}

TensorValue sharp(const Chart& chart, const TensorValue& covector) {
  if (covector.rank() != 1 || covector.valence()[0] != Slot::Down) throw PreconditionError("sharp expects a covector");
  LocalGeometry geo(chart, covector.point(), 0);
  return TensorValue::from_vector(covector.point(), Slot::Up, geo.sharp(covector.vector()));
}

TensorValue flat(const Chart& chart, const TensorValue& vector) {
  if (vector.rank() != 1 || vector.valence()[0] != Slot::Up) throw PreconditionError("flat expects a vector");
  LocalGeometry geo(chart, vector.point(), 0);
  return TensorValue::from_vector(vector.point(), Slot::Down, geo.flat(vector.vector()));
}

Vector field_value(const VectorField& xi, const Point& p) {
  const std::span<const double> coords(p.data(), static_cast<std::size_t>(p.size()));
  Vector v(xi.dim());
  for (int i = 0; i < xi.dim(); ++i) v[i] = evaluate(xi.component(i), coords);
  return v;
}

Matrix metric_value(const Chart& chart, const Point& p) {
  const int n = chart.dim();
  const std::span<const double> coords(p.data(), static_cast<std::size_t>(p.size()));
  Matrix g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) g(i, j) = g(j, i) = evaluate(chart.metric_expr(i, j), coords);
  return g;
}

double field_norm(const Chart& chart, const VectorField& xi, const Point& p) {
  const Vector v = field_value(xi, p);
  return std::sqrt(std::max(0.0, v.dot(metric_value(chart, p) * v)));
}

// ---------------------------------------------------------------------------

PointSampler::PointSampler(std::uint64_t seed) : engine_(seed) {}

double PointSampler::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

Point PointSampler::interior_point(const Chart& chart, double margin) {
  const Box& box = chart.box();
  Point p(chart.dim());
  for (int attempt = 0; attempt < 100000; ++attempt) {
    for (int i = 0; i < chart.dim(); ++i) p[i] = uniform(box.lower[i], box.upper[i]);
    if (chart.boundary_distance(p) > margin) return p;
  }
  throw ChartError("could not sample an interior point of chart " + chart.name());
}

Vector PointSampler::unit_vector(const LocalGeometry& geo) {
  Vector v(geo.dim());
  for (;;) {
    for (int i = 0; i < geo.dim(); ++i) v[i] = uniform(-1.0, 1.0);
    const double r = v.norm();
    if (r > 1e-3 && r <= 1.0) return v / geo.norm(v);
  }
}

std::vector<Point> sample_interior(const Chart& chart, std::size_t count, std::uint64_t seed, double margin) {
  PointSampler sampler(seed);
  std::vector<Point> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(sampler.interior_point(chart, margin));
  return out;
}

}  // namespace cvf
