#include "cvf/essential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cvf/conformal.hpp"
#include "cvf/error.hpp"

namespace cvf {

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::KillingInessential: return "killing_inessential";
    case Verdict::HomotheticNonkilling: return "homothetic_nonkilling";
    case Verdict::Essential: return "essential";
    case Verdict::InvalidNotConformal: return "invalid_not_conformal";
  }
  return "unknown";
}

namespace {

constexpr double kRelativeRank = 1e-8;
constexpr double kAbsoluteRank = 1e-10;

int numerical_rank(const Eigen::VectorXd& sigma) {
  if (sigma.size() == 0) return 0;
  const double cut = std::max(kRelativeRank * sigma[0], kAbsoluteRank);
  int r = 0;
  for (int i = 0; i < sigma.size(); ++i)
    if (sigma[i] > cut) ++r;
  return r;
}

// Null space of the coordinate Jacobian (right singular vectors).
Matrix jacobian_null_space(const Matrix& jac) {
  Eigen::JacobiSVD<Matrix> svd(jac, Eigen::ComputeFullV);
  const int r = numerical_rank(svd.singularValues());
  return svd.matrixV().rightCols(jac.cols() - r);
}

Vector min_norm_step(const Matrix& jac, const Vector& rhs) {
  Eigen::JacobiSVD<Matrix> svd(jac, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::VectorXd& s = svd.singularValues();
  Vector out = Vector::Zero(jac.cols());
  if (s.size() == 0 || s[0] == 0.0) return out;
  const double cut = 1e-10 * s[0];
  for (int i = 0; i < s.size(); ++i) {
    if (s[i] <= cut) break;
    out += svd.matrixV().col(i) * (svd.matrixU().col(i).dot(rhs) / s[i]);
  }
  return out;
}

struct NewtonResult {
  Point x;
  double residual;
};

NewtonResult newton(const Chart& chart, const VectorField& xi, Point x, const ZeroSearchOptions& opts) {
  double nrm = field_norm(chart, xi, x);
  for (int it = 0; it < opts.max_iterations && nrm > 0.0; ++it) {
    const LocalField f(xi, x, 1);
    const Vector step = -min_norm_step(f.d1, f.value);
    if (step.norm() <= 1e-15 * (1.0 + x.norm())) break;
    double t = 1.0;
    bool moved = false;
    for (int h = 0; h < 40; ++h, t *= 0.5) {
      const Point y = x + t * step;
      if (!chart.contains(y)) continue;
      const double ny = field_norm(chart, xi, y);
      if (ny < nrm) {
        x = y;
        nrm = ny;
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }
  return {x, nrm};
}

bool accept(const Chart& chart, const NewtonResult& r, const ZeroSearchOptions& opts) {
  return std::isfinite(r.residual) && r.residual < opts.tol && chart.boundary_distance(r.x) > opts.boundary_margin;
}

}  // namespace

std::vector<Point> find_zeros(const Chart& chart, const VectorField& xi, const ZeroSearchOptions& opts) {
  if (opts.grid_resolution < 2) throw PreconditionError("grid_resolution must be at least 2");
  if (!(opts.tol > 0.0)) throw PreconditionError("zero tolerance must be positive");
  if (xi.dim() != chart.dim()) throw PreconditionError("field and chart dimensions differ");
  const int n = chart.dim();
  const int m = opts.grid_resolution;
  std::size_t total = 1;
  for (int i = 0; i < n; ++i) total *= static_cast<std::size_t>(m);

  const Box& box = chart.box();
  auto node = [&](std::size_t flat) {
    Point p(n);
    for (int i = n - 1; i >= 0; --i) {
      const int k = static_cast<int>(flat % m);
      flat /= m;
      p[i] = box.lower[i] + (box.upper[i] - box.lower[i]) * k / (m - 1);
    }
    return p;
  };

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> value(total, inf);
  for (std::size_t f = 0; f < total; ++f) {
    const Point p = node(f);
    if (!chart.contains(p)) continue;
    const double v = field_norm(chart, xi, p);
    if (std::isfinite(v)) value[f] = v;
  }

  // Strides for neighbour offsets in the flattened grid.
  std::vector<std::size_t> stride(n);
  stride[n - 1] = 1;
  for (int i = n - 2; i >= 0; --i) stride[i] = stride[i + 1] * m;
  std::size_t offsets = 1;
  for (int i = 0; i < n; ++i) offsets *= 3;

  std::vector<Point> seeds;
  std::vector<int> idx(n);
  for (std::size_t f = 0; f < total; ++f) {
    if (!std::isfinite(value[f])) continue;
    std::size_t rest = f;
    for (int i = n - 1; i >= 0; --i) {
      idx[i] = static_cast<int>(rest % m);
      rest /= m;
    }
    bool minimum = true;
    for (std::size_t o = 0; o < offsets && minimum; ++o) {
      std::size_t code = o;
      long long g = static_cast<long long>(f);
      bool self = true;
      bool valid = true;
      for (int i = 0; i < n; ++i) {
        const int d = static_cast<int>(code % 3) - 1;
        code /= 3;
        if (d != 0) self = false;
        const int k = idx[i] + d;
        if (k < 0 || k >= m) {
          valid = false;
          break;
        }
        g += d * static_cast<long long>(stride[i]);
      }
      if (self || !valid) continue;
      if (value[static_cast<std::size_t>(g)] < value[f]) minimum = false;
    }
    if (minimum) seeds.push_back(node(f));
  }

  std::vector<Point> found;
  for (const Point& s : seeds) {
    const NewtonResult r = newton(chart, xi, s, opts);
    if (!accept(chart, r, opts)) continue;
    found.push_back(r.x);
    const Matrix null = jacobian_null_space(LocalField(xi, r.x, 1).d1);
    for (int c = 0; c < null.cols(); ++c)
      for (double sign : {1.0, -1.0}) {
        const Point probe = r.x + sign * opts.probe_step * null.col(c);
        if (!chart.contains(probe)) continue;
        const NewtonResult q = newton(chart, xi, probe, opts);
        if (accept(chart, q, opts)) found.push_back(q.x);
      }
  }

  std::vector<Point> merged;
  for (const Point& p : found) {
    const bool dup = std::any_of(merged.begin(), merged.end(),
                                 [&](const Point& q) { return (p - q).norm() < opts.merge_distance; });
    if (!dup) merged.push_back(p);
  }
  std::sort(merged.begin(), merged.end(), [](const Point& a, const Point& b) {
    return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
  });
  return merged;
}

Matrix dxi_kernel(const LocalGeometry& geo, const Matrix& dxi) {
  const Matrix& L = geo.cholesky();
  const Matrix Linv = L.triangularView<Eigen::Lower>().solve(Matrix::Identity(geo.dim(), geo.dim()));
  const Matrix F = Linv * dxi * Linv.transpose();
  Eigen::JacobiSVD<Matrix> svd(F, Eigen::ComputeFullV);
  const int r = numerical_rank(svd.singularValues());
  // Orthonormal-frame vectors u map back to coordinates as L^-T u.
  return Linv.transpose() * svd.matrixV().rightCols(geo.dim() - r);
}

ZeroClassification classify_zero(const Chart& chart, const VectorField& xi, const Point& x,
                                 const ClassifyOptions& opts) {
  const int n = chart.dim();
  if (xi.dim() != n) throw PreconditionError("field and chart dimensions differ");
  if (!chart.contains(x)) throw PreconditionError("classification point lies outside the chart");

  ZeroClassification out;
  out.zero = x;
  out.field_norm = field_norm(chart, xi, x);
  if (!(out.field_norm < opts.zero_tol))
    throw PreconditionError("point is not a zero of " + xi.name() + " (|xi|_g = " + std::to_string(out.field_norm) +
                            ")");

  std::vector<Point> nearby{x};
  for (int i = 0; i < n; ++i)
    for (double sign : {1.0, -1.0}) {
      Point q = x;
      q[i] += sign * opts.neighborhood_radius;
      if (chart.contains(q)) nearby.push_back(q);
    }
  for (const Point& q : nearby) {
    const LocalGeometry g(chart, q, 1);
    const LocalField f(xi, q, 1);
    out.conformal_residual = std::max(out.conformal_residual, conformal_residual(g, f));
    out.max_abs_phi_nearby = std::max(out.max_abs_phi_nearby, std::abs(conformal_factor(g, f)));
  }
  if (!(out.conformal_residual < opts.conformal_tol)) {
    out.verdict = Verdict::InvalidNotConformal;
    return out;
  }

  const LocalGeometry geo(chart, x, 2);
  const LocalField f(xi, x, 2);
  out.phi = conformal_factor(geo, f);
  out.dphi = conformal_factor_differential(geo, f);
  out.grad_phi = geo.sharp(out.dphi);
  out.nabla_xi = covariant_derivative(geo, f);
  out.dxi = exterior_derivative(geo, f);
  out.dxi_norm = geo.form_norm(out.dxi);
  out.dphi_norm = geo.covector_norm(out.dphi);

  const Matrix& L = geo.cholesky();
  const Matrix Linv = L.triangularView<Eigen::Lower>().solve(Matrix::Identity(n, n));
  const Matrix A = L.transpose() * out.nabla_xi * Linv.transpose();
  const Vector b = L.transpose() * out.grad_phi;
  Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeFullU);
  out.nabla_rank = numerical_rank(svd.singularValues());
  const Matrix U = svd.matrixU().leftCols(out.nabla_rank);
  out.image_residual = (b - U * (U.transpose() * b)).norm();
  out.image_threshold = opts.tol * (1.0 + b.norm());

  Eigen::JacobiSVD<Matrix> dsvd(Linv * out.dxi * Linv.transpose());
  out.dxi_rank = numerical_rank(dsvd.singularValues());
  out.kernel_dim = n - out.dxi_rank;

  if (n == 2) {
    if (out.max_abs_phi_nearby < opts.tol) {
      out.verdict = Verdict::KillingInessential;
      return out;
    }
    throw PreconditionError("essentiality test needs dimension at least 3 unless the field is Killing");
  }

  if (out.image_residual >= out.image_threshold)
    out.verdict = Verdict::Essential;
  else if (std::abs(out.phi) < opts.tol)
    out.verdict = Verdict::KillingInessential;
  else
    out.verdict = Verdict::HomotheticNonkilling;
  return out;
}

bool LimitPointAudit::passed() const {
  return std::all_of(assertions.begin(), assertions.end(), [](const AuditAssertion& a) { return a.passed; });
}

LimitPointAudit limit_point_audit(const Chart& chart, const VectorField& xi, const std::vector<Point>& zeros,
                                  double radius, const ClassifyOptions& opts) {
  LimitPointAudit audit;
  audit.radius = radius;
  const double inf = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < zeros.size(); ++i) {
    AuditEntry e;
    e.nearest_distance = inf;
    for (std::size_t j = 0; j < zeros.size(); ++j)
      if (j != i) e.nearest_distance = std::min(e.nearest_distance, (zeros[i] - zeros[j]).norm());
    e.isolated = !(e.nearest_distance <= radius);
    e.classification.zero = zeros[i];
    try {
      e.classification = classify_zero(chart, xi, zeros[i], opts);
      e.classified = true;
    } catch (const Error& err) {
      e.error = err.what();
    }
    audit.entries.push_back(std::move(e));
  }

  for (std::size_t i = 0; i < audit.entries.size(); ++i) {
    const AuditEntry& e = audit.entries[i];
    const ZeroClassification& c = e.classification;
    const std::string tag = "[" + std::to_string(i) + "]";
    if (!e.isolated) {
      AuditAssertion a{"non_isolated_zero_is_killing" + tag, false, ""};
      if (!e.classified) {
        a.detail = "not classified: " + e.error;
      } else {
        a.passed = std::abs(c.phi) < opts.tol && c.image_residual < opts.tol &&
                   c.verdict == Verdict::KillingInessential;
        a.detail = "phi=" + std::to_string(c.phi) + " image_residual=" + std::to_string(c.image_residual) +
                   " verdict=" + std::string(to_string(c.verdict));
      }
      audit.assertions.push_back(std::move(a));
    }
    if (e.classified && c.verdict == Verdict::Essential) {
      audit.assertions.push_back({"essential_zero_is_isolated" + tag, e.isolated,
                                  "nearest other zero at " + std::to_string(e.nearest_distance)});
    }
  }
  return audit;
}

}  // namespace cvf
