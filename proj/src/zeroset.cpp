#include "cvf/zeroset.hpp"

#include <cmath>

#include "cvf/conformal.hpp"
#include "cvf/error.hpp"
#include "cvf/geodesic.hpp"

namespace cvf {

std::size_t SubmanifoldPatch::index(const std::vector<int>& gi) const {
  std::size_t out = 0;
  for (int v : gi) out = out * static_cast<std::size_t>(grid) + static_cast<std::size_t>(v);
  return out;
}

std::vector<int> SubmanifoldPatch::grid_index(std::size_t idx) const {
  std::vector<int> out(static_cast<std::size_t>(k()));
  for (int a = k() - 1; a >= 0; --a) {
    out[a] = static_cast<int>(idx % static_cast<std::size_t>(grid));
    idx /= static_cast<std::size_t>(grid);
  }
  return out;
}

bool SubmanifoldPatch::interior(std::size_t idx) const {
  if (k() == 0) return false;
  for (int v : grid_index(idx))
    if (v < 2 || v > grid - 3) return false;
  return true;
}

namespace {

std::vector<Vector> parameter_grid(int k, double radius, int grid) {
  std::size_t total = 1;
  for (int a = 0; a < k; ++a) total *= static_cast<std::size_t>(grid);
  const double h = grid > 1 ? 2.0 * radius / (grid - 1) : 0.0;
  std::vector<Vector> out;
  out.reserve(total);
  for (std::size_t i = 0; i < total; ++i) {
    Vector t(k);
    std::size_t rest = i;
    for (int a = k - 1; a >= 0; --a) {
      t[a] = -radius + h * static_cast<double>(rest % static_cast<std::size_t>(grid));
      rest /= static_cast<std::size_t>(grid);
    }
    out.push_back(t);
  }
  return out;
}

constexpr double kFirst[5] = {1.0 / 12, -8.0 / 12, 0.0, 8.0 / 12, -1.0 / 12};
constexpr double kSecond[5] = {-1.0 / 12, 16.0 / 12, -30.0 / 12, 16.0 / 12, -1.0 / 12};

}  // namespace

SubmanifoldPatch make_patch(int ambient_dim, int k, double radius, int grid,
                            const std::function<Point(const Vector&)>& map) {
  if (k < 0 || k > ambient_dim) throw PreconditionError("patch dimension out of range");
  if (grid < 1) throw PreconditionError("patch grid needs at least one node per axis");
  SubmanifoldPatch p;
  p.ambient_dim = ambient_dim;
  p.radius = k == 0 ? 0.0 : radius;
  p.grid = k == 0 ? 1 : grid;
  p.base = map(Vector::Zero(k));
  p.tangent_basis = Matrix::Zero(ambient_dim, k);
  for (const Vector& t : parameter_grid(k, p.radius, p.grid)) p.points.push_back(map(t));
  return p;
}

SubmanifoldPatch trace_component(const Chart& chart, const VectorField& xi, const Point& x, double radius, int grid,
                                 const TraceOptions& opts) {
  const ZeroClassification c = classify_zero(chart, xi, x, opts.classify);
  if (c.verdict != Verdict::KillingInessential)
    throw PreconditionError("zero set tracing needs a killing_inessential zero, got " + std::string(to_string(c.verdict)));
  if (!(c.max_abs_phi_nearby < opts.classify.tol))
    throw PreconditionError("zero set tracing needs a field that is Killing for the chart metric near the zero");

  const LocalGeometry geo(chart, x, 0);
  const Matrix kernel = dxi_kernel(geo, c.dxi);
  const int k = static_cast<int>(kernel.cols());
  SubmanifoldPatch p = make_patch(chart.dim(), k, radius, grid, [&](const Vector& t) -> Point {
    if (k == 0) return x;
    return exp_map(chart, x, kernel * t, opts.steps_per_unit);
  });
  p.base = x;
  p.tangent_basis = kernel;
  for (const Point& q : p.points) {
    const double r = field_norm(chart, xi, q);
    p.zero_residuals.push_back(r);
    if (!(r <= p.max_zero_residual)) p.max_zero_residual = r;
  }
  p.verified = p.max_zero_residual < opts.zero_tol;
  return p;
}

SecondFundamentalForm second_fundamental_form(const Chart& chart, const SubmanifoldPatch& patch, std::size_t sample) {
  const int k = patch.k();
  const int n = patch.ambient_dim;
  if (sample >= patch.points.size()) throw PreconditionError("patch sample index out of range");
  if (!patch.interior(sample))
    throw PreconditionError("second fundamental form needs a sample with two grid neighbours on every side");
  const double h = patch.spacing();
  const std::vector<int> centre = patch.grid_index(sample);
  auto at = [&](int a, int da, int c, int dc) -> const Point& {
    std::vector<int> gi = centre;
    gi[a] += da;
    gi[c] += dc;
    return patch.points[patch.index(gi)];
  };

  SecondFundamentalForm out;
  out.tangents = Matrix::Zero(n, k);
  for (int a = 0; a < k; ++a)
    for (int s = -2; s <= 2; ++s) out.tangents.col(a) += kFirst[s + 2] * at(a, s, a, 0) / h;

  const Point& p = patch.points[sample];
  const LocalGeometry geo(chart, p, 1);
  const Matrix& g = geo.metric();
  out.induced_metric = out.tangents.transpose() * g * out.tangents;

  // Orthonormal tangent frame by modified Gram-Schmidt in g.
  Matrix q = out.tangents;
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < a; ++b) q.col(a) -= q.col(b).dot(g * q.col(a)) * q.col(b);
    const double len = std::sqrt(q.col(a).dot(g * q.col(a)));
    if (!(len > 1e-12 * (1.0 + out.tangents.col(a).norm())))
      throw PreconditionError("degenerate induced metric: patch parametrization is singular");
    q.col(a) /= len;
  }

  auto second = [&](int a, int c) {
    Vector d = Vector::Zero(n);
    if (a == c) {
      for (int s = -2; s <= 2; ++s) d += kSecond[s + 2] * at(a, s, a, 0);
    } else {
      for (int s = -2; s <= 2; ++s)
        for (int r = -2; r <= 2; ++r)
          if (kFirst[s + 2] != 0.0 && kFirst[r + 2] != 0.0) d += kFirst[s + 2] * kFirst[r + 2] * at(a, s, c, r);
    }
    d /= h * h;
    const Vector ta = out.tangents.col(a), tc = out.tangents.col(c);
    for (int m = 0; m < n; ++m)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) d[m] += geo.gamma(m, i, j) * ta[i] * tc[j];
    for (int b = 0; b < k; ++b) d -= q.col(b).dot(g * d) * q.col(b);
    return d;
  };

  out.b.resize(static_cast<std::size_t>(k * k));
  for (int a = 0; a < k; ++a)
    for (int c = 0; c < k; ++c) out.b[a * k + c] = second(a, c);
  for (int a = 0; a < k; ++a)
    for (int c = a + 1; c < k; ++c) {
      const Vector d = out(a, c) - out(c, a);
      out.symmetry_defect = std::max(out.symmetry_defect, std::sqrt(std::max(0.0, d.dot(g * d))));
    }
  return out;
}

std::string_view to_string(UmbilicityVerdict v) {
  switch (v) {
    case UmbilicityVerdict::TotallyUmbilical: return "totally_umbilical";
    case UmbilicityVerdict::NotUmbilical: return "not_umbilical";
    case UmbilicityVerdict::Point: return "point";
  }
  return "unknown";
}

UmbilicityReport umbilicity_report(const Chart& chart, const SubmanifoldPatch& patch, double tol) {
  UmbilicityReport rep;
  rep.tolerance = tol;
  rep.codimension = patch.codimension();
  rep.even_codimension = rep.codimension % 2 == 0;
  const int k = patch.k();
  if (k == 0) {
    rep.verdict = UmbilicityVerdict::Point;
    return rep;
  }
  for (std::size_t s = 0; s < patch.points.size(); ++s) {
    if (!patch.interior(s)) continue;
    const SecondFundamentalForm B = second_fundamental_form(chart, patch, s);
    const Matrix g = metric_value(chart, patch.points[s]);
    const Matrix hinv = B.induced_metric.inverse();
    Vector H = Vector::Zero(patch.ambient_dim);
    for (int a = 0; a < k; ++a)
      for (int c = 0; c < k; ++c) H += hinv(a, c) * B(a, c);
    H /= k;
    std::vector<Vector> R(static_cast<std::size_t>(k * k));
    for (int a = 0; a < k; ++a)
      for (int c = 0; c < k; ++c) R[a * k + c] = B(a, c) - B.induced_metric(a, c) * H;
    double sq = 0.0;
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b)
        for (int c = 0; c < k; ++c)
          for (int d = 0; d < k; ++d) sq += hinv(a, c) * hinv(b, d) * R[a * k + b].dot(g * R[c * k + d]);
    const double res = std::sqrt(std::max(0.0, sq));
    double normal = 0.0;
    for (int a = 0; a < k; ++a) {
      const Vector t = B.tangents.col(a);
      normal = std::max(normal, std::abs(H.dot(g * t)) / std::sqrt(t.dot(g * t)));
    }
    rep.samples.push_back(s);
    rep.residuals.push_back(res);
    rep.mean_curvature_norm.push_back(std::sqrt(std::max(0.0, H.dot(g * H))));
    rep.normality_defect.push_back(normal);
    rep.symmetry_defect.push_back(B.symmetry_defect);
    if (!(res <= rep.max_residual)) rep.max_residual = res;
  }
  if (rep.samples.empty()) throw PreconditionError("patch grid has no interior samples (need at least 5 nodes per axis)");
  rep.verdict = rep.max_residual < tol ? UmbilicityVerdict::TotallyUmbilical : UmbilicityVerdict::NotUmbilical;
  return rep;
}

double umbilicity_conformal_invariance_check(const Chart& chart, const SubmanifoldPatch& patch,
                                             const ScalarField& f) {
  return umbilicity_report(rescale_metric(chart, f), patch).max_residual;
}

}  // namespace cvf
