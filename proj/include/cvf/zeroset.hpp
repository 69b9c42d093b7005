#pragma once

#include <functional>
#include <string_view>
#include <vector>

#include "cvf/essential.hpp"
#include "cvf/geometry.hpp"

namespace cvf {

/// Samples of a k-dimensional patch P(t), t in [-radius, radius]^k, on a
/// uniform grid with `grid` nodes per axis. Point index is row-major over the
/// parameter axes (first axis slowest).
struct SubmanifoldPatch {
  Point base;
  int ambient_dim = 0;
  Matrix tangent_basis;  // n x k, columns g-orthonormal at the base point
  double radius = 0.0;
  int grid = 1;
  std::vector<Point> points;
  std::vector<double> zero_residuals;  // |xi|_g per point (traced patches only)
  double max_zero_residual = 0.0;
  bool verified = true;  // every sample is a zero within the trace tolerance

  int k() const { return static_cast<int>(tangent_basis.cols()); }
  int codimension() const { return ambient_dim - k(); }
  bool isolated() const { return k() == 0; }
  double spacing() const { return grid > 1 ? 2.0 * radius / (grid - 1) : 0.0; }
  std::size_t index(const std::vector<int>& grid_index) const;
  std::vector<int> grid_index(std::size_t index) const;
  /// True when every axis index has two neighbours on both sides.
  bool interior(std::size_t index) const;
};

struct TraceOptions {
  ClassifyOptions classify;
  int steps_per_unit = 200;
  double zero_tol = 1e-5;
};

/// Patch exp_x(ker dxi_x) around a Killing-inessential zero of a field that is
/// Killing for the chart metric itself. Throws PreconditionError for other
/// zeros. Each sample is checked to be a zero; see `verified`.
SubmanifoldPatch trace_component(const Chart& chart, const VectorField& xi, const Point& x, double radius, int grid,
                                 const TraceOptions& opts = {});

/// Patch sampled from an explicit parametrization map(t), t in R^k.
SubmanifoldPatch make_patch(int ambient_dim, int k, double radius, int grid,
                            const std::function<Point(const Vector&)>& map);

/// Second fundamental form at one patch sample.
struct SecondFundamentalForm {
  Matrix tangents;         // n x k, columns d_a P
  Matrix induced_metric;   // k x k
  std::vector<Vector> b;   // b[a * k + c] = B(d_a P, d_c P), normal vectors
  double symmetry_defect = 0.0;
  const Vector& operator()(int a, int c) const { return b[static_cast<std::size_t>(a * tangents.cols() + c)]; }
};

/// Normal part of nabla_{d_a P} d_c P from fourth-order central differences
/// of the patch map (step = grid spacing) plus ambient Christoffel symbols.
SecondFundamentalForm second_fundamental_form(const Chart& chart, const SubmanifoldPatch& patch, std::size_t sample);

enum class UmbilicityVerdict { TotallyUmbilical, NotUmbilical, Point };
std::string_view to_string(UmbilicityVerdict v);

struct UmbilicityReport {
  std::vector<std::size_t> samples;
  std::vector<double> residuals;             // |B - H h| per sample
  std::vector<double> mean_curvature_norm;   // |H|_g per sample
  std::vector<double> normality_defect;      // max |g(H, e_a)| over the tangent frame
  std::vector<double> symmetry_defect;
  double max_residual = 0.0;
  double tolerance = 0.0;
  int codimension = 0;
  bool even_codimension = true;
  UmbilicityVerdict verdict = UmbilicityVerdict::Point;
};

UmbilicityReport umbilicity_report(const Chart& chart, const SubmanifoldPatch& patch, double tol = 1e-4);

/// Max umbilicity residual of the same patch on the chart rescaled by e^{2f}.
double umbilicity_conformal_invariance_check(const Chart& chart, const SubmanifoldPatch& patch,
                                             const ScalarField& f);

}  // namespace cvf
