#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "cvf/geometry.hpp"

namespace cvf {

enum class Verdict { KillingInessential, HomotheticNonkilling, Essential, InvalidNotConformal };

std::string_view to_string(Verdict v);

struct ZeroSearchOptions {
  int grid_resolution = 13;   // nodes per axis
  double tol = 1e-9;          // accept when |xi|_g < tol
  int max_iterations = 50;
  double merge_distance = 1e-6;
  double boundary_margin = 1e-3;
  // Newton is restarted from z +- probe_step * u for every null direction u
  // of the Jacobian at a found zero z, so zero curves and surfaces yield
  // neighbouring points.
  double probe_step = 0.02;
};

/// Multistart damped Newton from the local minima of |xi|_g on a grid over
/// the chart box. Results are merged and sorted lexicographically.
std::vector<Point> find_zeros(const Chart& chart, const VectorField& xi, const ZeroSearchOptions& opts = {});

struct ClassifyOptions {
  double tol = 1e-6;                  // image membership and |phi| threshold
  double zero_tol = 1e-8;             // precondition on |xi(x)|_g
  double conformal_tol = 1e-7;
  double neighborhood_radius = 1e-2;  // conformality is checked at x +- r e_i
};

struct ZeroClassification {
  Point zero;
  double field_norm = 0.0;
  double phi = 0.0;
  Vector dphi;
  Vector grad_phi;
  Matrix nabla_xi;  // (i, j) = (nabla_j xi)^i
  Matrix dxi;       // (a, b) = d_a xi_b - d_b xi_a
  double dxi_norm = 0.0;
  double dphi_norm = 0.0;
  double image_residual = 0.0;
  double image_threshold = 0.0;
  int nabla_rank = 0;
  int dxi_rank = 0;
  int kernel_dim = 0;  // dim ker dxi
  double conformal_residual = 0.0;  // max over the neighbourhood sample
  double max_abs_phi_nearby = 0.0;
  Verdict verdict = Verdict::InvalidNotConformal;
};

/// Essentiality test at a zero. In dimension 2 only fields that are Killing
/// for the chart metric near x are accepted (verdict killing_inessential);
/// anything else throws PreconditionError.
ZeroClassification classify_zero(const Chart& chart, const VectorField& xi, const Point& x,
                                 const ClassifyOptions& opts = {});

/// Kernel of dxi_x as g-orthonormal coordinate vectors (columns).
Matrix dxi_kernel(const LocalGeometry& geo, const Matrix& dxi);

struct AuditEntry {
  ZeroClassification classification;
  bool classified = false;
  std::string error;
  bool isolated = true;
  double nearest_distance = 0.0;  // infinity when alone
};

struct AuditAssertion {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct LimitPointAudit {
  double radius = 0.0;
  std::vector<AuditEntry> entries;
  std::vector<AuditAssertion> assertions;
  bool passed() const;
};

LimitPointAudit limit_point_audit(const Chart& chart, const VectorField& xi, const std::vector<Point>& zeros,
                                  double radius, const ClassifyOptions& opts = {});

}  // namespace cvf
