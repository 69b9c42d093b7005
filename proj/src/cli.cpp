#include "cvf/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "cvf/conformal.hpp"
#include "cvf/essential.hpp"
#include "cvf/geodesic.hpp"
#include "cvf/models.hpp"
#include "cvf/zeroset.hpp"

namespace cvf::cli {

namespace {

const std::vector<std::string> kAnalyses = {"check-conformal", "zeros",      "classify",
                                            "verify-identities", "trace", "umbilicity"};

Json point_json(const Vector& p) {
  Json a = Json::array();
  for (int i = 0; i < p.size(); ++i) a.push_back(p[i]);
  return a;
}

Json matrix_json(const Matrix& m) {
  Json a = Json::array();
  for (int i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    a.push_back(row);
  }
  return a;
}

[[noreturn]] void bad(const std::string& what) { throw ManifestError(what); }

void only_keys(const Json& obj, const std::string& where, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) bad(where + " must be an object");
  for (const auto& [k, v] : obj.items())
    if (std::none_of(keys.begin(), keys.end(), [&](const char* key) { return k == key; }))
      bad("unknown key '" + k + "' in " + where);
}

double number(const Json& obj, const char* key, double fallback, bool positive = true) {
  if (!obj.contains(key)) return fallback;
  const Json& v = obj.at(key);
  if (!v.is_number()) bad(std::string("'") + key + "' must be a number");
  const double d = v.get<double>();
  if (positive && !(d > 0.0)) bad(std::string("'") + key + "' must be positive");
  return d;
}

int count(const Json& obj, const char* key, int fallback, int minimum) {
  if (!obj.contains(key)) return fallback;
  const Json& v = obj.at(key);
  if (!v.is_number_integer()) bad(std::string("'") + key + "' must be an integer");
  const long long n = v.get<long long>();
  if (n < minimum || n > 1000000) bad(std::string("'") + key + "' is out of range");
  return static_cast<int>(n);
}

Expr expression(const Json& v, int dim, const std::string& where) {
  if (!v.is_string()) bad(where + " must be an expression string");
  try {
    return parse(v.get<std::string>(), dim);
  } catch (const ParseError& e) {
    bad(where + ": " + e.what());
  }
}

Vector number_list(const Json& v, int dim, const std::string& where) {
  if (!v.is_array() || static_cast<int>(v.size()) != dim) bad(where + " must be an array of " + std::to_string(dim) + " numbers");
  Vector out(dim);
  for (int i = 0; i < dim; ++i) {
    if (!v[i].is_number()) bad(where + " must contain numbers");
    out[i] = v[i].get<double>();
  }
  return out;
}

Chart chart_from(const Json& c) {
  if (!c.is_object()) bad("'chart' must be an object");
  if (!c.contains("dim") || !c.at("dim").is_number_integer()) bad("chart needs an integer 'dim'");
  const long long dim = c.at("dim").get<long long>();
  if (dim < 2 || dim > 8) bad("chart dimension must be between 2 and 8");
  const int n = static_cast<int>(dim);
  try {
    if (c.contains("builtin")) {
      only_keys(c, "chart", {"builtin", "dim"});
      if (!c.at("builtin").is_string()) bad("chart 'builtin' must be a string");
      return models::make_chart(c.at("builtin").get<std::string>(), n);
    }
    only_keys(c, "chart", {"dim", "metric", "domain", "name"});
    if (!c.contains("metric") || !c.contains("domain")) bad("inline chart needs 'metric' and 'domain'");
    const Json& m = c.at("metric");
    if (!m.is_array() || static_cast<int>(m.size()) != n) bad("'metric' must be a " + std::to_string(n) + "x" + std::to_string(n) + " array");
    std::vector<Expr> metric;
    for (int i = 0; i < n; ++i) {
      if (!m[i].is_array() || static_cast<int>(m[i].size()) != n) bad("'metric' rows must have " + std::to_string(n) + " entries");
      for (int j = 0; j < n; ++j)
        metric.push_back(expression(m[i][j], n, "metric[" + std::to_string(i) + "][" + std::to_string(j) + "]"));
    }
    const Json& d = c.at("domain");
    only_keys(d, "domain", {"lower", "upper", "ball_radius"});
    if (!d.contains("lower") || !d.contains("upper")) bad("domain needs 'lower' and 'upper'");
    Box box{number_list(d.at("lower"), n, "domain.lower"), number_list(d.at("upper"), n, "domain.upper")};
    std::optional<double> ball;
    if (d.contains("ball_radius")) ball = number(d, "ball_radius", 0.0);
    std::string name = "inline";
    if (c.contains("name")) {
      if (!c.at("name").is_string()) bad("chart 'name' must be a string");
      name = c.at("name").get<std::string>();
    }
    return Chart(name, box, std::move(metric), ball);
  } catch (const ManifestError&) {
    throw;
  } catch (const Error& e) {
    bad(std::string("chart: ") + e.what());
  }
}

VectorField field_from(const Json& f, int n) {
  if (!f.is_object()) bad("'field' must be an object");
  try {
    if (f.contains("builtin")) {
      only_keys(f, "field", {"builtin", "params"});
      if (!f.at("builtin").is_string()) bad("field 'builtin' must be a string");
      std::vector<int> params;
      if (f.contains("params")) {
        if (!f.at("params").is_array()) bad("field 'params' must be an array of integers");
        for (const Json& p : f.at("params")) {
          if (!p.is_number_integer()) bad("field 'params' must be an array of integers");
          params.push_back(p.get<int>());
        }
      }
      return models::make_field(f.at("builtin").get<std::string>(), n, params);
    }
    only_keys(f, "field", {"components", "name"});
    if (!f.contains("components")) bad("inline field needs 'components'");
    const Json& comps = f.at("components");
    if (!comps.is_array() || static_cast<int>(comps.size()) != n)
      bad("'components' must hold " + std::to_string(n) + " expressions");
    std::vector<Expr> c;
    for (int i = 0; i < n; ++i) c.push_back(expression(comps[i], n, "components[" + std::to_string(i) + "]"));
    std::string name = "inline";
    if (f.contains("name")) {
      if (!f.at("name").is_string()) bad("field 'name' must be a string");
      name = f.at("name").get<std::string>();
    }
    return VectorField(name, std::move(c));
  } catch (const ManifestError&) {
    throw;
  } catch (const Error& e) {
    bad(std::string("field: ") + e.what());
  }
}

// Zeros farthest from the boundary first, at most `limit`.
std::vector<std::size_t> interior_first(const Chart& chart, const std::vector<Point>& zeros, std::size_t limit,
                                        double min_distance) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < zeros.size(); ++i)
    if (chart.boundary_distance(zeros[i]) > min_distance) idx.push_back(i);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return chart.boundary_distance(zeros[a]) > chart.boundary_distance(zeros[b]);
  });
  if (idx.size() > limit) idx.resize(limit);
  std::sort(idx.begin(), idx.end());
  return idx;
}

class Runner {
 public:
  explicit Runner(const Manifest& m) : m_(m) {}

  Json analysis(const std::string& name) {
    if (name == "check-conformal") return check_conformal();
    if (name == "zeros") return zeros_report();
    if (name == "classify") return classify();
    if (name == "verify-identities") return identities();
    if (name == "trace") return trace();
    if (name == "umbilicity") return umbilicity();
    throw ManifestError("unknown analysis '" + name + "'");
  }

 private:
  ClassifyOptions classify_options() const {
    ClassifyOptions o;
    o.tol = m_.tol.classification;
    o.zero_tol = std::max(m_.tol.zero, 1e-12);
    o.conformal_tol = m_.tol.conformal;
    return o;
  }

  const std::vector<Point>& zeros() {
    if (!zeros_) {
      ZeroSearchOptions o;
      o.grid_resolution = m_.grid_resolution;
      o.tol = m_.tol.zero;
      zeros_ = find_zeros(m_.chart, m_.field, o);
    }
    return *zeros_;
  }

  const LimitPointAudit& audit() {
    if (!audit_) audit_ = limit_point_audit(m_.chart, m_.field, zeros(), m_.tol.isolation_radius, classify_options());
    return *audit_;
  }

  Json check_conformal() {
    const auto pts = sample_interior(m_.chart, static_cast<std::size_t>(m_.conformal_samples), m_.seed);
    const ConformalReport r = is_conformal(m_.chart, m_.field, pts, m_.tol.conformal);
    Json rows = Json::array();
    for (std::size_t i = 0; i < pts.size(); ++i) rows.push_back({{"point", point_json(pts[i])}, {"residual", r.residuals[i]}});
    return {{"status", r.conformal ? "pass" : "fail"},
            {"tolerance", r.tolerance},
            {"max_residual", r.max_residual},
            {"worst_point", point_json(pts[r.worst_index])},
            {"conformal", r.conformal},
            {"samples", rows}};
  }

  Json zeros_report() {
    Json list = Json::array();
    bool ok = true;
    for (const Point& z : zeros()) {
      const double r = field_norm(m_.chart, m_.field, z);
      ok = ok && r < m_.tol.zero;
      list.push_back({{"point", point_json(z)}, {"field_norm", r}});
    }
    return {{"status", ok ? "pass" : "fail"},
            {"tolerance", m_.tol.zero},
            {"grid_resolution", m_.grid_resolution},
            {"count", zeros().size()},
            {"zeros", list}};
  }

  Json classify() {
    const LimitPointAudit& a = audit();
    Json list = Json::array();
    bool ok = true;
    for (const AuditEntry& e : a.entries) {
      const ZeroClassification& c = e.classification;
      Json j = {{"point", point_json(c.zero)},
                {"isolated", e.isolated},
                {"nearest_zero_distance", e.nearest_distance}};
      if (!e.classified) {
        ok = false;
        j["error"] = e.error;
      } else {
        if (c.verdict == Verdict::InvalidNotConformal) ok = false;
        j["verdict"] = std::string(to_string(c.verdict));
        j["phi"] = c.phi;
        j["dphi"] = point_json(c.dphi);
        j["dphi_norm"] = c.dphi_norm;
        j["grad_phi"] = point_json(c.grad_phi);
        j["nabla_xi"] = matrix_json(c.nabla_xi);
        j["dxi"] = matrix_json(c.dxi);
        j["dxi_norm"] = c.dxi_norm;
        j["image_residual"] = c.image_residual;
        j["image_threshold"] = c.image_threshold;
        j["kernel_dim"] = c.kernel_dim;
        j["dxi_rank"] = c.dxi_rank;
        j["neighborhood_conformal_residual"] = c.conformal_residual;
      }
      list.push_back(j);
    }
    Json assertions = Json::array();
    for (const AuditAssertion& s : a.assertions)
      assertions.push_back({{"name", s.name}, {"passed", s.passed}, {"detail", s.detail}});
    ok = ok && a.passed();
    return {{"status", ok ? "pass" : "fail"},
            {"tolerance", m_.tol.classification},
            {"isolation_radius", a.radius},
            {"zeros", list},
            {"audit", assertions}};
  }

  Json identities() {
    bool ok = true;
    PointSampler sampler(m_.seed);
    double lemma_max = 0.0;
    Json lemma_rows = Json::array();
    for (int i = 0; i < m_.identity_samples; ++i) {
      const Point p = sampler.interior_point(m_.chart, 0.05);
      const Vector X = sampler.unit_vector(LocalGeometry(m_.chart, p, 0));
      const double r = lemma_dxi_residual(m_.chart, m_.field, p, X);
      if (!(r <= lemma_max)) lemma_max = r;
      lemma_rows.push_back({{"point", point_json(p)}, {"X", point_json(X)}, {"residual", r}});
    }
    ok = ok && lemma_max < m_.tol.lemma;

    TaylorOptions to;
    to.fd_step = m_.fd_step;
    to.steps_per_unit = m_.steps_per_unit;
    to.zero_tol = std::max(m_.tol.zero, 1e-12);
    Json taylor = Json::array();
    const auto& z = zeros();
    for (std::size_t i : interior_first(m_.chart, z, static_cast<std::size_t>(m_.max_checked_zeros), 0.25)) {
      const LocalGeometry geo(m_.chart, z[i], 0);
      for (int d = 0; d < m_.taylor_directions; ++d) {
        const Vector v = sampler.unit_vector(geo);
        const ScalarTaylorCheck s = taylor_scalar_check(m_.chart, m_.field, z[i], v, to);
        const VectorTaylorCheck w = taylor_vector_check(m_.chart, m_.field, z[i], v, to);
        const bool pass = s.first_residual < m_.tol.taylor_first && s.remainder_order >= m_.tol.remainder_order &&
                          w.first_residual < m_.tol.taylor_first && w.second_residual < m_.tol.taylor_second;
        ok = ok && pass;
        taylor.push_back({{"zero", point_json(z[i])},
                          {"direction", point_json(v)},
                          {"phi", s.phi},
                          {"f_prime", s.f_prime},
                          {"f_second", s.f_second},
                          {"scalar_first_residual", s.first_residual},
                          {"remainder_order", s.remainder_order},
                          {"vector_first_residual", w.first_residual},
                          {"vector_second_residual", w.second_residual},
                          {"passed", pass}});
      }
    }
    return {{"status", ok ? "pass" : "fail"},
            {"lemma", {{"tolerance", m_.tol.lemma}, {"max_residual", lemma_max}, {"samples", lemma_rows}}},
            {"taylor",
             {{"first_tolerance", m_.tol.taylor_first},
              {"second_tolerance", m_.tol.taylor_second},
              {"min_remainder_order", m_.tol.remainder_order},
              {"fd_step", m_.fd_step},
              {"checks", taylor}}}};
  }

  struct Traced {
    std::size_t zero;
    SubmanifoldPatch patch;
  };

  const std::vector<Traced>& patches() {
    if (traced_) return *traced_;
    traced_.emplace();
    const LimitPointAudit& a = audit();
    std::vector<Point> eligible;
    std::vector<std::size_t> origin;
    for (std::size_t i = 0; i < a.entries.size(); ++i) {
      const AuditEntry& e = a.entries[i];
      if (e.classified && e.classification.verdict == Verdict::KillingInessential &&
          e.classification.max_abs_phi_nearby < m_.tol.classification) {
        eligible.push_back(zeros()[i]);
        origin.push_back(i);
      }
    }
    TraceOptions to;
    to.classify = classify_options();
    to.steps_per_unit = m_.steps_per_unit;
    to.zero_tol = m_.tol.trace_zero;
    for (std::size_t j : interior_first(m_.chart, eligible, static_cast<std::size_t>(m_.max_traced), 0.0)) {
      traced_->push_back({origin[j], trace_component(m_.chart, m_.field, eligible[j], m_.trace_radius, m_.trace_grid, to)});
    }
    return *traced_;
  }

  Json trace() {
    bool ok = true;
    Json list = Json::array();
    for (const Traced& t : patches()) {
      const SubmanifoldPatch& p = t.patch;
      const bool parity = p.k() == 0 || p.codimension() % 2 == 0;
      ok = ok && p.verified && parity;
      Json pts = Json::array();
      for (const Point& q : p.points) pts.push_back(point_json(q));
      list.push_back({{"zero", point_json(p.base)},
                      {"k", p.k()},
                      {"isolated", p.isolated()},
                      {"codimension", p.codimension()},
                      {"even_codimension", p.codimension() % 2 == 0},
                      {"tangent_basis", matrix_json(p.tangent_basis)},
                      {"radius", p.radius},
                      {"grid", p.grid},
                      {"max_zero_residual", p.max_zero_residual},
                      {"verified", p.verified},
                      {"points", pts}});
    }
    return {{"status", ok ? "pass" : "fail"}, {"zero_tolerance", m_.tol.trace_zero}, {"components", list}};
  }

  Json umbilicity() {
    bool ok = true;
    Json list = Json::array();
    for (const Traced& t : patches()) {
      const SubmanifoldPatch& p = t.patch;
      const UmbilicityReport r = umbilicity_report(m_.chart, p, m_.tol.umbilicity);
      ok = ok && r.verdict != UmbilicityVerdict::NotUmbilical;
      const double h = r.mean_curvature_norm.empty()
                           ? 0.0
                           : *std::max_element(r.mean_curvature_norm.begin(), r.mean_curvature_norm.end());
      const double sym = r.symmetry_defect.empty() ? 0.0 : *std::max_element(r.symmetry_defect.begin(), r.symmetry_defect.end());
      list.push_back({{"zero", point_json(p.base)},
                      {"k", p.k()},
                      {"verdict", std::string(to_string(r.verdict))},
                      {"max_residual", r.max_residual},
                      {"max_mean_curvature", h},
                      {"max_symmetry_defect", sym},
                      {"codimension", r.codimension},
                      {"even_codimension", r.even_codimension},
                      {"interior_samples", r.samples.size()}});
    }
    return {{"status", ok ? "pass" : "fail"}, {"tolerance", m_.tol.umbilicity}, {"components", list}};
  }

  const Manifest& m_;
  std::optional<std::vector<Point>> zeros_;
  std::optional<LimitPointAudit> audit_;
  std::optional<std::vector<Traced>> traced_;
};

void write_json(std::ostringstream& os, const Json& j, int indent) {
  const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
  const std::string close(static_cast<std::size_t>(indent), ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      bool first = true;
      for (const auto& [k, v] : j.items()) {
        if (!first) os << ",\n";
        first = false;
        os << pad << Json(k).dump() << ": ";
        write_json(os, v, indent + 2);
      }
      os << "\n" << close << "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      const bool flat = std::all_of(j.begin(), j.end(), [](const Json& e) { return e.is_primitive(); });
      if (flat) {
        os << "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) os << ", ";
          write_json(os, j[i], indent + 2);
        }
        os << "]";
        return;
      }
      os << "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) os << ",\n";
        os << pad;
        write_json(os, j[i], indent + 2);
      }
      os << "\n" << close << "]";
      return;
    }
    case Json::value_t::number_float: {
      const double d = j.get<double>();
      if (!std::isfinite(d)) {
        os << "null";
        return;
      }
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", d);
      std::string s = buf;
      if (s.find_first_of(".eE") == std::string::npos) s += ".0";
      os << s;
      return;
    }
    default:
      os << j.dump();
  }
}

}  // namespace

const std::vector<std::string>& analysis_names() { return kAnalyses; }

Manifest parse_manifest(const Json& doc, const Overrides& ov) {
  only_keys(doc, "manifest",
            {"chart", "field", "analyses", "tolerances", "samples", "integrator", "search", "trace", "seed"});
  if (!doc.contains("chart")) bad("manifest needs a 'chart'");
  if (!doc.contains("field")) bad("manifest needs a 'field'");
  if (!doc.contains("analyses")) bad("manifest needs 'analyses'");

  Chart chart = chart_from(doc.at("chart"));
  VectorField field = field_from(doc.at("field"), chart.dim());
  Manifest m{doc, std::move(chart), std::move(field), {}, {}};

  const Json& an = doc.at("analyses");
  if (!an.is_array() || an.empty()) bad("'analyses' must be a non-empty array");
  for (const Json& a : an) {
    if (!a.is_string()) bad("'analyses' entries must be strings");
    const std::string s = a.get<std::string>();
    if (s == "all") {
      for (const std::string& x : kAnalyses)
        if (std::find(m.analyses.begin(), m.analyses.end(), x) == m.analyses.end()) m.analyses.push_back(x);
    } else if (std::find(kAnalyses.begin(), kAnalyses.end(), s) != kAnalyses.end()) {
      if (std::find(m.analyses.begin(), m.analyses.end(), s) == m.analyses.end()) m.analyses.push_back(s);
    } else {
      bad("unknown analysis '" + s + "'");
    }
  }

  if (doc.contains("tolerances")) {
    const Json& t = doc.at("tolerances");
    only_keys(t, "tolerances",
              {"zero", "classification", "conformal", "isolation_radius", "lemma", "taylor_first", "taylor_second",
               "remainder_order", "umbilicity", "trace_zero"});
    m.tol.zero = number(t, "zero", m.tol.zero);
    m.tol.classification = number(t, "classification", m.tol.classification);
    m.tol.conformal = number(t, "conformal", m.tol.conformal);
    m.tol.isolation_radius = number(t, "isolation_radius", m.tol.isolation_radius);
    m.tol.lemma = number(t, "lemma", m.tol.lemma);
    m.tol.taylor_first = number(t, "taylor_first", m.tol.taylor_first);
    m.tol.taylor_second = number(t, "taylor_second", m.tol.taylor_second);
    m.tol.remainder_order = number(t, "remainder_order", m.tol.remainder_order);
    m.tol.umbilicity = number(t, "umbilicity", m.tol.umbilicity);
    m.tol.trace_zero = number(t, "trace_zero", m.tol.trace_zero);
  }
  if (doc.contains("samples")) {
    const Json& s = doc.at("samples");
    only_keys(s, "samples", {"conformal", "identities", "taylor_directions", "max_checked_zeros"});
    m.conformal_samples = count(s, "conformal", m.conformal_samples, 1);
    m.identity_samples = count(s, "identities", m.identity_samples, 0);
    m.taylor_directions = count(s, "taylor_directions", m.taylor_directions, 0);
    m.max_checked_zeros = count(s, "max_checked_zeros", m.max_checked_zeros, 0);
  }
  if (doc.contains("integrator")) {
    const Json& g = doc.at("integrator");
    only_keys(g, "integrator", {"steps_per_unit", "fd_step"});
    m.steps_per_unit = count(g, "steps_per_unit", m.steps_per_unit, 1);
    m.fd_step = number(g, "fd_step", m.fd_step);
  }
  if (doc.contains("search")) {
    const Json& g = doc.at("search");
    only_keys(g, "search", {"grid_resolution"});
    m.grid_resolution = count(g, "grid_resolution", m.grid_resolution, 2);
  }
  if (doc.contains("trace")) {
    const Json& g = doc.at("trace");
    only_keys(g, "trace", {"radius", "grid", "max_traced"});
    m.trace_radius = number(g, "radius", m.trace_radius);
    m.trace_grid = count(g, "grid", m.trace_grid, 1);
    m.max_traced = count(g, "max_traced", m.max_traced, 0);
  }
  if (doc.contains("seed")) {
    const Json& s = doc.at("seed");
    if (!s.is_number_unsigned()) bad("'seed' must be a non-negative integer");
    m.seed = s.get<std::uint64_t>();
  }

  if (ov.zero_tol) m.tol.zero = *ov.zero_tol;
  if (ov.class_tol) m.tol.classification = *ov.class_tol;
  if (ov.isolation_radius) m.tol.isolation_radius = *ov.isolation_radius;
  if (ov.geo_steps) m.steps_per_unit = *ov.geo_steps;
  if (ov.fd_step) m.fd_step = *ov.fd_step;
  if (ov.seed) m.seed = *ov.seed;
  if (!(m.tol.zero > 0) || !(m.tol.classification > 0) || !(m.tol.isolation_radius > 0) || m.steps_per_unit < 1 ||
      !(m.fd_step > 0))
    bad("tolerances and integrator settings must be positive");
  return m;
}

Manifest load_manifest(const std::string& path, const Overrides& overrides) {
  std::ifstream in(path);
  if (!in) throw ManifestError("cannot open manifest '" + path + "'");
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ManifestError(std::string("manifest is not valid JSON: ") + e.what());
  }
  return parse_manifest(doc, overrides);
}

Json run(const Manifest& m) {
  Json settings = {{"seed", m.seed},
                   {"sampler", "mt19937_64"},
                   {"tolerances",
                    {{"zero", m.tol.zero},
                     {"classification", m.tol.classification},
                     {"conformal", m.tol.conformal},
                     {"isolation_radius", m.tol.isolation_radius},
                     {"lemma", m.tol.lemma},
                     {"taylor_first", m.tol.taylor_first},
                     {"taylor_second", m.tol.taylor_second},
                     {"remainder_order", m.tol.remainder_order},
                     {"umbilicity", m.tol.umbilicity},
                     {"trace_zero", m.tol.trace_zero}}},
                   {"integrator", {{"steps_per_unit", m.steps_per_unit}, {"fd_step", m.fd_step}}},
                   {"search", {{"grid_resolution", m.grid_resolution}}},
                   {"trace", {{"radius", m.trace_radius}, {"grid", m.trace_grid}, {"max_traced", m.max_traced}}}};
  Json components = Json::array();
  for (const Expr& e : m.field.components()) components.push_back(e.str());
  Json report = {{"manifest", m.source},
                 {"settings", settings},
                 {"chart", {{"name", m.chart.name()}, {"dim", m.chart.dim()}}},
                 {"field", {{"name", m.field.name()}, {"components", components}}},
                 {"analyses", Json::object()}};
  Runner runner(m);
  bool ok = true;
  for (const std::string& name : m.analyses) {
    Json r;
    try {
      r = runner.analysis(name);
    } catch (const ManifestError&) {
      throw;
    } catch (const std::exception& e) {
      throw AnalysisError(name, e.what());
    }
    ok = ok && r.at("status") == "pass";
    report["analyses"][name] = std::move(r);
  }
  report["status"] = ok ? "pass" : "fail";
  return report;
}

std::string dump(const Json& doc) {
  std::ostringstream os;
  write_json(os, doc, 0);
  os << "\n";
  return os.str();
}

Json catalog() {
  Json charts = Json::array();
  for (const std::string& c : models::chart_names()) charts.push_back({{"builtin", c}, {"params", {"dim"}}});
  const std::map<std::string, Json> params = {
      {"translation", {"k"}}, {"rotation", {"i", "j"}}, {"euler", Json::array()},
      {"special_conformal", {"k"}}, {"sphere_killing", {"i", "j (up to dim+1)"}}, {"remark_example", Json::array()}};
  Json fields = Json::array();
  for (const std::string& f : models::field_names()) fields.push_back({{"builtin", f}, {"params", params.at(f)}});
  return {{"charts", charts}, {"fields", fields}, {"analyses", kAnalyses}};
}

Json schema() {
  const Json positive = {{"type", "number"}, {"exclusiveMinimum", 0}};
  const Json expr = {{"type", "string"}, {"description", "expression in x1..xn: + - * / ^int sin cos exp log sqrt"}};
  const Json vec = {{"type", "array"}, {"items", {{"type", "number"}}}};
  Json analyses_enum = kAnalyses;
  analyses_enum.push_back("all");

  Json manifest = {
      {"type", "object"},
      {"additionalProperties", false},
      {"required", {"chart", "field", "analyses"}},
      {"properties",
       {{"chart",
         {{"oneOf",
           {{{"type", "object"},
             {"additionalProperties", false},
             {"required", {"builtin", "dim"}},
             {"properties",
              {{"builtin", {{"enum", models::chart_names()}}}, {"dim", {{"type", "integer"}, {"minimum", 2}}}}}},
            {{"type", "object"},
             {"additionalProperties", false},
             {"required", {"dim", "metric", "domain"}},
             {"properties",
              {{"name", {{"type", "string"}}},
               {"dim", {{"type", "integer"}, {"minimum", 2}}},
               {"metric", {{"type", "array"}, {"items", {{"type", "array"}, {"items", expr}}}}},
               {"domain",
                {{"type", "object"},
                 {"additionalProperties", false},
                 {"required", {"lower", "upper"}},
                 {"properties", {{"lower", vec}, {"upper", vec}, {"ball_radius", positive}}}}}}}}}}}},
        {"field",
         {{"oneOf",
           {{{"type", "object"},
             {"additionalProperties", false},
             {"required", {"builtin"}},
             {"properties",
              {{"builtin", {{"enum", models::field_names()}}},
               {"params", {{"type", "array"}, {"items", {{"type", "integer"}}}}}}}},
            {{"type", "object"},
             {"additionalProperties", false},
             {"required", {"components"}},
             {"properties", {{"name", {{"type", "string"}}}, {"components", {{"type", "array"}, {"items", expr}}}}}}}}}},
        {"analyses", {{"type", "array"}, {"minItems", 1}, {"items", {{"enum", analyses_enum}}}}},
        {"tolerances",
         {{"type", "object"},
          {"additionalProperties", false},
          {"properties",
           {{"zero", positive}, {"classification", positive}, {"conformal", positive}, {"isolation_radius", positive},
            {"lemma", positive}, {"taylor_first", positive}, {"taylor_second", positive},
            {"remainder_order", positive}, {"umbilicity", positive}, {"trace_zero", positive}}}}},
        {"samples",
         {{"type", "object"},
          {"additionalProperties", false},
          {"properties",
           {{"conformal", {{"type", "integer"}, {"minimum", 1}}},
            {"identities", {{"type", "integer"}, {"minimum", 0}}},
            {"taylor_directions", {{"type", "integer"}, {"minimum", 0}}},
            {"max_checked_zeros", {{"type", "integer"}, {"minimum", 0}}}}}}},
        {"integrator",
         {{"type", "object"},
          {"additionalProperties", false},
          {"properties", {{"steps_per_unit", {{"type", "integer"}, {"minimum", 1}}}, {"fd_step", positive}}}}},
        {"search",
         {{"type", "object"},
          {"additionalProperties", false},
          {"properties", {{"grid_resolution", {{"type", "integer"}, {"minimum", 2}}}}}}},
        {"trace",
         {{"type", "object"},
          {"additionalProperties", false},
          {"properties",
           {{"radius", positive},
            {"grid", {{"type", "integer"}, {"minimum", 1}}},
            {"max_traced", {{"type", "integer"}, {"minimum", 0}}}}}}},
        {"seed",
         {{"type", "integer"},
          {"minimum", 0},
          {"description",
           "seeds std::mt19937_64; a coordinate is lower + (upper - lower) * ((word >> 11) * 2^-53), points drawn "
           "by rejection inside the domain with boundary margin 0.05"}}}}}};

  const Json status = {{"enum", {"pass", "fail"}}};
  const Json analysis = {{"type", "object"}, {"required", {"status"}}, {"properties", {{"status", status}}}};
  Json report = {
      {"type", "object"},
      {"required", {"manifest", "settings", "chart", "field", "analyses", "status"}},
      {"properties",
       {{"manifest", {{"$ref", "#/$defs/manifest"}}},
        {"settings", {{"type", "object"}, {"required", {"seed", "sampler", "tolerances"}}}},
        {"chart",
         {{"type", "object"},
          {"required", {"name", "dim"}},
          {"properties", {{"name", {{"type", "string"}}}, {"dim", {{"type", "integer"}}}}}}},
        {"field",
         {{"type", "object"},
          {"required", {"name", "components"}},
          {"properties", {{"name", {{"type", "string"}}}, {"components", {{"type", "array"}, {"items", expr}}}}}}},
        {"analyses",
         {{"type", "object"},
          {"propertyNames", {{"enum", kAnalyses}}},
          {"additionalProperties", analysis}}},
        {"status", status}}}};

  return {{"$schema", "https://json-schema.org/draft/2020-12/schema"},
          {"title", "cvf manifest and report"},
          {"$defs", {{"manifest", manifest}, {"report", report}}},
          {"anyOf", {{{"$ref", "#/$defs/manifest"}}, {{"$ref", "#/$defs/report"}}}}};
}

int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Conformal vector field analysis"};
  app.require_subcommand(1);

  std::string manifest_path;
  std::string out_path;
  Overrides ov;
  double zero_tol = 0, class_tol = 0, iso = 0, fd = 0;
  int steps = 0;
  std::uint64_t seed = 0;
  CLI::App* run_cmd = app.add_subcommand("run", "Run the analyses listed in a manifest");
  run_cmd->add_option("manifest", manifest_path, "Manifest file (JSON)")->required();
  run_cmd->add_option("--out", out_path, "Write the report here instead of standard output");
  auto* o_zero = run_cmd->add_option("--zero-tol", zero_tol, "Zero acceptance tolerance");
  auto* o_class = run_cmd->add_option("--class-tol", class_tol, "Classification tolerance");
  auto* o_iso = run_cmd->add_option("--isolation-radius", iso, "Isolation radius for the limit point audit");
  auto* o_steps = run_cmd->add_option("--geo-steps", steps, "Geodesic integrator steps per unit time");
  auto* o_fd = run_cmd->add_option("--fd-step", fd, "Finite-difference step for the Taylor checks");
  auto* o_seed = run_cmd->add_option("--seed", seed, "Random seed");
  app.add_subcommand("schema", "Print the JSON Schema for manifests and reports");
  app.add_subcommand("catalog", "List builtin charts, fields and analyses");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  if (app.got_subcommand("schema")) {
    out << dump(schema());
    return 0;
  }
  if (app.got_subcommand("catalog")) {
    out << dump(catalog());
    return 0;
  }

  if (*o_zero) ov.zero_tol = zero_tol;
  if (*o_class) ov.class_tol = class_tol;
  if (*o_iso) ov.isolation_radius = iso;
  if (*o_steps) ov.geo_steps = steps;
  if (*o_fd) ov.fd_step = fd;
  if (*o_seed) ov.seed = seed;

  try {
    const Manifest m = load_manifest(manifest_path, ov);
    const Json report = run(m);
    const std::string text = dump(report);
    if (out_path.empty()) {
      out << text;
    } else {
      std::ofstream f(out_path, std::ios::binary);
      if (!f) {
        err << "error: cannot write " << out_path << "\n";
        return 1;
      }
      f << text;
    }
    if (report.at("status") != "pass") {
      err << "status: fail\n";
      return 1;
    }
    return 0;
  } catch (const ManifestError& e) {
    err << "manifest error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace cvf::cli
