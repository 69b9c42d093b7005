#include "cvf/models.hpp"

#include "cvf/error.hpp"

namespace cvf::models {

namespace {

void check_dim(int n) {
  if (n < 2) throw PreconditionError("builtin charts need dimension >= 2");
}

void check_axis(int n, int axis, const char* what) {
  if (axis < 0 || axis >= n) throw PreconditionError(std::string(what) + ": axis out of range");
}

Expr var(int i) { return Expr::variable(i); }
Expr num(double v) { return Expr::constant(v); }

Expr radius_squared(int n) {
  Expr r = pow(var(0), 2);
  for (int i = 1; i < n; ++i) r = r + pow(var(i), 2);
  return r;
}

Chart conformally_flat(std::string name, int n, const Expr& factor, double half_width, std::optional<double> ball) {
  std::vector<Expr> metric(static_cast<std::size_t>(n * n), num(0.0));
  for (int i = 0; i < n; ++i) metric[i * n + i] = factor;
  Box box{Point::Constant(n, -half_width), Point::Constant(n, half_width)};
  return Chart(std::move(name), std::move(box), std::move(metric), ball);
}

std::string tag(std::string_view base, std::initializer_list<int> one_based) {
  std::string s(base);
  s += "(";
  bool first = true;
  for (int v : one_based) {
    if (!first) s += ",";
    s += std::to_string(v);
    first = false;
  }
  return s + ")";
}

}  // namespace

Chart euclidean(int n) {
  check_dim(n);
  return conformally_flat(tag("euclidean", {n}), n, num(1.0), 2.0, std::nullopt);
}

Chart sphere_stereographic(int n) {
  check_dim(n);
  return conformally_flat(tag("sphere_stereographic", {n}), n, num(4.0) / pow(num(1.0) + radius_squared(n), 2), 3.0,
                          3.0);
}

Chart hyperbolic_ball(int n) {
  check_dim(n);
  return conformally_flat(tag("hyperbolic_ball", {n}), n, num(4.0) / pow(num(1.0) - radius_squared(n), 2), 0.9, 0.9);
}

VectorField translation(int n, int axis) {
  check_axis(n, axis, "translation");
  std::vector<Expr> c(n, num(0.0));
  c[axis] = num(1.0);
  return VectorField(tag("translation", {axis + 1}), std::move(c));
}

VectorField rotation(int n, int i, int j) {
  check_axis(n, i, "rotation");
  check_axis(n, j, "rotation");
  if (i == j) throw PreconditionError("rotation needs two distinct axes");
  std::vector<Expr> c(n, num(0.0));
  c[j] = var(i);
  c[i] = -var(j);
  return VectorField(tag("rotation", {i + 1, j + 1}), std::move(c));
}

VectorField euler(int n) {
  std::vector<Expr> c;
  for (int i = 0; i < n; ++i) c.push_back(var(i));
  return VectorField("euler", std::move(c));
}

VectorField special_conformal(int n, int axis) {
  check_axis(n, axis, "special_conformal");
  const Expr r2 = radius_squared(n);
  std::vector<Expr> c;
  for (int i = 0; i < n; ++i) {
    Expr comp = num(-2.0) * var(axis) * var(i);
    if (i == axis) comp = r2 + comp;
    c.push_back(comp);
  }
  return VectorField(tag("special_conformal", {axis + 1}), std::move(c));
}

VectorField sphere_killing(int n, int i, int j) {
  if (i > j) std::swap(i, j);
  if (i < 0 || j > n || i == j) throw PreconditionError("sphere_killing: axes must be distinct and within 1..n+1");
  if (j < n) {
    VectorField rot = rotation(n, i, j);
    return VectorField(tag("sphere_killing", {i + 1, j + 1}), rot.components());
  }
  // Rotation towards the projection pole: 1/2 (e_i - special_conformal(e_i)).
  const Expr r2 = radius_squared(n);
  std::vector<Expr> c;
  for (int k = 0; k < n; ++k) {
    Expr comp = var(i) * var(k);
    if (k == i) comp = num(0.5) * (num(1.0) - r2) + comp;
    c.push_back(comp);
  }
  return VectorField(tag("sphere_killing", {i + 1, j + 1}), std::move(c));
}

VectorField remark_example(int n) {
  VectorField k = special_conformal(n, 0);
  return VectorField("remark_example", k.components());
}

Chart make_chart(std::string_view name, int n) {
  if (name == "euclidean") return euclidean(n);
  if (name == "sphere_stereographic") return sphere_stereographic(n);
  if (name == "hyperbolic_ball") return hyperbolic_ball(n);
  throw PreconditionError("unknown builtin chart '" + std::string(name) + "'");
}

VectorField make_field(std::string_view name, int n, std::span<const int> params) {
  auto need = [&](std::size_t count) {
    if (params.size() != count)
      throw PreconditionError("field '" + std::string(name) + "' takes " + std::to_string(count) + " parameter(s)");
  };
  if (name == "translation") {
    need(1);
    return translation(n, params[0] - 1);
  }
  if (name == "rotation") {
    need(2);
    return rotation(n, params[0] - 1, params[1] - 1);
  }
  if (name == "euler") {
    need(0);
    return euler(n);
  }
  if (name == "special_conformal") {
    need(1);
    return special_conformal(n, params[0] - 1);
  }
  if (name == "sphere_killing") {
    need(2);
    return sphere_killing(n, params[0] - 1, params[1] - 1);
  }
  if (name == "remark_example") {
    need(0);
    return remark_example(n);
  }
  throw PreconditionError("unknown builtin field '" + std::string(name) + "'");
}

std::vector<std::string> chart_names() { return {"euclidean", "sphere_stereographic", "hyperbolic_ball"}; }

std::vector<std::string> field_names() {
  return {"translation", "rotation", "euler", "special_conformal", "sphere_killing", "remark_example"};
}

Scenario remark_scenario(int n) {
  Chart chart = sphere_stereographic(n);
  VectorField field = remark_example(n);
  return {chart.name() + "/" + field.name(), chart, field};
}

std::vector<Scenario> catalog_scenarios(int n) {
  const std::vector<Chart> charts = {euclidean(n), sphere_stereographic(n), hyperbolic_ball(n)};
  const std::vector<VectorField> fields = {translation(n, 0),       rotation(n, 0, 1),
                                           euler(n),                special_conformal(n, 0),
                                           sphere_killing(n, n - 1, n), remark_example(n)};
  std::vector<Scenario> out;
  for (const Chart& c : charts)
    for (const VectorField& f : fields) out.push_back({c.name() + "/" + f.name(), c, f});
  return out;
}

Point inversion_transition(const Point& p) {
  const double r2 = p.squaredNorm();
  if (r2 == 0.0) throw PreconditionError("inversion is undefined at the origin");
  return p / r2;
}

VectorField pushforward_under_inversion(const VectorField& field) {
  const int n = field.dim();
  const Expr r2 = radius_squared(n);
  std::vector<Expr> inverted;
  for (int i = 0; i < n; ++i) inverted.push_back(var(i) / r2);
  std::vector<Expr> pulled;
  for (int j = 0; j < n; ++j) pulled.push_back(substitute(field.component(j), inverted));
  std::vector<Expr> out;
  for (int i = 0; i < n; ++i) {
    Expr sum = num(0.0);
    for (int j = 0; j < n; ++j) {
      Expr jac = num(-2.0) * var(i) * var(j);
      if (i == j) jac = r2 + jac;
      sum = sum + jac * pulled[j];
    }
    out.push_back(sum);
  }
  return VectorField("pushforward(" + field.name() + ")", std::move(out));
}

}  // namespace cvf::models
