#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "cvf/expr.hpp"

namespace cvf::oracle {

using Fn = std::function<double(const std::vector<double>&)>;

/// Random expression whose real domain contains [-1, 1]^dim: denominators,
/// log and sqrt arguments are kept bounded away from zero.
inline Expr random_expr(std::mt19937_64& rng, int dim, int depth) {
  std::uniform_int_distribution<int> var(0, dim - 1);
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  if (depth <= 0) {
    if (rng() % 3 == 0) return Expr::constant(coef(rng));
    return Expr::variable(var(rng));
  }
  auto sub = [&] { return random_expr(rng, dim, depth - 1); };
  switch (rng() % 10) {
    case 0: return sub() + sub();
    case 1: return sub() - sub();
    case 2: return sub() * sub();
    case 3: return sub() / (Expr::constant(1.5) + cos(sub()));
    case 4: return pow(sub(), 2 + static_cast<int>(rng() % 2));
    case 5: return sin(sub());
    case 6: return cos(sub());
    case 7: return exp(Expr::constant(0.5) * sin(sub()));
    case 8: return log(Expr::constant(2.0) + sin(sub()));
    default: return sqrt(Expr::constant(1.0) + pow(sub(), 2));
  }
}

inline Fn as_function(const Expr& e) {
  return [e](const std::vector<double>& x) { return evaluate(e, x); };
}

/// Richardson-extrapolated central difference of d_i f.
inline double fd_first(const Fn& f, std::vector<double> x, int i, double h) {
  auto d = [&](double s) {
    std::vector<double> a = x, b = x;
    a[i] += s;
    b[i] -= s;
    return (f(a) - f(b)) / (2 * s);
  };
  return (4 * d(h) - d(2 * h)) / 3;
}

/// Richardson-extrapolated central difference of d_i d_j f.
inline double fd_second(const Fn& f, std::vector<double> x, int i, int j, double h) {
  auto d = [&](double s) {
    if (i == j) {
      std::vector<double> a = x, b = x;
      a[i] += s;
      b[i] -= s;
      return (f(a) - 2 * f(x) + f(b)) / (s * s);
    }
    auto at = [&](double si, double sj) {
      std::vector<double> y = x;
      y[i] += si;
      y[j] += sj;
      return f(y);
    };
    return (at(s, s) - at(s, -s) - at(-s, s) + at(-s, -s)) / (4 * s * s);
  };
  return (4 * d(h) - d(2 * h)) / 3;
}

inline double relative_error(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace cvf::oracle
