#pragma once

#include <array>
#include <vector>

namespace cvf {

/// Truncated multivariate Taylor data of a scalar function at a point:
/// the value and all partial derivatives up to `order` (at most 3).
///
/// Derivative arrays are stored dense (n, n^2, n^3 entries) and are fully
/// symmetric in their indices. Arithmetic computes only the canonical entries
/// (i <= j <= k) and mirrors them, so symmetry holds bit-for-bit.
class Jet {
 public:
  static constexpr int kMaxOrder = 3;

  Jet() = default;
  Jet(int dim, int order);

  static Jet constant(int dim, int order, double value);
  static Jet variable(int dim, int order, int index, double value);

  int dim() const { return dim_; }
  int order() const { return order_; }

  double value() const { return value_; }
  double d1(int i) const { return d1_[i]; }
  double d2(int i, int j) const { return d2_[i * dim_ + j]; }
  double d3(int i, int j, int k) const { return d3_[(i * dim_ + j) * dim_ + k]; }

  void set_value(double v) { value_ = v; }
  // The setters write every permutation of the index tuple.
  void set_d1(int i, double v) { d1_[i] = v; }
  void set_d2(int i, int j, double v);
  void set_d3(int i, int j, int k, double v);

  /// f(u) where derivs = {f(u0), f'(u0), f''(u0), f'''(u0)} at u0 = u.value().
  friend Jet compose(const Jet& u, const std::array<double, 4>& derivs);

  friend Jet operator+(const Jet& a, const Jet& b);
  friend Jet operator-(const Jet& a, const Jet& b);
  friend Jet operator*(const Jet& a, const Jet& b);
  friend Jet operator-(const Jet& a);
  friend Jet operator*(double s, const Jet& a);

 private:
  int dim_ = 0;
  int order_ = 0;
  double value_ = 0.0;
  std::vector<double> d1_;
  std::vector<double> d2_;
  std::vector<double> d3_;
};

Jet compose(const Jet& u, const std::array<double, 4>& derivs);

}  // namespace cvf
