#include "cvf/jet.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

namespace cvf {

Jet::Jet(int dim, int order) : dim_(dim), order_(order) {
  if (dim < 1) throw std::invalid_argument("jet dimension must be positive");
  if (order < 0 || order > kMaxOrder) throw std::invalid_argument("jet order must be in 0..3");
  if (order >= 1) d1_.assign(dim, 0.0);
  if (order >= 2) d2_.assign(dim * dim, 0.0);
  if (order >= 3) d3_.assign(dim * dim * dim, 0.0);
}

Jet Jet::constant(int dim, int order, double value) {
  Jet j(dim, order);
  j.value_ = value;
  return j;
}

Jet Jet::variable(int dim, int order, int index, double value) {
  Jet j(dim, order);
  j.value_ = value;
  if (order >= 1) j.d1_[index] = 1.0;
  return j;
}

void Jet::set_d2(int i, int j, double v) {
  d2_[i * dim_ + j] = v;
  d2_[j * dim_ + i] = v;
}

void Jet::set_d3(int i, int j, int k, double v) {
  const int n = dim_;
  d3_[(i * n + j) * n + k] = v;
  d3_[(i * n + k) * n + j] = v;
  d3_[(j * n + i) * n + k] = v;
  d3_[(j * n + k) * n + i] = v;
  d3_[(k * n + i) * n + j] = v;
  d3_[(k * n + j) * n + i] = v;
}

namespace {

void check_compatible(const Jet& a, const Jet& b) {
  assert(a.dim() == b.dim());
  if (a.dim() != b.dim()) throw std::invalid_argument("jet dimension mismatch");
}

// Binary result order is the lower of the two; a constant jet of higher order
// carries no extra information.
int joint_order(const Jet& a, const Jet& b) { return std::min(a.order(), b.order()); }

}  // namespace

Jet operator+(const Jet& a, const Jet& b) {
  check_compatible(a, b);
  const int n = a.dim();
  const int ord = joint_order(a, b);
  Jet r(n, ord);
  r.value_ = a.value_ + b.value_;
  if (ord >= 1)
    for (int i = 0; i < n; ++i) r.d1_[i] = a.d1_[i] + b.d1_[i];
  if (ord >= 2)
    for (std::size_t q = 0; q < r.d2_.size(); ++q) r.d2_[q] = a.d2_[q] + b.d2_[q];
  if (ord >= 3)
    for (std::size_t q = 0; q < r.d3_.size(); ++q) r.d3_[q] = a.d3_[q] + b.d3_[q];
  return r;
}

Jet operator-(const Jet& a) {
  Jet r = a;
  r.value_ = -r.value_;
  for (double& v : r.d1_) v = -v;
  for (double& v : r.d2_) v = -v;
  for (double& v : r.d3_) v = -v;
  return r;
}

Jet operator-(const Jet& a, const Jet& b) {
  check_compatible(a, b);
  const int n = a.dim();
  const int ord = joint_order(a, b);
  Jet r(n, ord);
  r.value_ = a.value_ - b.value_;
  if (ord >= 1)
    for (int i = 0; i < n; ++i) r.d1_[i] = a.d1_[i] - b.d1_[i];
  if (ord >= 2)
    for (std::size_t q = 0; q < r.d2_.size(); ++q) r.d2_[q] = a.d2_[q] - b.d2_[q];
  if (ord >= 3)
    for (std::size_t q = 0; q < r.d3_.size(); ++q) r.d3_[q] = a.d3_[q] - b.d3_[q];
  return r;
}

Jet operator*(double s, const Jet& a) {
  Jet r = a;
  r.value_ *= s;
  for (double& v : r.d1_) v *= s;
  for (double& v : r.d2_) v *= s;
  for (double& v : r.d3_) v *= s;
  return r;
}

// Leibniz rule, canonical index tuples only.
Jet operator*(const Jet& a, const Jet& b) {
  check_compatible(a, b);
  const int n = a.dim();
  const int ord = joint_order(a, b);
  Jet r(n, ord);
  const double f = a.value_, g = b.value_;
  r.value_ = f * g;
  if (ord >= 1)
    for (int i = 0; i < n; ++i) r.d1_[i] = a.d1_[i] * g + f * b.d1_[i];
  if (ord >= 2) {
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        const double v = a.d2(i, j) * g + a.d1_[i] * b.d1_[j] + a.d1_[j] * b.d1_[i] + f * b.d2(i, j);
        r.set_d2(i, j, v);
      }
  }
  if (ord >= 3) {
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j)
        for (int k = j; k < n; ++k) {
          const double v = a.d3(i, j, k) * g + a.d2(i, j) * b.d1_[k] + a.d2(i, k) * b.d1_[j] +
                           a.d2(j, k) * b.d1_[i] + a.d1_[i] * b.d2(j, k) + a.d1_[j] * b.d2(i, k) +
                           a.d1_[k] * b.d2(i, j) + f * b.d3(i, j, k);
          r.set_d3(i, j, k, v);
        }
  }
  return r;
}

// Faa di Bruno up to third order.
Jet compose(const Jet& u, const std::array<double, 4>& derivs) {
  const int n = u.dim();
  const int ord = u.order();
  Jet r(n, ord);
  const double h1 = derivs[1], h2 = derivs[2], h3 = derivs[3];
  r.value_ = derivs[0];
  if (ord >= 1)
    for (int i = 0; i < n; ++i) r.d1_[i] = h1 * u.d1_[i];
  if (ord >= 2) {
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) r.set_d2(i, j, h2 * u.d1_[i] * u.d1_[j] + h1 * u.d2(i, j));
  }
  if (ord >= 3) {
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j)
        for (int k = j; k < n; ++k) {
          const double v = h3 * u.d1_[i] * u.d1_[j] * u.d1_[k] +
                           h2 * (u.d2(i, j) * u.d1_[k] + u.d2(i, k) * u.d1_[j] + u.d2(j, k) * u.d1_[i]) +
                           h1 * u.d3(i, j, k);
          r.set_d3(i, j, k, v);
        }
  }
  return r;
}

}  // namespace cvf
