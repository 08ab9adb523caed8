// SPDX-License-Identifier: Apache-2.0
#include "abelia/tensor.hpp"

#include <algorithm>
#include <cmath>

#include "abelia/errors.hpp"
#include "abelia/rng.hpp"

namespace abelia {

std::size_t ipow_size(std::size_t base, int exp) {
  std::size_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

TensorFunction::TensorFunction(int n_, std::vector<double> measure_)
    : n(n_), measure(std::move(measure_)) {
  if (n < 0) throw ArgumentError("tensor function needs n >= 0");
  if (measure.empty()) throw ArgumentError("tensor function needs a nonempty alphabet");
  values.assign(ipow_size(measure.size(), n), cplx(0.0));
}

TensorFunction TensorFunction::constant(int n, std::vector<double> measure, cplx c) {
  TensorFunction f(n, std::move(measure));
  std::fill(f.values.begin(), f.values.end(), c);
  return f;
}

TensorFunction TensorFunction::from_univariate(const std::vector<cplx>& u,
                                               std::vector<double> measure) {
  if (u.size() != measure.size()) throw ArgumentError("univariate size mismatch");
  TensorFunction f(1, std::move(measure));
  f.values = u;
  return f;
}

std::vector<int> TensorFunction::decode(std::size_t idx) const {
  std::vector<int> x(n);
  const std::size_t mm = measure.size();
  for (int i = n; i-- > 0;) {
    x[i] = static_cast<int>(idx % mm);
    idx /= mm;
  }
  return x;
}

std::size_t TensorFunction::encode(const std::vector<int>& x) const {
  std::size_t idx = 0;
  for (int v : x) idx = idx * measure.size() + static_cast<std::size_t>(v);
  return idx;
}

double TensorFunction::prob(std::size_t idx) const {
  double p = 1.0;
  const std::size_t mm = measure.size();
  for (int i = 0; i < n; ++i) {
    p *= measure[idx % mm];
    idx /= mm;
  }
  return p;
}

double TensorFunction::sup_norm() const {
  double s = 0.0;
  for (const auto& v : values) s = std::max(s, std::abs(v));
  return s;
}

nlohmann::json TensorFunction::to_json() const {
  nlohmann::json j;
  j["n"] = n;
  j["measure"] = measure;
  j["values"] = nlohmann::json::array();
  for (const auto& v : values) j["values"].push_back({v.real(), v.imag()});
  return j;
}

TensorFunction TensorFunction::from_json(const nlohmann::json& j) {
  try {
    TensorFunction f(j.at("n").get<int>(), j.at("measure").get<std::vector<double>>());
    const auto& vals = j.at("values");
    if (vals.size() != f.size()) throw ParseError("tensor function: wrong number of values");
    for (std::size_t i = 0; i < f.size(); ++i)
      f.values[i] = cplx(vals[i].at(0).get<double>(), vals[i].at(1).get<double>());
    return f;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("tensor function JSON: ") + e.what());
  }
}

bool same_measure(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i] - b[i]) > 1e-14) return false;
  return true;
}

void require_same_domain(const TensorFunction& f, const TensorFunction& g, const char* what) {
  if (f.n != g.n || !same_measure(f.measure, g.measure))
    throw ArgumentError(std::string(what) + ": functions live on different domains or measures");
}

cplx inner_product(const TensorFunction& f, const TensorFunction& g) {
  require_same_domain(f, g, "inner_product");
  cplx s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += f.prob(i) * f.values[i] * std::conj(g.values[i]);
  return s;
}

double norm2(const TensorFunction& f) { return std::sqrt(std::max(0.0, inner_product(f, f).real())); }

TensorFunction operator+(const TensorFunction& a, const TensorFunction& b) {
  require_same_domain(a, b, "sum");
  TensorFunction r = a;
  for (std::size_t i = 0; i < r.size(); ++i) r.values[i] += b.values[i];
  return r;
}

TensorFunction operator-(const TensorFunction& a, const TensorFunction& b) {
  require_same_domain(a, b, "difference");
  TensorFunction r = a;
  for (std::size_t i = 0; i < r.size(); ++i) r.values[i] -= b.values[i];
  return r;
}

TensorFunction operator*(cplx s, const TensorFunction& a) {
  TensorFunction r = a;
  for (auto& v : r.values) v *= s;
  return r;
}

TensorFunction pointwise_product(const TensorFunction& a, const TensorFunction& b) {
  require_same_domain(a, b, "product");
  TensorFunction r = a;
  for (std::size_t i = 0; i < r.size(); ++i) r.values[i] *= b.values[i];
  return r;
}

TensorFunction conj(const TensorFunction& a) {
  TensorFunction r = a;
  for (auto& v : r.values) v = std::conj(v);
  return r;
}

double max_abs_diff(const TensorFunction& a, const TensorFunction& b) {
  require_same_domain(a, b, "max_abs_diff");
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a.values[i] - b.values[i]));
  return d;
}

TensorFunction tensor_product(const std::vector<std::vector<cplx>>& factors,
                              std::vector<double> measure) {
  TensorFunction f(static_cast<int>(factors.size()), std::move(measure));
  for (const auto& u : factors)
    if (u.size() != f.measure.size()) throw ArgumentError("tensor_product: factor size mismatch");
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto x = f.decode(i);
    cplx v = 1.0;
    for (int k = 0; k < f.n; ++k) v *= factors[k][x[k]];
    f.values[i] = v;
  }
  return f;
}

namespace {

template <typename K>
TensorFunction apply_axis_impl(const TensorFunction& f, int axis, const std::vector<K>& kernel) {
  const std::size_t m = f.measure.size();
  if (axis < 0 || axis >= f.n) throw ArgumentError("apply_axis: axis out of range");
  if (kernel.size() != m * m) throw ArgumentError("apply_axis: kernel has wrong size");
  TensorFunction out = f;
  const std::size_t stride = ipow_size(m, f.n - 1 - axis);
  const std::size_t block = stride * m;
  std::vector<cplx> col(m);
  for (std::size_t base = 0; base < f.size(); base += block)
    for (std::size_t off = 0; off < stride; ++off) {
      for (std::size_t b = 0; b < m; ++b) col[b] = f.values[base + off + b * stride];
      for (std::size_t a = 0; a < m; ++a) {
        cplx s = 0.0;
        for (std::size_t b = 0; b < m; ++b) s += kernel[a * m + b] * col[b];
        out.values[base + off + a * stride] = s;
      }
    }
  return out;
}

}  // namespace

TensorFunction apply_axis(const TensorFunction& f, int axis, const std::vector<double>& kernel) {
  return apply_axis_impl(f, axis, kernel);
}

TensorFunction apply_axis(const TensorFunction& f, int axis, const std::vector<cplx>& kernel) {
  return apply_axis_impl(f, axis, kernel);
}

TensorFunction apply_all_axes(const TensorFunction& f, const std::vector<double>& kernel) {
  TensorFunction g = f;
  for (int i = 0; i < f.n; ++i) g = apply_axis(g, i, kernel);
  return g;
}

TensorFunction random_function(int n, std::vector<double> measure, Rng& rng, bool bounded) {
  TensorFunction f(n, std::move(measure));
  for (auto& v : f.values) v = rng.complex_normal();
  if (bounded) {
    const double s = f.sup_norm();
    if (s > 0)
      for (auto& v : f.values) v /= s;
  }
  return f;
}

}  // namespace abelia
