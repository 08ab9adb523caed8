// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "json.hpp"

namespace abelia {

class Rng;
using cplx = std::complex<double>;

// Dense complex function on Sigma^n under the product of one base measure.
// Values are row-major with the first coordinate most significant.
struct TensorFunction {
  int n = 0;
  std::vector<double> measure;
  std::vector<cplx> values;

  TensorFunction() = default;
  TensorFunction(int n_, std::vector<double> measure_);  // zero function
  static TensorFunction constant(int n, std::vector<double> measure, cplx c);
  static TensorFunction from_univariate(const std::vector<cplx>& u, std::vector<double> measure);

  int m() const { return static_cast<int>(measure.size()); }
  std::size_t size() const { return values.size(); }
  cplx& operator[](std::size_t i) { return values[i]; }
  const cplx& operator[](std::size_t i) const { return values[i]; }

  std::vector<int> decode(std::size_t idx) const;
  std::size_t encode(const std::vector<int>& x) const;
  double prob(std::size_t idx) const;  // product measure of the point
  double sup_norm() const;

  nlohmann::json to_json() const;
  static TensorFunction from_json(const nlohmann::json& j);
};

std::size_t ipow_size(std::size_t base, int exp);
bool same_measure(const std::vector<double>& a, const std::vector<double>& b);
void require_same_domain(const TensorFunction& f, const TensorFunction& g, const char* what);

cplx inner_product(const TensorFunction& f, const TensorFunction& g);  // E[f conj(g)]
double norm2(const TensorFunction& f);

TensorFunction operator+(const TensorFunction& a, const TensorFunction& b);
TensorFunction operator-(const TensorFunction& a, const TensorFunction& b);
TensorFunction operator*(cplx s, const TensorFunction& a);
TensorFunction pointwise_product(const TensorFunction& a, const TensorFunction& b);
TensorFunction conj(const TensorFunction& a);
double max_abs_diff(const TensorFunction& a, const TensorFunction& b);

// Tensor product of univariate functions, one per coordinate.
TensorFunction tensor_product(const std::vector<std::vector<cplx>>& factors,
                              std::vector<double> measure);

// Apply a kernel K (m x m, row-major; (Kf)(a) = sum_b K[a][b] f(b)) along one axis.
TensorFunction apply_axis(const TensorFunction& f, int axis, const std::vector<double>& kernel);
TensorFunction apply_axis(const TensorFunction& f, int axis, const std::vector<cplx>& kernel);
// Same kernel on every axis.
TensorFunction apply_all_axes(const TensorFunction& f, const std::vector<double>& kernel);

// Complex Gaussian entries; scaled to sup norm 1 when bounded is set.
TensorFunction random_function(int n, std::vector<double> measure, Rng& rng, bool bounded = false);

}  // namespace abelia
