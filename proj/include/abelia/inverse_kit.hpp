// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "abelia/abelian.hpp"
#include "abelia/fourier.hpp"
#include "abelia/tensor.hpp"
#include "json.hpp"

namespace abelia {

// A finite dictionary of 1-bounded univariate functions. Product functions
// take one dictionary entry per coordinate, so the class is closed under
// restriction up to a constant factor.
class ProductClass {
 public:
  // Throws ArgumentError on an entry with sup norm above 1 or on duplicates.
  ProductClass(std::string name, std::vector<std::vector<cplx>> dictionary,
               std::vector<double> measure);
  // Characters composed with sigma, with equal compositions merged.
  static ProductClass from_sigma(const GroupMap& sigma, std::vector<double> measure);

  const std::string& name() const { return name_; }
  const std::vector<std::vector<cplx>>& dictionary() const { return dict_; }
  const std::vector<double>& measure() const { return measure_; }
  std::size_t size() const { return dict_.size(); }
  // <p_a, p_b> under the measure
  cplx gram(std::size_t a, std::size_t b) const { return gram_[a * dict_.size() + b]; }
  // min over distinct pairs of 1 - |<p, p'>|; 1 for a dictionary of size < 2
  double tau() const { return tau_; }

 private:
  std::string name_;
  std::vector<std::vector<cplx>> dict_;
  std::vector<double> measure_;
  std::vector<cplx> gram_;
  double tau_ = 1.0;
};

double class_separation(const ProductClass& cls);

struct ProductFunction {
  std::string class_name;
  std::vector<int> factors;  // dictionary index per coordinate

  TensorFunction evaluate(const ProductClass& cls) const;
  nlohmann::json to_json() const;
};

// <p, p'> as the product of univariate inner products.
cplx product_inner(const ProductClass& cls, const ProductFunction& p, const ProductFunction& q);

// Restricting the fixed coordinates leaves a constant times a product on the
// live ones. The constant is reported separately.
struct RestrictedProduct {
  cplx constant = 1.0;
  ProductFunction rest;
};
RestrictedProduct restrict_product(const ProductClass& cls, const ProductFunction& p,
                                   const Restriction& r);

struct ListEntry {
  ProductFunction p;
  cplx inner = 0.0;  // <f, p>
};

inline constexpr std::size_t kListBudget = 2'000'000;

// Every p with |<f, p>| >= eps, in lexicographic factor order.
std::vector<ListEntry> correlation_list(const TensorFunction& f, double eps,
                                        const ProductClass& cls,
                                        std::size_t budget = kListBudget);

// Greedy net of the list. Requires ||f||_2 <= 1 and delta < eps^2.
std::vector<ListEntry> short_list(const TensorFunction& f, double eps, double delta,
                                  const ProductClass& cls, std::size_t budget = kListBudget);

int symbolic_distance(const ProductFunction& p, const ProductFunction& q);
// |<p, p'>| <= (1 - tau)^distance
bool correlation_bound_check(const ProductClass& cls, const ProductFunction& p,
                             const ProductFunction& q);

// ------------------------------------------------------ averaging helpers

// Largest |<u_i, u_j>| over i != j, with the guaranteed floor 1 / (k l).
struct PairBound {
  double best = 0.0;
  double floor = 0.0;
};
PairBound dimensionality_pair(const std::vector<std::vector<cplx>>& unit_vectors);

// Exact Pr over the fixed values (drawn from f's measure) that the restricted
// functions stay eta/2-correlated.
double restricted_correlation_probability(const TensorFunction& f, const TensorFunction& g,
                                          const std::vector<int>& alive, double eta);

// Exact Pr[E(x_i, y_j) for all i <= k, j <= l] for independent x, y.
// event[a][b] says whether E(a, b) holds.
double holder_probability(const std::vector<std::vector<bool>>& event,
                          const std::vector<double>& px, const std::vector<double>& py, int k,
                          int l);

}  // namespace abelia
