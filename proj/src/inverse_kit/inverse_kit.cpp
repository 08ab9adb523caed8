// SPDX-License-Identifier: Apache-2.0
#include "abelia/inverse_kit.hpp"

#include <algorithm>
#include <cmath>

#include "abelia/errors.hpp"
#include "abelia/numeric.hpp"

namespace abelia {

ProductClass::ProductClass(std::string name, std::vector<std::vector<cplx>> dictionary,
                           std::vector<double> measure)
    : name_(std::move(name)), dict_(std::move(dictionary)), measure_(std::move(measure)) {
  const std::size_t m = measure_.size();
  if (dict_.empty()) throw ArgumentError("product class: empty dictionary");
  for (const auto& p : dict_) {
    if (p.size() != m) throw ArgumentError("product class: entry does not match the alphabet");
    for (const auto& v : p)
      if (std::abs(v) > 1.0 + tol::kBounded)
        throw ArgumentError("product class: entries must be 1-bounded");
  }
  for (std::size_t a = 0; a < dict_.size(); ++a)
    for (std::size_t b = a + 1; b < dict_.size(); ++b) {
      double diff = 0.0;
      for (std::size_t s = 0; s < m; ++s) diff = std::max(diff, std::abs(dict_[a][s] - dict_[b][s]));
      if (diff <= tol::kBounded) throw ArgumentError("product class: duplicate dictionary entry");
    }
  const std::size_t k = dict_.size();
  gram_.assign(k * k, 0.0);
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < k; ++b) {
      cplx s = 0.0;
      for (std::size_t x = 0; x < m; ++x) s += measure_[x] * dict_[a][x] * std::conj(dict_[b][x]);
      gram_[a * k + b] = s;
    }
  tau_ = 1.0;
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = a + 1; b < k; ++b) tau_ = std::min(tau_, 1.0 - std::abs(gram(a, b)));
}

ProductClass ProductClass::from_sigma(const GroupMap& sigma, std::vector<double> measure) {
  if (sigma.values.size() != measure.size())
    throw ArgumentError("from_sigma: map does not match the measure");
  std::vector<std::vector<cplx>> dict;
  for (const auto& chi : all_characters(sigma.group)) {
    auto v = character_function(chi, sigma);
    const bool seen = std::any_of(dict.begin(), dict.end(), [&](const auto& u) {
      for (std::size_t s = 0; s < u.size(); ++s)
        if (std::abs(u[s] - v[s]) > tol::kBounded) return false;
      return true;
    });
    if (!seen) dict.push_back(std::move(v));
  }
  ProductClass cls("F_sigma", std::move(dict), std::move(measure));
  if (cls.size() > 1 && !(cls.tau() > 0.0))
    throw DomainError("F_sigma is not separated under this measure");
  return cls;
}

double class_separation(const ProductClass& cls) { return cls.tau(); }

TensorFunction ProductFunction::evaluate(const ProductClass& cls) const {
  if (class_name != cls.name()) throw ArgumentError("product function from another class");
  std::vector<std::vector<cplx>> factors_v;
  for (int k : factors) factors_v.push_back(cls.dictionary().at(k));
  return tensor_product(factors_v, cls.measure());
}

nlohmann::json ProductFunction::to_json() const {
  return {{"class", class_name}, {"factors", factors}};
}

namespace {

void check_pair(const ProductFunction& p, const ProductFunction& q) {
  if (p.class_name != q.class_name) throw ArgumentError("product functions from different classes");
  if (p.factors.size() != q.factors.size()) throw ArgumentError("product functions of different arity");
}

}  // namespace

cplx product_inner(const ProductClass& cls, const ProductFunction& p, const ProductFunction& q) {
  check_pair(p, q);
  if (p.class_name != cls.name()) throw ArgumentError("product function from another class");
  cplx s = 1.0;
  for (std::size_t i = 0; i < p.factors.size(); ++i) s *= cls.gram(p.factors[i], q.factors[i]);
  return s;
}

RestrictedProduct restrict_product(const ProductClass& cls, const ProductFunction& p,
                                   const Restriction& r) {
  const int n = static_cast<int>(p.factors.size());
  RestrictedProduct out;
  out.rest.class_name = p.class_name;
  std::size_t next_fixed = 0;
  std::size_t next_alive = 0;
  for (int i = 0; i < n; ++i) {
    if (next_alive < r.alive.size() && r.alive[next_alive] == i) {
      out.rest.factors.push_back(p.factors[i]);
      ++next_alive;
    } else {
      if (next_fixed >= r.fixed.size()) throw ArgumentError("restriction does not fit the product");
      out.constant *= cls.dictionary().at(p.factors[i]).at(r.fixed[next_fixed++]);
    }
  }
  if (next_fixed != r.fixed.size() || next_alive != r.alive.size())
    throw ArgumentError("restriction does not fit the product");
  return out;
}

std::vector<ListEntry> correlation_list(const TensorFunction& f, double eps,
                                        const ProductClass& cls, std::size_t budget) {
  if (!same_measure(f.measure, cls.measure()))
    throw ArgumentError("correlation_list: f and the class use different measures");
  const std::size_t k = cls.size();
  const std::size_t members = ipow_size(k, f.n);
  if (members > budget || members * f.size() > budget * 64)
    throw ResourceError("correlation_list: class too large to enumerate");
  // contract one axis at a time: c[..., j, ...] = sum_a mu(a) f[..., a, ...] conj(p_j(a))
  const std::size_t m = f.measure.size();
  std::vector<cplx> cur = f.values;
  std::vector<std::size_t> shape(f.n, m);
  for (int axis = 0; axis < f.n; ++axis) {
    std::size_t inner = 1, outer = 1;
    for (int i = axis + 1; i < f.n; ++i) inner *= shape[i];
    for (int i = 0; i < axis; ++i) outer *= shape[i];
    std::vector<cplx> nxt(outer * k * inner, 0.0);
    for (std::size_t o = 0; o < outer; ++o)
      for (std::size_t j = 0; j < k; ++j)
        for (std::size_t a = 0; a < m; ++a) {
          const cplx w = f.measure[a] * std::conj(cls.dictionary()[j][a]);
          const cplx* src = &cur[(o * m + a) * inner];
          cplx* dst = &nxt[(o * k + j) * inner];
          for (std::size_t t = 0; t < inner; ++t) dst[t] += w * src[t];
        }
    cur.swap(nxt);
    shape[axis] = k;
  }
  std::vector<ListEntry> out;
  for (std::size_t idx = 0; idx < members; ++idx) {
    if (std::abs(cur[idx]) < eps) continue;
    ListEntry e;
    e.p.class_name = cls.name();
    e.p.factors.resize(f.n);
    std::size_t rem = idx;
    for (int i = f.n - 1; i >= 0; --i) {
      e.p.factors[i] = static_cast<int>(rem % k);
      rem /= k;
    }
    e.inner = cur[idx];
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<ListEntry> short_list(const TensorFunction& f, double eps, double delta,
                                  const ProductClass& cls, std::size_t budget) {
  if (!(delta < eps * eps)) throw ArgumentError("short_list needs delta < eps^2");
  if (norm2(f) > 1.0 + tol::kSlack) throw ArgumentError("short_list needs ||f||_2 <= 1");
  const auto list = correlation_list(f, eps, cls, budget);
  std::vector<ListEntry> out;
  for (const auto& e : list) {
    bool covered = false;
    for (const auto& s : out)
      if (std::abs(product_inner(cls, e.p, s.p)) >= delta) {
        covered = true;
        break;
      }
    if (!covered) out.push_back(e);
  }
  if (!(static_cast<double>(out.size()) < 1.0 / (eps * eps - delta)))
    throw DomainError("short_list exceeded its size bound");
  return out;
}

int symbolic_distance(const ProductFunction& p, const ProductFunction& q) {
  check_pair(p, q);
  int d = 0;
  for (std::size_t i = 0; i < p.factors.size(); ++i) d += p.factors[i] != q.factors[i];
  return d;
}

bool correlation_bound_check(const ProductClass& cls, const ProductFunction& p,
                             const ProductFunction& q) {
  const int dist = symbolic_distance(p, q);
  return std::abs(product_inner(cls, p, q)) <= std::pow(1.0 - cls.tau(), dist) + tol::kBounded;
}

PairBound dimensionality_pair(const std::vector<std::vector<cplx>>& u) {
  if (u.size() < 2) throw ArgumentError("dimensionality_pair needs at least two vectors");
  const std::size_t k = u.front().size();
  if (k + 1 > u.size()) throw ArgumentError("dimensionality_pair needs more vectors than dimensions");
  PairBound out;
  out.floor = 1.0 / (static_cast<double>(k) * static_cast<double>(u.size()));
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u[i].size() != k) throw ArgumentError("dimensionality_pair: ragged family");
    for (std::size_t j = i + 1; j < u.size(); ++j) {
      cplx s = 0.0;
      for (std::size_t t = 0; t < k; ++t) s += u[i][t] * std::conj(u[j][t]);
      out.best = std::max(out.best, std::abs(s));
    }
  }
  return out;
}

double restricted_correlation_probability(const TensorFunction& f, const TensorFunction& g,
                                          const std::vector<int>& alive, double eta) {
  require_same_domain(f, g, "restricted_correlation_probability");
  const int n = f.n;
  const int fixed = n - static_cast<int>(alive.size());
  TensorFunction shape(fixed, f.measure);
  double prob = 0.0;
  for (std::size_t idx = 0; idx < shape.size(); ++idx) {
    const Restriction r{alive, shape.decode(idx)};
    const auto fr = restrict_preserve(f, r);
    const auto gr = restrict_preserve(g, r);
    if (std::abs(inner_product(fr, gr)) >= eta / 2.0) prob += shape.prob(idx);
  }
  return prob;
}

double holder_probability(const std::vector<std::vector<bool>>& event,
                          const std::vector<double>& px, const std::vector<double>& py, int k,
                          int l) {
  if (event.size() != px.size()) throw ArgumentError("holder_probability: shape mismatch");
  for (const auto& row : event)
    if (row.size() != py.size()) throw ArgumentError("holder_probability: shape mismatch");
  if (k < 1 || l < 1) throw ArgumentError("holder_probability needs k, l >= 1");
  const std::size_t nx = px.size();
  const std::size_t tuples = ipow_size(nx, k);
  if (tuples > 10'000'000) throw ResourceError("holder_probability: too many tuples");
  double total = 0.0;
  std::vector<std::size_t> xs(k);
  for (std::size_t idx = 0; idx < tuples; ++idx) {
    std::size_t rem = idx;
    double w = 1.0;
    for (int i = 0; i < k; ++i) {
      xs[i] = rem % nx;
      rem /= nx;
      w *= px[xs[i]];
    }
    double inner = 0.0;  // Pr_y[E(x_i, y) for all i]
    for (std::size_t y = 0; y < py.size(); ++y) {
      bool all = true;
      for (int i = 0; i < k && all; ++i) all = event[xs[i]][y];
      if (all) inner += py[y];
    }
    total += w * std::pow(inner, l);
  }
  return total;
}

}  // namespace abelia
