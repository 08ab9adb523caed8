// SPDX-License-Identifier: Apache-2.0
#include "abelia/fourier.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "abelia/errors.hpp"
#include "abelia/numeric.hpp"
#include "abelia/rng.hpp"

namespace abelia {

namespace {

cplx ip(const std::vector<cplx>& u, const std::vector<cplx>& v, const std::vector<double>& mu) {
  cplx s = 0.0;
  for (std::size_t a = 0; a < mu.size(); ++a) s += mu[a] * u[a] * std::conj(v[a]);
  return s;
}

// Orthogonalise `cand` against `accepted` (two passes); returns the
// normalised residual or nothing if it is dependent.
std::optional<std::vector<cplx>> residual(std::vector<cplx> cand,
                                          const std::vector<std::vector<cplx>>& accepted,
                                          const std::vector<double>& mu) {
  for (int pass = 0; pass < 2; ++pass)
    for (const auto& b : accepted) {
      const cplx c = ip(cand, b, mu);
      for (std::size_t a = 0; a < cand.size(); ++a) cand[a] -= c * b[a];
    }
  const double norm = std::sqrt(std::max(0.0, ip(cand, cand, mu).real()));
  if (norm <= kPivotResidual) return std::nullopt;
  for (auto& v : cand) v /= norm;
  return cand;
}

std::vector<cplx> indicator(std::size_t m, std::initializer_list<int> on) {
  std::vector<cplx> v(m, 0.0);
  for (int s : on) v[s] = 1.0;
  return v;
}

void check_measure(const std::vector<double>& mu) {
  double total = 0.0;
  for (double p : mu) {
    if (!(p > 0.0)) throw ArgumentError("measure must be strictly positive");
    total += p;
  }
  if (std::abs(total - 1.0) > tol::kSlack) throw ArgumentError("measure must sum to 1");
}

int popcount(SubsetMask s) { return __builtin_popcount(s); }

}  // namespace

TensorSupport tensor_support(const TripleDistribution& d, int n, std::size_t max_points) {
  const auto supp = d.support();
  const std::size_t total = ipow_size(supp.size(), n);
  if (total > max_points)
    throw ResourceError("tensor support of " + std::to_string(total) + " points exceeds budget");
  std::vector<double> w;
  for (const auto& a : supp) w.push_back(d.prob(a).get_d());
  const std::size_t mx = d.alphabet(0).size(), my = d.alphabet(1).size(),
                    mz = d.alphabet(2).size();
  TensorSupport t;
  t.xi.reserve(total);
  t.yi.reserve(total);
  t.zi.reserve(total);
  t.p.reserve(total);
  std::vector<std::size_t> pos(n, 0);
  for (std::size_t k = 0; k < total; ++k) {
    std::size_t x = 0, y = 0, z = 0;
    double p = 1.0;
    for (int i = 0; i < n; ++i) {
      const auto& a = supp[pos[i]];
      x = x * mx + a[0];
      y = y * my + a[1];
      z = z * mz + a[2];
      p *= w[pos[i]];
    }
    t.xi.push_back(x);
    t.yi.push_back(y);
    t.zi.push_back(z);
    t.p.push_back(p);
    for (int i = n - 1; i >= 0; --i) {
      if (++pos[i] < supp.size()) break;
      pos[i] = 0;
    }
  }
  return t;
}

// ------------------------------------------------------------------ bases

UnivariateBasis standard_basis(const std::vector<double>& measure) {
  check_measure(measure);
  const std::size_t m = measure.size();
  UnivariateBasis out;
  out.push_back(std::vector<cplx>(m, 1.0));
  for (std::size_t s = 0; s < m; ++s)
    if (auto r = residual(indicator(m, {static_cast<int>(s)}), out, measure))
      out.push_back(std::move(*r));
  return out;
}

TensorFunction to_coefficients(const TensorFunction& f, const UnivariateBasis& basis) {
  const std::size_t m = f.measure.size();
  if (basis.size() != m) throw ArgumentError("to_coefficients: basis is not complete");
  std::vector<cplx> k(m * m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t a = 0; a < m; ++a) k[i * m + a] = std::conj(basis[i][a]) * f.measure[a];
  TensorFunction c = f;
  for (int ax = 0; ax < f.n; ++ax) c = apply_axis(c, ax, k);
  return c;
}

TensorFunction from_coefficients(const TensorFunction& c, const UnivariateBasis& basis) {
  const std::size_t m = c.measure.size();
  if (basis.size() != m) throw ArgumentError("from_coefficients: basis is not complete");
  std::vector<cplx> k(m * m);
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t i = 0; i < m; ++i) k[a * m + i] = basis[i][a];
  TensorFunction f = c;
  for (int ax = 0; ax < c.n; ++ax) f = apply_axis(f, ax, k);
  return f;
}

// ------------------------------------------------------------ Efron-Stein

namespace {

SubsetMask support_mask(const std::vector<int>& idx) {
  SubsetMask s = 0;
  for (std::size_t i = 0; i < idx.size(); ++i)
    if (idx[i] != 0) s |= SubsetMask(1) << i;
  return s;
}

}  // namespace

std::map<SubsetMask, TensorFunction> efron_stein(const TensorFunction& f) {
  if (f.n > 12) throw ResourceError("efron_stein: n > 12");
  if (ipow_size(2, f.n) * f.size() > 50'000'000)
    throw ResourceError("efron_stein: decomposition exceeds the dense budget");
  const auto basis = standard_basis(f.measure);
  const auto c = to_coefficients(f, basis);
  std::vector<SubsetMask> mask(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) mask[i] = support_mask(c.decode(i));
  std::map<SubsetMask, TensorFunction> out;
  for (SubsetMask s = 0; s < (SubsetMask(1) << f.n); ++s) {
    TensorFunction part(f.n, f.measure);
    for (std::size_t i = 0; i < c.size(); ++i)
      if (mask[i] == s) part.values[i] = c.values[i];
    out.emplace(s, from_coefficients(part, basis));
  }
  return out;
}

std::vector<double> efron_stein_weights(const TensorFunction& f) {
  if (f.n > 24) throw ResourceError("efron_stein_weights: n > 24");
  const auto c = to_coefficients(f, standard_basis(f.measure));
  std::vector<double> w(std::size_t(1) << f.n, 0.0);
  for (std::size_t i = 0; i < c.size(); ++i) w[support_mask(c.decode(i))] += std::norm(c.values[i]);
  return w;
}

std::vector<double> level_weights(const TensorFunction& f) {
  const auto w = efron_stein_weights(f);
  std::vector<double> out(f.n + 1, 0.0);
  for (std::size_t s = 0; s < w.size(); ++s) out[popcount(static_cast<SubsetMask>(s))] += w[s];
  return out;
}

double weight_up_to(const TensorFunction& f, int d) {
  const auto lw = level_weights(f);
  double s = 0.0;
  for (int k = 0; k <= std::min(d, f.n); ++k) s += lw[k];
  return s;
}

TensorFunction truncate_degree(const TensorFunction& f, int d) {
  const auto basis = standard_basis(f.measure);
  auto c = to_coefficients(f, basis);
  for (std::size_t i = 0; i < c.size(); ++i)
    if (popcount(support_mask(c.decode(i))) > d) c.values[i] = 0.0;
  return from_coefficients(c, basis);
}

// -------------------------------------------------------------- split basis

const char* to_string(BasisTag t) {
  switch (t) {
    case BasisTag::Embed: return "embed";
    case BasisTag::NonEmbed: return "nonembed";
    case BasisTag::Modest: return "modest";
  }
  return "?";
}

int SplitBasis::count(BasisTag t) const {
  return static_cast<int>(std::count_if(elements.begin(), elements.end(),
                                        [&](const BasisElement& e) { return e.tag == t; }));
}

UnivariateBasis SplitBasis::functions() const {
  UnivariateBasis out;
  for (const auto& e : elements) out.push_back(e.values);
  return out;
}

SplitBasis build_split_basis(const std::vector<double>& measure, const GroupMap& sigma,
                             const std::optional<std::vector<int>>& modest) {
  check_measure(measure);
  const std::size_t m = measure.size();
  if (sigma.values.size() != m) throw ArgumentError("build_split_basis: sigma has wrong size");
  SplitBasis b;
  b.measure = measure;
  for (const auto& v : sigma.values) b.fiber.push_back(sigma.group.index(v));
  std::vector<int> msym;
  if (modest) {
    msym = *modest;
    std::sort(msym.begin(), msym.end());
    msym.erase(std::unique(msym.begin(), msym.end()), msym.end());
    if (msym.empty()) throw ArgumentError("build_split_basis: empty modest set");
    for (int s : msym) {
      if (s < 0 || s >= static_cast<int>(m))
        throw ArgumentError("build_split_basis: modest symbol out of range");
      if (b.fiber[s] != b.fiber[msym.front()])
        throw ArgumentError("build_split_basis: modest symbols span several sigma values");
    }
    b.modest = msym;
  }

  std::vector<std::vector<cplx>> acc;
  const auto chars = all_characters(sigma.group);
  for (std::size_t k = 0; k < chars.size(); ++k)
    if (auto r = residual(character_function(chars[k], sigma), acc, measure)) {
      acc.push_back(*r);
      b.elements.push_back({std::move(*r), BasisTag::Embed, static_cast<int>(k)});
    }
  for (std::size_t s = 0; s < m; ++s) {
    std::vector<cplx> cand;
    const bool in_m = std::binary_search(msym.begin(), msym.end(), static_cast<int>(s));
    if (!in_m) {
      cand = indicator(m, {static_cast<int>(s)});
    } else if (static_cast<int>(s) == msym.front()) {
      cand.assign(m, 0.0);
      for (int t : msym) cand[t] = 1.0;
    } else {
      continue;
    }
    if (auto r = residual(std::move(cand), acc, measure)) {
      acc.push_back(*r);
      b.elements.push_back({std::move(*r), BasisTag::NonEmbed, -1});
    }
  }
  for (std::size_t s = 0; s < m; ++s)
    if (auto r = residual(indicator(m, {static_cast<int>(s)}), acc, measure)) {
      acc.push_back(*r);
      b.elements.push_back({std::move(*r), BasisTag::Modest, -1});
    }
  if (b.elements.size() != m) throw DomainError("build_split_basis: basis is not complete");
  return b;
}

Monomial Monomial::make(const SplitBasis& b, std::vector<int> index) {
  Monomial mono;
  for (int k : index) {
    if (k < 0 || k >= static_cast<int>(b.elements.size()))
      throw ArgumentError("Monomial: basis index out of range");
    const auto& e = b.elements[k];
    if (e.tag == BasisTag::Embed) {
      ++mono.embeddeg;
      ++mono.embeddeg_by_character[e.character];
    } else {
      ++mono.nedeg;
      if (e.tag == BasisTag::Modest) ++mono.effnon;
    }
  }
  mono.index = std::move(index);
  return mono;
}

TensorFunction Monomial::function(const SplitBasis& b) const {
  std::vector<std::vector<cplx>> factors;
  for (int k : index) factors.push_back(b.elements[k].values);
  return tensor_product(factors, b.measure);
}

// ------------------------------------------------------------------- noise

Kernel standard_kernel(const std::vector<double>& mu, double rho) {
  const std::size_t m = mu.size();
  Kernel k(m * m);
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b) k[a * m + b] = (a == b ? rho : 0.0) + (1.0 - rho) * mu[b];
  return k;
}

Kernel fiber_kernel(const std::vector<double>& mu, const std::vector<long>& fiber, double keep) {
  const std::size_t m = mu.size();
  if (fiber.size() != m) throw ArgumentError("fiber_kernel: fiber labels have wrong size");
  std::map<long, double> mass;
  for (std::size_t a = 0; a < m; ++a) mass[fiber[a]] += mu[a];
  Kernel k(m * m, 0.0);
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b) {
      double v = a == b ? keep : 0.0;
      if (fiber[a] == fiber[b]) v += (1.0 - keep) * mu[b] / mass[fiber[a]];
      k[a * m + b] = v;
    }
  return k;
}

Kernel modest_kernel(const std::vector<double>& mu, const std::vector<int>& modest, double keep) {
  const std::size_t m = mu.size();
  std::vector<bool> in(m, false);
  double mass = 0.0;
  for (int s : modest) {
    in.at(s) = true;
    mass += mu[s];
  }
  Kernel k(m * m, 0.0);
  for (std::size_t a = 0; a < m; ++a) {
    k[a * m + a] += keep;
    if (!in[a]) {
      k[a * m + a] += 1.0 - keep;
      continue;
    }
    for (std::size_t b = 0; b < m; ++b)
      if (in[b]) k[a * m + b] += (1.0 - keep) * mu[b] / mass;
  }
  return k;
}

void check_stationary(const Kernel& k, const std::vector<double>& mu) {
  const std::size_t m = mu.size();
  if (k.size() != m * m) throw ArgumentError("kernel has wrong size");
  for (std::size_t a = 0; a < m; ++a) {
    double row = 0.0;
    for (std::size_t b = 0; b < m; ++b) {
      if (k[a * m + b] < -tol::kEqual) throw ArgumentError("kernel has a negative entry");
      row += k[a * m + b];
    }
    if (std::abs(row - 1.0) > tol::kEqual) throw ArgumentError("kernel rows must sum to 1");
  }
  for (std::size_t b = 0; b < m; ++b) {
    double s = 0.0;
    for (std::size_t a = 0; a < m; ++a) s += mu[a] * k[a * m + b];
    if (std::abs(s - mu[b]) > tol::kEqual)
      throw ArgumentError("measure is not stationary for the chain");
  }
}

NoiseOperatorSpec NoiseOperatorSpec::standard(std::vector<double> measure, double rho) {
  NoiseOperatorSpec s;
  s.kind = NoiseKind::Standard;
  s.keep = rho;
  s.measure = std::move(measure);
  return s;
}

NoiseOperatorSpec NoiseOperatorSpec::nonembed(const SplitBasis& b, double keep) {
  NoiseOperatorSpec s;
  s.kind = NoiseKind::NonEmbed;
  s.keep = keep;
  s.measure = b.measure;
  s.fiber = b.fiber;
  return s;
}

NoiseOperatorSpec NoiseOperatorSpec::effective(const SplitBasis& b, double keep) {
  if (!b.modest) throw ArgumentError("effective noise needs a basis with a modest set");
  NoiseOperatorSpec s;
  s.kind = NoiseKind::Effective;
  s.keep = keep;
  s.measure = b.measure;
  s.modest = *b.modest;
  return s;
}

Kernel NoiseOperatorSpec::kernel() const {
  if (keep < 0.0 || keep > 1.0) throw ArgumentError("noise parameter must lie in [0,1]");
  Kernel k;
  switch (kind) {
    case NoiseKind::Standard: k = standard_kernel(measure, keep); break;
    case NoiseKind::NonEmbed: k = fiber_kernel(measure, fiber, keep); break;
    case NoiseKind::Effective: k = modest_kernel(measure, modest, keep); break;
  }
  check_stationary(k, measure);
  return k;
}

TensorFunction noise_apply(const NoiseOperatorSpec& spec, const TensorFunction& f) {
  if (!same_measure(spec.measure, f.measure))
    throw ArgumentError("noise_apply: operator and function measures differ");
  return apply_all_axes(f, spec.kernel());
}

double nestab(const TensorFunction& f, const SplitBasis& b, double rho) {
  if (rho < 0.0 || rho > 1.0) throw ArgumentError("nestab: rho must lie in [0,1]");
  return inner_product(f, noise_apply(NoiseOperatorSpec::nonembed(b, rho), f)).real();
}

double stability(const TensorFunction& f, double rho) {
  return inner_product(f, noise_apply(NoiseOperatorSpec::standard(f.measure, rho), f)).real();
}

// --------------------------------------------------------------- influences

namespace {

bool counts(BasisTag t, InfluenceKind kind) {
  return kind == InfluenceKind::NonEmbed ? t != BasisTag::Embed : t == BasisTag::Modest;
}

void check_influence_args(const TensorFunction& f, const SplitBasis& b, int j,
                          InfluenceKind kind) {
  if (!same_measure(f.measure, b.measure)) throw ArgumentError("influence: measure mismatch");
  if (j < 0 || j >= f.n) throw ArgumentError("influence: coordinate out of range");
  if (kind == InfluenceKind::Modest && !b.modest)
    throw ArgumentError("modest influence needs a basis with a modest set");
}

}  // namespace

double influence(const TensorFunction& f, const SplitBasis& b, int j, InfluenceKind kind) {
  check_influence_args(f, b, j, kind);
  const auto c = to_coefficients(f, b.functions());
  const std::size_t m = f.measure.size();
  const std::size_t stride = ipow_size(m, f.n - 1 - j);
  double s = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i)
    if (counts(b.elements[(i / stride) % m].tag, kind)) s += std::norm(c.values[i]);
  return 2.0 * s;
}

double influence_by_definition(const TensorFunction& f, const SplitBasis& b, int j,
                               InfluenceKind kind) {
  check_influence_args(f, b, j, kind);
  const Kernel k = kind == InfluenceKind::NonEmbed ? fiber_kernel(b.measure, b.fiber, 0.0)
                                                   : modest_kernel(b.measure, *b.modest, 0.0);
  const std::size_t m = f.measure.size();
  const std::size_t stride = ipow_size(m, f.n - 1 - j);
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const std::size_t a = (i / stride) % m;
    const std::size_t base = i - a * stride;
    double inner = 0.0;
    for (std::size_t bb = 0; bb < m; ++bb)
      if (k[a * m + bb] > 0.0)
        inner += k[a * m + bb] * std::norm(f.values[i] - f.values[base + bb * stride]);
    s += f.prob(i) * inner;
  }
  return s;
}

double total_influence(const TensorFunction& f, const SplitBasis& b, InfluenceKind kind) {
  double s = 0.0;
  for (int j = 0; j < f.n; ++j) s += influence(f, b, j, kind);
  return s;
}

// ------------------------------------------------------------- restrictions

namespace {

TensorFunction restrict_impl(const TensorFunction& f, const Restriction& r,
                             std::vector<double> live) {
  std::vector<bool> alive(f.n, false);
  int prev = -1;
  for (int i : r.alive) {
    if (i <= prev || i >= f.n) throw ArgumentError("restrict: alive set must be sorted and in range");
    alive[i] = true;
    prev = i;
  }
  if (r.fixed.size() != static_cast<std::size_t>(f.n) - r.alive.size())
    throw ArgumentError("restrict: fixed values do not match the complement");
  for (int v : r.fixed)
    if (v < 0 || v >= f.m()) throw ArgumentError("restrict: fixed value out of range");
  TensorFunction out(static_cast<int>(r.alive.size()), std::move(live));
  std::vector<int> x(f.n);
  for (std::size_t idx = 0; idx < out.size(); ++idx) {
    const auto y = out.decode(idx);
    std::size_t ai = 0, fi = 0;
    for (int i = 0; i < f.n; ++i) x[i] = alive[i] ? y[ai++] : r.fixed[fi++];
    out.values[idx] = f.values[f.encode(x)];
  }
  return out;
}

}  // namespace

TensorFunction restrict_preserve(const TensorFunction& f, const Restriction& r) {
  return restrict_impl(f, r, f.measure);
}

SplitMeasures SplitMeasures::make(const std::vector<mpq_class>& mu, const mpq_class& rho,
                                  const std::vector<mpq_class>& nu) {
  SplitMeasures s;
  s.rho = rho;
  s.mu = mu;
  s.nu = nu;
  s.nu_prime = mixture_split(mu, rho, nu);
  return s;
}

TensorFunction restrict_split(const TensorFunction& f, const Restriction& r,
                              const SplitMeasures& s) {
  std::vector<double> mu, nu;
  for (const auto& q : s.mu) mu.push_back(q.get_d());
  for (const auto& q : s.nu) nu.push_back(q.get_d());
  if (mu.size() != f.measure.size() || std::inner_product(mu.begin(), mu.end(), f.measure.begin(),
                                                          0.0, std::plus<>(), [](double a, double b) {
                                                            return std::abs(a - b);
                                                          }) > tol::kSlack)
    throw ArgumentError("restrict_split: mixture does not decompose f's measure");
  return restrict_impl(f, r, nu);
}

Restriction sample_restriction(int n, double rho, const std::vector<double>& law, Rng& rng) {
  Restriction r;
  for (int i = 0; i < n; ++i) {
    if (rng.bernoulli(rho))
      r.alive.push_back(i);
    else
      r.fixed.push_back(static_cast<int>(rng.discrete(law)));
  }
  return r;
}

double restriction_probability(const Restriction& r, int n, double rho,
                               const std::vector<double>& law) {
  double p = std::pow(rho, static_cast<double>(r.alive.size())) *
             std::pow(1.0 - rho, static_cast<double>(n - static_cast<int>(r.alive.size())));
  for (int v : r.fixed) p *= law.at(v);
  return p;
}

std::vector<Restriction> all_restrictions(int n, int m) {
  std::vector<Restriction> out;
  for (SubsetMask s = 0; s < (SubsetMask(1) << n); ++s) {
    Restriction base;
    for (int i = 0; i < n; ++i)
      if (s >> i & 1) base.alive.push_back(i);
    const int k = n - static_cast<int>(base.alive.size());
    const std::size_t count = ipow_size(m, k);
    for (std::size_t c = 0; c < count; ++c) {
      Restriction r = base;
      r.fixed.assign(k, 0);
      std::size_t v = c;
      for (int i = k - 1; i >= 0; --i) {
        r.fixed[i] = static_cast<int>(v % m);
        v /= m;
      }
      out.push_back(std::move(r));
    }
  }
  return out;
}

// ------------------------------------------------------------ Markov chains

double MarkovSpectrum::second() const {
  double s = 0.0;
  for (std::size_t i = components; i < eigenvalues.size(); ++i)
    s = std::max(s, std::abs(eigenvalues[i]));
  return s;
}

MarkovSpectrum markov_spectrum(const Kernel& k, const std::vector<double>& mu) {
  check_measure(mu);
  check_stationary(k, mu);
  const std::size_t m = mu.size();
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b)
      if (std::abs(mu[a] * k[a * m + b] - mu[b] * k[b * m + a]) > tol::kEqual)
        throw ArgumentError("markov_spectrum: chain is not reversible");
  Eigen::MatrixXd s(m, m);
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b)
      s(a, b) = std::sqrt(mu[a]) * k[a * m + b] / std::sqrt(mu[b]);
  s = 0.5 * (s + s.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s, Eigen::EigenvaluesOnly);
  MarkovSpectrum out;
  for (Eigen::Index i = es.eigenvalues().size() - 1; i >= 0; --i)
    out.eigenvalues.push_back(es.eigenvalues()(i));

  std::vector<std::size_t> parent(m);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b)
      if (k[a * m + b] > 0.0) parent[find(a)] = find(b);
  for (std::size_t a = 0; a < m; ++a)
    if (find(a) == a) ++out.components;
  return out;
}

// ----------------------------------------------------------------- W wrap

std::vector<double> yz_measure(const TripleDistribution& d) {
  const int mz = d.alphabet(2).size();
  std::vector<double> mu(static_cast<std::size_t>(d.alphabet(1).size()) * mz, 0.0);
  for (const auto& [a, p] : d.atoms()) mu[a[1] * mz + a[2]] += p.get_d();
  return mu;
}

namespace {

// forced x per (y,z) pair, -1 off the support
std::vector<int> forced_x(const TripleDistribution& d) {
  if (!implies_third(d, 1, 2))
    throw ArgumentError("wrap_W: y and z do not determine x on the support");
  const int mz = d.alphabet(2).size();
  std::vector<int> fx(static_cast<std::size_t>(d.alphabet(1).size()) * mz, -1);
  for (const auto& kv : d.atoms()) fx[kv.first[1] * mz + kv.first[2]] = kv.first[0];
  return fx;
}

}  // namespace

TensorFunction wrap_W(const TensorFunction& f, const TripleDistribution& d) {
  if (!same_measure(f.measure, d.marginal1_double(0)))
    throw ArgumentError("wrap_W: f must live on the x marginal");
  const auto fx = forced_x(d);
  TensorFunction F(f.n, yz_measure(d));
  std::vector<int> x(f.n);
  for (std::size_t idx = 0; idx < F.size(); ++idx) {
    const auto pairs = F.decode(idx);
    bool ok = true;
    for (int i = 0; i < f.n && ok; ++i) {
      x[i] = fx[pairs[i]];
      ok = x[i] >= 0;
    }
    if (ok) F.values[idx] = f.values[f.encode(x)];
  }
  return F;
}

TensorFunction unwrap_W(const TensorFunction& F, const TripleDistribution& d) {
  if (!same_measure(F.measure, yz_measure(d)))
    throw ArgumentError("unwrap_W: F must live on the (y,z) marginal");
  const auto fx = forced_x(d);
  TensorFunction f(F.n, d.marginal1_double(0));
  std::vector<bool> seen(f.size(), false);
  std::vector<int> x(F.n);
  for (std::size_t idx = 0; idx < F.size(); ++idx) {
    const auto pairs = F.decode(idx);
    bool ok = true;
    for (int i = 0; i < F.n && ok; ++i) {
      x[i] = fx[pairs[i]];
      ok = x[i] >= 0;
    }
    if (!ok) continue;
    const std::size_t xi = f.encode(x);
    if (!seen[xi]) {
      f.values[xi] = F.values[idx];
      seen[xi] = true;
    } else if (std::abs(f.values[xi] - F.values[idx]) > tol::kEqual) {
      throw ArgumentError("unwrap_W: F is not constant on connected components");
    }
  }
  return f;
}

// ----------------------------------------------------- operator comparison

OpComparison op_comparison_constant(const std::vector<double>& mu, const std::vector<double>& nu1,
                                    const std::vector<double>& nu2, double beta, double xi,
                                    const std::vector<long>& components) {
  const std::size_t m = mu.size();
  if (nu1.size() != m || nu2.size() != m || components.size() != m)
    throw ArgumentError("op_comparison_constant: size mismatch");
  if (!(beta > 0.0 && beta <= 1.0) || !(xi > 0.0 && xi <= 1.0))
    throw ArgumentError("op_comparison_constant: beta and xi must lie in (0,1]");
  check_measure(mu);
  check_measure(nu1);
  for (std::size_t a = 0; a < m; ++a)
    if (std::abs(beta * nu1[a] + (1.0 - beta) * nu2[a] - mu[a]) > tol::kSlack)
      throw ArgumentError("op_comparison_constant: mu is not the stated mixture");
  const Kernel t1 = fiber_kernel(nu1, components, 1.0 - xi);
  OpComparison out;
  out.lhs_kernel.assign(m * m, 0.0);
  Eigen::MatrixXd s(m, m);
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b) {
      const double joint = (a == b ? (1.0 - beta) * nu2[a] : 0.0) + beta * nu1[a] * t1[a * m + b];
      out.lhs_kernel[a * m + b] = joint / mu[a];
      s(a, b) = joint / std::sqrt(mu[a] * mu[b]);
    }
  s = 0.5 * (s + s.transpose());
  // project out the functions constant on components
  Eigen::MatrixXd p = Eigen::MatrixXd::Identity(m, m);
  std::map<long, std::vector<std::size_t>> groups;
  for (std::size_t a = 0; a < m; ++a) groups[components[a]].push_back(a);
  for (const auto& [id, members] : groups) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(m);
    double mass = 0.0;
    for (auto a : members) mass += mu[a];
    for (auto a : members) v(a) = std::sqrt(mu[a] / mass);
    p -= v * v.transpose();
  }
  const Eigen::MatrixXd r = p * s * p;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(r, Eigen::EigenvaluesOnly);
  out.lambda_lhs = std::max(0.0, es.eigenvalues().maxCoeff());
  out.c = (1.0 - out.lambda_lhs) / (beta * xi);
  return out;
}

// --------------------------------------------------------- weight helpers

int noticeable_degree(double lambda2, double eps) {
  if (!(eps > 0.0 && eps <= 1.0)) throw ArgumentError("noticeable_degree: eps must lie in (0,1]");
  if (lambda2 >= 1.0) throw DomainError("noticeable_degree: chain is not connected");
  if (lambda2 <= 0.0) return 0;
  const double need = std::log(eps / 2.0) / std::log(lambda2);  // lambda^k <= eps/2 iff k >= need
  return std::max(0, static_cast<int>(std::ceil(need - 1e-12)) - 1);
}

int stability_degree(double eps, double delta) {
  if (!(eps > 0.0) || !(delta > 0.0 && delta <= 1.0))
    throw ArgumentError("stability_degree: eps > 0 and delta in (0,1] required");
  return static_cast<int>(std::floor(2.0 * std::log(1.0 / delta) / eps));
}

RestCorrelation rest_to_correlation(const TensorFunction& F, int d) {
  if (d < 1) throw ArgumentError("rest_to_correlation: d must be at least 1");
  if (F.sup_norm() > 1.0 + tol::kBounded) throw ArgumentError("rest_to_correlation: F not 1-bounded");
  RestCorrelation out;
  out.weight = weight_up_to(F, d);
  out.bound = out.weight / (2.0 * std::exp(1.0));
  out.threshold = std::sqrt(out.bound);
  const double p = 1.0 / (2.0 * d);
  for (const auto& r : all_restrictions(F.n, F.m())) {
    const auto g = restrict_preserve(F, r);
    cplx mean = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) mean += g.prob(i) * g.values[i];
    if (std::abs(mean) >= out.threshold * (1.0 - 1e-12))
      out.probability += restriction_probability(r, F.n, p, F.measure);
  }
  return out;
}

}  // namespace abelia
