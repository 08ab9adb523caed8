// SPDX-License-Identifier: Apache-2.0
#include "abelia/extremal.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <thread>

#include "abelia/errors.hpp"
#include "abelia/numeric.hpp"
#include "abelia/rng.hpp"

namespace abelia {

namespace {

void check_shapes(const TripleDistribution& d, const TensorFunction& f, const TensorFunction& g,
                  const TensorFunction& h) {
  if (f.n != g.n || g.n != h.n) throw ArgumentError("three_wise_correlation: arity mismatch");
  if (f.m() != d.alphabet(0).size() || g.m() != d.alphabet(1).size() ||
      h.m() != d.alphabet(2).size())
    throw ArgumentError("three_wise_correlation: domains do not match the alphabets");
}

cplx correlate(const TensorSupport& ts, const TensorFunction& f, const TensorFunction& g,
               const TensorFunction& h) {
  cplx s = 0.0;
  for (std::size_t k = 0; k < ts.size(); ++k)
    s += ts.p[k] * f.values[ts.xi[k]] * g.values[ts.yi[k]] * h.values[ts.zi[k]];
  return s;
}

std::vector<double> positive_marginal(const TripleDistribution& d, int c) {
  auto mu = d.marginal1_double(c);
  for (double p : mu)
    if (!(p > 0.0))
      throw ArgumentError(std::string("every symbol of coordinate ") + coord_name(c) +
                          " must carry mass");
  return mu;
}

}  // namespace

cplx three_wise_correlation(const TripleDistribution& d, const TensorFunction& f,
                            const TensorFunction& g, const TensorFunction& h) {
  check_shapes(d, f, g, h);
  return correlate(tensor_support(d, f.n), f, g, h);
}

SplitBases SplitBases::make(const TripleDistribution& d, const MasterEmbedding& m,
                            const std::optional<std::vector<int>>& modest_x) {
  SplitBases out;
  const auto e = m.bundled();
  for (int c = 0; c < 3; ++c)
    out.basis[c] = build_split_basis(positive_marginal(d, c), e.map(c),
                                     c == 0 ? modest_x : std::nullopt);
  return out;
}

// --------------------------------------------------------------------- SVD

namespace {

double coefficient_cutoff(const TensorFunction& c) {
  double total = 0.0;
  for (const auto& v : c.values) total += std::norm(v);
  return tol::kEqual * std::max(1.0, std::sqrt(total));
}

// Drop coordinate j from a decoded multi-index.
std::vector<int> without(std::vector<int> x, int j) {
  x.erase(x.begin() + j);
  return x;
}

}  // namespace

HomogeneityProfile homogeneity(const TensorFunction& f, const SplitBasis& b) {
  const auto c = to_coefficients(f, b.functions());
  const double cut = coefficient_cutoff(c);
  HomogeneityProfile p;
  bool first = true;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (std::abs(c.values[i]) <= cut) continue;
    const auto mono = Monomial::make(b, c.decode(i));
    if (first) {
      p.embeddeg = mono.embeddeg_by_character;
      p.nedeg = mono.nedeg;
      p.min_effnon = mono.effnon;
      first = false;
      continue;
    }
    if (mono.embeddeg_by_character != p.embeddeg) p.embedding_homogenous = false;
    if (mono.nedeg != p.nedeg) p.nonembed_homogenous = false;
    p.min_effnon = std::min(p.min_effnon, mono.effnon);
  }
  return p;
}

TensorFunction SvdSplit::reconstruct(int n) const {
  if (parts.empty()) throw ArgumentError("SvdSplit::reconstruct: no parts");
  const auto& mu = parts.front().inner.measure;
  TensorFunction out(n, mu);
  for (std::size_t idx = 0; idx < out.size(); ++idx) {
    const auto x = out.decode(idx);
    const auto xi = without(x, j);
    cplx v = 0.0;
    for (const auto& p : parts)
      v += p.coefficient * p.inner.values[p.inner.encode(xi)] * p.outer[x[j]];
    out.values[idx] = v;
  }
  return out;
}

SvdSplit svd_split(const TensorFunction& f, const SplitBasis& b, int j, bool effective) {
  if (!same_measure(f.measure, b.measure)) throw ArgumentError("svd_split: measure mismatch");
  if (j < 0 || j >= f.n) throw ArgumentError("svd_split: coordinate out of range");
  if (!effective) {
    const auto p = homogeneity(f, b);
    if (!p.embedding_homogenous || !p.nonembed_homogenous)
      throw ArgumentError("svd_split: input is not embedding and non-embedding homogenous");
  }
  const auto basis = b.functions();
  const auto c = to_coefficients(f, basis);
  const std::size_t m = f.measure.size();
  TensorFunction row_shape(f.n - 1, f.measure);
  const std::size_t rows = row_shape.size();
  Eigen::MatrixXcd mat = Eigen::MatrixXcd::Zero(rows, m);
  for (std::size_t i = 0; i < c.size(); ++i) {
    const auto x = c.decode(i);
    mat(row_shape.encode(without(x, j)), x[j]) = c.values[i];
  }
  SvdSplit out;
  out.j = j;
  auto inner_from = [&](const Eigen::VectorXcd& col) {
    TensorFunction t(f.n - 1, f.measure);
    for (std::size_t r = 0; r < rows; ++r) t.values[r] = col(r);
    return from_coefficients(t, basis);
  };
  std::vector<int> ne_cols;
  for (std::size_t k = 0; k < m; ++k) {
    if (b.elements[k].tag != BasisTag::Embed) {
      ne_cols.push_back(static_cast<int>(k));
      continue;
    }
    const double norm = mat.col(k).norm();
    if (norm <= tol::kEqual) continue;
    SvdPart p;
    p.coefficient = norm;
    p.inner = inner_from(mat.col(k) / norm);
    p.outer = b.elements[k].values;
    p.tag = BasisTag::Embed;
    p.character = b.elements[k].character;
    out.parts.push_back(std::move(p));
  }
  if (!ne_cols.empty()) {
    Eigen::MatrixXcd block(rows, ne_cols.size());
    for (std::size_t t = 0; t < ne_cols.size(); ++t) block.col(t) = mat.col(ne_cols[t]);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(block, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& s = svd.singularValues();
    for (Eigen::Index t = 0; t < s.size(); ++t) {
      if (s(t) <= tol::kEqual) continue;
      SvdPart p;
      p.coefficient = s(t);
      p.inner = inner_from(svd.matrixU().col(t));
      p.outer.assign(m, 0.0);
      for (std::size_t k = 0; k < ne_cols.size(); ++k) {
        const cplx w = std::conj(svd.matrixV()(k, t));
        for (std::size_t a = 0; a < m; ++a) p.outer[a] += w * b.elements[ne_cols[k]].values[a];
      }
      p.tag = BasisTag::NonEmbed;
      out.parts.push_back(std::move(p));
    }
  }
  return out;
}

// ----------------------------------------------------------- beta / delta

namespace {

struct ClassSpec {
  bool homogeneous = false;
  int nedeg = -1;  // -1: any
  int min_effnon = 0;
};

// Per coefficient index: class key, or empty when the monomial is excluded.
struct ClassIndex {
  UnivariateBasis basis;
  std::vector<std::vector<int>> key;
  std::vector<bool> allowed;
  std::size_t allowed_count = 0;
};

ClassIndex index_class(const SplitBasis& b, int n, const ClassSpec& spec) {
  ClassIndex ci;
  ci.basis = b.functions();
  TensorFunction shape(n, b.measure);
  ci.key.resize(shape.size());
  ci.allowed.resize(shape.size());
  for (std::size_t i = 0; i < shape.size(); ++i) {
    const auto mono = Monomial::make(b, shape.decode(i));
    const bool ok = (spec.nedeg < 0 || mono.nedeg == spec.nedeg) && mono.effnon >= spec.min_effnon;
    ci.allowed[i] = ok;
    if (!ok) continue;
    ++ci.allowed_count;
    if (spec.homogeneous) {
      ci.key[i].push_back(mono.nedeg);
      for (const auto& [ch, k] : mono.embeddeg_by_character) {
        ci.key[i].push_back(ch);
        ci.key[i].push_back(k);
      }
    }
  }
  return ci;
}

// Best unit vector of the class in direction u; returns the projection norm.
double project_best(const TensorFunction& u, const ClassIndex& ci, TensorFunction& out) {
  auto c = to_coefficients(u, ci.basis);
  std::map<std::vector<int>, double> weight;
  for (std::size_t i = 0; i < c.size(); ++i)
    if (ci.allowed[i]) weight[ci.key[i]] += std::norm(c.values[i]);
  const std::vector<int>* best = nullptr;
  double bw = -1.0;
  for (const auto& [k, w] : weight)
    if (w > bw) {
      bw = w;
      best = &k;
    }
  const double norm = std::sqrt(std::max(0.0, bw));
  if (norm <= 1e-300) {
    // degenerate direction: fall back to the first admissible monomial
    for (auto& v : c.values) v = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i)
      if (ci.allowed[i]) {
        c.values[i] = 1.0;
        break;
      }
    out = from_coefficients(c, ci.basis);
    return 0.0;
  }
  for (std::size_t i = 0; i < c.size(); ++i)
    if (!ci.allowed[i] || ci.key[i] != *best) c.values[i] = 0.0;
  out = (1.0 / norm) * from_coefficients(c, ci.basis);
  return norm;
}

// conj(E[a * b | coordinate]) under the tensor support
TensorFunction conditional_target(const TensorSupport& ts, int which, const TensorFunction& a,
                                  const TensorFunction& b, const std::vector<double>& mu, int n) {
  TensorFunction v(n, mu);
  for (std::size_t k = 0; k < ts.size(); ++k) {
    std::size_t at, ia, ib;
    if (which == 0) {
      at = ts.xi[k], ia = ts.yi[k], ib = ts.zi[k];
    } else if (which == 1) {
      at = ts.yi[k], ia = ts.xi[k], ib = ts.zi[k];
    } else {
      at = ts.zi[k], ia = ts.xi[k], ib = ts.yi[k];
    }
    v.values[at] += ts.p[k] * a.values[ia] * b.values[ib];
  }
  for (std::size_t i = 0; i < v.size(); ++i) v.values[i] = std::conj(v.values[i] / v.prob(i));
  return v;
}

struct RunResult {
  double value = -1.0;
  TensorFunction f, g, h;
  int iterations = 0;
  double residual = 0.0;
};

RunResult run_alternating(const TensorSupport& ts, const std::array<ClassIndex, 3>& ci,
                          const std::array<std::vector<double>, 3>& mu, int n,
                          const ExtremalOptions& opt, std::uint64_t stream) {
  Rng rng(opt.seed, "extremal", stream);
  RunResult r;
  r.g = random_function(n, mu[1], rng);
  r.h = random_function(n, mu[2], rng);
  double prev = -1.0;
  for (int round = 1; round <= opt.max_rounds; ++round) {
    project_best(conditional_target(ts, 0, r.g, r.h, mu[0], n), ci[0], r.f);
    project_best(conditional_target(ts, 1, r.f, r.h, mu[1], n), ci[1], r.g);
    const double v = project_best(conditional_target(ts, 2, r.f, r.g, mu[2], n), ci[2], r.h);
    r.iterations = round;
    r.residual = std::abs(v - prev);
    r.value = v;
    if (round > 1 && r.residual < opt.residual) break;
    prev = v;
  }
  return r;
}

ExtremalReport run_estimate(const TripleDistribution& d, const SplitBases& b, int n,
                            const std::array<ClassSpec, 3>& spec, const ExtremalOptions& opt,
                            ExtremalReport rep) {
  if (n < 1 || n > 5) throw ResourceError("extremal estimates support 1 <= n <= 5");
  if (opt.restarts < 1) throw ArgumentError("at least one restart is required");
  const auto ts = tensor_support(d, n, opt.max_points);
  std::array<ClassIndex, 3> ci;
  std::array<std::vector<double>, 3> mu;
  for (int c = 0; c < 3; ++c) {
    mu[c] = b.basis[c].measure;
    if (static_cast<int>(mu[c].size()) != d.alphabet(c).size())
      throw ArgumentError("split bases do not match the distribution");
    ci[c] = index_class(b.basis[c], n, spec[c]);
    if (ci[c].allowed_count == 0)
      throw ArgumentError(std::string("empty class for coordinate ") + coord_name(c));
  }
  std::vector<RunResult> runs(opt.restarts);
  for (int r = 0; r < opt.restarts; ++r)
    runs[r] = run_alternating(ts, ci, mu, n, opt, static_cast<std::uint64_t>(r));
  int best = 0;
  for (int r = 1; r < opt.restarts; ++r)
    if (runs[r].value > runs[best].value) best = r;  // ties keep the lower index
  const auto& w = runs[best];
  rep.n = n;
  rep.value = w.value;
  rep.f = w.f;
  rep.g = w.g;
  rep.h = w.h;
  rep.restarts = opt.restarts;
  rep.best_restart = best;
  rep.iterations = w.iterations;
  rep.final_residual = w.residual;
  rep.recomputed =
      std::abs(correlate(ts, w.f, w.g, w.h)) / (norm2(w.f) * norm2(w.g) * norm2(w.h));
  // class membership by a fresh monomial scan
  bool ok = true;
  const TensorFunction* wit[3] = {&rep.f, &rep.g, &rep.h};
  for (int c = 0; c < 3; ++c) {
    const auto p = homogeneity(*wit[c], b.basis[c]);
    if (spec[c].homogeneous && (!p.embedding_homogenous || !p.nonembed_homogenous)) ok = false;
    if (spec[c].nedeg >= 0 && p.nedeg != spec[c].nedeg) ok = false;
    if (p.min_effnon < spec[c].min_effnon) ok = false;
  }
  rep.class_check = ok;
  return rep;
}

}  // namespace

nlohmann::json ExtremalReport::to_json() const {
  return {{"kind", kind},
          {"n", n},
          {"d", d},
          {"d_prime", d_prime},
          {"value", value},
          {"recomputed", recomputed},
          {"restarts", restarts},
          {"best_restart", best_restart},
          {"iterations", iterations},
          {"residual", final_residual},
          {"class_check", class_check}};
}

ExtremalReport estimate_beta(const TripleDistribution& d, const SplitBases& b, int n, int deg,
                             int deg_prime, const ExtremalOptions& opt) {
  if (!(0 <= deg_prime && deg_prime <= deg && deg <= n))
    throw ArgumentError("estimate_beta needs 0 <= d' <= d <= n");
  ExtremalReport rep;
  rep.kind = "beta";
  rep.d = deg;
  rep.d_prime = deg_prime;
  std::array<ClassSpec, 3> spec;
  spec[0] = {true, deg, deg_prime};
  spec[1] = {true, -1, 0};
  spec[2] = {true, -1, 0};
  return run_estimate(d, b, n, spec, opt, rep);
}

ExtremalReport estimate_delta(const TripleDistribution& d, const SplitBases& b, int n,
                              int deg_prime, const ExtremalOptions& opt) {
  if (!(0 <= deg_prime && deg_prime <= n)) throw ArgumentError("estimate_delta needs 0 <= d' <= n");
  ExtremalReport rep;
  rep.kind = "delta";
  rep.d = -1;
  rep.d_prime = deg_prime;
  std::array<ClassSpec, 3> spec;
  spec[0] = {false, -1, deg_prime};
  return run_estimate(d, b, n, spec, opt, rep);
}

// ------------------------------------------------------------ base cases

AdditiveBase additive_base_constant(const TripleDistribution& d, const SplitBasis& sb) {
  const auto supp = d.support();
  const int my = d.alphabet(1).size(), mz = d.alphabet(2).size(), mx = d.alphabet(0).size();
  if (static_cast<int>(sb.measure.size()) != mx)
    throw ArgumentError("additive_base_constant: basis does not match the x alphabet");
  std::vector<double> pa;
  for (const auto& a : supp) pa.push_back(d.prob(a).get_d());
  const auto mux = sb.measure;

  // orthonormal basis of {g(y) + h(z)} inside L2(mu), with (g, h) representatives
  struct Vec {
    std::vector<cplx> on_atoms, g, h;
  };
  std::vector<Vec> basis;
  auto add_candidate = [&](Vec v) {
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& b : basis) {
        cplx c = 0.0;
        for (std::size_t k = 0; k < supp.size(); ++k)
          c += pa[k] * v.on_atoms[k] * std::conj(b.on_atoms[k]);
        for (std::size_t k = 0; k < supp.size(); ++k) v.on_atoms[k] -= c * b.on_atoms[k];
        for (int y = 0; y < my; ++y) v.g[y] -= c * b.g[y];
        for (int z = 0; z < mz; ++z) v.h[z] -= c * b.h[z];
      }
    double nn = 0.0;
    for (std::size_t k = 0; k < supp.size(); ++k) nn += pa[k] * std::norm(v.on_atoms[k]);
    const double norm = std::sqrt(nn);
    if (norm <= kPivotResidual) return;
    for (auto& x : v.on_atoms) x /= norm;
    for (auto& x : v.g) x /= norm;
    for (auto& x : v.h) x /= norm;
    basis.push_back(std::move(v));
  };
  for (int y = 0; y < my; ++y) {
    Vec v{std::vector<cplx>(supp.size()), std::vector<cplx>(my, 0.0), std::vector<cplx>(mz, 0.0)};
    for (std::size_t k = 0; k < supp.size(); ++k) v.on_atoms[k] = supp[k][1] == y ? 1.0 : 0.0;
    v.g[y] = 1.0;
    add_candidate(std::move(v));
  }
  for (int z = 0; z < mz; ++z) {
    Vec v{std::vector<cplx>(supp.size()), std::vector<cplx>(my, 0.0), std::vector<cplx>(mz, 0.0)};
    for (std::size_t k = 0; k < supp.size(); ++k) v.on_atoms[k] = supp[k][2] == z ? 1.0 : 0.0;
    v.h[z] = 1.0;
    add_candidate(std::move(v));
  }

  // A[i][k] = <P E[w_k | x], b_i> over the non-embedding basis elements
  std::vector<int> rows;
  for (std::size_t i = 0; i < sb.elements.size(); ++i)
    if (sb.elements[i].tag != BasisTag::Embed) rows.push_back(static_cast<int>(i));
  AdditiveBase out;
  out.f.assign(mx, 0.0);
  out.g.assign(my, 0.0);
  out.h.assign(mz, 0.0);
  if (rows.empty() || basis.empty()) return out;
  Eigen::MatrixXcd a(rows.size(), basis.size());
  for (std::size_t k = 0; k < basis.size(); ++k) {
    std::vector<cplx> cx(mx, 0.0);
    for (std::size_t t = 0; t < supp.size(); ++t) cx[supp[t][0]] += pa[t] * basis[k].on_atoms[t];
    for (int x = 0; x < mx; ++x) cx[x] /= mux[x];
    for (std::size_t r = 0; r < rows.size(); ++r) {
      cplx s = 0.0;
      for (int x = 0; x < mx; ++x) s += mux[x] * cx[x] * std::conj(sb.elements[rows[r]].values[x]);
      a(r, k) = s;
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  out.value = svd.singularValues()(0);
  if (out.value <= tol::kEqual) {
    out.value = std::max(0.0, out.value);
    return out;
  }
  for (std::size_t k = 0; k < basis.size(); ++k) {
    const cplx w = svd.matrixV()(k, 0);
    for (int y = 0; y < my; ++y) out.g[y] += w * basis[k].g[y];
    for (int z = 0; z < mz; ++z) out.h[z] += w * basis[k].h[z];
  }
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const cplx u = svd.matrixU()(r, 0);
    for (int x = 0; x < mx; ++x) out.f[x] += std::conj(u * sb.elements[rows[r]].values[x]);
  }
  return out;
}

double modest_variance(const std::vector<cplx>& f, const std::vector<int>& modest) {
  double s = 0.0;
  for (int a : modest)
    for (int b : modest) s += std::norm(f.at(a) - f.at(b));
  const double k = static_cast<double>(modest.size());
  return s / (k * k);
}

namespace {

double mu_norm(const std::vector<cplx>& f, const std::vector<double>& mu) {
  double s = 0.0;
  for (std::size_t a = 0; a < mu.size(); ++a) s += mu[a] * std::norm(f[a]);
  return std::sqrt(s);
}

std::vector<cplx> normalized(std::vector<cplx> f, const std::vector<double>& mu) {
  const double n = mu_norm(f, mu);
  if (n > 0)
    for (auto& v : f) v /= n;
  return f;
}

// top eigenvector of Var_M relative to the mu norm
std::pair<double, std::vector<cplx>> top_variance(const std::vector<double>& mu,
                                                  const std::vector<int>& modest) {
  const std::size_t m = mu.size();
  const double k = static_cast<double>(modest.size());
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(m, m);
  for (int a : modest) {
    l(a, a) += 2.0 / k;
    for (int b : modest) l(a, b) -= 2.0 / (k * k);
  }
  Eigen::MatrixXd s(m, m);
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b) s(a, b) = l(a, b) / std::sqrt(mu[a] * mu[b]);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
  const Eigen::Index top = m - 1;
  std::vector<cplx> v(m);
  for (std::size_t a = 0; a < m; ++a) v[a] = es.eigenvectors()(a, top) / std::sqrt(mu[a]);
  return {es.eigenvalues()(top), normalized(v, mu)};
}

struct Partners {
  double value = 0.0;
  std::vector<cplx> g, h;
};

Partners partners(const TripleDistribution& d, const std::vector<cplx>& f) {
  const auto muy = d.marginal1_double(1), muz = d.marginal1_double(2);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(muy.size(), muz.size());
  for (const auto& [a, p] : d.atoms())
    m(a[1], a[2]) += p.get_d() * f.at(a[0]) / std::sqrt(muy[a[1]] * muz[a[2]]);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Partners out;
  out.value = svd.singularValues()(0);
  for (std::size_t y = 0; y < muy.size(); ++y)
    out.g.push_back(std::conj(svd.matrixU()(y, 0)) / std::sqrt(muy[y]));
  for (std::size_t z = 0; z < muz.size(); ++z)
    out.h.push_back(svd.matrixV()(z, 0) / std::sqrt(muz[z]));
  return out;
}

}  // namespace

double max_modest_variance(const std::vector<double>& mu, const std::vector<int>& modest) {
  return top_variance(mu, modest).first;
}

double best_partner_value(const TripleDistribution& d, const std::vector<cplx>& f) {
  if (static_cast<int>(f.size()) != d.alphabet(0).size())
    throw ArgumentError("best_partner_value: f has the wrong size");
  return partners(d, f).value;
}

std::vector<RelaxedPoint> relaxed_base_profile(const TripleDistribution& d, const SplitBasis& sb,
                                               const std::vector<double>& taus,
                                               const ExtremalOptions& opt) {
  if (!sb.modest || sb.modest->size() < 2)
    throw ArgumentError("relaxed_base_profile needs a modest set of size at least 2");
  const auto& modest = *sb.modest;
  const auto& mu = sb.measure;
  const std::size_t m = mu.size();
  const auto [vmax, emax] = top_variance(mu, modest);
  std::vector<RelaxedPoint> out;
  for (double tau : taus) {
    RelaxedPoint pt{tau, 0.0, tau <= vmax + tol::kSlack};
    if (!pt.feasible) {
      out.push_back(pt);
      continue;
    }
    // move f toward the max-variance direction until the constraint holds
    auto enforce = [&](const std::vector<cplx>& f0) {
      if (modest_variance(f0, modest) >= tau) return f0;
      cplx overlap = 0.0;
      for (std::size_t a = 0; a < m; ++a) overlap += mu[a] * f0[a] * std::conj(emax[a]);
      const cplx phase = std::abs(overlap) > 0 ? overlap / std::abs(overlap) : cplx(1.0);
      auto mix = [&](double t) {
        std::vector<cplx> v(m);
        for (std::size_t a = 0; a < m; ++a) v[a] = (1.0 - t) * f0[a] + t * phase * emax[a];
        return normalized(v, mu);
      };
      double lo = 0.0, hi = 1.0;
      for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        (modest_variance(mix(mid), modest) >= tau ? hi : lo) = mid;
      }
      return mix(hi);
    };
    double best = -1.0;
    for (int r = 0; r < opt.restarts; ++r) {
      Rng rng(opt.seed, "relaxed", static_cast<std::uint64_t>(r));
      std::vector<cplx> f(m);
      for (auto& v : f) v = rng.complex_normal();
      f = enforce(normalized(f, mu));
      double prev = -1.0;
      double val = partners(d, f).value;
      for (int round = 0; round < opt.max_rounds; ++round) {
        const auto p = partners(d, f);
        std::vector<cplx> u(m, 0.0);
        for (const auto& [a, pr] : d.atoms()) u[a[0]] += pr.get_d() * p.g[a[1]] * p.h[a[2]];
        for (std::size_t a = 0; a < m; ++a) u[a] = std::conj(u[a] / mu[a]);
        auto next = enforce(normalized(u, mu));
        const double v = partners(d, next).value;
        if (v >= val) {
          f = std::move(next);
          val = v;
        }
        if (std::abs(val - prev) < opt.residual) break;
        prev = val;
      }
      best = std::max(best, val);
    }
    pt.value = best;
    out.push_back(pt);
  }
  return out;
}

// ------------------------------------------------------------- linearity

LinearityIdentity group_linearity_correlation(const AbelianGroup& grp, const TensorFunction& f,
                                              const TensorFunction& g, const TensorFunction& h) {
  const long q = grp.order();
  const int n = f.n;
  if (g.n != n || h.n != n) throw ArgumentError("group_linearity_correlation: arity mismatch");
  for (const auto* t : {&f, &g, &h})
    if (t->m() != q) throw ArgumentError("group_linearity_correlation: domain is not the group");
  const std::vector<double> uni(q, 1.0 / static_cast<double>(q));
  LinearityIdentity out;
  // direct sum over a, b with c = -a - b
  TensorFunction shape(n, uni);
  std::vector<int> c(n);
  for (std::size_t ia = 0; ia < shape.size(); ++ia) {
    const auto a = shape.decode(ia);
    for (std::size_t ib = 0; ib < shape.size(); ++ib) {
      const auto b = shape.decode(ib);
      for (int i = 0; i < n; ++i)
        c[i] = static_cast<int>(grp.index(grp.neg(grp.add(grp.element(a[i]), grp.element(b[i])))));
      out.lhs += f.values[ia] * g.values[ib] * h.values[h.encode(c)];
    }
  }
  out.lhs /= static_cast<double>(shape.size()) * static_cast<double>(shape.size());
  // character side
  UnivariateBasis chars;
  for (const auto& chi : all_characters(grp)) {
    std::vector<cplx> v(q);
    for (long e = 0; e < q; ++e) v[e] = chi(grp.element(e));
    chars.push_back(std::move(v));
  }
  TensorFunction fu = f, gu = g, hu = h;
  fu.measure = gu.measure = hu.measure = uni;
  const auto fc = to_coefficients(fu, chars), gc = to_coefficients(gu, chars),
             hc = to_coefficients(hu, chars);
  for (std::size_t i = 0; i < fc.size(); ++i) out.rhs += fc.values[i] * gc.values[i] * hc.values[i];
  return out;
}

}  // namespace abelia
