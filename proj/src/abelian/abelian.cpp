// SPDX-License-Identifier: Apache-2.0
#include "abelia/abelian.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>

#include "abelia/errors.hpp"
#include "smith.hpp"

namespace abelia {

namespace {

std::vector<std::pair<int, int>> factorize(int n) {
  std::vector<std::pair<int, int>> out;
  for (int p = 2; p * p <= n; ++p) {
    int e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    if (e) out.emplace_back(p, e);
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

void partitions(int n, int max_part, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (n == 0) {
    out.push_back(cur);
    return;
  }
  for (int k = std::min(n, max_part); k >= 1; --k) {
    cur.push_back(k);
    partitions(n - k, k, cur, out);
    cur.pop_back();
  }
}

int ipow(int b, int e) {
  int r = 1;
  while (e-- > 0) r *= b;
  return r;
}

long mod(long a, long q) { return ((a % q) + q) % q; }

}  // namespace

AbelianGroup::AbelianGroup(const std::vector<int>& cyclic_orders) {
  std::vector<std::pair<int, int>> parts;
  for (std::size_t j = 0; j < cyclic_orders.size(); ++j) {
    const int q = cyclic_orders[j];
    if (q < 1) throw ArgumentError("cyclic order must be positive");
    for (auto [p, e] : factorize(q)) parts.emplace_back(ipow(p, e), static_cast<int>(j));
  }
  std::stable_sort(parts.begin(), parts.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  for (auto [f, s] : parts) {
    factors_.push_back(f);
    source_.push_back(s);
  }
}

long AbelianGroup::order() const {
  long o = 1;
  for (int f : factors_) o *= f;
  return o;
}

Element AbelianGroup::add(const Element& a, const Element& b) const {
  Element r(factors_.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = (a[i] + b[i]) % factors_[i];
  return r;
}

Element AbelianGroup::sub(const Element& a, const Element& b) const {
  Element r(factors_.size());
  for (std::size_t i = 0; i < r.size(); ++i)
    r[i] = static_cast<int>(mod(a[i] - b[i], factors_[i]));
  return r;
}

Element AbelianGroup::neg(const Element& a) const { return sub(zero(), a); }

Element AbelianGroup::scale(long k, const Element& a) const {
  Element r(factors_.size());
  for (std::size_t i = 0; i < r.size(); ++i)
    r[i] = static_cast<int>(mod(mod(k, factors_[i]) * a[i], factors_[i]));
  return r;
}

Element AbelianGroup::reduce(const std::vector<long>& v) const {
  if (v.size() != factors_.size()) throw ArgumentError("element rank mismatch");
  Element r(factors_.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = static_cast<int>(mod(v[i], factors_[i]));
  return r;
}

Element AbelianGroup::from_source(const std::vector<long>& residues) const {
  Element r(factors_.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (source_.empty() || static_cast<std::size_t>(source_[i]) >= residues.size())
      throw ArgumentError("from_source: residue list does not match the presentation");
    r[i] = static_cast<int>(mod(residues[source_[i]], factors_[i]));
  }
  return r;
}

long AbelianGroup::index(const Element& a) const {
  long idx = 0;
  for (std::size_t i = 0; i < factors_.size(); ++i) idx = idx * factors_[i] + a[i];
  return idx;
}

Element AbelianGroup::element(long idx) const {
  Element r(factors_.size());
  for (std::size_t i = factors_.size(); i-- > 0;) {
    r[i] = static_cast<int>(idx % factors_[i]);
    idx /= factors_[i];
  }
  return r;
}

std::vector<Element> AbelianGroup::elements() const {
  std::vector<Element> out;
  const long n = order();
  out.reserve(n);
  for (long i = 0; i < n; ++i) out.push_back(element(i));
  return out;
}

std::string AbelianGroup::to_string() const {
  if (factors_.empty()) return "0";
  std::string s;
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    if (i) s += "x";
    s += "Z" + std::to_string(factors_[i]);
  }
  return s;
}

bool AbelianGroup::operator<(const AbelianGroup& o) const {
  if (order() != o.order()) return order() < o.order();
  return factors_ < o.factors_;
}

std::vector<AbelianGroup> groups_of_order(int n) {
  if (n < 1) throw ArgumentError("group order must be positive");
  std::vector<std::vector<int>> lists{{}};
  for (auto [p, e] : factorize(n)) {
    std::vector<std::vector<int>> parts;
    std::vector<int> cur;
    partitions(e, e, cur, parts);
    std::vector<std::vector<int>> next;
    for (const auto& l : lists)
      for (const auto& part : parts) {
        auto m = l;
        for (int k : part) m.push_back(ipow(p, k));
        next.push_back(m);
      }
    lists = std::move(next);
  }
  std::vector<AbelianGroup> out;
  for (const auto& l : lists) out.emplace_back(l);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<AbelianGroup> groups_up_to(int r) {
  std::vector<AbelianGroup> out;
  for (int n = 1; n <= r; ++n)
    for (auto& g : groups_of_order(n)) out.push_back(std::move(g));
  return out;
}

bool EmbeddingTriple::is_trivial() const {
  const Element z = group.zero();
  for (const auto& m : maps)
    for (const auto& v : m)
      if (v != z) return false;
  return true;
}

bool EmbeddingTriple::valid_on(const TripleDistribution& d) const {
  for (int c = 0; c < 3; ++c)
    if (static_cast<int>(maps[c].size()) != d.alphabet(c).size()) return false;
  const Element z = group.zero();
  for (const auto& kv : d.atoms()) {
    const auto& a = kv.first;
    if (group.add(group.add(maps[0][a[0]], maps[1][a[1]]), maps[2][a[2]]) != z) return false;
  }
  return true;
}

std::vector<long> EmbeddingTriple::key() const {
  std::vector<long> k;
  for (const auto& m : maps)
    for (const auto& v : m) k.push_back(group.index(v));
  return k;
}

nlohmann::json EmbeddingTriple::to_json(const TripleDistribution& d) const {
  nlohmann::json j;
  j["group"] = group.to_string();
  j["factors"] = group.factors();
  const char* names[3] = {"sigma", "gamma", "phi"};
  for (int c = 0; c < 3; ++c) {
    nlohmann::json m = nlohmann::json::object();
    for (std::size_t s = 0; s < maps[c].size(); ++s) m[d.alphabet(c).name(s)] = maps[c][s];
    j[names[c]] = m;
  }
  return j;
}

namespace {

// Unknown layout: sigma symbols, then gamma, then phi. Rows: one per support
// atom, the anchor pins, and pins for symbols that never occur.
std::vector<std::vector<mpz_class>> support_system(const TripleDistribution& d) {
  const int nx = d.alphabet(0).size(), ny = d.alphabet(1).size(), nz = d.alphabet(2).size();
  const int offs[3] = {0, nx, nx + ny};
  const int nvar = nx + ny + nz;
  const auto supp = d.support();
  if (supp.empty()) throw ArgumentError("empty support");
  std::vector<std::vector<mpz_class>> rows;
  std::vector<bool> used(nvar, false);
  for (const auto& a : supp) {
    std::vector<mpz_class> r(nvar, 0);
    for (int c = 0; c < 3; ++c) {
      r[offs[c] + a[c]] += 1;
      used[offs[c] + a[c]] = true;
    }
    rows.push_back(std::move(r));
  }
  const Atom& anchor = supp.front();
  for (int c = 0; c < 3; ++c) {
    std::vector<mpz_class> r(nvar, 0);
    r[offs[c] + anchor[c]] = 1;
    rows.push_back(std::move(r));
  }
  for (int v = 0; v < nvar; ++v) {
    if (used[v]) continue;
    std::vector<mpz_class> r(nvar, 0);
    r[v] = 1;
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace

IntegerEmbeddings solve_integer_embeddings(const TripleDistribution& d) {
  const auto rows = support_system(d);
  const int nvar = static_cast<int>(rows.front().size());
  // rational reduced row echelon form
  std::vector<std::vector<mpq_class>> m;
  for (const auto& r : rows) {
    std::vector<mpq_class> q(nvar);
    for (int j = 0; j < nvar; ++j) q[j] = r[j];
    m.push_back(std::move(q));
  }
  std::vector<int> pivots;
  int row = 0;
  for (int col = 0; col < nvar && row < static_cast<int>(m.size()); ++col) {
    int p = -1;
    for (int i = row; i < static_cast<int>(m.size()); ++i)
      if (m[i][col] != 0) {
        p = i;
        break;
      }
    if (p < 0) continue;
    std::swap(m[row], m[p]);
    const mpq_class inv = 1 / m[row][col];
    for (auto& v : m[row]) v *= inv;
    for (int i = 0; i < static_cast<int>(m.size()); ++i) {
      if (i == row || m[i][col] == 0) continue;
      const mpq_class f = m[i][col];
      for (int j = 0; j < nvar; ++j) m[i][j] -= f * m[row][j];
    }
    pivots.push_back(col);
    ++row;
  }
  IntegerEmbeddings out;
  std::vector<bool> is_pivot(nvar, false);
  for (int c : pivots) is_pivot[c] = true;
  const int nx = d.alphabet(0).size(), ny = d.alphabet(1).size();
  for (int free = 0; free < nvar; ++free) {
    if (is_pivot[free]) continue;
    std::vector<mpq_class> v(nvar, 0);
    v[free] = 1;
    for (std::size_t k = 0; k < pivots.size(); ++k) v[pivots[k]] = -m[k][free];
    mpz_class l = 1;
    for (const auto& x : v) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x.get_den_mpz_t());
    std::vector<mpz_class> iv(nvar);
    mpz_class g = 0;
    for (int j = 0; j < nvar; ++j) {
      mpq_class t = v[j] * l;
      iv[j] = t.get_num();
      mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), iv[j].get_mpz_t());
    }
    if (g > 1)
      for (auto& x : iv) x /= g;
    std::array<std::vector<mpz_class>, 3> b;
    for (int j = 0; j < nvar; ++j) (j < nx ? b[0] : j < nx + ny ? b[1] : b[2]).push_back(iv[j]);
    out.basis.push_back(std::move(b));
  }
  out.trivial_only = out.basis.empty();
  const auto diag = detail::diagonalize(rows);
  out.invariant_product = 1;
  for (const auto& x : diag.d) out.invariant_product *= abs(x);
  return out;
}

std::vector<EmbeddingTriple> enumerate_group_embeddings(const TripleDistribution& d,
                                                        const AbelianGroup& h,
                                                        std::size_t budget) {
  const int nx = d.alphabet(0).size(), ny = d.alphabet(1).size(), nz = d.alphabet(2).size();
  const int nvar = nx + ny + nz;
  const auto rows = support_system(d);
  if (h.trivial()) {
    EmbeddingTriple e{h, {std::vector<Element>(nx), std::vector<Element>(ny),
                          std::vector<Element>(nz)}};
    return {e};
  }
  const auto diag = detail::diagonalize(rows);
  const int rank = static_cast<int>(diag.d.size());

  // per factor: all solutions of A v = 0 (mod q), as v = V w
  std::vector<std::vector<std::vector<int>>> per_factor;
  double total = 1.0;
  for (int q : h.factors()) {
    std::vector<std::vector<int>> choices(nvar);
    for (int i = 0; i < nvar; ++i) {
      if (i < rank) {
        mpz_class g;
        mpz_class qq = q;
        mpz_gcd(g.get_mpz_t(), diag.d[i].get_mpz_t(), qq.get_mpz_t());
        const int gi = static_cast<int>(g.get_si());
        const int step = q / gi;
        for (int k = 0; k < gi; ++k) choices[i].push_back(k * step);
      } else {
        for (int k = 0; k < q; ++k) choices[i].push_back(k);
      }
    }
    double count = 1.0;
    for (const auto& c : choices) count *= static_cast<double>(c.size());
    total *= count;
    if (total > static_cast<double>(budget))
      throw ResourceError("embedding enumeration into " + h.to_string() + " needs " +
                          std::to_string(static_cast<long long>(total)) +
                          " solutions, budget is " + std::to_string(budget));
    std::vector<std::vector<long>> vq(nvar, std::vector<long>(nvar));
    for (int i = 0; i < nvar; ++i)
      for (int j = 0; j < nvar; ++j) {
        mpz_class r;
        mpz_class qq = q;
        mpz_mod(r.get_mpz_t(), diag.v[i][j].get_mpz_t(), qq.get_mpz_t());
        vq[i][j] = r.get_si();
      }
    std::vector<std::vector<int>> sols;
    std::vector<std::size_t> pos(nvar, 0);
    for (;;) {
      std::vector<int> v(nvar);
      for (int i = 0; i < nvar; ++i) {
        long s = 0;
        for (int j = 0; j < nvar; ++j) s += vq[i][j] * choices[j][pos[j]];
        v[i] = static_cast<int>(s % q);
      }
      sols.push_back(std::move(v));
      int k = nvar - 1;
      while (k >= 0 && ++pos[k] == choices[k].size()) pos[k--] = 0;
      if (k < 0) break;
    }
    per_factor.push_back(std::move(sols));
  }

  std::vector<EmbeddingTriple> out;
  const int nf = h.rank();
  std::vector<std::size_t> pos(nf, 0);
  for (;;) {
    EmbeddingTriple e{h, {std::vector<Element>(nx, Element(nf)), std::vector<Element>(ny, Element(nf)),
                          std::vector<Element>(nz, Element(nf))}};
    for (int f = 0; f < nf; ++f) {
      const auto& v = per_factor[f][pos[f]];
      for (int i = 0; i < nvar; ++i) {
        if (i < nx)
          e.maps[0][i][f] = v[i];
        else if (i < nx + ny)
          e.maps[1][i - nx][f] = v[i];
        else
          e.maps[2][i - nx - ny][f] = v[i];
      }
    }
    out.push_back(std::move(e));
    int k = nf - 1;
    while (k >= 0 && ++pos[k] == per_factor[k].size()) pos[k--] = 0;
    if (k < 0) break;
  }
  std::sort(out.begin(), out.end(),
            [](const EmbeddingTriple& a, const EmbeddingTriple& b) { return a.key() < b.key(); });
  return out;
}

Element Homomorphism::apply(const AbelianGroup& h2, const Element& a) const {
  Element r = h2.zero();
  for (std::size_t i = 0; i < a.size(); ++i) r = h2.add(r, h2.scale(a[i], generator_images[i]));
  return r;
}

std::vector<Homomorphism> homomorphisms(const AbelianGroup& h1, const AbelianGroup& h2,
                                        bool injective_only) {
  if (injective_only && h1.order() > h2.order()) return {};
  const auto elems2 = h2.elements();
  std::vector<std::vector<Element>> cand(h1.rank());
  for (int i = 0; i < h1.rank(); ++i)
    for (const auto& g : elems2)
      if (h2.scale(h1.factors()[i], g) == h2.zero()) cand[i].push_back(g);
  std::vector<Homomorphism> out;
  const auto elems1 = h1.elements();
  std::vector<std::size_t> pos(h1.rank(), 0);
  for (;;) {
    Homomorphism m;
    for (int i = 0; i < h1.rank(); ++i) m.generator_images.push_back(cand[i][pos[i]]);
    bool ok = true;
    if (injective_only) {
      std::set<long> seen;
      for (const auto& a : elems1)
        if (!seen.insert(h2.index(m.apply(h2, a))).second) {
          ok = false;
          break;
        }
    }
    if (ok) out.push_back(std::move(m));
    int k = h1.rank() - 1;
    while (k >= 0 && ++pos[k] == cand[k].size()) pos[k--] = 0;
    if (k < 0) break;
  }
  return out;
}

namespace {

const std::vector<Homomorphism>& cached_injections(const AbelianGroup& h1, const AbelianGroup& h2) {
  thread_local std::map<std::pair<std::vector<int>, std::vector<int>>, std::vector<Homomorphism>>
      cache;
  auto key = std::make_pair(h1.factors(), h2.factors());
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, homomorphisms(h1, h2, true)).first;
  return it->second;
}

bool same_partition(const std::vector<Element>& a, const std::vector<Element>& b) {
  for (std::size_t s = 0; s < a.size(); ++s)
    for (std::size_t t = s + 1; t < a.size(); ++t)
      if ((a[s] == a[t]) != (b[s] == b[t])) return false;
  return true;
}

// labels symbols by first occurrence of their value
std::vector<int> partition_labels(const AbelianGroup& h, const std::vector<Element>& m) {
  std::map<long, int> seen;
  std::vector<int> out;
  for (const auto& v : m) out.push_back(seen.emplace(h.index(v), static_cast<int>(seen.size())).first->second);
  return out;
}

}  // namespace

bool is_linear_reduction(const EmbeddingTriple& e1, const EmbeddingTriple& e2) {
  for (int c = 0; c < 3; ++c)
    if (e1.maps[c].size() != e2.maps[c].size()) return false;
  if (e1.group.order() > e2.group.order()) return false;
  for (int c = 0; c < 3; ++c)
    if (!same_partition(e1.maps[c], e2.maps[c])) return false;
  const auto& homs = cached_injections(e1.group, e2.group);
  for (int c = 0; c < 3; ++c) {
    bool found = false;
    for (const auto& m : homs) {
      bool ok = true;
      for (std::size_t s = 0; s < e1.maps[c].size() && ok; ++s)
        ok = m.apply(e2.group, e1.maps[c][s]) == e2.maps[c][s];
      if (ok) {
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

EmbeddingTriple bundle(const std::vector<EmbeddingTriple>& comps, std::size_t nx, std::size_t ny,
                       std::size_t nz) {
  std::vector<int> orders;
  for (const auto& c : comps)
    for (int f : c.group.factors()) orders.push_back(f);
  AbelianGroup g(orders);
  const std::size_t sizes[3] = {nx, ny, nz};
  EmbeddingTriple out{g, {}};
  for (int c = 0; c < 3; ++c) {
    for (std::size_t s = 0; s < sizes[c]; ++s) {
      std::vector<long> res;
      for (const auto& comp : comps)
        for (int v : comp.maps[c][s]) res.push_back(v);
      out.maps[c].push_back(orders.empty() ? Element{} : g.from_source(res));
    }
  }
  return out;
}

MasterEmbedding build_master_embedding(const TripleDistribution& d, int max_order,
                                       std::size_t budget) {
  if (max_order < 1) throw ArgumentError("max_order must be at least 1");
  MasterEmbedding m;
  m.max_order = max_order;
  std::vector<EmbeddingTriple> candidates;
  std::map<std::vector<int>, std::vector<std::size_t>> kept_by_shape;
  for (const auto& h : groups_up_to(max_order)) {
    if (h.trivial()) continue;
    for (auto& e : enumerate_group_embeddings(d, h, budget)) {
      if (e.is_trivial()) continue;
      std::vector<int> shape;
      for (int c = 0; c < 3; ++c)
        for (int l : partition_labels(e.group, e.maps[c])) shape.push_back(l);
      // A kept component that reduces e has the same level sets, so dropping e
      // leaves every induced partition unchanged.
      auto& bucket = kept_by_shape[shape];
      bool redundant = false;
      for (std::size_t k : bucket)
        if (is_linear_reduction(m.components[k], e)) {
          redundant = true;
          break;
        }
      if (!redundant) {
        bucket.push_back(m.components.size());
        m.components.push_back(e);
      }
      candidates.push_back(std::move(e));
    }
  }
  m.enumerated = candidates.size();
  m.verify_master = true;
  for (const auto& e : candidates) {
    bool ok = false;
    for (const auto& c : m.components)
      if (is_linear_reduction(c, e)) {
        ok = true;
        break;
      }
    if (!ok) {
      m.verify_master = false;
      break;
    }
  }
  auto b = bundle(m.components, d.alphabet(0).size(), d.alphabet(1).size(), d.alphabet(2).size());
  m.group = b.group;
  m.maps = b.maps;
  return m;
}

nlohmann::json MasterEmbedding::to_json(const TripleDistribution& d) const {
  nlohmann::json j;
  j["max_order"] = max_order;
  j["enumerated_nontrivial"] = enumerated;
  j["verify_master"] = verify_master;
  j["bundled"] = bundled().to_json(d);
  j["components"] = nlohmann::json::array();
  for (const auto& c : components) j["components"].push_back(c.to_json(d));
  return j;
}

std::set<long> image(const AbelianGroup& h, const std::vector<Element>& values) {
  std::set<long> s;
  for (const auto& v : values) s.insert(h.index(v));
  return s;
}

bool is_subgroup(const AbelianGroup& h, const std::set<long>& s) {
  if (!s.count(h.index(h.zero()))) return false;
  for (long a : s)
    for (long b : s)
      if (!s.count(h.index(h.add(h.element(a), h.element(b))))) return false;
  return true;
}

std::set<long> generated_subgroup(const AbelianGroup& h, const std::set<long>& s) {
  std::set<long> g{h.index(h.zero())};
  std::vector<long> frontier(g.begin(), g.end());
  while (!frontier.empty()) {
    std::vector<long> next;
    for (long a : frontier)
      for (long b : s) {
        const long c = h.index(h.add(h.element(a), h.element(b)));
        if (g.insert(c).second) next.push_back(c);
      }
    frontier = std::move(next);
  }
  return g;
}

SaturationFlags is_saturated(const MasterEmbedding& m) {
  SaturationFlags f;
  auto full = [](const AbelianGroup& h, const std::vector<Element>& v) {
    return static_cast<long>(image(h, v).size()) == h.order();
  };
  for (const auto& c : m.components)
    f.per_component.push_back(full(c.group, c.maps[0]) && full(c.group, c.maps[1]) &&
                              full(c.group, c.maps[2]));
  f.overall = full(m.group, m.maps[0]) && full(m.group, m.maps[1]) && full(m.group, m.maps[2]);
  return f;
}

SubgroupPresentation present_subgroup(const AbelianGroup& h, const std::set<long>& s) {
  if (!is_subgroup(h, s)) throw ArgumentError("present_subgroup: set is not a subgroup");
  for (const auto& k : groups_of_order(static_cast<int>(s.size()))) {
    for (const auto& m : homomorphisms(k, h, true)) {
      bool ok = true;
      std::vector<Element> inc;
      for (const auto& a : k.elements()) {
        inc.push_back(m.apply(h, a));
        if (!s.count(h.index(inc.back()))) {
          ok = false;
          break;
        }
      }
      if (ok) return {k, inc};
    }
  }
  throw SearchFailure("present_subgroup: no presentation found");
}

FiniteEmbedding finitize_circle_embedding(const TripleDistribution& d,
                                          const std::array<std::vector<double>, 3>& values,
                                          double tolerance, int max_q) {
  for (int c = 0; c < 3; ++c)
    if (static_cast<int>(values[c].size()) != d.alphabet(c).size())
      throw ArgumentError("finitize: value vector size does not match alphabet");
  auto circ = [](double t) {
    const double f = t - std::round(t);
    return std::abs(f);
  };
  for (const auto& kv : d.atoms()) {
    const auto& a = kv.first;
    if (circ(values[0][a[0]] + values[1][a[1]] + values[2][a[2]]) > tolerance)
      throw ArgumentError("finitize: input violates s+g+p = 0 mod 1 on the support");
  }
  for (int q = 1; q <= max_q; ++q) {
    std::array<std::vector<long>, 3> r;
    bool ok = true;
    for (int c = 0; c < 3 && ok; ++c) {
      for (double v : values[c]) r[c].push_back(mod(std::llround(v * q), q));
      for (std::size_t s = 0; s < values[c].size() && ok; ++s)
        for (std::size_t t = s + 1; t < values[c].size() && ok; ++t) {
          const bool same_real = circ(values[c][s] - values[c][t]) <= tolerance;
          ok = same_real == (r[c][s] == r[c][t]);
        }
    }
    if (!ok) continue;
    for (const auto& kv : d.atoms()) {
      const auto& a = kv.first;
      if ((r[0][a[0]] + r[1][a[1]] + r[2][a[2]]) % q != 0) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    FiniteEmbedding f;
    f.q = q;
    f.embedding.group = AbelianGroup::cyclic(q);
    for (int c = 0; c < 3; ++c)
      for (long v : r[c]) f.embedding.maps[c].push_back(f.embedding.group.from_source({v}));
    return f;
  }
  throw SearchFailure("finitize: no modulus up to " + std::to_string(max_q) +
                      " preserves the level sets");
}

std::complex<double> Character::operator()(const Element& a) const {
  double turns = 0.0;
  for (std::size_t k = 0; k < exponents.size(); ++k) {
    const long num = static_cast<long>(exponents[k]) * a[k] % group.factors()[k];
    turns += static_cast<double>(num) / group.factors()[k];
  }
  turns -= std::floor(turns);
  return std::polar(1.0, 2.0 * std::numbers::pi * turns);
}

bool Character::is_trivial() const {
  return std::all_of(exponents.begin(), exponents.end(), [](int e) { return e == 0; });
}

std::vector<Character> all_characters(const AbelianGroup& h) {
  std::vector<Character> out;
  for (const auto& e : h.elements()) out.push_back({h, e});
  return out;
}

std::vector<std::complex<double>> character_function(const Character& chi, const GroupMap& sigma) {
  if (!(chi.group == sigma.group)) throw ArgumentError("character and map live in different groups");
  std::vector<std::complex<double>> out;
  for (const auto& v : sigma.values) out.push_back(chi(v));
  return out;
}

}  // namespace abelia
