// SPDX-License-Identifier: Apache-2.0
#include "abelia/dist_core.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "abelia/errors.hpp"
#include "abelia/rng.hpp"

namespace abelia {

namespace {

struct Dsu {
  std::vector<int> p;
  explicit Dsu(int n) : p(n) { std::iota(p.begin(), p.end(), 0); }
  int find(int x) { return p[x] == x ? x : p[x] = find(p[x]); }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) p[std::max(a, b)] = std::min(a, b);
  }
};

std::string atom_string(const TripleDistribution& d, const Atom& a) {
  return "(" + d.alphabet(0).name(a[0]) + "," + d.alphabet(1).name(a[1]) + "," +
         d.alphabet(2).name(a[2]) + ")";
}

}  // namespace

int coord_index(char c) {
  switch (c) {
    case 'x': return 0;
    case 'y': return 1;
    case 'z': return 2;
    default: throw ArgumentError(std::string("unknown coordinate '") + c + "'");
  }
}

char coord_name(int c) { return "xyz"[c]; }

Alphabet::Alphabet(std::vector<std::string> symbols) : symbols_(std::move(symbols)) {
  if (symbols_.empty()) throw ArgumentError("alphabet must be nonempty");
  for (int i = 0; i < size(); ++i) {
    if (!index_.emplace(symbols_[i], i).second)
      throw ArgumentError("duplicate symbol '" + symbols_[i] + "' in alphabet");
  }
}

Alphabet Alphabet::range(int k) {
  std::vector<std::string> s;
  for (int i = 0; i < k; ++i) s.push_back(std::to_string(i));
  return Alphabet(std::move(s));
}

int Alphabet::index_of(const std::string& s) const {
  auto it = index_.find(s);
  if (it == index_.end()) throw ArgumentError("symbol '" + s + "' not in alphabet");
  return it->second;
}

TripleDistribution::TripleDistribution(std::array<Alphabet, 3> alphabets, AtomMap atoms)
    : alphabets_(std::move(alphabets)) {
  mpq_class total = 0;
  for (auto& [a, p] : atoms) {
    p.canonicalize();
    for (int c = 0; c < 3; ++c)
      if (a[c] < 0 || a[c] >= alphabets_[c].size())
        throw ArgumentError("atom symbol index out of range");
    if (p < 0) throw ArgumentError("negative probability on an atom");
    if (p == 0) continue;
    atoms_.emplace(a, p);
    total += p;
  }
  if (total != 1)
    throw ArgumentError("atom probabilities sum to " + total.get_str() + ", expected 1");
}

TripleDistribution TripleDistribution::uniform(std::array<Alphabet, 3> alphabets,
                                               const std::vector<Atom>& support) {
  std::set<Atom> s(support.begin(), support.end());
  if (s.empty()) throw ArgumentError("empty support");
  AtomMap m;
  const mpq_class p(1, static_cast<unsigned long>(s.size()));
  for (const auto& a : s) m[a] = p;
  return TripleDistribution(std::move(alphabets), std::move(m));
}

mpq_class parse_rational(const std::string& raw) {
  std::string s;
  for (char c : raw)
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  if (s.empty()) throw ParseError("empty rational");
  try {
    auto dot = s.find('.');
    if (dot != std::string::npos && s.find('/') == std::string::npos) {
      std::string digits = s.substr(0, dot) + s.substr(dot + 1);
      const auto frac_len = s.size() - dot - 1;
      mpz_class den = 1;
      for (std::size_t i = 0; i < frac_len; ++i) den *= 10;
      mpq_class q(mpz_class(digits.empty() || digits == "-" ? std::string("0") : digits, 10), den);
      q.canonicalize();
      return q;
    }
    mpq_class q(s, 10);
    if (q.get_den() == 0) throw ParseError("zero denominator in '" + raw + "'");
    q.canonicalize();
    return q;
  } catch (const std::invalid_argument&) {
    throw ParseError("malformed rational '" + raw + "'");
  }
}

TripleDistribution TripleDistribution::from_json(const nlohmann::json& j) {
  try {
    const auto& al = j.at("alphabets");
    if (!al.is_array() || al.size() != 3) throw ParseError("`alphabets` must list three alphabets");
    std::array<Alphabet, 3> alph;
    for (int c = 0; c < 3; ++c) {
      std::vector<std::string> syms;
      for (const auto& s : al[c]) syms.push_back(s.is_string() ? s.get<std::string>() : s.dump());
      alph[c] = Alphabet(std::move(syms));
    }
    AtomMap atoms;
    for (const auto& row : j.at("atoms")) {
      if (!row.is_array() || row.size() != 4) throw ParseError("atom rows must be [x,y,z,\"p/q\"]");
      Atom a;
      for (int c = 0; c < 3; ++c) {
        const auto& v = row[c];
        a[c] = alph[c].index_of(v.is_string() ? v.get<std::string>() : v.dump());
      }
      const auto& pv = row[3];
      mpq_class p = parse_rational(pv.is_string() ? pv.get<std::string>() : pv.dump());
      if (atoms.count(a)) throw ParseError("duplicate atom in distribution file");
      atoms[a] = p;
    }
    return TripleDistribution(std::move(alph), std::move(atoms));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("distribution JSON: ") + e.what());
  }
}

TripleDistribution TripleDistribution::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileError("cannot open distribution file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("'" + path + "': " + e.what());
  }
  return from_json(j);
}

nlohmann::json TripleDistribution::to_json() const {
  nlohmann::json j;
  j["alphabets"] = nlohmann::json::array();
  for (const auto& a : alphabets_) j["alphabets"].push_back(a.symbols());
  j["atoms"] = nlohmann::json::array();
  for (const auto& [a, p] : atoms_)
    j["atoms"].push_back({alphabets_[0].name(a[0]), alphabets_[1].name(a[1]),
                          alphabets_[2].name(a[2]), p.get_str()});
  return j;
}

std::vector<Atom> TripleDistribution::support() const {
  std::vector<Atom> s;
  s.reserve(atoms_.size());
  for (const auto& kv : atoms_) s.push_back(kv.first);
  return s;
}

mpq_class TripleDistribution::prob(const Atom& a) const {
  auto it = atoms_.find(a);
  return it == atoms_.end() ? mpq_class(0) : it->second;
}

std::vector<mpq_class> TripleDistribution::marginal1(int c) const {
  std::vector<mpq_class> m(alphabets_.at(c).size(), mpq_class(0));
  for (const auto& [a, p] : atoms_) m[a[c]] += p;
  return m;
}

std::vector<double> TripleDistribution::marginal1_double(int c) const {
  auto m = marginal1(c);
  std::vector<double> out(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) out[i] = m[i].get_d();
  return out;
}

Marginal marginal(const TripleDistribution& d, const std::vector<int>& coords) {
  if (coords.empty()) throw ArgumentError("marginal needs at least one coordinate");
  for (int c : coords)
    if (c < 0 || c > 2) throw ArgumentError("coordinate out of range");
  Marginal m;
  m.coords = coords;
  for (const auto& [a, p] : d.atoms()) {
    std::vector<int> key;
    for (int c : coords) key.push_back(a[c]);
    m.atoms[key] += p;
  }
  return m;
}

SupportGraph support_graph(const TripleDistribution& d, int a, int b) {
  SupportGraph g;
  g.a = a;
  g.b = b;
  const int na = d.alphabet(a).size();
  const int nb = d.alphabet(b).size();
  std::set<std::pair<int, int>> e;
  for (const auto& kv : d.atoms()) e.emplace(kv.first[a], kv.first[b]);
  g.edges.assign(e.begin(), e.end());
  Dsu dsu(na + nb);
  for (auto [u, v] : g.edges) dsu.unite(u, na + v);
  std::map<int, int> ids;
  g.comp_a.resize(na);
  g.comp_b.resize(nb);
  for (int i = 0; i < na + nb; ++i) {
    const int r = dsu.find(i);
    auto it = ids.emplace(r, static_cast<int>(ids.size())).first;
    (i < na ? g.comp_a[i] : g.comp_b[i - na]) = it->second;
  }
  g.components = static_cast<int>(ids.size());
  g.complete = static_cast<int>(g.edges.size()) == na * nb;
  return g;
}

Connectivity is_pairwise_connected(const TripleDistribution& d) {
  Connectivity c;
  c.pairs = {support_graph(d, 0, 1), support_graph(d, 0, 2), support_graph(d, 1, 2)};
  c.connected = std::all_of(c.pairs.begin(), c.pairs.end(),
                            [](const SupportGraph& g) { return g.components == 1; });
  return c;
}

bool implies_third(const TripleDistribution& d, int k1, int k2) {
  if (k1 == k2 || k1 < 0 || k2 < 0 || k1 > 2 || k2 > 2)
    throw ArgumentError("implies_third needs two distinct coordinates");
  const int third = 3 - k1 - k2;
  std::map<std::pair<int, int>, int> seen;
  for (const auto& kv : d.atoms()) {
    const auto& a = kv.first;
    auto [it, fresh] = seen.emplace(std::make_pair(a[k1], a[k2]), a[third]);
    if (!fresh && it->second != a[third]) return false;
  }
  return true;
}

bool MergeMap::identity() const {
  for (std::size_t i = 0; i < representative.size(); ++i)
    if (representative[i] != static_cast<int>(i)) return false;
  return true;
}

std::pair<TripleDistribution, MergeMap> merge(const TripleDistribution& d, int coordinate) {
  if (coordinate < 0 || coordinate > 2) throw ArgumentError("coordinate out of range");
  const int o1 = coordinate == 0 ? 1 : 0;
  const int o2 = coordinate == 2 ? 1 : 2;
  const Alphabet& alph = d.alphabet(coordinate);
  Dsu dsu(alph.size());
  std::map<std::pair<int, int>, int> first;
  for (const auto& kv : d.atoms()) {
    const auto& a = kv.first;
    auto [it, fresh] = first.emplace(std::make_pair(a[o1], a[o2]), a[coordinate]);
    if (!fresh) dsu.unite(it->second, a[coordinate]);
  }
  // canonical representative: lexicographically smallest name in the class
  std::map<int, int> best;
  for (int s = 0; s < alph.size(); ++s) {
    const int r = dsu.find(s);
    auto it = best.find(r);
    if (it == best.end() || alph.name(s) < alph.name(it->second)) best[r] = s;
  }
  MergeMap mm;
  mm.coordinate = coordinate;
  mm.representative.resize(alph.size());
  for (int s = 0; s < alph.size(); ++s) mm.representative[s] = best[dsu.find(s)];
  std::vector<std::string> names;
  std::vector<int> slot(alph.size(), -1);
  for (int s = 0; s < alph.size(); ++s) {
    if (mm.representative[s] == s) {
      slot[s] = static_cast<int>(names.size());
      names.push_back(alph.name(s));
    }
  }
  mm.new_index.resize(alph.size());
  for (int s = 0; s < alph.size(); ++s) mm.new_index[s] = slot[mm.representative[s]];
  auto alphs = d.alphabets();
  alphs[coordinate] = Alphabet(names);
  AtomMap atoms;
  for (const auto& [a, p] : d.atoms()) {
    Atom b = a;
    b[coordinate] = mm.new_index[a[coordinate]];
    atoms[b] += p;
  }
  return {TripleDistribution(std::move(alphs), std::move(atoms)), std::move(mm)};
}

std::pair<TripleDistribution, MergeMap> merge_to_fixpoint(const TripleDistribution& d,
                                                          int coordinate) {
  auto [cur, total] = merge(d, coordinate);
  for (;;) {
    auto [next, step] = merge(cur, coordinate);
    if (step.identity()) break;
    // compose: old symbol -> rep in cur -> rep in next
    for (std::size_t s = 0; s < total.new_index.size(); ++s) {
      const int mid = total.new_index[s];
      total.new_index[s] = step.new_index[mid];
    }
    cur = std::move(next);
  }
  // representatives expressed in the original alphabet
  const Alphabet& orig = d.alphabet(coordinate);
  const Alphabet& fin = cur.alphabet(coordinate);
  for (std::size_t s = 0; s < total.representative.size(); ++s)
    total.representative[s] = orig.index_of(fin.name(total.new_index[s]));
  return {cur, total};
}

std::vector<mpq_class> mixture_split(const std::vector<mpq_class>& mu, const mpq_class& rho,
                                     const std::vector<mpq_class>& nu) {
  if (mu.size() != nu.size()) throw ArgumentError("mixture_split: size mismatch");
  if (rho <= 0 || rho >= 1) throw ArgumentError("mixture_split: weight must lie in (0,1)");
  std::vector<mpq_class> out(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (mu[i] < rho * nu[i])
      throw DomainError("mixture_split infeasible at symbol " + std::to_string(i) + ": mu=" +
                        mu[i].get_str() + " < rho*nu=" + mpq_class(rho * nu[i]).get_str());
    out[i] = (mu[i] - rho * nu[i]) / (1 - rho);
  }
  return out;
}

TripleDistribution mixture_split(const TripleDistribution& mu, const mpq_class& rho,
                                 const TripleDistribution& nu) {
  if (!(mu.alphabets() == nu.alphabets()))
    throw ArgumentError("mixture_split: alphabets differ");
  if (rho <= 0 || rho >= 1) throw ArgumentError("mixture_split: weight must lie in (0,1)");
  std::set<Atom> keys;
  for (const auto& kv : mu.atoms()) keys.insert(kv.first);
  for (const auto& kv : nu.atoms()) keys.insert(kv.first);
  AtomMap out;
  for (const auto& a : keys) {
    const mpq_class m = mu.prob(a), n = nu.prob(a);
    if (m < rho * n)
      throw DomainError("mixture_split infeasible at atom " + atom_string(mu, a));
    out[a] = (m - rho * n) / (1 - rho);
  }
  return TripleDistribution(mu.alphabets(), std::move(out));
}

std::vector<std::vector<Atom>> sample_tensor(const TripleDistribution& d, int n, int count,
                                             std::uint64_t seed) {
  if (n < 1) throw ArgumentError("sample_tensor needs n >= 1");
  if (count < 0) throw ArgumentError("sample_tensor needs count >= 0");
  const auto supp = d.support();
  std::vector<double> w;
  for (const auto& a : supp) w.push_back(d.prob(a).get_d());
  Rng rng(seed, "sample_tensor");
  std::vector<std::vector<Atom>> out(count, std::vector<Atom>(n));
  for (auto& draw : out)
    for (auto& a : draw) a = supp[rng.discrete(w)];
  return out;
}

namespace fixtures {

TripleDistribution cyclic_equation(int q) {
  std::vector<Atom> s;
  for (int a = 0; a < q; ++a)
    for (int b = 0; b < q; ++b) s.push_back({a, b, ((-a - b) % q + q) % q});
  return TripleDistribution::uniform({Alphabet::range(q), Alphabet::range(q), Alphabet::range(q)},
                                     s);
}

TripleDistribution full_support(int k) {
  std::vector<Atom> s;
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b)
      for (int c = 0; c < k; ++c) s.push_back({a, b, c});
  return TripleDistribution::uniform({Alphabet::range(k), Alphabet::range(k), Alphabet::range(k)},
                                     s);
}

TripleDistribution three_point() {
  return TripleDistribution::uniform({Alphabet::range(2), Alphabet::range(2), Alphabet::range(2)},
                                     {{0, 0, 0}, {1, 1, 0}, {1, 0, 1}});
}

TripleDistribution two_to_one(const mpq_class& heavy) {
  if (!(heavy > 0 && heavy < 1)) throw ArgumentError("two_to_one needs 0 < heavy < 1");
  AtomMap atoms;
  for (int y = 0; y < 2; ++y)
    for (int z = 0; z < 2; ++z) {
      const int s = (y + z) % 2;
      const mpq_class share = y == 0 ? heavy : 1 - heavy;
      atoms[{s, y, z}] = share / 4;
      atoms[{s + 2, y, z}] = (1 - share) / 4;
    }
  return TripleDistribution({Alphabet::range(4), Alphabet::range(2), Alphabet::range(2)}, atoms);
}

TripleDistribution random_distribution(std::uint64_t seed, std::uint64_t index, int max_alphabet,
                                       int max_support) {
  if (max_alphabet < 1 || max_support < 1)
    throw ArgumentError("random_distribution needs positive bounds");
  Rng rng(seed, "corpus", index);
  std::array<int, 3> k;
  for (auto& v : k) v = 1 + static_cast<int>(rng.below(max_alphabet));
  const int cells = k[0] * k[1] * k[2];
  const int size = 1 + static_cast<int>(rng.below(std::min(cells, max_support)));
  std::vector<Atom> picked;
  for (int c : rng.subset(cells, size)) picked.push_back({c / (k[1] * k[2]), c / k[2] % k[1], c % k[2]});
  // relabel so that every symbol is used
  std::array<std::vector<int>, 3> used;
  for (int c = 0; c < 3; ++c) {
    std::set<int> u;
    for (const auto& a : picked) u.insert(a[c]);
    used[c].assign(u.begin(), u.end());
  }
  AtomMap atoms;
  mpq_class total = 0;
  std::vector<unsigned long> w;
  for (std::size_t i = 0; i < picked.size(); ++i) {
    w.push_back(1 + rng.below(4));
    total += w.back();
  }
  for (std::size_t i = 0; i < picked.size(); ++i) {
    Atom a;
    for (int c = 0; c < 3; ++c)
      a[c] = static_cast<int>(std::lower_bound(used[c].begin(), used[c].end(), picked[i][c]) -
                              used[c].begin());
    atoms[a] = mpq_class(w[i]) / total;
  }
  return TripleDistribution({Alphabet::range(static_cast<int>(used[0].size())),
                             Alphabet::range(static_cast<int>(used[1].size())),
                             Alphabet::range(static_cast<int>(used[2].size()))},
                            atoms);
}

std::vector<TripleDistribution> seeded_corpus(std::size_t count, std::uint64_t seed,
                                              int max_alphabet, int max_support) {
  std::vector<TripleDistribution> out;
  for (std::size_t i = 0; i < count; ++i)
    out.push_back(random_distribution(seed, i, max_alphabet, max_support));
  return out;
}

}  // namespace fixtures

}  // namespace abelia
