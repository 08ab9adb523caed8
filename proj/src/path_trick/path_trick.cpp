// SPDX-License-Identifier: Apache-2.0
#include "abelia/path_trick.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <tuple>

#include "abelia/errors.hpp"
#include "abelia/fourier.hpp"
#include "abelia/numeric.hpp"

namespace abelia {

namespace {

std::pair<int, int> unmoved(int c) {
  switch (c) {
    case 0: return {1, 2};
    case 1: return {0, 2};
    case 2: return {0, 1};
    default: throw ArgumentError("coordinate out of range");
  }
}

using WalkKey = std::tuple<std::vector<int>, int, int>;  // labels, first, second

PathDistribution assemble(const TripleDistribution& d, int c, int length,
                          const std::map<WalkKey, mpq_class>& law) {
  auto [a, b] = unmoved(c);
  std::set<std::vector<int>> tuple_set;
  for (const auto& kv : law) tuple_set.insert(std::get<0>(kv.first));
  PathDistribution p;
  p.base = d;
  p.coordinate = c;
  p.length = length;
  p.tuples.assign(tuple_set.begin(), tuple_set.end());
  std::map<std::vector<int>, int> slot;
  std::vector<std::string> names;
  for (const auto& t : p.tuples) {
    slot[t] = static_cast<int>(names.size());
    std::string s;
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (i) s += ",";
      s += d.alphabet(c).name(t[i]);
    }
    names.push_back(s);
  }
  auto alphs = d.alphabets();
  alphs[c] = Alphabet(names);
  AtomMap atoms;
  for (const auto& [k, pr] : law) {
    Atom at;
    at[c] = slot[std::get<0>(k)];
    at[a] = std::get<1>(k);
    at[b] = std::get<2>(k);
    atoms[at] += pr;
  }
  p.result = TripleDistribution(std::move(alphs), std::move(atoms));
  return p;
}

void check_budget(std::size_t size, std::size_t budget, const char* what) {
  if (size > budget)
    throw ResourceError(std::string(what) + ": " + std::to_string(size) +
                        " states exceed the atom budget of " + std::to_string(budget));
}

}  // namespace

PathDistribution path_trick_walk(const TripleDistribution& d, int c, int length,
                                 std::size_t budget) {
  if (length < 1 || length % 2 == 0) throw ArgumentError("path length must be odd and positive");
  auto [a, b] = unmoved(c);
  const auto mu_a = d.marginal1(a);
  const auto mu_b = d.marginal1(b);
  std::vector<std::vector<std::pair<Atom, mpq_class>>> from_a(d.alphabet(a).size()),
      from_b(d.alphabet(b).size());
  for (const auto& [at, p] : d.atoms()) {
    from_a[at[a]].emplace_back(at, p / mu_a[at[a]]);
    from_b[at[b]].emplace_back(at, p / mu_b[at[b]]);
  }
  // state: (labels, start, current)
  std::map<WalkKey, mpq_class> states;
  for (int v = 0; v < d.alphabet(a).size(); ++v)
    if (mu_a[v] > 0) states[{{}, v, v}] = mu_a[v];
  for (int k = 1; k <= length; ++k) {
    std::map<WalkKey, mpq_class> next;
    const bool on_a = k % 2 == 1;
    for (const auto& [key, p] : states) {
      const auto& [labels, start, cur] = key;
      for (const auto& [at, w] : on_a ? from_a[cur] : from_b[cur]) {
        auto l = labels;
        l.push_back(at[c]);
        next[{std::move(l), start, on_a ? at[b] : at[a]}] += p * w;
      }
    }
    check_budget(next.size(), budget, "path_trick_walk");
    states = std::move(next);
  }
  return assemble(d, c, length, states);
}

PathDistribution path_trick_inductive(const TripleDistribution& d, int t, std::size_t budget) {
  if (t < 1) throw ArgumentError("doubling exponent must be at least 1");
  // paths: (vertices, labels); vertices alternate y, z, y, ...
  using Path = std::pair<std::vector<int>, std::vector<int>>;
  std::map<Path, mpq_class> nu;
  const auto mu_z = d.marginal1(2);
  std::vector<std::vector<std::pair<Atom, mpq_class>>> by_z(d.alphabet(2).size());
  for (const auto& [at, p] : d.atoms()) by_z[at[2]].emplace_back(at, p);
  for (int z = 0; z < d.alphabet(2).size(); ++z) {
    if (mu_z[z] == 0) continue;
    for (const auto& [a1, p1] : by_z[z])
      for (const auto& [a2, p2] : by_z[z])
        nu[{{a1[1], z, a2[1]}, {a1[0], a2[0]}}] += p1 * p2 / mu_z[z];
  }
  for (int step = 1; step < t; ++step) {
    std::map<int, std::vector<std::pair<const Path*, mpq_class>>> by_start;
    std::map<int, mpq_class> start_mass;
    for (const auto& [path, p] : nu) {
      by_start[path.first.front()].emplace_back(&path, p);
      start_mass[path.first.front()] += p;
    }
    std::map<Path, mpq_class> next;
    for (const auto& [y, list] : by_start) {
      const mpq_class my = start_mass[y];
      for (const auto& [p1, w1] : list)
        for (const auto& [p2, w2] : list) {
          Path joined;
          joined.first.assign(p1->first.rbegin(), p1->first.rend());
          joined.first.insert(joined.first.end(), p2->first.begin() + 1, p2->first.end());
          joined.second.assign(p1->second.rbegin(), p1->second.rend());
          joined.second.insert(joined.second.end(), p2->second.begin(), p2->second.end());
          next[std::move(joined)] += w1 * w2 / my;
        }
      check_budget(next.size(), budget, "path_trick_inductive");
    }
    nu = std::move(next);
  }
  std::map<WalkKey, mpq_class> law;
  for (const auto& [path, p] : nu) {
    const auto& [verts, labels] = path;
    std::vector<int> x(labels.begin(), labels.end() - 1);
    law[{std::move(x), verts.front(), verts[verts.size() - 2]}] += p;
  }
  const int length = (1 << t) - 1;
  return assemble(d, 0, length, law);
}

LiftedMap lift_sigma_sharp(const GroupMap& sigma, int length,
                           const std::vector<std::vector<int>>& tuples) {
  LiftedMap out{sigma, length, {}};
  const auto& h = sigma.group;
  for (const auto& t : tuples) {
    if (static_cast<int>(t.size()) != length)
      throw ArgumentError("lift_sigma_sharp: tuple length mismatch");
    Element s = h.zero();
    for (int j = 0; j < length; ++j) {
      if (t[j] < 0 || t[j] >= static_cast<int>(sigma.values.size()))
        throw ArgumentError("lift_sigma_sharp: tuple symbol outside the map's domain");
      s = j % 2 == 0 ? h.add(s, sigma.values[t[j]]) : h.sub(s, sigma.values[t[j]]);
    }
    out.values.push_back(std::move(s));
  }
  return out;
}

EmbeddingTriple lift_embedding(const EmbeddingTriple& e, const PathDistribution& p) {
  EmbeddingTriple out = e;
  out.maps[p.coordinate] = lift_sigma_sharp(e.map(p.coordinate), p.length, p.tuples).values;
  return out;
}

TripleDistribution replay(const TripleDistribution& d, const std::vector<SaturationStep>& steps,
                          std::size_t budget) {
  TripleDistribution cur = d;
  for (const auto& s : steps) cur = path_trick_walk(cur, s.coordinate, s.length, budget).result;
  return cur;
}

// ---------------------------------------------------------------- saturation

namespace {

struct SatState {
  TripleDistribution dist;
  MasterEmbedding master;
  std::vector<std::vector<int>> x_expansion;  // current x symbol -> original symbols
  std::vector<SaturationStep> steps;
};

bool pair_complete(const TripleDistribution& d, int a, int b) {
  return support_graph(d, std::min(a, b), std::max(a, b)).complete;
}

void apply_step(SatState& st, const PathDistribution& p) {
  for (auto& c : st.master.components) c = lift_embedding(c, p);
  EmbeddingTriple b = lift_embedding(st.master.bundled(), p);
  st.master.maps = b.maps;
  if (p.coordinate == 0) {
    std::vector<std::vector<int>> next;
    for (const auto& t : p.tuples) {
      std::vector<int> flat;
      for (int s : t) flat.insert(flat.end(), st.x_expansion[s].begin(), st.x_expansion[s].end());
      next.push_back(std::move(flat));
    }
    st.x_expansion = std::move(next);
  }
  st.dist = p.result;
  st.steps.push_back({p.coordinate, p.length});
}

// Smallest odd length (>1) of a trick on `coordinate` after which the pair
// `want` is complete, preferring lengths that also leave `keep` complete.
// Returns nullopt if `want` is already complete.
std::optional<PathDistribution> search_trick(const TripleDistribution& d, int coordinate,
                                             std::pair<int, int> want,
                                             std::optional<std::pair<int, int>> keep,
                                             const SaturationOptions& opt) {
  if (pair_complete(d, want.first, want.second) &&
      (!keep || pair_complete(d, keep->first, keep->second)))
    return std::nullopt;
  std::optional<PathDistribution> fallback;
  for (int len = 3; len <= opt.per_round_cap; len += 2) {
    PathDistribution p;
    try {
      p = path_trick_walk(d, coordinate, len, opt.atom_budget);
    } catch (const ResourceError&) {
      break;
    }
    if (!pair_complete(p.result, want.first, want.second)) continue;
    if (!keep || pair_complete(p.result, keep->first, keep->second)) return p;
    if (!fallback) fallback = std::move(p);
  }
  if (fallback) return fallback;
  if (pair_complete(d, want.first, want.second)) return std::nullopt;
  throw ResourceError("saturation: no odd length up to " + std::to_string(opt.per_round_cap) +
                      " completes the (" + std::string(1, coord_name(want.first)) + "," +
                      std::string(1, coord_name(want.second)) + ") support");
}

SaturationChecks evaluate(const SatState& st, std::size_t base_x) {
  SaturationChecks ch;
  const auto& h = st.master.group;
  std::array<std::set<long>, 3> im;
  for (int c = 0; c < 3; ++c) im[c] = image(h, st.master.maps[c]);
  ch.common_subgroup = im[0] == im[1] && im[1] == im[2] && is_subgroup(h, im[0]);
  std::set<std::array<long, 3>> triples;
  for (const auto& kv : st.dist.atoms()) {
    const auto& a = kv.first;
    triples.insert({h.index(st.master.maps[0][a[0]]), h.index(st.master.maps[1][a[1]]),
                    h.index(st.master.maps[2][a[2]])});
  }
  ch.full_equation_support =
      ch.common_subgroup && triples.size() == im[0].size() * im[0].size();
  const std::size_t len = st.x_expansion.empty() ? 0 : st.x_expansion.front().size();
  double want = std::pow(static_cast<double>(base_x), static_cast<double>(len));
  ch.full_tuple_power = static_cast<double>(st.x_expansion.size()) == want;
  return ch;
}

nlohmann::json steps_json(const std::vector<SaturationStep>& steps) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& s : steps)
    j.push_back({{"coordinate", std::string(1, coord_name(s.coordinate))}, {"length", s.length}});
  return j;
}

}  // namespace

nlohmann::json SaturationTranscript::to_json(const TripleDistribution& final_dist) const {
  nlohmann::json j;
  j["steps"] = steps_json(steps);
  j["final_group"] = final_master.group.to_string();
  j["final_master"] = final_master.to_json(final_dist);
  j["postcondition_checks"] = {{"common_subgroup", checks.common_subgroup},
                               {"full_equation_support", checks.full_equation_support},
                               {"full_tuple_power", checks.full_tuple_power}};
  return j;
}

SaturationResult saturate_master(const TripleDistribution& d, const MasterEmbedding& master,
                                 const SaturationOptions& opt) {
  if (opt.duplicate_fibers)
    throw ArgumentError("saturate_master: fiber duplication is not supported");
  if (!is_pairwise_connected(d).connected)
    throw ArgumentError("saturate_master: distribution is not pairwise connected");
  if (!master.bundled().valid_on(d))
    throw ArgumentError("saturate_master: master embedding does not embed the distribution");

  SatState st{d, master, {}, {}};
  for (int s = 0; s < d.alphabet(0).size(); ++s) st.x_expansion.push_back({s});
  const std::size_t base_x = d.alphabet(0).size();
  const auto& h = master.group;
  const long max_rounds = opt.max_rounds >= 0 ? opt.max_rounds : std::max<long>(1, h.order());

  auto fail = [&](const std::string& why) {
    nlohmann::json j;
    j["steps"] = steps_json(st.steps);
    throw ResourceError("saturate_master: " + why + "; transcript so far " + j.dump());
  };

  for (long round = 0;; ++round) {
    std::array<std::set<long>, 3> im;
    for (int c = 0; c < 3; ++c) im[c] = image(h, st.master.maps[c]);
    int target = -1;
    for (int c = 0; c < 3 && target < 0; ++c)
      if (!is_subgroup(h, im[c])) target = c;
    if (target < 0) break;
    if (round >= max_rounds) fail("round cap reached before images became subgroups");
    auto [a, b] = unmoved(target);
    // a length-3 trick on `target` realises every label triple once both
    // (target,a) and (target,b) supports are complete
    if (auto p = search_trick(st.dist, b, {target, a}, std::nullopt, opt)) apply_step(st, *p);
    if (auto p = search_trick(st.dist, a, {target, b}, std::make_pair(target, a), opt))
      apply_step(st, *p);
    PathDistribution p3;
    try {
      p3 = path_trick_walk(st.dist, target, 3, opt.atom_budget);
    } catch (const ResourceError& e) {
      fail(e.what());
    }
    apply_step(st, p3);
    const auto grown = image(h, st.master.maps[target]);
    if (grown.size() <= im[target].size()) fail("image did not grow in a round");
  }

  SaturationChecks ch = evaluate(st, base_x);
  if (!ch.all()) {
    // trailing x tricks: complete the (y,z) support while keeping tuple powers
    bool done = false;
    for (int len = 3; len <= opt.per_round_cap && !done; len += 2) {
      PathDistribution p;
      try {
        p = path_trick_walk(st.dist, 0, len, opt.atom_budget);
      } catch (const ResourceError&) {
        break;
      }
      SatState trial = st;
      apply_step(trial, p);
      SaturationChecks c2 = evaluate(trial, base_x);
      if (c2.all()) {
        st = std::move(trial);
        ch = c2;
        done = true;
      }
    }
    if (!done) fail("postconditions not reached by trailing tricks");
  }

  // re-declare the common image as the group
  const auto common = image(h, st.master.maps[0]);
  if (static_cast<long>(common.size()) != h.order()) {
    const auto pres = present_subgroup(h, common);
    std::map<long, Element> back;
    for (long i = 0; i < pres.group.order(); ++i)
      back[h.index(pres.inclusion[i])] = pres.group.element(i);
    for (auto& m : st.master.maps)
      for (auto& v : m) v = back.at(h.index(v));
    st.master.group = pres.group;
  }

  SaturationResult r;
  r.distribution = st.dist;
  r.master = st.master;
  r.transcript.steps = st.steps;
  r.transcript.final_master = st.master;
  r.transcript.checks = ch;
  return r;
}

// ------------------------------------------------------ correlation bound

namespace {

void check_bounded(const TensorFunction& f, const char* name) {
  if (f.sup_norm() > 1.0 + tol::kBounded)
    throw ArgumentError(std::string("path_correlation_bound: ") + name + " is not 1-bounded");
}

}  // namespace

PathCorrelation path_correlation_bound(const TripleDistribution& d, const TensorFunction& f,
                                       const TensorFunction& g, const TensorFunction& h, int t,
                                       std::size_t budget) {
  if (t < 1) throw ArgumentError("path_correlation_bound needs t >= 1");
  const int n = f.n;
  if (g.n != n || h.n != n) throw ArgumentError("path_correlation_bound: arity mismatch");
  if (f.m() != d.alphabet(0).size() || g.m() != d.alphabet(1).size() ||
      h.m() != d.alphabet(2).size())
    throw ArgumentError("path_correlation_bound: domains do not match the alphabets");
  check_bounded(f, "f");
  check_bounded(g, "g");
  check_bounded(h, "h");
  const auto ta = tensor_support(d, n, budget * 100);

  cplx e = 0.0;
  for (std::size_t k = 0; k < ta.p.size(); ++k)
    e += ta.p[k] * f.values[ta.xi[k]] * g.values[ta.yi[k]] * h.values[ta.zi[k]];
  PathCorrelation out;
  out.lhs = std::pow(std::abs(e), static_cast<double>(1L << t));

  // h'(z) = E[conj f(x) conj g(y) | z]
  TensorFunction hp(n, d.marginal1_double(2));
  std::vector<double> zmass(hp.size(), 0.0);
  for (std::size_t k = 0; k < ta.p.size(); ++k) {
    hp.values[ta.zi[k]] += ta.p[k] * std::conj(f.values[ta.xi[k]] * g.values[ta.yi[k]]);
    zmass[ta.zi[k]] += ta.p[k];
  }
  for (std::size_t z = 0; z < hp.size(); ++z)
    if (zmass[z] > 0) hp.values[z] /= zmass[z];
  out.h_prime = hp;

  // transfer along the walk y0 -x1- z1 -x2- y1 ... ending on z
  const TensorFunction ones_y = TensorFunction::constant(n, d.marginal1_double(1), 1.0);
  std::vector<double> ymass(ones_y.size(), 0.0);
  for (std::size_t k = 0; k < ta.p.size(); ++k) ymass[ta.yi[k]] += ta.p[k];
  std::vector<cplx> at_y(ones_y.size());
  for (std::size_t y = 0; y < at_y.size(); ++y) at_y[y] = ymass[y] * g.values[y];
  std::vector<cplx> at_z(hp.size(), 0.0);
  const int length = (1 << t) - 1;
  for (int step = 1; step <= length; ++step) {
    const bool odd = step % 2 == 1;
    if (odd) {
      std::fill(at_z.begin(), at_z.end(), cplx(0.0));
      for (std::size_t k = 0; k < ta.p.size(); ++k) {
        const double w = ta.p[k] / ymass[ta.yi[k]];
        at_z[ta.zi[k]] += at_y[ta.yi[k]] * w * f.values[ta.xi[k]];
      }
    } else {
      std::fill(at_y.begin(), at_y.end(), cplx(0.0));
      for (std::size_t k = 0; k < ta.p.size(); ++k) {
        const double w = ta.p[k] / zmass[ta.zi[k]];
        at_y[ta.yi[k]] += at_z[ta.zi[k]] * w * std::conj(f.values[ta.xi[k]]);
      }
    }
  }
  cplx r = 0.0;
  for (std::size_t z = 0; z < at_z.size(); ++z) r += at_z[z] * hp.values[z];
  out.rhs = std::abs(r);

  // F itself on the pruned tuple alphabet, when it fits
  try {
    PathDistribution p = path_trick_walk(d, 0, length, budget);
    const std::size_t size = ipow_size(p.tuples.size(), n);
    if (size <= 1'000'000) {
      TensorFunction F(n, p.result.marginal1_double(0));
      for (std::size_t idx = 0; idx < F.size(); ++idx) {
        const auto xs = F.decode(idx);
        cplx v = 1.0;
        for (int j = 0; j < length; ++j) {
          std::vector<int> slice(n);
          for (int i = 0; i < n; ++i) slice[i] = p.tuples[xs[i]][j];
          const cplx fv = f.values[f.encode(slice)];
          v *= j % 2 == 0 ? fv : std::conj(fv);
        }
        F.values[idx] = v;
      }
      out.F = std::move(F);
      out.F_tuples = p.tuples;
    }
  } catch (const ResourceError&) {
  }
  return out;
}

}  // namespace abelia
