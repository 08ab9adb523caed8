// SPDX-License-Identifier: Apache-2.0
#include <map>

#include "abelia/dist_core.hpp"
#include "abelia/errors.hpp"
#include "doctest.h"

using namespace abelia;

namespace {

TripleDistribution named(std::vector<std::string> sx, std::vector<std::string> sy,
                         std::vector<std::string> sz,
                         std::vector<std::array<std::string, 3>> atoms) {
  std::array<Alphabet, 3> al{Alphabet(sx), Alphabet(sy), Alphabet(sz)};
  std::vector<Atom> s;
  for (auto& a : atoms) s.push_back({al[0].index_of(a[0]), al[1].index_of(a[1]), al[2].index_of(a[2])});
  return TripleDistribution::uniform(al, s);
}

}  // namespace

TEST_CASE("alphabet rejects duplicates and empties") {
  CHECK_THROWS_AS(Alphabet({"a", "a"}), ArgumentError);
  CHECK_THROWS_AS(Alphabet(std::vector<std::string>{}), ArgumentError);
  Alphabet a({"b", "a"});
  CHECK(a.index_of("a") == 1);
}

TEST_CASE("distribution must sum to one") {
  std::array<Alphabet, 3> al{Alphabet::range(2), Alphabet::range(2), Alphabet::range(2)};
  AtomMap m{{{0, 0, 0}, mpq_class(1, 2)}};
  CHECK_THROWS_AS(TripleDistribution(al, m), ArgumentError);
  m[{1, 1, 1}] = mpq_class(1, 2);
  CHECK_NOTHROW(TripleDistribution(al, m));
}

TEST_CASE("json round trip") {
  auto d = fixtures::three_point();
  auto j = d.to_json();
  CHECK(TripleDistribution::from_json(j) == d);
  j["atoms"][0][3] = "1/2";
  CHECK_THROWS_AS(TripleDistribution::from_json(j), ArgumentError);
  CHECK_THROWS_AS(TripleDistribution::load("/nonexistent/file.json"), FileError);
}

TEST_CASE("marginals") {
  auto d = fixtures::cyclic_equation(3);
  auto m = marginal(d, {1, 2});
  CHECK(m.atoms.size() == 9);
  for (auto& [k, p] : m.atoms) CHECK(p == mpq_class(1, 9));
  auto full = marginal(d, {0, 1, 2});
  CHECK(full.atoms.size() == d.support_size());
  auto pt = TripleDistribution::uniform({Alphabet::range(2), Alphabet::range(2), Alphabet::range(2)},
                                        {{1, 0, 1}});
  auto px = marginal(pt, {0});
  CHECK(px.atoms.size() == 1);
  CHECK(px.atoms.begin()->first == std::vector<int>{1});
  CHECK_THROWS_AS(marginal(d, {}), ArgumentError);
}

TEST_CASE("pairwise connectivity") {
  CHECK(is_pairwise_connected(fixtures::cyclic_equation(3)).connected);
  auto split = TripleDistribution::uniform(
      {Alphabet({"1", "2"}), Alphabet({"1", "2"}), Alphabet({"1", "2"})}, {{0, 0, 0}, {1, 1, 1}});
  auto c = is_pairwise_connected(split);
  CHECK_FALSE(c.connected);
  for (auto& g : c.pairs) CHECK(g.components == 2);
  CHECK(is_pairwise_connected(fixtures::three_point()).connected);
}

TEST_CASE("implies_third") {
  CHECK(implies_third(fixtures::cyclic_equation(3), 1, 2));
  CHECK_FALSE(implies_third(fixtures::full_support(2), 1, 2));
  CHECK(implies_third(fixtures::three_point(), 0, 1));
}

TEST_CASE("merge collapses shared completions") {
  auto d = named({"a", "a'", "b"}, {"y0", "y1"}, {"z0"},
                 {{"a", "y0", "z0"}, {"a'", "y0", "z0"}, {"b", "y1", "z0"}});
  auto [m, mm] = merge(d, 0);
  CHECK(m.alphabet(0).symbols() == std::vector<std::string>{"a", "b"});
  CHECK(mm.representative == std::vector<int>{0, 0, 2});
  CHECK(m.prob({0, 0, 0}) == mpq_class(2, 3));
  CHECK(implies_third(m, 1, 2));

  auto chain = named({"a", "a'", "a''"}, {"y0", "y1"}, {"z0", "z1"},
                     {{"a", "y0", "z0"}, {"a'", "y0", "z0"}, {"a'", "y1", "z1"}, {"a''", "y1", "z1"}});
  auto [c2, cm] = merge_to_fixpoint(chain, 0);
  CHECK(c2.alphabet(0).size() == 1);
  CHECK(cm.representative == std::vector<int>{0, 0, 0});

  auto id = fixtures::cyclic_equation(3);
  auto [same, idm] = merge(id, 0);
  CHECK(same == id);
  CHECK(idm.identity());
  // merging never disconnects a connected distribution
  CHECK(is_pairwise_connected(merge(fixtures::three_point(), 0).first).connected);
}

TEST_CASE("mixture_split") {
  auto mu = fixtures::cyclic_equation(3);
  auto nu = mixture_split(mu, mpq_class(1, 2), mu);
  CHECK(nu == mu);
  std::vector<mpq_class> u(3, mpq_class(1, 3));
  mpq_class rho(1, 4);
  auto out = mixture_split(u, rho, u);
  for (std::size_t i = 0; i < 3; ++i) CHECK(rho * u[i] + (1 - rho) * out[i] == u[i]);
  std::vector<mpq_class> spike{1, 0, 0};
  CHECK_THROWS_AS(mixture_split(u, mpq_class(1, 2), spike), DomainError);
  auto pt = TripleDistribution::uniform({Alphabet::range(3), Alphabet::range(3), Alphabet::range(3)},
                                        {{0, 0, 0}});
  CHECK_THROWS_AS(mixture_split(mu, mpq_class(1, 2), pt), DomainError);
}

TEST_CASE("sample_tensor is reproducible and calibrated") {
  auto d = fixtures::cyclic_equation(3);
  CHECK(sample_tensor(d, 2, 0, 1).empty());
  auto a = sample_tensor(d, 2, 100000, 7);
  CHECK(a == sample_tensor(d, 2, 100000, 7));
  std::map<std::vector<Atom>, int> counts;
  for (auto& s : a) counts[s]++;
  CHECK(counts.size() == 81);
  const double p = 1.0 / 81, sd = std::sqrt(100000 * p * (1 - p));
  for (auto& [k, c] : counts) CHECK(std::abs(c - 100000 * p) < 4.5 * sd);
  auto pt = TripleDistribution::uniform({Alphabet::range(2), Alphabet::range(2), Alphabet::range(2)},
                                        {{1, 0, 1}});
  for (auto& s : sample_tensor(pt, 3, 10, 3))
    for (auto& at : s) CHECK(at == Atom{1, 0, 1});
}

TEST_CASE("rational parsing") {
  CHECK(parse_rational("1/3") == mpq_class(1, 3));
  CHECK(parse_rational("0.25") == mpq_class(1, 4));
  CHECK_THROWS_AS(parse_rational("x/3"), ParseError);
}

TEST_CASE("seeded corpus") {
  const auto c = fixtures::seeded_corpus(50, 11);
  CHECK(c == fixtures::seeded_corpus(50, 11));
  CHECK(!(c == fixtures::seeded_corpus(50, 12)));
  for (const auto& d : c) {
    mpq_class total = 0;
    for (const auto& [a, p] : d.atoms()) total += p;
    CHECK(total == 1);
    CHECK(d.support_size() <= 6);
    for (int k = 0; k < 3; ++k) {
      CHECK(d.alphabet(k).size() <= 3);
      for (const auto& m : d.marginal1(k)) CHECK(m > 0);
    }
  }
  const auto t = fixtures::two_to_one(mpq_class(3, 4));
  CHECK(t.prob({0, 0, 0}) == mpq_class(3, 16));
  CHECK(t.prob({3, 1, 0}) == mpq_class(3, 16));
  CHECK_THROWS_AS(fixtures::two_to_one(1), ArgumentError);
}
