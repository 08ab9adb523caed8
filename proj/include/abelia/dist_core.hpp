// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <gmpxx.h>

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace abelia {

// Coordinates of a triple: 0 = x (Sigma), 1 = y (Gamma), 2 = z (Phi).
enum class Coord : int { X = 0, Y = 1, Z = 2 };
int coord_index(char c);  // 'x','y','z'
char coord_name(int c);

class Alphabet {
 public:
  Alphabet() = default;
  explicit Alphabet(std::vector<std::string> symbols);
  static Alphabet range(int k);  // "0".."k-1"

  int size() const { return static_cast<int>(symbols_.size()); }
  const std::string& name(int i) const { return symbols_.at(i); }
  const std::vector<std::string>& symbols() const { return symbols_; }
  int index_of(const std::string& s) const;  // throws ArgumentError
  bool contains(const std::string& s) const { return index_.count(s) > 0; }
  bool operator==(const Alphabet& o) const { return symbols_ == o.symbols_; }

 private:
  std::vector<std::string> symbols_;
  std::map<std::string, int> index_;
};

using Atom = std::array<int, 3>;
using AtomMap = std::map<Atom, mpq_class>;

class TripleDistribution {
 public:
  TripleDistribution() = default;
  // Drops zero atoms; throws ArgumentError on negative mass, out-of-range
  // symbols or a total different from 1.
  TripleDistribution(std::array<Alphabet, 3> alphabets, AtomMap atoms);

  static TripleDistribution uniform(std::array<Alphabet, 3> alphabets,
                                    const std::vector<Atom>& support);
  static TripleDistribution from_json(const nlohmann::json& j);
  static TripleDistribution load(const std::string& path);
  nlohmann::json to_json() const;

  const Alphabet& alphabet(int c) const { return alphabets_.at(c); }
  const std::array<Alphabet, 3>& alphabets() const { return alphabets_; }
  const AtomMap& atoms() const { return atoms_; }
  std::vector<Atom> support() const;  // lexicographic order
  mpq_class prob(const Atom& a) const;
  bool in_support(const Atom& a) const { return atoms_.count(a) > 0; }
  std::size_t support_size() const { return atoms_.size(); }
  // univariate marginal of one coordinate as exact rationals / doubles
  std::vector<mpq_class> marginal1(int c) const;
  std::vector<double> marginal1_double(int c) const;

  bool operator==(const TripleDistribution& o) const {
    return alphabets_ == o.alphabets_ && atoms_ == o.atoms_;
  }

 private:
  std::array<Alphabet, 3> alphabets_;
  AtomMap atoms_;
};

// Joint marginal over a nonempty ordered subset of coordinates.
struct Marginal {
  std::vector<int> coords;
  std::map<std::vector<int>, mpq_class> atoms;
};
Marginal marginal(const TripleDistribution& d, const std::vector<int>& coords);

struct SupportGraph {
  int a = 0, b = 1;                          // which coordinates
  std::vector<std::pair<int, int>> edges;    // sorted label pairs
  int components = 0;
  std::vector<int> comp_a, comp_b;           // component id per symbol
  bool complete = false;                     // every pair present
};
SupportGraph support_graph(const TripleDistribution& d, int a, int b);

struct Connectivity {
  bool connected = false;
  std::array<SupportGraph, 3> pairs;  // (x,y), (x,z), (y,z)
};
Connectivity is_pairwise_connected(const TripleDistribution& d);

// True iff the two known coordinates determine the remaining one on the support.
bool implies_third(const TripleDistribution& d, int known1, int known2);

struct MergeMap {
  int coordinate = 0;
  std::vector<int> representative;  // old index -> old index of its representative
  std::vector<int> new_index;       // old index -> index in the merged alphabet
  bool identity() const;
};
// One merge pass: collapse symbols of `coordinate` that share a completion.
std::pair<TripleDistribution, MergeMap> merge(const TripleDistribution& d, int coordinate);
// Repeat until nothing changes; the returned map is the composition.
std::pair<TripleDistribution, MergeMap> merge_to_fixpoint(const TripleDistribution& d,
                                                          int coordinate);

// nu' with mu = rho*nu + (1-rho)*nu'; DomainError names the first violating atom.
TripleDistribution mixture_split(const TripleDistribution& mu, const mpq_class& rho,
                                 const TripleDistribution& nu);
std::vector<mpq_class> mixture_split(const std::vector<mpq_class>& mu, const mpq_class& rho,
                                     const std::vector<mpq_class>& nu);

// count i.i.d. draws from mu^{(x)n}; each draw is n atoms.
std::vector<std::vector<Atom>> sample_tensor(const TripleDistribution& d, int n, int count,
                                             std::uint64_t seed);

// Fixtures used across the library, the tool and the tests.
namespace fixtures {
TripleDistribution cyclic_equation(int q);       // uniform on a+b+c = 0 mod q
TripleDistribution full_support(int k);          // uniform on [k]^3
TripleDistribution three_point();                // {(0,0,0),(1,1,0),(1,0,1)}
// x in [4], sigma(x) = x mod 2, y, z in Z_2 with sigma(x) + y + z = 0. Given (y,z)
// the symbol y+z gets share `heavy` when y = 0 and 1 - heavy otherwise.
TripleDistribution two_to_one(const mpq_class& heavy);
// Random weights in 1..4 on a random support; every symbol is used.
TripleDistribution random_distribution(std::uint64_t seed, std::uint64_t index,
                                       int max_alphabet = 3, int max_support = 6);
std::vector<TripleDistribution> seeded_corpus(std::size_t count, std::uint64_t seed,
                                              int max_alphabet = 3, int max_support = 6);
}  // namespace fixtures

mpq_class parse_rational(const std::string& s);  // "p/q", "p", or decimal "0.25"

}  // namespace abelia
