// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <gmpxx.h>

#include <array>
#include <complex>
#include <cstddef>
#include <set>
#include <string>
#include <vector>

#include "abelia/dist_core.hpp"
#include "json.hpp"

namespace abelia {

using Element = std::vector<int>;

// Finite Abelian group as a product of cyclic prime-power factors, sorted.
// The constructor accepts arbitrary cyclic orders and splits them with the
// Chinese remainder theorem; from_source() converts residues given in that
// original presentation.
class AbelianGroup {
 public:
  AbelianGroup() = default;  // trivial group
  explicit AbelianGroup(const std::vector<int>& cyclic_orders);
  static AbelianGroup cyclic(int q) { return AbelianGroup(std::vector<int>{q}); }

  const std::vector<int>& factors() const { return factors_; }
  int rank() const { return static_cast<int>(factors_.size()); }
  long order() const;
  bool trivial() const { return factors_.empty(); }

  Element zero() const { return Element(factors_.size(), 0); }
  Element add(const Element& a, const Element& b) const;
  Element sub(const Element& a, const Element& b) const;
  Element neg(const Element& a) const;
  Element scale(long k, const Element& a) const;
  Element reduce(const std::vector<long>& v) const;
  Element from_source(const std::vector<long>& residues) const;

  // mixed-radix index, first factor most significant
  long index(const Element& a) const;
  Element element(long idx) const;
  std::vector<Element> elements() const;

  std::string to_string() const;  // "Z2xZ4", "0" for trivial
  bool operator==(const AbelianGroup& o) const { return factors_ == o.factors_; }
  bool operator<(const AbelianGroup& o) const;

 private:
  std::vector<int> factors_;
  std::vector<int> source_;  // normalised factor -> index of originating cyclic order
};

// All groups of the given order up to isomorphism, canonical order.
std::vector<AbelianGroup> groups_of_order(int n);
// Orders 1..r concatenated.
std::vector<AbelianGroup> groups_up_to(int r);

struct GroupMap {
  AbelianGroup group;
  std::vector<Element> values;  // indexed by symbol
};

struct EmbeddingTriple {
  AbelianGroup group;
  std::array<std::vector<Element>, 3> maps;

  GroupMap map(int c) const { return {group, maps[c]}; }
  bool is_trivial() const;
  bool valid_on(const TripleDistribution& d) const;  // exact equation check on the support
  std::vector<long> key() const;                     // canonical sort key
  nlohmann::json to_json(const TripleDistribution& d) const;
};

struct IntegerEmbeddings {
  bool trivial_only = true;
  // each basis vector gives integer values for (sigma, gamma, phi)
  std::vector<std::array<std::vector<mpz_class>, 3>> basis;
  // product of the nonzero invariant factors of the support system; primes
  // not dividing it behave like the rationals
  mpz_class invariant_product = 1;
};
IntegerEmbeddings solve_integer_embeddings(const TripleDistribution& d);

inline constexpr std::size_t kDefaultEmbeddingBudget = 1'000'000;

std::vector<EmbeddingTriple> enumerate_group_embeddings(
    const TripleDistribution& d, const AbelianGroup& h,
    std::size_t budget = kDefaultEmbeddingBudget);

// Homomorphisms H1 -> H2, given by the images of the factor generators.
struct Homomorphism {
  std::vector<Element> generator_images;
  Element apply(const AbelianGroup& h2, const Element& a) const;
};
std::vector<Homomorphism> homomorphisms(const AbelianGroup& h1, const AbelianGroup& h2,
                                        bool injective_only);

bool is_linear_reduction(const EmbeddingTriple& e1, const EmbeddingTriple& e2);

struct MasterEmbedding {
  std::vector<EmbeddingTriple> components;
  AbelianGroup group;                          // product of component groups
  std::array<std::vector<Element>, 3> maps;    // bundled maps into `group`
  std::size_t enumerated = 0;                  // nontrivial embeddings seen
  bool verify_master = false;
  int max_order = 0;

  EmbeddingTriple bundled() const { return {group, maps}; }
  nlohmann::json to_json(const TripleDistribution& d) const;
};

// Bundle a list of components into one embedding into the product group.
EmbeddingTriple bundle(const std::vector<EmbeddingTriple>& components, std::size_t alphabet_x,
                       std::size_t alphabet_y, std::size_t alphabet_z);

MasterEmbedding build_master_embedding(const TripleDistribution& d, int max_order = 12,
                                       std::size_t budget = kDefaultEmbeddingBudget);

struct SaturationFlags {
  std::vector<bool> per_component;
  bool overall = true;
};
SaturationFlags is_saturated(const MasterEmbedding& m);

std::set<long> image(const AbelianGroup& h, const std::vector<Element>& values);
bool is_subgroup(const AbelianGroup& h, const std::set<long>& s);
// Smallest subgroup containing s.
std::set<long> generated_subgroup(const AbelianGroup& h, const std::set<long>& s);

// Abstract group isomorphic to the subgroup s of h, with the inclusion map
// (indexed by element index of the returned group).
struct SubgroupPresentation {
  AbelianGroup group;
  std::vector<Element> inclusion;
};
SubgroupPresentation present_subgroup(const AbelianGroup& h, const std::set<long>& s);

struct FiniteEmbedding {
  int q = 1;
  EmbeddingTriple embedding;
};
// Real valued (s,g,p) with s+g+p = 0 mod 1 on the support -> embedding into Z_q.
FiniteEmbedding finitize_circle_embedding(const TripleDistribution& d,
                                          const std::array<std::vector<double>, 3>& values,
                                          double tolerance = 1e-6, int max_q = 1000);

struct Character {
  AbelianGroup group;
  std::vector<int> exponents;
  std::complex<double> operator()(const Element& a) const;
  bool is_trivial() const;
};
// Characters in mixed-radix exponent order; index 0 is trivial.
std::vector<Character> all_characters(const AbelianGroup& h);
std::vector<std::complex<double>> character_function(const Character& chi, const GroupMap& sigma);

}  // namespace abelia
