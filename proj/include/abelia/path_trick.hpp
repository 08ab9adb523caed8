// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "abelia/abelian.hpp"
#include "abelia/dist_core.hpp"
#include "abelia/tensor.hpp"
#include "json.hpp"

namespace abelia {

inline constexpr std::size_t kDefaultAtomBudget = 100'000;

// Result of one path trick. The moved coordinate's alphabet consists of the
// label tuples that occur, sorted by base symbol indices; tuples[i] lists the
// base symbols of new symbol i. The two other coordinates keep their
// alphabets, the walk starting on the first of them (in x,y,z order) and
// ending on the second.
struct PathDistribution {
  TripleDistribution base;
  int coordinate = 0;
  int length = 1;
  TripleDistribution result;
  std::vector<std::vector<int>> tuples;
};

PathDistribution path_trick_walk(const TripleDistribution& d, int coordinate, int length,
                                 std::size_t budget = kDefaultAtomBudget);

// Doubling construction on the x coordinate; equals the walk with
// length 2^t - 1.
PathDistribution path_trick_inductive(const TripleDistribution& d, int t,
                                      std::size_t budget = kDefaultAtomBudget);

struct LiftedMap {
  GroupMap base;
  int length = 1;
  std::vector<Element> values;  // one per tuple
};
// Alternating sum sigma(x1) - sigma(x2) + ... over each tuple.
LiftedMap lift_sigma_sharp(const GroupMap& sigma, int length,
                           const std::vector<std::vector<int>>& tuples);
// Lift the moved coordinate of an embedding along a path trick.
EmbeddingTriple lift_embedding(const EmbeddingTriple& e, const PathDistribution& p);

struct SaturationStep {
  int coordinate = 0;
  int length = 1;
};

struct SaturationOptions {
  int per_round_cap = 15;  // largest odd length tried when searching
  std::size_t atom_budget = kDefaultAtomBudget;
  int max_rounds = -1;     // default: order of the bundled group
  bool duplicate_fibers = false;
};

struct SaturationChecks {
  bool common_subgroup = false;
  bool full_equation_support = false;
  bool full_tuple_power = false;
  bool all() const { return common_subgroup && full_equation_support && full_tuple_power; }
};

struct SaturationTranscript {
  std::vector<SaturationStep> steps;
  MasterEmbedding final_master;  // bundled maps re-declared on the common subgroup
  SaturationChecks checks;
  nlohmann::json to_json(const TripleDistribution& final_dist) const;
};

struct SaturationResult {
  TripleDistribution distribution;
  MasterEmbedding master;
  SaturationTranscript transcript;
};

SaturationResult saturate_master(const TripleDistribution& d, const MasterEmbedding& master,
                                 const SaturationOptions& options = {});

// Re-apply recorded steps.
TripleDistribution replay(const TripleDistribution& d, const std::vector<SaturationStep>& steps,
                          std::size_t budget = kDefaultAtomBudget);

struct PathCorrelation {
  double lhs = 0.0;  // |E fgh|^(2^t)
  double rhs = 0.0;  // |E F g h'| under the path distribution
  TensorFunction h_prime;
  std::optional<TensorFunction> F;  // on the tuple alphabet, when small enough
  std::vector<std::vector<int>> F_tuples;
};

PathCorrelation path_correlation_bound(const TripleDistribution& d, const TensorFunction& f,
                                       const TensorFunction& g, const TensorFunction& h, int t,
                                       std::size_t budget = kDefaultAtomBudget);

}  // namespace abelia
