// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <optional>
#include <vector>

#include "abelia/abelian.hpp"
#include "abelia/dist_core.hpp"
#include "abelia/fourier.hpp"
#include "json.hpp"

namespace abelia {

// E[f(x) g(y) h(z)] under d^{(x)n}.
cplx three_wise_correlation(const TripleDistribution& d, const TensorFunction& f,
                            const TensorFunction& g, const TensorFunction& h);

// Split bases for the three coordinates of a master embedding. The modest set
// (if any) lives on x.
struct SplitBases {
  std::array<SplitBasis, 3> basis;
  static SplitBases make(const TripleDistribution& d, const MasterEmbedding& m,
                         const std::optional<std::vector<int>>& modest_x = std::nullopt);
};

// --------------------------------------------------------------------- SVD

struct SvdPart {
  double coefficient = 0.0;
  TensorFunction inner;      // on the I block (n - 1 coordinates)
  std::vector<cplx> outer;   // on the J coordinate
  BasisTag tag = BasisTag::Embed;  // Embed or NonEmbed
  int character = -1;
};

struct SvdSplit {
  std::vector<SvdPart> parts;
  int j = 0;  // the J coordinate
  TensorFunction reconstruct(int n) const;
};

struct HomogeneityProfile {
  bool embedding_homogenous = true;
  bool nonembed_homogenous = true;
  std::map<int, int> embeddeg;  // of the first nonzero monomial
  int nedeg = -1;
  int min_effnon = -1;
};
HomogeneityProfile homogeneity(const TensorFunction& f, const SplitBasis& b);

// Throws ArgumentError on non-homogenous input unless `effective` is set.
SvdSplit svd_split(const TensorFunction& f, const SplitBasis& b, int j, bool effective);

// ----------------------------------------------------------- beta / delta

struct ExtremalOptions {
  int restarts = 32;
  int max_rounds = 500;
  double residual = 1e-9;
  std::uint64_t seed = 0;
  std::size_t max_points = 2'000'000;  // tensor support budget
};

struct ExtremalReport {
  std::string kind;  // "beta" or "delta"
  int n = 0, d = 0, d_prime = 0;
  double value = 0.0;
  double recomputed = 0.0;  // |E fgh| / norms of the witnesses
  TensorFunction f, g, h;
  int restarts = 0;
  int best_restart = -1;
  int iterations = 0;
  double final_residual = 0.0;
  bool class_check = false;
  nlohmann::json to_json() const;
};

ExtremalReport estimate_beta(const TripleDistribution& d, const SplitBases& b, int n, int deg,
                             int deg_prime, const ExtremalOptions& opt = {});
ExtremalReport estimate_delta(const TripleDistribution& d, const SplitBases& b, int n,
                              int deg_prime, const ExtremalOptions& opt = {});

// ------------------------------------------------------------ base cases

struct AdditiveBase {
  double value = 0.0;
  std::vector<cplx> f, g, h;
};
// max |E f(x)(g(y)+h(z))| over unit f orthogonal to the embedding span and unit g+h.
AdditiveBase additive_base_constant(const TripleDistribution& d, const SplitBasis& sigma_basis);

struct RelaxedPoint {
  double tau = 0.0;
  double value = 0.0;
  bool feasible = true;
};
// Var_M(f) = E_{x,x' uniform on M} |f(x) - f(x')|^2 for unit f.
double modest_variance(const std::vector<cplx>& f, const std::vector<int>& modest);
// Largest Var_M over unit-norm f.
double max_modest_variance(const std::vector<double>& mu, const std::vector<int>& modest);
std::vector<RelaxedPoint> relaxed_base_profile(const TripleDistribution& d,
                                               const SplitBasis& sigma_basis,
                                               const std::vector<double>& taus,
                                               const ExtremalOptions& opt = {});
// Best |E fgh| for a fixed unit f on one coordinate (top singular value).
double best_partner_value(const TripleDistribution& d, const std::vector<cplx>& f);

// ------------------------------------------------------------- linearity

struct LinearityIdentity {
  cplx lhs = 0.0;
  cplx rhs = 0.0;
};
// f, g, h on H^n indexed by element index; U is uniform on a + b + c = 0.
LinearityIdentity group_linearity_correlation(const AbelianGroup& h, const TensorFunction& f,
                                              const TensorFunction& g, const TensorFunction& hh);

}  // namespace abelia
