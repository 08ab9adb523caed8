// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include <gmpxx.h>

#include "abelia/abelian.hpp"
#include "abelia/dist_core.hpp"
#include "abelia/tensor.hpp"

namespace abelia {

class Rng;

using Kernel = std::vector<double>;  // m x m row-major Markov kernel

// Every point of supp(d)^n with its x, y, z tensor indices and probability.
struct TensorSupport {
  std::vector<std::size_t> xi, yi, zi;
  std::vector<double> p;
  std::size_t size() const { return p.size(); }
};
TensorSupport tensor_support(const TripleDistribution& d, int n,
                             std::size_t max_points = 10'000'000);

// ------------------------------------------------------------------ bases

// Orthonormal univariate basis under `measure`; elements[k][a].
using UnivariateBasis = std::vector<std::vector<cplx>>;

// Constant function first, then Gram-Schmidt over the indicators.
UnivariateBasis standard_basis(const std::vector<double>& measure);

// Coefficients <f, b_k1 x ... x b_kn> laid out like a TensorFunction.
TensorFunction to_coefficients(const TensorFunction& f, const UnivariateBasis& basis);
TensorFunction from_coefficients(const TensorFunction& c, const UnivariateBasis& basis);

// ------------------------------------------------------------ Efron-Stein

using SubsetMask = std::uint32_t;

// f^{=S} for every S; needs 2^n dense tensors, so n is capped at 12.
std::map<SubsetMask, TensorFunction> efron_stein(const TensorFunction& f);
// ||f^{=S}||^2 indexed by mask.
std::vector<double> efron_stein_weights(const TensorFunction& f);
// W_{=d} for d = 0..n.
std::vector<double> level_weights(const TensorFunction& f);
double weight_up_to(const TensorFunction& f, int d);  // W_{<=d}
TensorFunction truncate_degree(const TensorFunction& f, int d);  // f^{<=d}

// -------------------------------------------------------------- split basis

enum class BasisTag { Embed, NonEmbed, Modest };
const char* to_string(BasisTag t);

struct BasisElement {
  std::vector<cplx> values;  // on Sigma
  BasisTag tag = BasisTag::Embed;
  int character = -1;  // pivot character index for embed elements
};

struct SplitBasis {
  std::vector<double> measure;
  std::vector<long> fiber;  // sigma value index per symbol
  std::vector<BasisElement> elements;
  std::optional<std::vector<int>> modest;  // Sigma_modest, sorted

  int count(BasisTag t) const;
  UnivariateBasis functions() const;
};

constexpr double kPivotResidual = 1e-8;

SplitBasis build_split_basis(const std::vector<double>& measure, const GroupMap& sigma,
                             const std::optional<std::vector<int>>& modest = std::nullopt);

struct Monomial {
  std::vector<int> index;  // basis element per coordinate
  int embeddeg = 0;
  int nedeg = 0;
  int effnon = 0;
  std::map<int, int> embeddeg_by_character;

  static Monomial make(const SplitBasis& b, std::vector<int> index);
  TensorFunction function(const SplitBasis& b) const;
};

// ------------------------------------------------------------------- noise

enum class NoiseKind { Standard, NonEmbed, Effective };

// `keep` is rho for the standard operator, 1 - xi and 1 - delta otherwise.
struct NoiseOperatorSpec {
  NoiseKind kind = NoiseKind::Standard;
  double keep = 1.0;
  std::vector<double> measure;
  std::vector<long> fiber;   // NonEmbed
  std::vector<int> modest;   // Effective

  static NoiseOperatorSpec standard(std::vector<double> measure, double rho);
  static NoiseOperatorSpec nonembed(const SplitBasis& b, double keep);
  static NoiseOperatorSpec effective(const SplitBasis& b, double keep);
  Kernel kernel() const;  // checks stationarity of the measure
};

Kernel standard_kernel(const std::vector<double>& measure, double rho);
// Stay with prob keep, else resample from measure within the same fiber.
Kernel fiber_kernel(const std::vector<double>& measure, const std::vector<long>& fiber,
                    double keep);
Kernel modest_kernel(const std::vector<double>& measure, const std::vector<int>& modest,
                     double keep);

// Throws ArgumentError unless rows sum to 1 and measure is stationary.
void check_stationary(const Kernel& k, const std::vector<double>& measure);

TensorFunction noise_apply(const NoiseOperatorSpec& spec, const TensorFunction& f);
// <f, T^{(x)n} f> with the non-embedding operator of the basis.
double nestab(const TensorFunction& f, const SplitBasis& b, double rho);
double stability(const TensorFunction& f, double rho);  // standard operator

// --------------------------------------------------------------- influences

enum class InfluenceKind { NonEmbed, Modest };

double influence(const TensorFunction& f, const SplitBasis& b, int j, InfluenceKind kind);
double influence_by_definition(const TensorFunction& f, const SplitBasis& b, int j,
                               InfluenceKind kind);
double total_influence(const TensorFunction& f, const SplitBasis& b, InfluenceKind kind);

// ------------------------------------------------------------- restrictions

struct Restriction {
  std::vector<int> alive;  // sorted coordinates kept
  std::vector<int> fixed;  // values on the complement, in coordinate order
};

// Preserve mode: the live coordinates keep f's measure.
TensorFunction restrict_preserve(const TensorFunction& f, const Restriction& r);

// Split mode: mu = rho nu + (1 - rho) nu'. The live measure is nu and the
// fixed values are drawn from nu'.
struct SplitMeasures {
  mpq_class rho;
  std::vector<mpq_class> mu, nu, nu_prime;
  static SplitMeasures make(const std::vector<mpq_class>& mu, const mpq_class& rho,
                            const std::vector<mpq_class>& nu);
};
TensorFunction restrict_split(const TensorFunction& f, const Restriction& r,
                              const SplitMeasures& s);

// I contains each coordinate with probability rho; z is drawn from `law`.
Restriction sample_restriction(int n, double rho, const std::vector<double>& law, Rng& rng);
// Probability of the restriction under the same law.
double restriction_probability(const Restriction& r, int n, double rho,
                               const std::vector<double>& law);
// Every restriction of [n] over an alphabet of size m.
std::vector<Restriction> all_restrictions(int n, int m);

// ------------------------------------------------------------ Markov chains

struct MarkovSpectrum {
  std::vector<double> eigenvalues;  // descending
  int components = 0;
  double second() const;            // largest |lambda| beyond the unit block
};

MarkovSpectrum markov_spectrum(const Kernel& k, const std::vector<double>& measure);

// ----------------------------------------------------------------- W wrap

// Functions on pairs (y,z); the pair alphabet is y * |Phi| + z with the joint
// (y,z) marginal as measure.
std::vector<double> yz_measure(const TripleDistribution& d);
TensorFunction wrap_W(const TensorFunction& f, const TripleDistribution& d);
TensorFunction unwrap_W(const TensorFunction& F, const TripleDistribution& d);

// ----------------------------------------------------- operator comparison

// Largest c with E_{I,z} <f_rest, T_{1-xi,nu1} f_rest> <= <f, T_{1-c beta xi, mu} f>,
// read off from the single coordinate spectra. `components` gives the
// cliques of the graph G.
struct OpComparison {
  double c = 0.0;
  double lambda_lhs = 0.0;  // top eigenvalue of the restricted chain off the unit block
  Kernel lhs_kernel;        // single-coordinate chain of the left hand side
};
OpComparison op_comparison_constant(const std::vector<double>& mu, const std::vector<double>& nu1,
                                    const std::vector<double>& nu2, double beta, double xi,
                                    const std::vector<long>& components);

// --------------------------------------------------------- weight helpers

// Degree beyond which a chain with the given second eigenvalue damps below eps/2.
int noticeable_degree(double lambda2, double eps);
// floor(2 log(1/delta) / eps)
int stability_degree(double eps, double delta);

struct RestCorrelation {
  double weight = 0.0;       // W_{<=d}[F]
  double threshold = 0.0;    // sqrt(W / 2e)
  double probability = 0.0;  // Pr[|E F_rest| >= threshold]
  double bound = 0.0;        // W / 2e
};
// Exact enumeration over (I', x') with inclusion probability 1/(2d).
RestCorrelation rest_to_correlation(const TensorFunction& F, int d);

}  // namespace abelia
