// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "json.hpp"

namespace abelia {

using Set = std::vector<int>;  // sorted subset of [n]

// ---------------------------------------------------------------- strategies

enum class StrategyLaw { Exact, Perturbed, Random, Mixture, Constant };

// F[A] in [R]^A as a deterministic function of (seed, A). Tables are never
// materialized.
struct DPStrategy {
  int n = 0;
  int R = 2;
  StrategyLaw law = StrategyLaw::Exact;
  std::vector<int> g;      // planted string, length n
  int radius = 0;          // corruptions for Perturbed / Mixture
  double eps = 1.0;        // weight of the structured part for Mixture
  int constant = 0;        // symbol for Constant
  std::uint64_t seed = 0;

  static DPStrategy exact(std::vector<int> g, int R, std::uint64_t seed = 0);
  static DPStrategy perturbed(std::vector<int> g, int R, int radius, std::uint64_t seed);
  static DPStrategy random(int n, int R, std::uint64_t seed);
  static DPStrategy mixture(std::vector<int> g, int R, double eps, int radius, std::uint64_t seed);
  static DPStrategy constant_string(int n, int R, int symbol);
  // exact|perturbed:r|random|mixture:eps,r with a planted string from the seed
  static DPStrategy parse(const std::string& text, int n, int R, std::uint64_t seed);

  std::vector<int> value(const Set& a) const;  // aligned with a
  std::string describe() const;
};

std::vector<int> planted_string(int n, int R, std::uint64_t seed);

// --------------------------------------------------------------- test specs

enum class Variant { DP, Uniform, Modified, Subset };
const char* to_string(Variant v);

struct AgreementTestSpec {
  Variant variant = Variant::DP;
  // DP(rho, alpha, beta) and Subset(q, alpha, beta)
  double rho = 0.0, alpha = 0.0, beta = 0.0;
  // Uniform(q, q', t) and Modified(q, q', c, t); also q for Subset
  double q = 0.0, q_prime = 0.0, c = 0.0;
  int t = 0;

  static AgreementTestSpec dp(double rho, double alpha, double beta);
  static AgreementTestSpec uniform(double q, double q_prime, int t);
  static AgreementTestSpec modified(double q, double q_prime, double c, int t);
  static AgreementTestSpec subset(double q, double alpha, double beta);

  void validate(int n) const;  // throws ArgumentError
  nlohmann::json to_json() const;
};

// Subset-agreement parameters that reproduce the DP(rho, alpha, beta) law.
AgreementTestSpec subset_from_dp(double rho, double alpha, double beta);

// One sampled query: the two sets and the coordinates compared.
struct TrialDraw {
  Set first, second, checked;
  int threshold = 0;
};
TrialDraw draw_trial(const AgreementTestSpec& spec, int n, std::uint64_t seed, std::uint64_t trial);
bool accepts(const DPStrategy& s, const TrialDraw& d);

struct Interval {
  double low = 0.0, high = 1.0;
};
// Exact Clopper-Pearson interval.
Interval clopper_pearson(std::uint64_t successes, std::uint64_t trials, double confidence = 0.99);

struct AcceptanceResult {
  std::uint64_t accepted = 0, trials = 0;
  double estimate = 0.0;
  Interval ci;
};
AcceptanceResult run_agreement_test(const DPStrategy& s, const AgreementTestSpec& spec,
                                    std::uint64_t trials, std::uint64_t seed, int workers = 1);

// Analytic acceptance of the random strategy under DP or Subset.
double random_strategy_acceptance(const AgreementTestSpec& spec, int n, int R);

// ----------------------------------------------------------------- decoding

int hamming(const std::vector<int>& a, const std::vector<int>& b);
// Values of F[s] on the coordinates in `sub`, a subset of s.
std::vector<int> restrict_values(const Set& s, const std::vector<int>& values, const Set& sub);

// Uniform-variant anchor (A, B) with |A| = q'n, |B| = (q - q')n.
struct ConsAnchor {
  Set a, b;
};
ConsAnchor sample_anchor(const AgreementTestSpec& spec, int n, std::uint64_t seed);

struct LocalDecode {
  std::uint64_t samples = 0, consistent = 0;
  double cons_probability = 0.0;
  std::vector<int> g;        // decoded string (0 on uncovered coordinates)
  std::vector<bool> covered;
  bool good(double eps) const { return cons_probability >= eps / 2; }
};
// Samples B' outside A, keeps the t-consistent ones and takes a plurality vote.
LocalDecode cons_and_decode_local(const DPStrategy& s, const AgreementTestSpec& spec,
                                  const ConsAnchor& anchor, int t, std::uint64_t samples,
                                  std::uint64_t seed);

struct GlobalDecodeOptions {
  std::uint64_t budget = 2000;
  int radius = 0;
  double q = 0.5;               // set law: q-biased
  std::optional<int> set_size;  // or uniform of this size
  std::uint64_t seed = 0;
};
struct GlobalDecode {
  std::vector<int> g;
  double agreement = 0.0;  // Pr[Delta(F[A], g|A) <= r] on a fresh sample
};
GlobalDecode global_decode(const DPStrategy& s, const GlobalDecodeOptions& opt);

// ------------------------------------------------------------ biased bridge

struct BridgeDistance {
  mpq_class exact;
  double value = 0.0;
};
// Statistical distance between the q-biased subset of [n] and the trace on
// [n] of a uniform qN-subset of [N].
BridgeDistance biased_uniform_distance(int n, long N, const mpq_class& q);

// --------------------------------------------------------------- multislice

// Vertices (A, B): disjoint, |A| = a, |B| = b. A step keeps a random
// `overlap`-subset D of A, adds a fresh E' outside A, and resamples B
// outside D u E'.
class MultiSliceGraph {
 public:
  MultiSliceGraph(int n, int a, int b, int overlap);
  // sizes q'n, (q - q')n and c q'n rounded to the nearest integer
  static MultiSliceGraph from_fractions(int n, double q, double q_prime, double c);

  int n() const { return n_; }
  int a() const { return a_; }
  int b() const { return b_; }
  int overlap() const { return overlap_; }
  std::size_t size() const { return labels_.size(); }
  const std::vector<int>& label(std::size_t v) const { return labels_[v]; }  // 0 rest, 1 A, 2 B
  std::size_t index(const std::vector<int>& label) const;
  double transition(std::size_t u, std::size_t v) const;
  std::size_t step(std::size_t u, std::uint64_t seed, std::uint64_t k) const;  // random neighbor

 private:
  int n_, a_, b_, overlap_;
  double p_edge_ = 0.0;
  std::vector<std::vector<int>> labels_;
  std::vector<std::uint64_t> codes_;  // sorted codes for index lookup
  std::vector<std::size_t> code_order_;
};

inline constexpr std::size_t kDenseBudget = 3000;

struct MultiSliceSpectrum {
  std::vector<double> eigenvalues;  // descending
  int components = 0;
  double lambda2 = 0.0;        // largest eigenvalue outside the unit block
  double max_row_error = 0.0;  // |row sum - 1| and |column sum - 1|
  double symmetry_error = 0.0;
};
MultiSliceSpectrum multislice_spectrum(const MultiSliceGraph& g,
                                       std::size_t budget = kDenseBudget);

struct ExpansionProbe {
  std::vector<double> estimates;  // per set
  double min = 1.0;
};
// Monte-Carlo Pr[neighbor leaves S | start uniform in S].
ExpansionProbe expansion_probe(const MultiSliceGraph& g,
                               const std::vector<std::vector<std::size_t>>& sets,
                               std::uint64_t trials, std::uint64_t seed);
double exact_expansion(const MultiSliceGraph& g, const std::vector<std::size_t>& set);
std::vector<std::size_t> random_vertex_set(const MultiSliceGraph& g, double measure,
                                           std::uint64_t seed);

// Largest ||f||_4 / ||f||_2 over sampled functions of degree <= d (sums of
// functions of at most d coordinate labels), for d = 0..max_degree.
std::vector<double> hypercontractivity_probe(const MultiSliceGraph& g, int max_degree,
                                             int samples, std::uint64_t seed);

// Inclusion graph between [n] and ell-subsets: average fraction of x whose
// neighborhood density of a random Y' of measure rho is off by more than nu*rho.
double sampler_degraded_fraction(int n, int ell, double rho, double nu, int trials,
                                 std::uint64_t seed);

}  // namespace abelia
