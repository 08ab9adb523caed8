// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace abelia {

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t fnv1a(std::string_view s);

// substream = mix(seed, label, index); every random consumer derives its own
// generator this way so results do not depend on call order.
std::uint64_t substream(std::uint64_t seed, std::string_view label, std::uint64_t index = 0);
std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v);

// Thin wrapper over mt19937_64 with platform independent derived draws.
// (std distributions are implementation defined, so we roll our own.)
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  Rng(std::uint64_t seed, std::string_view label, std::uint64_t index = 0)
      : eng_(substream(seed, label, index)) {}

  std::uint64_t next() { return eng_(); }
  double uniform();                      // [0,1)
  std::uint64_t below(std::uint64_t n);  // uniform in [0,n)
  bool bernoulli(double p) { return uniform() < p; }
  double normal();
  std::complex<double> complex_normal();
  // index drawn from unnormalised nonnegative weights
  std::size_t discrete(const std::vector<double>& weights);
  // k distinct values from [0,n), in increasing order
  std::vector<int> subset(int n, int k);
  // k distinct values from pool, in increasing order
  std::vector<int> subset_of(const std::vector<int>& pool, int k);

 private:
  std::mt19937_64 eng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace abelia
