// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include "abelia/errors.hpp"
#include "abelia/extremal.hpp"
#include "abelia/rng.hpp"
#include "doctest.h"

using namespace abelia;

namespace {

// x in {0..3}, sigma(x) = x mod 2, y, z in Z_2 and sigma(x) + y + z = 0.
// Given (y,z), the symbol s gets share `heavy` when y = 0 and 1 - heavy otherwise.
TripleDistribution two_to_one(int heavy_num, int heavy_den) {
  AtomMap atoms;
  const mpq_class heavy(heavy_num, heavy_den);
  for (int y = 0; y < 2; ++y)
    for (int z = 0; z < 2; ++z) {
      const int s = (y + z) % 2;
      const mpq_class share = y == 0 ? heavy : 1 - heavy;
      atoms[{s, y, z}] = share / 4;
      atoms[{s + 2, y, z}] = (1 - share) / 4;
    }
  return TripleDistribution({Alphabet::range(4), Alphabet::range(2), Alphabet::range(2)}, atoms);
}

// Full support on {0,1}^3 with distinct weights; only trivial embeddings.
TripleDistribution generic_cube() {
  AtomMap atoms;
  int k = 0;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int z = 0; z < 2; ++z) atoms[{x, y, z}] = mpq_class(++k, 36);
  return TripleDistribution({Alphabet::range(2), Alphabet::range(2), Alphabet::range(2)}, atoms);
}

cplx brute_correlation(const TripleDistribution& d, const TensorFunction& f,
                       const TensorFunction& g, const TensorFunction& h) {
  cplx s = 0.0;
  const auto supp = d.support();
  for (const auto& a : supp)
    for (const auto& b : supp)
      s += d.prob(a).get_d() * d.prob(b).get_d() * f.values[f.encode({a[0], b[0]})] *
           g.values[g.encode({a[1], b[1]})] * h.values[h.encode({a[2], b[2]})];
  return s;
}

}  // namespace

TEST_CASE("three-wise correlation matches a brute-force sum") {
  const auto d = two_to_one(2, 3);
  Rng rng(3, "extremal-test", 0);
  for (int t = 0; t < 5; ++t) {
    const auto f = random_function(2, d.marginal1_double(0), rng);
    const auto g = random_function(2, d.marginal1_double(1), rng);
    const auto h = random_function(2, d.marginal1_double(2), rng);
    CHECK(std::abs(three_wise_correlation(d, f, g, h) - brute_correlation(d, f, g, h)) < 1e-12);
  }
  const auto f = random_function(1, d.marginal1_double(0), rng);
  CHECK_THROWS_AS(three_wise_correlation(d, f, f, f), ArgumentError);
}

TEST_CASE("split bases of the master embedding") {
  const auto d = two_to_one(2, 3);
  const auto m = build_master_embedding(d, 6);
  const auto b = SplitBases::make(d, m, std::vector<int>{0, 2});
  CHECK(b.basis[0].count(BasisTag::Embed) == 2);
  CHECK(b.basis[0].count(BasisTag::NonEmbed) + b.basis[0].count(BasisTag::Modest) == 2);
  CHECK(b.basis[1].count(BasisTag::Embed) == 2);
  CHECK(b.basis[2].count(BasisTag::Embed) == 2);
}

TEST_CASE("SVD split") {
  const auto d = two_to_one(2, 3);
  const auto b = SplitBases::make(d, build_master_embedding(d, 6)).basis[0];
  Rng rng(5, "extremal-test", 1);
  for (int t = 0; t < 10; ++t) {
    const int n = 1 + t % 3;
    auto f = random_function(n, b.measure, rng);
    f = (1.0 / norm2(f)) * f;
    const int j = t % n;
    CHECK_THROWS_AS(svd_split(f, b, j, false), ArgumentError);
    const auto s = svd_split(f, b, j, true);
    CHECK(max_abs_diff(s.reconstruct(n), f) < 1e-9);
    double sum = 0.0, psi = 0.0;
    for (const auto& p : s.parts) {
      sum += p.coefficient * p.coefficient;
      if (p.tag == BasisTag::NonEmbed) psi += p.coefficient * p.coefficient;
      CHECK(std::abs(norm2(p.inner) - 1.0) < 1e-10);
    }
    CHECK(std::abs(sum - 1.0) < 1e-9);
    CHECK(std::abs(psi - 0.5 * influence(f, b, j, InfluenceKind::NonEmbed)) < 1e-9);
    // outer factors within one tag are orthonormal
    for (std::size_t p = 0; p < s.parts.size(); ++p)
      for (std::size_t q = p; q < s.parts.size(); ++q) {
        if ((s.parts[p].tag == BasisTag::Embed) != (s.parts[q].tag == BasisTag::Embed)) continue;
        cplx ip = 0.0;
        for (std::size_t a = 0; a < b.measure.size(); ++a)
          ip += b.measure[a] * s.parts[p].outer[a] * std::conj(s.parts[q].outer[a]);
        CHECK(std::abs(ip - (p == q ? 1.0 : 0.0)) < 1e-10);
        if (s.parts[p].tag == BasisTag::NonEmbed && p != q)
          CHECK(std::abs(inner_product(s.parts[p].inner, s.parts[q].inner)) < 1e-10);
      }
  }
  // a homogeneous function passes the strict mode
  const auto mono = Monomial::make(b, {0, 2}).function(b) + Monomial::make(b, {0, 3}).function(b);
  const auto s = svd_split(mono, b, 1, false);
  for (const auto& p : s.parts) CHECK(p.tag == BasisTag::NonEmbed);
}

TEST_CASE("beta on a single coordinate equals the exact oracle") {
  const auto d = generic_cube();
  const auto sb = SplitBases::make(d, build_master_embedding(d, 6));
  ExtremalOptions opt;
  opt.restarts = 8;
  const auto rep = estimate_beta(d, sb, 1, 1, 0, opt);
  // f is the one non-embedding element; g and h range over {1, e}
  double oracle = 0.0;
  const auto tf = [&](int c, int k) {
    return TensorFunction::from_univariate(sb.basis[c].elements[k].values, sb.basis[c].measure);
  };
  for (int kg = 0; kg < 2; ++kg)
    for (int kh = 0; kh < 2; ++kh)
      oracle = std::max(oracle, std::abs(three_wise_correlation(d, tf(0, 1), tf(1, kg), tf(2, kh))));
  CHECK(oracle > 1e-3);
  CHECK(std::abs(rep.value - oracle) < 1e-9);
  CHECK(std::abs(rep.recomputed - oracle) < 1e-9);
  CHECK(rep.class_check);
  CHECK(rep.to_json()["kind"] == "beta");
  CHECK_THROWS_AS(estimate_beta(d, sb, 1, 2, 0, opt), ArgumentError);
}

TEST_CASE("beta and delta are reproducible and consistent") {
  const auto d = two_to_one(2, 3);
  const auto sb = SplitBases::make(d, build_master_embedding(d, 6), std::vector<int>{0, 2});
  ExtremalOptions opt;
  opt.restarts = 4;
  opt.seed = 11;
  const auto a = estimate_delta(d, sb, 2, 1, opt);
  const auto b = estimate_delta(d, sb, 2, 1, opt);
  CHECK(a.value == b.value);
  CHECK(a.best_restart == b.best_restart);
  CHECK(a.value <= 1.0 + 1e-9);
  CHECK(std::abs(a.value - a.recomputed) < 1e-8);
  CHECK(a.class_check);
  // the maximum dominates every feasible monomial triple
  const auto beta = estimate_beta(d, sb, 2, 2, 0, opt);
  CHECK(beta.class_check);
  CHECK(std::abs(beta.value - beta.recomputed) < 1e-8);
  CHECK(beta.value <= 1.0 + 1e-9);
  double floor = 0.0;
  for (int i = 0; i < 16; ++i) {
    const auto mf = Monomial::make(sb.basis[0], {i / 4, i % 4});
    if (mf.nedeg != 2) continue;
    for (int k = 0; k < 16; ++k) {
      const auto mg = Monomial::make(sb.basis[1], {k >> 3 & 1, k >> 2 & 1});
      const auto mh = Monomial::make(sb.basis[2], {k >> 1 & 1, k & 1});
      floor = std::max(floor, std::abs(three_wise_correlation(d, mf.function(sb.basis[0]),
                                                              mg.function(sb.basis[1]),
                                                              mh.function(sb.basis[2]))));
    }
  }
  CHECK(floor > 1e-3);
  CHECK(beta.value >= floor - 1e-9);
}

TEST_CASE("additive base case") {
  const auto skew = two_to_one(2, 3);
  const auto sb = SplitBases::make(skew, build_master_embedding(skew, 6)).basis[0];
  const auto r = additive_base_constant(skew, sb);
  CHECK(r.value > 1e-3);
  CHECK(r.value < 1.0 - 1e-6);
  // the witnesses attain the value
  const auto mu = skew.marginal1_double(0);
  double nf = 0.0, nw = 0.0;
  cplx corr = 0.0;
  for (const auto& [a, p] : skew.atoms()) {
    const cplx w = r.g[a[1]] + r.h[a[2]];
    corr += p.get_d() * r.f[a[0]] * w;
    nw += p.get_d() * std::norm(w);
  }
  for (int x = 0; x < 4; ++x) nf += mu[x] * std::norm(r.f[x]);
  CHECK(std::abs(std::abs(corr) / std::sqrt(nf * nw) - r.value) < 1e-9);
  for (const auto& e : sb.elements) {
    if (e.tag != BasisTag::Embed) continue;
    cplx ip = 0.0;
    for (int x = 0; x < 4; ++x) ip += mu[x] * r.f[x] * std::conj(e.values[x]);
    CHECK(std::abs(ip) < 1e-10);
  }

  const auto flat = two_to_one(1, 2);
  const auto fb = SplitBases::make(flat, build_master_embedding(flat, 6)).basis[0];
  CHECK(additive_base_constant(flat, fb).value < 1e-12);
}

TEST_CASE("relaxed base profile") {
  const auto d = two_to_one(2, 3);
  const auto sb = SplitBases::make(d, build_master_embedding(d, 6), std::vector<int>{0, 2}).basis[0];
  const auto vmax = max_modest_variance(sb.measure, {0, 2});
  CHECK(vmax > 0.0);
  ExtremalOptions opt;
  opt.restarts = 4;
  const auto prof = relaxed_base_profile(d, sb, {0.0, 0.5 * vmax, vmax, vmax + 0.1}, opt);
  REQUIRE(prof.size() == 4);
  CHECK(prof[0].feasible);
  CHECK(prof[2].feasible);
  CHECK_FALSE(prof[3].feasible);
  for (int i = 0; i < 3; ++i) {
    CHECK(prof[i].value >= 0.0);
    CHECK(prof[i].value <= 1.0 + 1e-9);
  }
  // the partner oracle bounds any pair of unit partners
  Rng rng(9, "extremal-test", 2);
  std::vector<cplx> f(4);
  for (auto& v : f) v = rng.complex_normal();
  const double best = best_partner_value(d, f);
  for (int t = 0; t < 20; ++t) {
    auto g = random_function(1, d.marginal1_double(1), rng);
    auto h = random_function(1, d.marginal1_double(2), rng);
    g = (1.0 / norm2(g)) * g;
    h = (1.0 / norm2(h)) * h;
    const auto ff = TensorFunction::from_univariate(f, d.marginal1_double(0));
    CHECK(std::abs(three_wise_correlation(d, ff, g, h)) <= best + 1e-12);
  }
  CHECK_THROWS_AS(relaxed_base_profile(d, SplitBases::make(d, build_master_embedding(d, 6)).basis[0],
                                       {0.1}, opt),
                  ArgumentError);
}

TEST_CASE("group linearity identity") {
  for (const auto& grp : {AbelianGroup(std::vector<int>{2, 2}), AbelianGroup(std::vector<int>{3, 3})}) {
    const std::vector<double> uni(grp.order(), 1.0 / grp.order());
    Rng rng(13, "extremal-test", grp.order());
    for (int n = 1; n <= 2; ++n) {
      const auto f = random_function(n, uni, rng), g = random_function(n, uni, rng),
                 h = random_function(n, uni, rng);
      const auto r = group_linearity_correlation(grp, f, g, h);
      CHECK(std::abs(r.lhs - r.rhs) < 1e-10);
    }
  }
}
