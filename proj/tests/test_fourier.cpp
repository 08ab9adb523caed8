// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include "abelia/errors.hpp"
#include "abelia/fourier.hpp"
#include "abelia/rng.hpp"
#include "doctest.h"

using namespace abelia;

namespace {

const std::vector<double> kMu3{0.5, 0.3, 0.2};
const std::vector<double> kMu4{0.25, 0.25, 0.25, 0.25};

// E[f | x_T]: average out every coordinate outside T.
TensorFunction conditional(const TensorFunction& f, SubsetMask keep) {
  const std::size_t m = f.measure.size();
  Kernel avg(m * m);
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b) avg[a * m + b] = f.measure[b];
  TensorFunction g = f;
  for (int i = 0; i < f.n; ++i)
    if (!(keep >> i & 1)) g = apply_axis(g, i, avg);
  return g;
}

// inclusion-exclusion form of the Efron-Stein component
TensorFunction es_oracle(const TensorFunction& f, SubsetMask s) {
  TensorFunction out(f.n, f.measure);
  for (SubsetMask t = s;; t = (t - 1) & s) {
    const double sign = __builtin_popcount(s ^ t) % 2 ? -1.0 : 1.0;
    out = out + sign * conditional(f, t);
    if (t == 0) break;
  }
  return out;
}

GroupMap two_to_one() {
  const auto z2 = AbelianGroup::cyclic(2);
  return {z2, {z2.element(0), z2.element(0), z2.element(1), z2.element(1)}};
}

}  // namespace

TEST_CASE("inner products") {
  const auto z3 = AbelianGroup::cyclic(3);
  const auto chars = all_characters(z3);
  const std::vector<double> u(3, 1.0 / 3);
  GroupMap id{z3, z3.elements()};
  const auto f = TensorFunction::from_univariate(character_function(chars[1], id), u);
  const auto g = TensorFunction::from_univariate(character_function(chars[2], id), u);
  CHECK(std::abs(inner_product(f, g)) < 1e-12);
  CHECK(std::abs(inner_product(f, f) - 1.0) < 1e-12);
  const auto one = TensorFunction::constant(2, kMu3, 1.0);
  CHECK(std::abs(inner_product(one, one) - 1.0) < 1e-12);
  CHECK_THROWS_AS(inner_product(f, TensorFunction::constant(1, kMu3, 1.0)), ArgumentError);
}

TEST_CASE("Efron-Stein decomposition") {
  Rng rng(11, "es");
  const auto f = random_function(3, kMu3, rng);
  const auto parts = efron_stein(f);
  TensorFunction sum(3, kMu3);
  double mass = 0.0;
  for (const auto& [s, part] : parts) {
    sum = sum + part;
    mass += norm2(part) * norm2(part);
    CHECK(max_abs_diff(part, es_oracle(f, s)) < 1e-10);
    for (int i = 0; i < 3; ++i)
      if (s >> i & 1) CHECK(conditional(part, s & ~(SubsetMask(1) << i)).sup_norm() < 1e-10);
  }
  CHECK(max_abs_diff(sum, f) < 1e-10);
  CHECK(std::abs(mass - norm2(f) * norm2(f)) < 1e-10);
  const auto lw = level_weights(f);
  double tot = 0.0;
  for (double w : lw) tot += w;
  CHECK(std::abs(tot - norm2(f) * norm2(f)) < 1e-10);

  const auto c = efron_stein(TensorFunction::constant(2, kMu3, 2.0));
  for (const auto& [s, part] : c) CHECK((s == 0 || part.sup_norm() < 1e-12));

  // mean-zero junta on coordinate 1
  const auto junta = tensor_product({{1.0, -1.0, -1.0}, {1.0, 1.0, 1.0}}, kMu3);
  for (const auto& [s, part] : efron_stein(junta)) CHECK((s == 1 || part.sup_norm() < 1e-12));
  CHECK(std::abs(weight_up_to(f, 1) - lw[0] - lw[1]) < 1e-12);
  CHECK(std::abs(norm2(truncate_degree(f, 3)) - norm2(f)) < 1e-10);
}

TEST_CASE("split basis") {
  const auto z4 = AbelianGroup::cyclic(4);
  const auto inj = build_split_basis(kMu4, {z4, z4.elements()});
  CHECK(inj.count(BasisTag::Embed) == 4);

  const auto b = build_split_basis(kMu4, two_to_one());
  CHECK(b.count(BasisTag::Embed) == 2);
  CHECK(b.count(BasisTag::NonEmbed) == 2);
  CHECK(b.count(BasisTag::Modest) == 0);

  const std::vector<double> mu{0.1, 0.2, 0.3, 0.4};
  const auto bm = build_split_basis(mu, two_to_one(), std::vector<int>{0, 1});
  CHECK(bm.count(BasisTag::Embed) == 2);
  CHECK(bm.count(BasisTag::NonEmbed) == 1);
  CHECK(bm.count(BasisTag::Modest) == 1);
  CHECK_THROWS_AS(build_split_basis(mu, two_to_one(), std::vector<int>{0, 2}), ArgumentError);

  // Gram matrix
  for (std::size_t i = 0; i < bm.elements.size(); ++i)
    for (std::size_t j = 0; j < bm.elements.size(); ++j) {
      cplx s = 0.0;
      for (int a = 0; a < 4; ++a)
        s += mu[a] * bm.elements[i].values[a] * std::conj(bm.elements[j].values[a]);
      CHECK(std::abs(s - (i == j ? 1.0 : 0.0)) < 1e-10);
    }
  // nonembed constant on the modest set, modest supported on it
  for (const auto& e : bm.elements) {
    if (e.tag == BasisTag::NonEmbed) CHECK(std::abs(e.values[0] - e.values[1]) < 1e-10);
    if (e.tag == BasisTag::Modest) CHECK(std::abs(e.values[2]) + std::abs(e.values[3]) < 1e-10);
  }
  // embed span reproduces every chi o sigma
  for (const auto& chi : all_characters(AbelianGroup::cyclic(2))) {
    auto v = character_function(chi, two_to_one());
    for (const auto& e : bm.elements) {
      if (e.tag != BasisTag::Embed) continue;
      cplx c = 0.0;
      for (int a = 0; a < 4; ++a) c += mu[a] * v[a] * std::conj(e.values[a]);
      for (int a = 0; a < 4; ++a) v[a] -= c * e.values[a];
    }
    for (const auto& x : v) CHECK(std::abs(x) < 1e-9);
  }
}

TEST_CASE("noise operators and monomial eigenvalues") {
  const std::vector<double> mu{0.1, 0.2, 0.3, 0.4};
  const auto b = build_split_basis(mu, two_to_one(), std::vector<int>{0, 1});
  Rng rng(5, "noise");
  const auto f = random_function(2, mu, rng);
  CHECK(max_abs_diff(noise_apply(NoiseOperatorSpec::standard(mu, 1.0), f), f) < 1e-12);
  CHECK(max_abs_diff(noise_apply(NoiseOperatorSpec::nonembed(b, 1.0), f), f) < 1e-12);

  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const auto mono = Monomial::make(b, {i, j});
      CHECK(mono.nedeg + mono.embeddeg == 2);
      CHECK(mono.effnon <= mono.nedeg);
      const auto u = mono.function(b);
      const auto ne = noise_apply(NoiseOperatorSpec::nonembed(b, 0.5), u);
      CHECK(max_abs_diff(ne, std::pow(0.5, mono.nedeg) * u) < 1e-12);
      const auto ef = noise_apply(NoiseOperatorSpec::effective(b, 0.7), u);
      CHECK(max_abs_diff(ef, std::pow(0.7, mono.effnon) * u) < 1e-12);
      CHECK(std::abs(nestab(u, b, 0.3) - std::pow(0.3, mono.nedeg)) < 1e-12);
    }
  // explicit: embed x nonembed monomial is fixed by the effective operator
  int e = -1, ne = -1;
  for (int k = 0; k < 4; ++k) {
    if (b.elements[k].tag == BasisTag::Embed && e < 0) e = k;
    if (b.elements[k].tag == BasisTag::NonEmbed) ne = k;
  }
  const auto u = Monomial::make(b, {e, ne}).function(b);
  CHECK(max_abs_diff(noise_apply(NoiseOperatorSpec::effective(b, 0.2), u), u) < 1e-12);

  // self-adjointness
  const auto g = random_function(2, mu, rng);
  for (const auto& spec : {NoiseOperatorSpec::standard(mu, 0.4), NoiseOperatorSpec::nonembed(b, 0.4),
                           NoiseOperatorSpec::effective(b, 0.4)}) {
    const cplx lhs = inner_product(noise_apply(spec, f), g);
    const cplx rhs = inner_product(f, noise_apply(spec, g));
    CHECK(std::abs(lhs - rhs) < 1e-10);
  }
  CHECK_THROWS_AS(noise_apply(NoiseOperatorSpec::standard(kMu4, 0.5), f), ArgumentError);
}

TEST_CASE("non-embedding stability is monotone") {
  const std::vector<double> mu{0.1, 0.2, 0.3, 0.4};
  const auto b = build_split_basis(mu, two_to_one());
  Rng rng(9, "nestab");
  for (int rep = 0; rep < 50; ++rep) {
    const auto f = random_function(2, mu, rng);
    const double r1 = rng.uniform(), r2 = rng.uniform();
    const double lo = std::min(r1, r2), hi = std::max(r1, r2);
    CHECK(nestab(f, b, lo) <= nestab(f, b, hi) + 1e-10);
    CHECK(nestab(f, b, lo) >= -1e-12);
  }
  // pure embedding function
  const auto chi = character_function(all_characters(AbelianGroup::cyclic(2))[1], two_to_one());
  const auto f = tensor_product({chi, chi}, mu);
  CHECK(std::abs(nestab(f, b, 0.1) - norm2(f) * norm2(f)) < 1e-12);
}

TEST_CASE("influences") {
  const std::vector<double> mu{0.1, 0.2, 0.3, 0.4};
  const auto b = build_split_basis(mu, two_to_one(), std::vector<int>{0, 1});
  Rng rng(3, "inf");
  for (int rep = 0; rep < 5; ++rep) {
    const auto f = random_function(3, mu, rng);
    for (int j = 0; j < 3; ++j)
      for (auto kind : {InfluenceKind::NonEmbed, InfluenceKind::Modest})
        CHECK(std::abs(influence(f, b, j, kind) - influence_by_definition(f, b, j, kind)) < 1e-10);
  }
  const auto chi = character_function(all_characters(AbelianGroup::cyclic(2))[1], two_to_one());
  const auto emb = tensor_product({chi, chi, chi}, mu);
  CHECK(total_influence(emb, b, InfluenceKind::NonEmbed) < 1e-12);

  int ne = -1, e = -1;
  for (int k = 0; k < 4; ++k) {
    if (b.elements[k].tag == BasisTag::NonEmbed) ne = k;
    if (b.elements[k].tag == BasisTag::Embed && e < 0) e = k;
  }
  const auto u = cplx(2.0) * Monomial::make(b, {ne, e, e}).function(b);
  const double nn = norm2(u) * norm2(u);
  CHECK(std::abs(influence(u, b, 0, InfluenceKind::NonEmbed) - 2 * nn) < 1e-10);
  CHECK(influence(u, b, 1, InfluenceKind::NonEmbed) < 1e-12);
  CHECK(influence(u, b, 2, InfluenceKind::NonEmbed) < 1e-12);
  CHECK_THROWS_AS(influence(u, build_split_basis(mu, two_to_one()), 0, InfluenceKind::Modest),
                  ArgumentError);
}

TEST_CASE("restrictions") {
  Rng rng(4, "rest");
  const auto f = random_function(3, kMu3, rng);
  CHECK(max_abs_diff(restrict_preserve(f, {{0, 1, 2}, {}}), f) < 1e-15);

  // total expectation identity
  double acc = 0.0, prob = 0.0;
  for (const auto& r : all_restrictions(3, 3)) {
    const double p = restriction_probability(r, 3, 0.4, kMu3);
    const auto g = restrict_preserve(f, r);
    acc += p * norm2(g) * norm2(g);
    prob += p;
  }
  CHECK(std::abs(prob - 1.0) < 1e-12);
  CHECK(std::abs(acc - norm2(f) * norm2(f)) < 1e-10);

  const auto c = TensorFunction::constant(3, kMu3, 0.5);
  const auto r = sample_restriction(3, 0.5, kMu3, rng);
  const auto cr = restrict_preserve(c, r);
  for (const auto& v : cr.values) CHECK(std::abs(v - 0.5) < 1e-15);

  const std::vector<mpq_class> mu{mpq_class(1, 2), mpq_class(3, 10), mpq_class(1, 5)};
  const auto s = SplitMeasures::make(mu, mpq_class(1, 2),
                                     {mpq_class(1, 3), mpq_class(1, 3), mpq_class(1, 3)});
  const auto g = restrict_split(f, {{1}, {0, 2}}, s);
  CHECK(g.measure[0] == doctest::Approx(1.0 / 3));
  CHECK_THROWS_AS(SplitMeasures::make(mu, mpq_class(9, 10), {1, 0, 0}), DomainError);
}

TEST_CASE("Markov spectra") {
  const Kernel id{1, 0, 0, 0, 1, 0, 0, 0, 1};
  const std::vector<double> u(3, 1.0 / 3);
  auto s = markov_spectrum(id, u);
  for (double e : s.eigenvalues) CHECK(e == doctest::Approx(1.0));
  CHECK(s.components == 3);

  s = markov_spectrum(standard_kernel(u, 0.0), u);
  CHECK(s.eigenvalues[0] == doctest::Approx(1.0));
  CHECK(std::abs(s.eigenvalues[1]) < 1e-12);
  CHECK(std::abs(s.eigenvalues[2]) < 1e-12);
  CHECK(s.components == 1);

  const auto two = fiber_kernel(kMu4, {0, 0, 1, 1}, 0.5);
  s = markov_spectrum(two, kMu4);
  CHECK(s.components == 2);
  CHECK(s.eigenvalues[0] == doctest::Approx(1.0));
  CHECK(s.eigenvalues[1] == doctest::Approx(1.0));
  CHECK(s.eigenvalues[2] < 1.0 - 1e-6);
  CHECK_THROWS_AS(markov_spectrum(standard_kernel(u, 0.0), kMu3), ArgumentError);
}

TEST_CASE("W wrap") {
  const auto d = fixtures::cyclic_equation(3);
  const auto mux = d.marginal1_double(0);
  const auto one = TensorFunction::constant(2, mux, 1.0);
  const auto F1 = wrap_W(one, d);
  for (std::size_t i = 0; i < F1.size(); ++i)
    if (F1.prob(i) > 0) CHECK(std::abs(F1.values[i] - 1.0) < 1e-15);

  const auto z3 = AbelianGroup::cyclic(3);
  const auto chi = all_characters(z3)[1];
  GroupMap id{z3, z3.elements()};
  const auto f = TensorFunction::from_univariate(character_function(chi, id), mux);
  const auto F = wrap_W(f, d);
  for (int y = 0; y < 3; ++y)
    for (int z = 0; z < 3; ++z)
      CHECK(std::abs(F.values[y * 3 + z] - chi(z3.element(((-y - z) % 3 + 3) % 3))) < 1e-12);

  Rng rng(8, "wrap");
  const auto g = random_function(2, mux, rng);
  const auto G = wrap_W(g, d);
  CHECK(std::abs(norm2(G) - norm2(g)) < 1e-10);
  CHECK(max_abs_diff(unwrap_W(G, d), g) < 1e-12);
  // pairs (0,0) and (1,2) both force x = 0
  auto bad = G;
  bad.values[0 * 9 + 0] += 1.0;
  CHECK_THROWS_AS(unwrap_W(bad, d), ArgumentError);
  CHECK_THROWS_AS(wrap_W(one, fixtures::full_support(2)), ArgumentError);
}

TEST_CASE("operator comparison with the spectral constant") {
  const std::vector<double> nu1{0.4, 0.3, 0.2, 0.1};
  const std::vector<double> nu2{0.1, 0.2, 0.3, 0.4};
  const double beta = 0.3, xi = 0.6;
  std::vector<double> mu(4);
  for (int a = 0; a < 4; ++a) mu[a] = beta * nu1[a] + (1 - beta) * nu2[a];
  const std::vector<long> comp{0, 0, 1, 1};
  const auto oc = op_comparison_constant(mu, nu1, nu2, beta, xi, comp);
  CHECK(oc.c > 0.0);
  check_stationary(oc.lhs_kernel, mu);
  const auto t1 = fiber_kernel(nu1, comp, 1.0 - xi);
  Rng rng(21, "opcmp");
  for (int rep = 0; rep < 10; ++rep) {
    const int n = 1 + rep % 3;
    const auto f = random_function(n, mu, rng);
    // left side by exact enumeration over (I, z)
    double lhs = 0.0;
    for (const auto& r : all_restrictions(n, 4)) {
      const double p = restriction_probability(r, n, beta, nu2);
      TensorFunction g = restrict_preserve(f, r);
      g.measure = nu1;
      lhs += p * inner_product(g, apply_all_axes(g, t1)).real();
    }
    CHECK(std::abs(lhs - inner_product(f, apply_all_axes(f, oc.lhs_kernel)).real()) < 1e-10);
    const double rhs =
        inner_product(f, apply_all_axes(f, fiber_kernel(mu, comp, 1.0 - oc.c * beta * xi))).real();
    CHECK(lhs <= rhs + 1e-9);
  }
}

TEST_CASE("low-degree weight bounds") {
  const auto k = standard_kernel(kMu3, 0.3);
  const auto spec = markov_spectrum(k, kMu3);
  Rng rng(17, "lowdeg");
  int hits = 0;
  for (int rep = 0; rep < 200; ++rep) {
    const int n = 1 + rep % 3;
    auto f = random_function(n, kMu3, rng, true);
    auto g = random_function(n, kMu3, rng, true);
    if (rep % 2) f = (1.0 / 3.0) * (f + cplx(2.0) * TensorFunction::constant(n, kMu3, 1.0));
    if (rep % 2) g = (1.0 / 3.0) * (g + cplx(2.0) * TensorFunction::constant(n, kMu3, 1.0));
    const double eps = std::abs(inner_product(f, apply_all_axes(g, k)));
    if (eps < 1e-3) continue;
    ++hits;
    const int d = noticeable_degree(spec.second(), eps);
    CHECK(weight_up_to(f, d) >= eps * eps / 4 - 1e-9);

    const double nf = norm2(f);
    const auto h = (1.0 / nf) * f;
    const double st = stability(h, 0.6);
    if (st > 0) CHECK(weight_up_to(h, stability_degree(0.4, st)) >= st / 2 - 1e-9);
  }
  CHECK(hits > 50);
}

TEST_CASE("restriction to correlation at n = 4") {
  Rng rng(23, "restcorr");
  for (int rep = 0; rep < 4; ++rep) {
    auto F = random_function(4, {0.6, 0.4}, rng, true);
    F = (1.0 / (1.0 + 0.5 * rep)) * (F + TensorFunction::constant(4, {0.6, 0.4}, 0.5 * rep));
    for (int d : {1, 2}) {
      const auto rc = rest_to_correlation(F, d);
      CHECK(rc.probability >= rc.bound - 1e-12);
    }
  }
}
