// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <set>
#include <sstream>

#include "abelia/abelian.hpp"
#include "abelia/cli.hpp"
#include "abelia/dp_test.hpp"
#include "abelia/errors.hpp"
#include "abelia/extremal.hpp"
#include "abelia/fourier.hpp"
#include "abelia/inverse_kit.hpp"
#include "abelia/numeric.hpp"
#include "abelia/path_trick.hpp"
#include "abelia/rng.hpp"

namespace abelia::cli {

using nlohmann::json;

bool Report::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& kv) { return kv.second; });
}

json Report::to_json() const {
  json j;
  j["command"] = command;
  j["inputs"] = inputs;
  j["results"] = results;
  j["checks"] = json::object();
  for (const auto& [k, v] : checks) j["checks"][k] = v;
  j["passed"] = passed();
  if (wall_clock_s) j["wall_clock_s"] = *wall_clock_s;
  return j;
}

// ------------------------------------------------------------------ inputs

namespace {

std::vector<double> parse_doubles(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw ParseError("bad number '" + item + "'");
    } catch (const std::logic_error&) {
      throw ParseError("bad number '" + item + "'");
    }
  }
  return out;
}

std::optional<std::vector<int>> parse_symbols(const std::string& text) {
  if (text.empty()) return std::nullopt;
  std::vector<int> out;
  for (double v : parse_doubles(text)) {
    if (v != std::floor(v) || v < 0) throw ParseError("symbol lists hold nonnegative integers");
    out.push_back(static_cast<int>(v));
  }
  std::sort(out.begin(), out.end());
  return out;
}

int parse_int_suffix(const std::string& name, std::size_t at) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(name.substr(at), &used);
    if (used + at != name.size()) throw ParseError("bad fixture '" + name + "'");
    return v;
  } catch (const std::logic_error&) {
    throw ParseError("bad fixture '" + name + "'");
  }
}

}  // namespace

TripleDistribution load_fixture(const std::string& name) {
  if (name == "cyclic3") return fixtures::cyclic_equation(3);
  if (name.rfind("cyclic:", 0) == 0) return fixtures::cyclic_equation(parse_int_suffix(name, 7));
  if (name.rfind("full:", 0) == 0) return fixtures::full_support(parse_int_suffix(name, 5));
  if (name == "three-point") return fixtures::three_point();
  if (name == "two-to-one") return fixtures::two_to_one(mpq_class(2, 3));
  if (name.rfind("two-to-one:", 0) == 0) return fixtures::two_to_one(parse_rational(name.substr(11)));
  if (name == "flat-two-to-one") return fixtures::two_to_one(mpq_class(1, 2));
  if (name == "partial-cyclic3") {
    // x restricted to {0, 1} on a + b + c = 0 mod 3
    std::vector<Atom> supp;
    for (int y = 0; y < 3; ++y)
      for (int x = 0; x < 2; ++x) supp.push_back({x, y, (6 - x - y) % 3});
    return TripleDistribution::uniform({Alphabet::range(2), Alphabet::range(3), Alphabet::range(3)},
                                       supp);
  }
  throw ArgumentError("unknown fixture '" + name + "'");
}

TripleDistribution load_distribution(const ExperimentConfig& cfg) {
  if (!cfg.dist_path.empty() && !cfg.fixture.empty())
    throw ArgumentError("give either a distribution file or a fixture, not both");
  if (!cfg.dist_path.empty()) {
    if (!std::filesystem::exists(cfg.dist_path))
      throw FileError("distribution file '" + cfg.dist_path + "' does not exist");
    return TripleDistribution::load(cfg.dist_path);
  }
  if (!cfg.fixture.empty()) return load_fixture(cfg.fixture);
  throw ArgumentError(cfg.command + " needs --dist or --fixture");
}

// -------------------------------------------------------------- subcommands

namespace {

int size_or(int n, int fallback) { return n > 0 ? n : fallback; }

json distribution_echo(const ExperimentConfig& cfg, const TripleDistribution& d) {
  json j;
  if (!cfg.dist_path.empty()) j["dist"] = cfg.dist_path;
  if (!cfg.fixture.empty()) j["fixture"] = cfg.fixture;
  j["alphabet_sizes"] = {d.alphabet(0).size(), d.alphabet(1).size(), d.alphabet(2).size()};
  j["support_size"] = d.support_size();
  j["seed"] = cfg.seed;
  return j;
}

json integer_basis_json(const IntegerEmbeddings& ie) {
  json out = json::array();
  for (const auto& v : ie.basis) {
    json triple = json::array();
    for (const auto& coord : v) {
      json vals = json::array();
      for (const auto& z : coord) vals.push_back(z.get_str());
      triple.push_back(vals);
    }
    out.push_back(triple);
  }
  return out;
}

Report analyze(const ExperimentConfig& cfg) {
  const auto d = load_distribution(cfg);
  Report r;
  r.inputs = distribution_echo(cfg, d);
  r.inputs["max_order"] = cfg.params.max_order;
  const auto conn = is_pairwise_connected(d);
  r.results["pairwise_connected"] = conn.connected;
  r.results["implies_third"] = {{"x", implies_third(d, 1, 2)},
                                {"y", implies_third(d, 0, 2)},
                                {"z", implies_third(d, 0, 1)}};
  const auto ie = solve_integer_embeddings(d);
  r.results["integer"] = {{"trivial_only", ie.trivial_only},
                          {"basis", integer_basis_json(ie)},
                          {"invariant_product", ie.invariant_product.get_str()}};
  const auto m = build_master_embedding(d, cfg.params.max_order);
  const auto sat = is_saturated(m);
  r.results["master"] = m.to_json(d);
  r.results["master_group"] = m.group.to_string();
  r.results["components"] = m.components.size();
  r.results["saturated"] = sat.overall;
  r.results["summary"] = static_cast<double>(m.group.order());
  bool valid = true;
  for (const auto& c : m.components) valid = valid && c.valid_on(d) && !c.is_trivial();
  r.checks["components_valid"] = valid;
  r.checks["bundled_valid"] = m.bundled().valid_on(d);
  return r;
}

Report saturate(const ExperimentConfig& cfg) {
  const auto d = load_distribution(cfg);
  Report r;
  r.inputs = distribution_echo(cfg, d);
  r.inputs["max_order"] = cfg.params.max_order;
  r.inputs["per_round_cap"] = cfg.params.per_round_cap;
  const auto m = build_master_embedding(d, cfg.params.max_order);
  SaturationOptions opt;
  opt.per_round_cap = cfg.params.per_round_cap;
  const auto res = saturate_master(d, m, opt);
  r.results["transcript"] = res.transcript.to_json(res.distribution);
  r.results["final_support_size"] = res.distribution.support_size();
  r.results["summary"] = static_cast<double>(res.transcript.steps.size());
  r.checks["common_subgroup"] = res.transcript.checks.common_subgroup;
  r.checks["full_equation_support"] = res.transcript.checks.full_equation_support;
  r.checks["full_tuple_power"] = res.transcript.checks.full_tuple_power;
  r.checks["replay_matches"] = replay(d, res.transcript.steps) == res.distribution;
  r.checks["final_embedding_valid"] = res.transcript.final_master.bundled().valid_on(res.distribution);
  return r;
}

Report path_bound(const ExperimentConfig& cfg) {
  const auto d = load_distribution(cfg);
  const int n = size_or(cfg.params.n, 2);
  const int t = cfg.params.t;
  Report r;
  r.inputs = distribution_echo(cfg, d);
  r.inputs["n"] = n;
  r.inputs["t"] = t;
  r.inputs["samples"] = cfg.params.samples;
  if (t < 1) throw ArgumentError("path-bound needs t >= 1");
  const auto walk = path_trick_walk(d, 0, (1 << t) - 1);
  const auto ind = path_trick_inductive(d, t);
  r.checks["walk_equals_inductive"] = walk.result == ind.result && walk.tuples == ind.tuples;
  bool lifts = true;
  const auto m = build_master_embedding(d, 6);
  for (const auto& c : m.components) lifts = lifts && lift_embedding(c, walk).valid_on(walk.result);
  r.checks["lift_valid"] = lifts;
  r.results["path_support_size"] = walk.result.support_size();
  double worst = -1e300;
  int violations = 0;
  for (int s = 0; s < cfg.params.samples; ++s) {
    Rng rng(cfg.seed, "path-bound", s);
    const auto f = random_function(n, d.marginal1_double(0), rng, true);
    const auto g = random_function(n, d.marginal1_double(1), rng, true);
    const auto h = random_function(n, d.marginal1_double(2), rng, true);
    const auto pc = path_correlation_bound(d, f, g, h, t);
    worst = std::max(worst, pc.lhs - pc.rhs);
    violations += pc.lhs > pc.rhs + tol::kSlack;
  }
  r.results["max_gap"] = cfg.params.samples > 0 ? worst : 0.0;
  r.results["violations"] = violations;
  r.results["summary"] = static_cast<double>(violations);
  r.checks["cauchy_schwarz_chain"] = violations == 0;
  return r;
}

// every index tuple of an m-letter basis on n coordinates
std::vector<std::vector<int>> index_tuples(int m, int n) {
  std::vector<std::vector<int>> out;
  const std::size_t total = ipow_size(m, n);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::vector<int> v(n);
    std::size_t rem = idx;
    for (int i = n - 1; i >= 0; --i) {
      v[i] = static_cast<int>(rem % m);
      rem /= m;
    }
    out.push_back(std::move(v));
  }
  return out;
}

Report fourier_check(const ExperimentConfig& cfg) {
  const auto d = load_distribution(cfg);
  const int n = size_or(cfg.params.n, 2);
  const auto modest = parse_symbols(cfg.params.modest);
  Report r;
  r.inputs = distribution_echo(cfg, d);
  r.inputs["n"] = n;
  r.inputs["samples"] = cfg.params.samples;
  r.inputs["rho"] = cfg.params.rho;
  r.inputs["modest"] = cfg.params.modest;
  const auto m = build_master_embedding(d, 6);
  const auto b = SplitBases::make(d, m, modest).basis[0];
  const auto& mu = b.measure;
  const int k = static_cast<int>(mu.size());

  double es_err = 0.0, basis_err = 0.0, infl_err = 0.0, mono_err = 0.0, std_err = 0.0;
  bool monotone = true;
  for (int s = 0; s < cfg.params.samples; ++s) {
    Rng rng(cfg.seed, "fourier-check", s);
    const auto f = random_function(n, mu, rng);
    const double nn = norm2(f) * norm2(f);
    double lw = 0.0;
    for (double w : level_weights(f)) lw += w;
    es_err = std::max(es_err, std::abs(lw - nn));
    const auto coef = to_coefficients(f, b.functions());
    double cw = 0.0;
    for (const auto& v : coef.values) cw += std::norm(v);
    basis_err = std::max(basis_err, std::abs(cw - nn));
    for (int j = 0; j < n; ++j) {
      infl_err = std::max(infl_err, std::abs(influence(f, b, j, InfluenceKind::NonEmbed) -
                                             influence_by_definition(f, b, j, InfluenceKind::NonEmbed)));
      if (modest)
        infl_err = std::max(infl_err, std::abs(influence(f, b, j, InfluenceKind::Modest) -
                                               influence_by_definition(f, b, j, InfluenceKind::Modest)));
    }
    double prev = -1e300;
    for (int step = 0; step <= 10; ++step) {
      const double v = nestab(f, b, step / 10.0);
      monotone = monotone && v >= prev - 1e-10;
      prev = v;
    }
  }
  const double rho = cfg.params.rho;
  const auto std_basis = standard_basis(mu);
  if (ipow_size(k, n) <= 4096) {
    for (const auto& idx : index_tuples(k, n)) {
      const auto mono = Monomial::make(b, idx);
      const auto u = mono.function(b);
      const auto ne = noise_apply(NoiseOperatorSpec::nonembed(b, rho), u);
      mono_err = std::max(mono_err, max_abs_diff(ne, std::pow(rho, mono.nedeg) * u));
      std::vector<std::vector<cplx>> factors;
      int deg = 0;
      for (int i : idx) {
        factors.push_back(std_basis[i]);
        deg += i != 0;
      }
      const auto v = tensor_product(factors, mu);
      const auto sv = noise_apply(NoiseOperatorSpec::standard(mu, rho), v);
      std_err = std::max(std_err, max_abs_diff(sv, std::pow(rho, deg) * v));
    }
  }
  r.results["parseval_efron_stein_error"] = es_err;
  r.results["parseval_basis_error"] = basis_err;
  r.results["influence_error"] = infl_err;
  r.results["nonembed_eigen_error"] = mono_err;
  r.results["standard_eigen_error"] = std_err;
  r.results["basis_counts"] = {{"embed", b.count(BasisTag::Embed)},
                               {"nonembed", b.count(BasisTag::NonEmbed)},
                               {"modest", b.count(BasisTag::Modest)}};
  r.results["summary"] = std::max({es_err, basis_err, infl_err});
  r.checks["parseval_efron_stein"] = es_err <= tol::kEqual;
  r.checks["parseval_basis"] = basis_err <= tol::kEqual;
  r.checks["influence_formula"] = infl_err <= tol::kEqual;
  r.checks["monomial_eigen"] = mono_err <= tol::kBounded && std_err <= tol::kBounded;
  r.checks["nestab_monotone"] = monotone;
  return r;
}

ExtremalOptions extremal_options(const ExperimentConfig& cfg) {
  ExtremalOptions opt;
  opt.restarts = cfg.params.restarts;
  opt.seed = cfg.seed;
  return opt;
}

Report extremal(const ExperimentConfig& cfg) {
  const auto d = load_distribution(cfg);
  const int n = size_or(cfg.params.n, 2);
  Report r;
  r.inputs = distribution_echo(cfg, d);
  r.inputs["kind"] = cfg.params.kind;
  r.inputs["n"] = n;
  r.inputs["d"] = cfg.params.d;
  r.inputs["d_prime"] = cfg.params.d_prime;
  r.inputs["restarts"] = cfg.params.restarts;
  r.inputs["modest"] = cfg.params.modest;
  const auto sb = SplitBases::make(d, build_master_embedding(d, 6), parse_symbols(cfg.params.modest));
  ExtremalReport rep;
  if (cfg.params.kind == "beta")
    rep = estimate_beta(d, sb, n, cfg.params.d, cfg.params.d_prime, extremal_options(cfg));
  else if (cfg.params.kind == "delta")
    rep = estimate_delta(d, sb, n, cfg.params.d_prime, extremal_options(cfg));
  else
    throw ArgumentError("extremal kind must be beta or delta");
  r.results = rep.to_json();
  r.results["summary"] = rep.value;
  r.checks["witness_recomputes"] = std::abs(rep.value - rep.recomputed) <= 1e-8;
  r.checks["witness_in_class"] = rep.class_check;
  r.checks["bounded_by_one"] = rep.value <= 1.0 + tol::kSlack;
  return r;
}

// x given (y,z), within its fiber, does not depend on (y,z)
bool fiber_uniform(const TripleDistribution& d, const SplitBasis& b) {
  const auto mu = d.marginal1(0);
  std::map<std::pair<int, int>, std::map<long, mpq_class>> fiber_mass;
  for (const auto& [a, p] : d.atoms()) fiber_mass[{a[1], a[2]}][b.fiber[a[0]]] += p;
  std::map<long, mpq_class> fiber_total;
  for (std::size_t x = 0; x < mu.size(); ++x) fiber_total[b.fiber[x]] += mu[x];
  for (const auto& [a, p] : d.atoms()) {
    const long s = b.fiber[a[0]];
    if (p / fiber_mass[{a[1], a[2]}][s] != mu[a[0]] / fiber_total[s]) return false;
  }
  return true;
}

Report base_case(const ExperimentConfig& cfg) {
  const auto d = load_distribution(cfg);
  const auto modest = parse_symbols(cfg.params.modest);
  Report r;
  r.inputs = distribution_echo(cfg, d);
  r.inputs["modest"] = cfg.params.modest;
  r.inputs["taus"] = cfg.params.taus;
  r.inputs["restarts"] = cfg.params.restarts;
  const auto m = build_master_embedding(d, 6);
  const auto sb = SplitBases::make(d, m, modest).basis[0];
  const auto add = additive_base_constant(d, sb);
  // recompute the value from the witnesses
  const auto mu = d.marginal1_double(0);
  double nf = 0.0, nw = 0.0;
  cplx corr = 0.0;
  for (const auto& [a, p] : d.atoms()) {
    const cplx w = add.g[a[1]] + add.h[a[2]];
    corr += p.get_d() * add.f[a[0]] * w;
    nw += p.get_d() * std::norm(w);
  }
  for (std::size_t x = 0; x < mu.size(); ++x) nf += mu[x] * std::norm(add.f[x]);
  const double recomputed = nf > 0 && nw > 0 ? std::abs(corr) / std::sqrt(nf * nw) : 0.0;
  const bool uniform = fiber_uniform(d, sb);
  r.results["additive"] = add.value;
  r.results["additive_recomputed"] = recomputed;
  r.results["fiber_uniform"] = uniform;
  r.results["summary"] = add.value;
  r.checks["additive_bounded"] = add.value <= 1.0 + tol::kSlack;
  r.checks["witness_recomputes"] = add.value < tol::kBounded || std::abs(recomputed - add.value) <= tol::kSlack;
  if (uniform) r.checks["fiber_uniform_zero"] = add.value < tol::kBounded;
  if (modest) {
    const auto prof = relaxed_base_profile(d, sb, parse_doubles(cfg.params.taus), extremal_options(cfg));
    json pts = json::array();
    bool bounded = true;
    for (const auto& p : prof) {
      pts.push_back({{"tau", p.tau}, {"value", p.value}, {"feasible", p.feasible}});
      bounded = bounded && (!p.feasible || p.value <= 1.0 + tol::kSlack);
    }
    r.results["relaxed"] = pts;
    r.results["max_modest_variance"] = max_modest_variance(sb.measure, *modest);
    r.checks["relaxed_bounded"] = bounded;
  }
  return r;
}

Report shortlist(const ExperimentConfig& cfg) {
  const auto d = load_distribution(cfg);
  const int n = size_or(cfg.params.n, 3);
  const double eps = cfg.params.eps, delta = cfg.params.delta;
  Report r;
  r.inputs = distribution_echo(cfg, d);
  r.inputs["n"] = n;
  r.inputs["eps"] = eps;
  r.inputs["delta"] = delta;
  r.inputs["members"] = cfg.params.members;
  const auto m = build_master_embedding(d, 6);
  const auto cls = ProductClass::from_sigma(m.bundled().map(0), d.marginal1_double(0));
  Rng rng(cfg.seed, "shortlist");
  TensorFunction f(n, cls.measure());
  for (int k = 0; k < cfg.params.members; ++k) {
    ProductFunction p{cls.name(), std::vector<int>(n)};
    for (auto& v : p.factors) v = static_cast<int>(rng.below(cls.size()));
    f = f + rng.complex_normal() * p.evaluate(cls);
  }
  if (norm2(f) > 0) f = (1.0 / norm2(f)) * f;
  const auto list = correlation_list(f, eps, cls);
  const auto sl = short_list(f, eps, delta, cls);
  bool covered = true;
  for (const auto& e : list) {
    bool hit = false;
    for (const auto& s : sl) hit = hit || std::abs(product_inner(cls, e.p, s.p)) >= delta;
    covered = covered && hit;
  }
  bool distance = true;
  for (const auto& a : list)
    for (const auto& b : list) distance = distance && correlation_bound_check(cls, a.p, b.p);
  json entries = json::array();
  for (const auto& s : sl) entries.push_back({{"factors", s.p.factors}, {"abs_inner", std::abs(s.inner)}});
  r.results["class_size"] = cls.size();
  r.results["tau"] = cls.tau();
  r.results["list_size"] = list.size();
  r.results["short_list_size"] = sl.size();
  r.results["short_list"] = entries;
  r.results["size_bound"] = 1.0 / (eps * eps - delta);
  r.results["summary"] = static_cast<double>(sl.size());
  r.checks["size_bound"] = static_cast<double>(sl.size()) < 1.0 / (eps * eps - delta);
  r.checks["coverage"] = covered;
  r.checks["distance_bound"] = distance;
  return r;
}

AgreementTestSpec dp_spec(const Params& p) {
  if (p.variant == "dp") return AgreementTestSpec::dp(p.rho, p.alpha, p.beta);
  if (p.variant == "uniform") return AgreementTestSpec::uniform(p.q, p.q_prime, p.threshold);
  if (p.variant == "modified") return AgreementTestSpec::modified(p.q, p.q_prime, p.c, p.threshold);
  if (p.variant == "subset") return AgreementTestSpec::subset(p.q, p.alpha, p.beta);
  throw ArgumentError("unknown variant '" + p.variant + "'");
}

Report dp_sim(const ExperimentConfig& cfg) {
  const int n = size_or(cfg.params.n, 50);
  const auto spec = dp_spec(cfg.params);
  spec.validate(n);
  const auto s = DPStrategy::parse(cfg.params.strategy, n, cfg.params.R, cfg.seed);
  Report r;
  r.inputs = {{"strategy", cfg.params.strategy}, {"spec", spec.to_json()}, {"n", n},
              {"R", cfg.params.R}, {"trials", cfg.params.trials}, {"seed", cfg.seed},
              {"workers", cfg.workers}};
  const auto res = run_agreement_test(s, spec, cfg.params.trials, cfg.seed, cfg.workers);
  r.results = {{"accepted", res.accepted}, {"trials", res.trials}, {"acceptance", res.estimate},
               {"ci_low", res.ci.low}, {"ci_high", res.ci.high}, {"summary", res.estimate}};
  if (s.law == StrategyLaw::Exact || s.law == StrategyLaw::Constant)
    r.checks["exact_accepts_all"] = res.accepted == res.trials;
  if (s.law == StrategyLaw::Random &&
      (spec.variant == Variant::DP || spec.variant == Variant::Subset)) {
    const double closed = random_strategy_acceptance(spec, n, cfg.params.R);
    const auto wide = clopper_pearson(res.accepted, res.trials, 0.999);
    r.results["closed_form"] = closed;
    r.checks["random_closed_form"] = wide.low <= closed && closed <= wide.high;
  }
  if (s.law == StrategyLaw::Mixture && spec.variant == Variant::DP) {
    const double floor = 0.5 * s.eps * s.eps * std::pow(1.0 - spec.beta, 2 * s.radius);
    r.results["floor"] = floor;
    r.checks["perturbation_floor"] = res.ci.high >= floor;
  }
  return r;
}

Report sse(const ExperimentConfig& cfg) {
  const int n = size_or(cfg.params.n, 6);
  const auto& p = cfg.params;
  const auto g = MultiSliceGraph::from_fractions(n, p.q, p.q_prime, p.c);
  Report r;
  r.inputs = {{"n", n}, {"q", p.q}, {"q_prime", p.q_prime}, {"c", p.c},
              {"measures", p.measures}, {"samples", p.samples}, {"trials", p.trials},
              {"seed", cfg.seed}};
  r.results["vertices"] = g.size();
  r.results["sizes"] = {g.a(), g.b(), g.overlap()};
  if (g.size() <= kDenseBudget) {
    const auto spec = multislice_spectrum(g);
    r.results["components"] = spec.components;
    r.results["lambda2"] = spec.lambda2;
    r.checks["stationary_uniform"] = spec.max_row_error <= tol::kEqual && spec.symmetry_error <= tol::kEqual;
    if (spec.components == 1) r.checks["spectral_gap"] = spec.lambda2 < 1.0 - tol::kEqual;
    r.results["summary"] = spec.lambda2;
  }
  auto measures = parse_doubles(p.measures);
  std::sort(measures.begin(), measures.end());
  json rows = json::array();
  std::vector<double> avg;
  for (std::size_t i = 0; i < measures.size(); ++i) {
    double exact = 0.0, probed = 0.0;
    for (int s = 0; s < p.samples; ++s) {
      const auto seed = substream(cfg.seed, "sse", i * 1000003 + s);
      const auto set = random_vertex_set(g, measures[i], seed);
      exact += exact_expansion(g, set);
      probed += expansion_probe(g, {set}, p.trials / std::max(1, p.samples) + 1, seed).min;
    }
    const double k = std::max(1, p.samples);
    avg.push_back(exact / k);
    rows.push_back({{"measure", measures[i]}, {"exact", exact / k}, {"probed", probed / k}});
  }
  r.results["expansion"] = rows;
  bool mono = true;
  for (std::size_t i = 1; i < avg.size(); ++i) mono = mono && avg[i - 1] >= avg[i];
  r.checks["expansion_monotone"] = mono;
  if (!r.results.contains("summary")) r.results["summary"] = avg.empty() ? 0.0 : avg.front();
  return r;
}

}  // namespace

Report run(const ExperimentConfig& cfg) {
  Report r;
  const auto& c = cfg.command;
  if (c == "analyze") r = analyze(cfg);
  else if (c == "saturate") r = saturate(cfg);
  else if (c == "path-bound") r = path_bound(cfg);
  else if (c == "fourier-check") r = fourier_check(cfg);
  else if (c == "extremal") r = extremal(cfg);
  else if (c == "base-case") r = base_case(cfg);
  else if (c == "shortlist") r = shortlist(cfg);
  else if (c == "dp-sim") r = dp_sim(cfg);
  else if (c == "sse") r = sse(cfg);
  else throw ArgumentError("unknown subcommand '" + c + "'");
  r.command = c;
  return r;
}

// -------------------------------------------------------------------- suite

std::vector<Report> run_suite(const ExperimentConfig& cfg) {
  struct Item {
    std::string name;
    ExperimentConfig cfg;
  };
  std::vector<Item> items;
  const auto add = [&](std::string name, std::string command, std::string fixture, auto tweak) {
    ExperimentConfig c;
    c.command = std::move(command);
    c.fixture = std::move(fixture);
    c.seed = cfg.seed;
    c.workers = cfg.workers;
    c.quick = cfg.quick;
    tweak(c.params);
    items.push_back({std::move(name), std::move(c)});
  };
  const auto none = [](Params&) {};
  const std::uint64_t trials = cfg.quick ? 2000 : 100000;
  const int samples = cfg.quick ? 5 : 20;

  add("analyze-cyclic3", "analyze", "cyclic3", none);
  add("analyze-three-point", "analyze", "three-point", none);
  add("analyze-two-to-one", "analyze", "two-to-one", none);
  add("saturate-partial-cyclic3", "saturate", "partial-cyclic3", none);
  add("saturate-two-to-one", "saturate", "two-to-one", none);
  for (int t = 1; t <= 2; ++t) {
    add("path-bound-cyclic3-t" + std::to_string(t), "path-bound", "cyclic3", [&](Params& p) {
      p.t = t;
      p.samples = samples;
    });
    add("path-bound-three-point-t" + std::to_string(t), "path-bound", "three-point", [&](Params& p) {
      p.t = t;
      p.samples = samples;
    });
  }
  add("fourier-two-to-one", "fourier-check", "two-to-one", [&](Params& p) {
    p.samples = samples;
    p.modest = "0,2";
  });
  add("fourier-cyclic3", "fourier-check", "cyclic3", [&](Params& p) { p.samples = samples; });
  add("extremal-beta", "extremal", "two-to-one", [&](Params& p) {
    p.d = 2;
    p.restarts = cfg.quick ? 4 : 16;
  });
  add("extremal-delta", "extremal", "two-to-one", [&](Params& p) {
    p.kind = "delta";
    p.d_prime = 1;
    p.modest = "0,2";
    p.restarts = cfg.quick ? 4 : 16;
  });
  add("base-case-skew", "base-case", "two-to-one", [&](Params& p) {
    p.modest = "0,2";
    p.restarts = cfg.quick ? 4 : 16;
  });
  add("base-case-flat", "base-case", "flat-two-to-one", none);
  add("shortlist-cyclic3", "shortlist", "cyclic3", none);
  add("shortlist-two-to-one", "shortlist", "two-to-one", [&](Params& p) { p.n = 4; });
  for (const char* v : {"dp", "uniform", "modified", "subset"})
    add(std::string("dp-exact-") + v, "dp-sim", "", [&](Params& p) {
      p.variant = v;
      p.n = 40;
      p.threshold = 1;
      p.trials = trials;
    });
  add("dp-random", "dp-sim", "", [&](Params& p) {
    p.strategy = "random";
    p.n = 20;
    p.rho = 0.3;
    p.trials = trials;
  });
  add("dp-mixture", "dp-sim", "", [&](Params& p) {
    p.strategy = "mixture:0.3,3";
    p.n = 200;
    p.rho = 0.5;
    p.trials = trials;
  });
  add("sse-multislice", "sse", "", [&](Params& p) {
    p.samples = samples;
    p.trials = cfg.quick ? 2000 : 20000;
  });

  std::vector<Report> out;
  for (const auto& it : items) {
    Report row;
    row.command = "suite";
    row.inputs = {{"item", it.name}, {"command", it.cfg.command}, {"fixture", it.cfg.fixture}};
    const auto t0 = std::chrono::steady_clock::now();
    std::string error;
    Report sub;
    try {
      sub = run(it.cfg);
    } catch (const Error& e) {
      error = std::string(e.kind()) + ": " + e.what();
    }
    const auto t1 = std::chrono::steady_clock::now();
    row.results["checks"] = sub.checks.size();
    std::size_t failed = 0;
    std::string failed_names;
    for (const auto& [k, v] : sub.checks)
      if (!v) {
        ++failed;
        failed_names += (failed_names.empty() ? "" : ";") + k;
      }
    row.results["failed"] = failed;
    row.results["failed_checks"] = failed_names;
    row.results["error"] = error;
    row.results["value"] = sub.results.contains("summary") ? sub.results["summary"] : json(0.0);
    row.checks["item"] = error.empty() && failed == 0 && !sub.checks.empty();
    if (cfg.timing) row.wall_clock_s = std::chrono::duration<double>(t1 - t0).count();
    out.push_back(std::move(row));
  }
  return out;
}

// ---------------------------------------------------------------------- CSV

namespace {

void flatten(const json& j, const std::string& prefix, std::map<std::string, std::string>& out) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it)
      flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "." + std::to_string(i), out);
  } else if (j.is_number_float()) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", j.get<double>());
    out[prefix] = buf;
  } else if (j.is_string()) {
    out[prefix] = j.get<std::string>();
  } else if (j.is_null()) {
    out[prefix] = "";
  } else {
    out[prefix] = j.dump();
  }
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"') q += '"';
    q += ch;
  }
  return q + "\"";
}

}  // namespace

std::string emit_csv(const std::vector<Report>& reports) {
  for (const auto& r : reports)
    if (r.command != reports.front().command)
      throw ArgumentError("emit_csv needs reports of one kind");
  std::vector<std::map<std::string, std::string>> rows;
  std::set<std::string> keys;
  for (const auto& r : reports) {
    std::map<std::string, std::string> row;
    flatten(r.inputs, "inputs", row);
    flatten(r.results, "results", row);
    for (const auto& [k, v] : r.checks) row["checks." + k] = v ? "true" : "false";
    if (r.wall_clock_s) flatten(json(*r.wall_clock_s), "wall_clock_s", row);
    for (const auto& [k, v] : row) keys.insert(k);
    rows.push_back(std::move(row));
  }
  std::vector<std::string> columns{"command"};
  columns.insert(columns.end(), keys.begin(), keys.end());
  columns.push_back("passed");
  std::string out;
  for (std::size_t i = 0; i < columns.size(); ++i) out += (i ? "," : "") + csv_field(columns[i]);
  out += "\n";
  for (std::size_t r = 0; r < reports.size(); ++r) {
    out += csv_field(reports[r].command);
    for (const auto& k : keys) {
      const auto it = rows[r].find(k);
      out += "," + (it == rows[r].end() ? std::string() : csv_field(it->second));
    }
    out += std::string(",") + (reports[r].passed() ? "true" : "false") + "\n";
  }
  return out;
}

}  // namespace abelia::cli
