// SPDX-License-Identifier: Apache-2.0
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "abelia/cli.hpp"
#include "abelia/errors.hpp"

namespace abelia::cli {

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const CLI::FileError*>(&e)) return kExitFile;
  if (dynamic_cast<const CLI::Error*>(&e)) return kExitArgument;
  if (const auto* ae = dynamic_cast<const Error*>(&e)) {
    const std::string kind = ae->kind();
    if (kind == "argument" || kind == "parse") return kExitArgument;
    if (kind == "file") return kExitFile;
    if (kind == "resource") return kExitResource;
  }
  return kExitOther;
}

namespace {

// comma separated lists; config files deliver them already split
CLI::Option* add_list(CLI::App* s, const std::string& name, std::string& target,
                      const std::string& help = "") {
  return s->add_option(name, target, help)
      ->delimiter(',')
      ->multi_option_policy(CLI::MultiOptionPolicy::Join);
}

void add_n(CLI::App* s, Params& p) { s->add_option("-n,--arity", p.n, "number of coordinates"); }

void add_dp_options(CLI::App* s, Params& p) {
  add_n(s, p);
  add_list(s, "--strategy", p.strategy, "exact|random|perturbed:r|mixture:eps,r|constant:s");
  s->add_option("--variant", p.variant, "dp|uniform|modified|subset");
  s->add_option("--alphabet", p.R, "strategy alphabet size");
  s->add_option("--rho", p.rho);
  s->add_option("--alpha", p.alpha);
  s->add_option("--beta", p.beta);
  s->add_option("--q", p.q);
  s->add_option("--q-prime", p.q_prime);
  s->add_option("--c", p.c);
  s->add_option("--threshold", p.threshold);
  s->add_option("--trials", p.trials);
}

bool seed_on_command_line(int argc, char** argv) {
  for (int i = 1; i < argc; ++i)
    if (std::strcmp(argv[i], "--seed") == 0 || std::strncmp(argv[i], "--seed=", 7) == 0) return true;
  return false;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FileError("cannot write '" + path + "'");
  out << text;
  if (!out) throw FileError("cannot write '" + path + "'");
}

}  // namespace

int main_entry(int argc, char** argv) {
  CLI::App app{"Experiments on embeddings, three-wise correlations and agreement tests."};
  app.fallthrough();
  app.require_subcommand(1);
  app.set_config("--config", "", "key = value file with one section per subcommand");

  ExperimentConfig cfg;
  std::string out_path, csv_path;
  app.add_option("--seed", cfg.seed, "64-bit seed; ABELIA_SEED overrides config files");
  app.add_option("--workers", cfg.workers, "worker threads for Monte-Carlo runs")
      ->check(CLI::PositiveNumber);
  app.add_option("--dist", cfg.dist_path, "distribution JSON file");
  app.add_option("--fixture", cfg.fixture, "named fixture instead of a file");
  app.add_option("--out", out_path, "write the JSON report here instead of stdout");
  app.add_option("--csv", csv_path, "also write a CSV row per report");
  app.add_flag("--timing", cfg.timing, "record wall-clock time");

  // each subcommand owns its parameters so config sections do not collide
  std::map<std::string, Params> params;
  const auto sub = [&](const std::string& name, const std::string& help) {
    return std::pair<CLI::App*, Params&>(app.add_subcommand(name, help), params[name]);
  };
  {
    auto [s, p] = sub("analyze", "connectivity, embeddings and the master embedding");
    s->add_option("--max-order", p.max_order);
  }
  {
    auto [s, p] = sub("saturate", "path-trick saturation of the master embedding");
    s->add_option("--max-order", p.max_order);
    s->add_option("--per-round-cap", p.per_round_cap);
  }
  {
    auto [s, p] = sub("path-bound", "path trick identities and the correlation chain");
    add_n(s, p);
    s->add_option("-t,--levels", p.t, "path length is 2^t - 1");
    s->add_option("--samples", p.samples);
  }
  {
    auto [s, p] = sub("fourier-check", "Parseval, noise eigenvalues, influences");
    add_n(s, p);
    s->add_option("--samples", p.samples);
    s->add_option("--rho", p.rho);
    add_list(s, "--modest", p.modest, "comma separated modest x symbols");
  }
  {
    auto [s, p] = sub("extremal", "beta and delta by alternating maximization");
    add_n(s, p);
    s->add_option("--kind", p.kind, "beta|delta");
    s->add_option("--d", p.d);
    s->add_option("--d-prime", p.d_prime);
    s->add_option("--restarts", p.restarts);
    add_list(s, "--modest", p.modest);
  }
  {
    auto [s, p] = sub("base-case", "additive and relaxed base constants");
    add_list(s, "--modest", p.modest);
    add_list(s, "--taus", p.taus, "comma separated variance levels");
    s->add_option("--restarts", p.restarts);
  }
  {
    auto [s, p] = sub("shortlist", "correlation list and short list");
    add_n(s, p);
    s->add_option("--eps", p.eps);
    s->add_option("--delta", p.delta);
    s->add_option("--members", p.members);
  }
  {
    auto [s, p] = sub("dp-sim", "agreement test simulation");
    add_dp_options(s, p);
  }
  {
    auto [s, p] = sub("sse", "multi-slice spectrum and expansion probes");
    add_n(s, p);
    s->add_option("--q", p.q);
    s->add_option("--q-prime", p.q_prime);
    s->add_option("--c", p.c);
    add_list(s, "--measures", p.measures);
    s->add_option("--samples", p.samples);
    s->add_option("--trials", p.trials);
  }
  auto* suite = app.add_subcommand("suite", "seeded acceptance battery");
  suite->add_flag("--quick", cfg.quick, "smaller trial counts");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_code_for(e);
  }

  try {
    if (const char* env = std::getenv("ABELIA_SEED"); env && !seed_on_command_line(argc, argv)) {
      try {
        std::size_t used = 0;
        cfg.seed = std::stoull(env, &used);
        if (env[used] != '\0') throw ParseError("");
      } catch (const std::exception&) {
        throw ParseError(std::string("ABELIA_SEED is not an unsigned integer: '") + env + "'");
      }
    }
    cfg.command = app.get_subcommands().front()->get_name();
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<Report> reports;
    nlohmann::json doc;
    bool passed = true;
    if (cfg.command == "suite") {
      reports = run_suite(cfg);
      doc["command"] = "suite";
      doc["seed"] = cfg.seed;
      doc["workers"] = cfg.workers;
      doc["quick"] = cfg.quick;
      doc["reports"] = nlohmann::json::array();
      for (const auto& r : reports) {
        doc["reports"].push_back(r.to_json());
        passed = passed && r.passed();
      }
      doc["passed"] = passed;
    } else {
      cfg.params = params[cfg.command];
      reports.push_back(run(cfg));
      passed = reports.front().passed();
    }
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (cfg.command == "suite") {
      if (cfg.timing) doc["wall_clock_s"] = elapsed;
    } else {
      if (cfg.timing) reports.front().wall_clock_s = elapsed;
      doc = reports.front().to_json();
    }
    const std::string text = doc.dump(2) + "\n";
    if (out_path.empty())
      std::cout << text;
    else
      write_text(out_path, text);
    if (!csv_path.empty()) write_text(csv_path, emit_csv(reports));
    if (!passed) {
      std::cerr << "invariant check failed\n";
      return kExitInvariant;
    }
    return kExitOk;
  } catch (const Error& e) {
    std::cerr << e.kind() << " error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
}

}  // namespace abelia::cli
