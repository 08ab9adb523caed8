// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <exception>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "abelia/dist_core.hpp"
#include "json.hpp"

namespace abelia::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitInvariant = 1,
  kExitArgument = 2,
  kExitFile = 3,
  kExitResource = 4,
  kExitOther = 5,
};

// Per-subcommand numeric parameters. Each subcommand reads the fields it needs.
struct Params {
  // analyze / saturate
  int max_order = 12;
  int per_round_cap = 15;
  // shared sizes
  int n = 0;  // 0 picks the subcommand default
  int t = 1;
  int samples = 20;
  double rho = 0.5;
  // extremal
  std::string kind = "beta";
  int d = 1;
  int d_prime = 0;
  int restarts = 16;
  std::string modest;  // comma separated x symbols
  // base-case
  std::string taus = "0,0.05,0.1,0.2";
  // shortlist
  double eps = 0.3;
  double delta = 0.05;
  int members = 5;
  // dp-sim
  std::string strategy = "exact";
  std::string variant = "dp";
  int R = 2;
  double alpha = 0.5, beta = 0.5, q = 0.5, q_prime = 0.25, c = 0.5;
  int threshold = 0;
  std::uint64_t trials = 10000;
  // sse
  std::string measures = "0.05,0.1,0.2,0.4";
};

struct ExperimentConfig {
  std::string command;
  std::string dist_path;
  std::string fixture;
  std::uint64_t seed = 0;
  int workers = 1;
  bool quick = false;
  bool timing = false;  // wall clock is not deterministic, so it is opt-in
  Params params;
};

struct Report {
  std::string command;
  nlohmann::json inputs = nlohmann::json::object();
  nlohmann::json results = nlohmann::json::object();
  std::map<std::string, bool> checks;
  std::optional<double> wall_clock_s;

  bool passed() const;
  nlohmann::json to_json() const;
};

// Named fixtures: cyclic3, cyclic:<q>, full:<k>, three-point, two-to-one,
// two-to-one:<p/q>, flat-two-to-one, partial-cyclic3.
TripleDistribution load_fixture(const std::string& name);
TripleDistribution load_distribution(const ExperimentConfig& cfg);

// Dispatch one subcommand other than suite.
Report run(const ExperimentConfig& cfg);
// The seeded battery; one report of kind "suite" per item.
std::vector<Report> run_suite(const ExperimentConfig& cfg);

// Header plus one row per report. Throws ArgumentError on mixed kinds.
std::string emit_csv(const std::vector<Report>& reports);

int exit_code_for(const std::exception& e);

// Entry point of the command line tool.
int main_entry(int argc, char** argv);

}  // namespace abelia::cli
