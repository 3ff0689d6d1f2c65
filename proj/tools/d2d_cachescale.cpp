// Command-line front end: place | sweep | scaling | oracle | simulate.
//
// Exit codes: 0 ok, 1 infeasible instance, 2 invariant violation,
// 3 bad arguments.

#include <bit>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "d2dcache/error.hpp"
#include "d2dcache/experiment.hpp"

namespace {

using d2dcache::ErrorKind;

constexpr int kExitOk = 0;
constexpr int kExitInfeasible = 1;
constexpr int kExitInvariant = 2;
constexpr int kExitBadArgs = 3;

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInfeasible:
      return kExitInfeasible;
    case ErrorKind::kInvariantViolation:
    case ErrorKind::kBracket:
      return kExitInvariant;
    case ErrorKind::kInvalidParameter:
    case ErrorKind::kDomain:
    case ErrorKind::kSizeGuard:
      return kExitBadArgs;
  }
  return kExitInvariant;
}

}  // namespace

int main(int argc, char** argv) {
  d2dcache::ExperimentConfig cfg;
  CLI::App app{"Cache placement, throughput bounds and scaling laws for D2D caching "
               "networks with hierarchical cooperation."};
  app.set_version_flag("--version", std::string(d2dcache::kToolVersion));
  app.set_config("--config", "", "Flat key=value file; command-line flags take precedence");
  app.require_subcommand(1);

  std::uint64_t nodes = 0;
  std::int64_t file_count = 0;
  double cache_size = 0.0;
  std::string range_text;
  std::string format = "csv";
  std::string out_path;

  auto* m_opt = app.add_option("--M", cfg.levels, "Quad-tree depth, n = 4^M")
                    ->check(CLI::Range(1, 31));
  app.add_option("--n", nodes, "Node count (a power of 4)")->excludes(m_opt);
  app.add_option("--kappa", cfg.kappa, "Area exponent, A(n) = n^kappa")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--alpha", cfg.alpha, "Path loss exponent (> 2)");
  app.add_option("--beta1", cfg.beta1, "Library order, L = floor(a1 n^beta1)");
  app.add_option("--beta2", cfg.beta2, "Cache order, L_C = a2 n^beta2");
  app.add_option("--a1", cfg.a1, "Library prefactor");
  app.add_option("--a2", cfg.a2, "Cache prefactor");
  app.add_option("--tau", cfg.tau, "Zipf skewness")->check(CLI::NonNegativeNumber);
  app.add_option("--l", file_count, "Explicit library size (overrides beta1)")
      ->check(CLI::PositiveNumber);
  app.add_option("--lc", cache_size, "Explicit cache size (overrides beta2)")
      ->check(CLI::PositiveNumber);
  app.add_option("--bandwidth-hz", cfg.bandwidth_hz, "Multiply rates by this bandwidth")
      ->check(CLI::PositiveNumber);
  app.add_option("--rc-fraction", cfg.rc_fraction, "Scale on the h-coop link rate bound");
  app.add_option("--seed", cfg.seed, "Simulator seed");
  app.add_option("--requests", cfg.requests, "Simulated request count")
      ->check(CLI::PositiveNumber);
  app.add_option("--axis", cfg.axis, "Sweep axis")
      ->check(CLI::IsMember({"beta2", "tau", "alpha"}));
  app.add_option("--range", range_text, "Sweep range lo:hi:step");
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--out", out_path, "Write output to this file instead of stdout");

  std::string command;
  for (const char* name : {"place", "sweep", "scaling", "oracle", "simulate"}) {
    app.add_subcommand(name)->fallthrough()->callback([&command, name] { command = name; });
  }
  app.get_subcommand("place")->description("Run the placement optimizer on one instance");
  app.get_subcommand("sweep")->description("Throughput versus beta2, tau or alpha");
  app.get_subcommand("scaling")->description("Scaling exponents and bound curves versus tau");
  app.get_subcommand("oracle")->description("Compare the optimizer with exact solvers");
  app.get_subcommand("simulate")->description("Flow-level delivery simulation");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitBadArgs;
  }

  try {
    if (app.count("--n") > 0) {
      const bool pow4 = std::has_single_bit(nodes) && std::countr_zero(nodes) % 2 == 0 &&
                        nodes >= 4;
      d2dcache::require(pow4, ErrorKind::kInvalidParameter, "--n must be a power of 4 >= 4");
      cfg.levels = std::countr_zero(nodes) / 2;
    }
    if (app.count("--l") > 0) cfg.file_count_override = file_count;
    if (app.count("--lc") > 0) cfg.cache_size_override = cache_size;
    if (!range_text.empty()) cfg.range = d2dcache::parse_range(range_text);
    cfg.format = format == "json" ? d2dcache::OutputFormat::kJson
                                  : d2dcache::OutputFormat::kCsv;

    std::string text;
    if (command == "place") {
      text = d2dcache::run_place(cfg);
    } else if (command == "sweep") {
      text = d2dcache::run_sweep(cfg);
    } else if (command == "scaling") {
      text = d2dcache::run_scaling(cfg);
    } else if (command == "oracle") {
      text = d2dcache::run_oracle(cfg);
    } else {
      text = d2dcache::run_simulate(cfg);
    }

    if (out_path.empty()) {
      std::cout << text;
    } else {
      std::ofstream f(out_path, std::ios::binary);
      d2dcache::require(static_cast<bool>(f), ErrorKind::kInvalidParameter,
                        "cannot open --out path " + out_path);
      f << text;
    }
    return kExitOk;
  } catch (const d2dcache::Error& e) {
    std::cerr << "error (" << d2dcache::to_string(e.kind()) << "): " << e.what() << "\n";
    return exit_code(e.kind());
  }
}
