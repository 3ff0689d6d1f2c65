#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "d2dcache/hierarchy.hpp"
#include "d2dcache/phy.hpp"
#include "d2dcache/placement.hpp"
#include "d2dcache/popularity.hpp"

namespace d2dcache {

inline constexpr const char* kToolName = "d2d-cachescale";
inline constexpr const char* kToolVersion = "0.1.0";

enum class OutputFormat { kCsv, kJson };

struct SweepRange {
  double lo = 0.0;
  double hi = 0.0;
  double step = 1.0;

  /// lo + i*step for i = 0.. while <= hi (1e-9 step slack), no accumulation.
  std::vector<double> points() const;
};

/// Parses "lo:hi:step". Throws kInvalidParameter on malformed input.
SweepRange parse_range(const std::string& text);

struct ExperimentConfig {
  int levels = 9;  // n = 4^M
  double kappa = 0.0;
  double alpha = 4.0;
  double beta1 = 0.9;
  double beta2 = 0.3;
  double a1 = 1.0;
  double a2 = 1.0;
  double tau = 1.0;
  std::optional<std::int64_t> file_count_override;  // --l
  std::optional<double> cache_size_override;        // --lc
  double bandwidth_hz = 1.0;
  double rc_fraction = 1.0;
  std::uint64_t seed = 1;
  std::uint64_t requests = 100000;
  std::string axis = "beta2";
  std::optional<SweepRange> range;
  OutputFormat format = OutputFormat::kCsv;

  /// floor(a1 n^beta1) unless overridden.
  std::int64_t file_count() const;
  /// a2 n^beta2 unless overridden.
  double cache_size() const;
};

/// Everything a single operating point needs.
struct Instance {
  NetworkGrid grid;
  PhyParams params;
  PopularityModel pop;
  double cache_size;
};

/// Validates L >= 1 and L/n <= L_C < L (kInfeasible below, kInvalidParameter
/// at or above L).
Instance make_instance(const ExperimentConfig& cfg);

/// Relax, round and rebalance on capacities built with `policy`.
PlacementOutcome place_instance(const Instance& inst,
                                ModePolicy policy = ModePolicy::kBest);

/// The commands return their full output so callers can compare bytes.
std::string run_place(const ExperimentConfig& cfg);
std::string run_sweep(const ExperimentConfig& cfg);
std::string run_scaling(const ExperimentConfig& cfg);
std::string run_oracle(const ExperimentConfig& cfg);
std::string run_simulate(const ExperimentConfig& cfg);

/// Shortest round-trip decimal form.
std::string format_double(double v);

}  // namespace d2dcache
