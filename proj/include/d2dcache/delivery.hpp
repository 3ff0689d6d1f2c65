#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "d2dcache/hierarchy.hpp"
#include "d2dcache/placement.hpp"
#include "d2dcache/popularity.hpp"

namespace d2dcache {

/// Level holding the file of 1-based rank l under x.
int file_level(std::int64_t rank, const PlacementVector& x);

struct SimConfig {
  NetworkGrid grid;
  PlacementVector placement;
  PopularityModel pop;
  std::uint64_t num_requests = 100000;
  std::uint64_t seed = 1;
  /// Keep a per-edge traversal count for every level (memory ~ 4n/3).
  bool edge_histograms = false;
};

/// Flow-level loads, one entry per level m = 1..M (index m-1).
///
/// A level-m edge joins a level-(m-1) cluster to its parent; a request
/// served from level k crosses one edge on every level 1..k.
/// `empirical_fraction[m-1]` is the share of requests that cross a level-m
/// edge and `empirical_load[m-1]` rescales it to the mean load of a single
/// level-m edge per unit of per-node request rate (multiply by 4^{m-1}).
struct EdgeLoadReport {
  std::uint64_t num_requests = 0;
  int active_levels = 0;
  double local_hit_fraction = 0.0;
  std::vector<double> source_fraction;  // share served from exactly level m
  std::vector<std::uint64_t> traversals;
  std::vector<double> empirical_fraction;
  std::vector<double> empirical_load;
  std::vector<double> analytic_fraction;
  std::vector<double> analytic_load;
  /// edge_counts[m-1][j] for the edge above level-(m-1) cluster j.
  std::vector<std::vector<std::uint64_t>> edge_counts;
};

/// Single-threaded reference.
EdgeLoadReport simulate_serial(const SimConfig& cfg);
/// OpenMP version; request i always uses the same random stream, so the
/// report is identical to simulate_serial for any thread count.
EdgeLoadReport simulate(const SimConfig& cfg);

/// sum_{l > P_m} p_l for m = 1..M, summed straight from the pmf rather than
/// the model's tail table.
std::vector<double> analytic_edge_fraction(const PlacementVector& x,
                                           const PopularityModel& pop);

struct LevelCheck {
  int level;
  double demand;    // analytic_fraction * R
  double capacity;  // C̄_m / M_b
  bool ok;
};

/// One entry per active level; ok iff demand <= capacity (1e-9 relative).
std::vector<LevelCheck> capacity_check(const EdgeLoadReport& report,
                                       const LevelCapacities& caps, double rate);

/// level,empirical_load,analytic_load,relative_error
std::string edge_report_csv(const EdgeLoadReport& report);

}  // namespace d2dcache
