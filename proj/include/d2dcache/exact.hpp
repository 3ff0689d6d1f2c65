#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "d2dcache/hierarchy.hpp"
#include "d2dcache/placement.hpp"
#include "d2dcache/popularity.hpp"

namespace d2dcache {

/// Threshold encoding of a placement: file l is absent from levels below m
/// (delta_{m,l} = 1) iff l > theta_m. theta has M+2 entries with theta_0 = 0,
/// theta_{M+1} = L and x_m = theta_{m+1} - theta_m.
struct ThresholdForm {
  std::vector<std::int64_t> theta;

  int levels() const { return static_cast<int>(theta.size()) - 2; }
  std::int64_t file_count() const { return theta.back(); }
  /// delta_{m,l} for m in 0..M+1 and 1-based rank l.
  bool delta(int m, std::int64_t l) const {
    return l > theta[static_cast<std::size_t>(m)];
  }
};

ThresholdForm to_threshold(const PlacementVector& x);
/// Throws kInvariantViolation unless theta is non-decreasing from 0.
PlacementVector from_threshold(const ThresholdForm& t);

/// sum_l delta_{m,l} p_l, the traffic share crossing level m.
double threshold_row_mass(const ThresholdForm& t, const PopularityModel& pop, int m);
/// sum_m 4^{-m} sum_l (delta_{m,l} - delta_{m+1,l}), the per-node cache use.
double threshold_cache_mass(const ThresholdForm& t);

/// Cheapest placement with top level exactly M_b that sustains rate R, or
/// none. Each active level needs its own minimal threshold; taking the
/// running maximum of those is the componentwise-least monotone theta, and
/// cache use is increasing in every theta_m, so no other placement with
/// the same M_b can fit when this one does not.
std::optional<PlacementVector> feasible_for_rate(double rate, int active_levels,
                                                 const LevelCapacities& caps,
                                                 const PopularityModel& pop,
                                                 double cache_size);

struct ExactSolution {
  PlacementVector x;
  ThroughputReport report;
  double rate() const { return report.rate; }
};

/// Optimal integer placement. For each M_b the achievable rates form the
/// finite set {level_ratio(m, M_b, k)}, so the search bisects over that
/// sorted set instead of a real interval and the answer is exact.
ExactSolution solve_exact(const LevelCapacities& caps, const PopularityModel& pop,
                          double cache_size);

/// C(L + M, M), saturating at UINT64_MAX.
std::uint64_t composition_count(std::int64_t file_count, int levels);

/// Upper limit on composition_count() accepted by the enumerators.
inline constexpr std::uint64_t kBruteForceLimit = 10'000'000;

/// Exhaustive search over every composition of L into M+1 parts. Ties keep
/// the lexicographically smallest x. Throws kSizeGuard above the limit.
ExactSolution brute_force_serial(const LevelCapacities& caps,
                                 const PopularityModel& pop, double cache_size);
/// Same result, with the first coordinate split across OpenMP threads.
ExactSolution brute_force(const LevelCapacities& caps, const PopularityModel& pop,
                          double cache_size);

}  // namespace d2dcache
