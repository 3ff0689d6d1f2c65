#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "d2dcache/hierarchy.hpp"
#include "d2dcache/popularity.hpp"

namespace d2dcache {

/// Relative slack allowed on cache-size comparisons between reals.
inline constexpr double kCacheSlack = 1e-12;

/// x_m = number of files cached at level m (m = 0..M); files are assigned to
/// levels in popularity order, lowest levels first.
class PlacementVector {
 public:
  PlacementVector() = default;
  explicit PlacementVector(std::vector<std::int64_t> counts);

  /// M, i.e. size() - 1.
  int levels() const { return static_cast<int>(x_.size()) - 1; }
  std::int64_t operator[](int m) const { return x_[static_cast<std::size_t>(m)]; }
  std::span<const std::int64_t> counts() const { return x_; }

  std::int64_t total() const;
  /// P_m = sum_{i<m} x_i.
  std::int64_t prefix(int m) const;
  /// Per-node cache usage sum_m x_m 4^{-m}, in file units.
  double cache_load() const;
  /// M_b = highest level holding a file; 0 when everything is local.
  int top_level() const;

  /// True iff x >= 0, sum = L and the cache fits L_C (with kCacheSlack).
  bool is_feasible(std::int64_t file_count, double cache_size) const;
  /// Throws kInvariantViolation naming the first broken condition.
  void validate(std::int64_t file_count, double cache_size) const;

  friend bool operator==(const PlacementVector&, const PlacementVector&) = default;

 private:
  std::vector<std::int64_t> x_;
};

bool cache_fits(double load, double cache_size);

struct ThroughputReport {
  /// True when every request is a local hit (x_0 = L); `rate` is then
  /// meaningless and binding_level is -1.
  bool unbounded = false;
  double rate = 0.0;
  int binding_level = -1;
  int active_levels = 0;
  /// slack[m-1] = level-m ratio minus rate, for m = 1..M_b.
  std::vector<double> per_level_slack;
  /// R*/(M(1 + 2^tau)) when produced alongside a relaxed solution.
  std::optional<double> guarantee_floor;
};

/// R = min over active levels of C̄_m / (M_b f(P_m + 1)).
ThroughputReport evaluate_throughput(const PlacementVector& x,
                                     const LevelCapacities& caps,
                                     const PopularityModel& pop, double cache_size);

/// Level-m ratio C̄_m / (M_b tail(P_m + 1)) used by every exact comparison.
/// Shared with the exact solver so both sides round identically.
double level_ratio(const LevelCapacities& caps, const PopularityModel& pop,
                   int level, int active_levels, std::int64_t prefix);

/// Objective of the relaxed problem for a real placement:
/// min_{m=1..M, f>0} C̄_m / f(P_m + 1). Infinite if no level carries traffic.
double relaxed_throughput(std::span<const double> x, const LevelCapacities& caps,
                          const PopularityModel& pop);

struct RelaxedSolution {
  std::vector<double> x_star;  // length M+1
  double r_star = 0.0;
  int m_star = 0;
};

/// L_{m*}(R) = sum_{m=m*+1}^{M} 3 f^{-1}(C̄_m/R)/4^m + (L+1)/4^M - 4^{-m*}.
/// R may be +inf (the C̄_0 boundary), giving the limit L.
double relaxed_cache_usage(int m_star, double rate, const LevelCapacities& caps,
                           const PopularityModel& pop);

/// Closed-form x* for a given (m*, R) from the balanced-load equalities.
/// Throws kBracket if any entry comes out negative.
std::vector<double> relaxed_solution_at(int m_star, double rate,
                                        const LevelCapacities& caps,
                                        const PopularityModel& pop);

/// Outer bisection on m* plus inner root-find of L_{m*}(R) = L_C.
/// Throws kInfeasible when L_C < L 4^{-M} and kInvalidParameter when L_C >= L.
RelaxedSolution solve_relaxed(const LevelCapacities& caps,
                              const PopularityModel& pop, double cache_size);

struct OptimalityResiduals {
  std::vector<double> balance;  // per level m*+1..M, relative
  double bracket = 0.0;         // max(0, R* - C̄_{m*}) / R*
  double total = 0.0;           // |sum x* - L| / L
  double cache = 0.0;           // |sum x* 4^{-m} - L_C| / L_C
  double negativity = 0.0;      // max(0, -min x*) / L
  double max() const;
};

OptimalityResiduals check_optimality(const RelaxedSolution& sol,
                                     const LevelCapacities& caps,
                                     const PopularityModel& pop, double cache_size);

/// Carry-forward flooring of x* into an integer placement.
PlacementVector round_to_feasible(const RelaxedSolution& sol, std::int64_t file_count);

/// Iterative load balancing between the lowest multi-file level and the
/// levels above it. Accepts a move only when the balanced-load proxy rate
/// strictly improves.
PlacementVector rebalance(const PlacementVector& x, const LevelCapacities& caps,
                          const PopularityModel& pop, double cache_size);

struct ContentAssignment {
  std::vector<int> file_level;  // file_level[l-1] for rank l
  double per_node_load = 0.0;
};

ContentAssignment place_contents(const PlacementVector& x);

/// The complete low-complexity pipeline.
struct PlacementOutcome {
  RelaxedSolution relaxed;
  PlacementVector rounded;
  PlacementVector placement;
  ThroughputReport report;
};

PlacementOutcome optimize_placement(const LevelCapacities& caps,
                                    const PopularityModel& pop, double cache_size);

/// {"M":..,"L":..,"L_C":..,"x":[..],"rate_bits_per_s_hz":..}
std::string placement_to_json(const PlacementVector& x, double cache_size,
                              const ThroughputReport& report);
struct PlacementDocument {
  int levels;
  std::int64_t file_count;
  double cache_size;
  PlacementVector x;
  std::optional<double> rate;
};
PlacementDocument placement_from_json(const std::string& text);

}  // namespace d2dcache
