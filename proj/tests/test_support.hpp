#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "d2dcache/hierarchy.hpp"
#include "d2dcache/phy.hpp"
#include "d2dcache/popularity.hpp"

namespace d2dtest {

struct RandomInstance {
  d2dcache::LevelCapacities caps;
  d2dcache::PopularityModel pop;
  double cache_size;
};

/// PHY-derived capacities on a random grid, Zipf library, and a cache size
/// drawn log-uniformly from [L 4^{-M}, L).
inline RandomInstance random_instance(std::mt19937_64& rng, int max_levels,
                                      std::int64_t max_files, double max_tau = 3.0) {
  std::uniform_int_distribution<int> levels(1, max_levels);
  std::uniform_int_distribution<std::int64_t> files(2, max_files);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int M = levels(rng);
  const double kappa = std::vector<double>{0.0, 0.5, 1.0}[rng() % 3];
  const double alpha = 2.2 + 2.8 * unit(rng);
  const std::int64_t L = files(rng);
  const double tau = max_tau * unit(rng);
  const double lo = static_cast<double>(L) * std::ldexp(1.0, -2 * M);
  const double hi = static_cast<double>(L) * (1.0 - 1e-6);
  const double lc = lo * std::pow(hi / lo, unit(rng));
  const d2dcache::NetworkGrid grid(M, kappa, alpha);
  return {d2dcache::edge_capacities(grid, d2dcache::PhyParams::from_alpha(alpha)),
          d2dcache::PopularityModel::zipf(static_cast<std::size_t>(L), tau), lc};
}

}  // namespace d2dtest
