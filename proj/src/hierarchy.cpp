#include "d2dcache/hierarchy.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "d2dcache/error.hpp"

namespace d2dcache {

NetworkGrid::NetworkGrid(int levels, double kappa, double alpha)
    : levels_(levels), kappa_(kappa), alpha_(alpha) {
  require(levels >= 1 && levels <= 31, ErrorKind::kInvalidParameter,
          "grid: level count must be in [1, 31]");
  require(kappa >= 0.0 && std::isfinite(kappa), ErrorKind::kInvalidParameter,
          "grid: area exponent must be >= 0");
  require(alpha > 2.0 && std::isfinite(alpha), ErrorKind::kInvalidParameter,
          "grid: path loss exponent must exceed 2");
}

std::uint64_t cluster_of(const NetworkGrid& grid, std::uint64_t node, int level) {
  require(node < grid.node_count(), ErrorKind::kDomain,
          "cluster_of: node index out of range");
  require(level >= 0 && level <= grid.levels(), ErrorKind::kDomain,
          "cluster_of: level out of range");
  return node >> (2 * level);
}

std::pair<std::uint64_t, std::uint64_t> node_coordinates(const NetworkGrid& grid,
                                                         std::uint64_t node) {
  require(node < grid.node_count(), ErrorKind::kDomain,
          "node_coordinates: node index out of range");
  std::uint64_t row = 0;
  std::uint64_t col = 0;
  for (int b = 0; b < grid.levels(); ++b) {
    col |= ((node >> (2 * b)) & 1u) << b;
    row |= ((node >> (2 * b + 1)) & 1u) << b;
  }
  return {row, col};
}

std::uint64_t node_at(const NetworkGrid& grid, std::uint64_t row, std::uint64_t col) {
  require(row < grid.side() && col < grid.side(), ErrorKind::kDomain,
          "node_at: coordinates out of range");
  std::uint64_t node = 0;
  for (int b = 0; b < grid.levels(); ++b) {
    node |= ((col >> b) & 1u) << (2 * b);
    node |= ((row >> b) & 1u) << (2 * b + 1);
  }
  return node;
}

std::vector<ClusterRef> routing_path(const NetworkGrid& grid, std::uint64_t node,
                                     int source_level) {
  require(source_level >= 0 && source_level <= grid.levels(), ErrorKind::kDomain,
          "routing_path: level out of range");
  std::vector<ClusterRef> path;
  if (source_level == 0) return path;
  path.reserve(static_cast<std::size_t>(source_level) + 1);
  for (int m = source_level; m >= 0; --m) {
    path.push_back({m, cluster_of(grid, node, m)});
  }
  return path;
}

LevelCapacities::LevelCapacities(std::vector<double> cbar,
                                 std::vector<ClusterRate> rates)
    : cbar_(std::move(cbar)), rates_(std::move(rates)) {
  require(!cbar_.empty(), ErrorKind::kInvalidParameter,
          "capacities: need at least one level");
  for (double c : cbar_) {
    require(c > 0.0 && std::isfinite(c), ErrorKind::kInvalidParameter,
            "capacities: every C̄_m must be positive and finite");
  }
}

double LevelCapacities::cbar(int level) const {
  if (level == 0) return std::numeric_limits<double>::infinity();
  require(level >= 1 && level <= levels(), ErrorKind::kDomain,
          "capacities: level out of range");
  return cbar_[static_cast<std::size_t>(level - 1)];
}

double LevelCapacities::cm(int level, int active_levels) const {
  require(active_levels >= 1, ErrorKind::kDomain,
          "capacities: active level count must be >= 1");
  return cbar(level) * std::pow(4.0, level - 1) / active_levels;
}

LevelCapacities edge_capacities(const NetworkGrid& grid, const PhyParams& params,
                                ModePolicy policy) {
  std::vector<double> cbar;
  std::vector<ClusterRate> rates;
  for (int m = 1; m <= grid.levels(); ++m) {
    ClusterRate r = cluster_rate(grid.cluster_size(m), grid, params, policy);
    cbar.push_back(4.0 * r.rate / 3.0);
    rates.push_back(r);
  }
  return LevelCapacities(std::move(cbar), std::move(rates));
}

CapacityBracket capacity_bracket(const NetworkGrid& grid,
                                       const PhyParams& params) {
  const double M = grid.levels();
  const double s = std::sqrt(M * std::log(4.0));
  const double area = std::max(0.0, params.alpha * grid.kappa() / 2.0 - 1.0);
  const double tr = params.reuse_hcoop;
  const double link = link_spectral_efficiency(
      params.snr_hcoop, interference_power(grid.node_count(), params.snr_hcoop,
                                           params.reuse_hcoop, params.alpha));

  CapacityBracket c;
  c.s_m = s;
  c.gamma_upper = std::min(1.0 / (2.0 * s + 1.0) + area, 0.5);
  c.c_upper = 2.0 / (tr * std::pow(3.0, 1.25)) * link;
  c.gamma_lower = std::min(1.0 / (s + 1.0) + area, 0.5);
  c.c_lower = 4.0 * params.rc_fraction * link /
              (3.0 * (1.0 + s) * tr * tr *
               std::pow(3.0 * std::exp2(s - 1.0), s / (2.0 * (s + 1.0))));
  return c;
}

}  // namespace d2dcache
