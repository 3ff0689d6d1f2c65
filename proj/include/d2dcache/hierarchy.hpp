#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "d2dcache/phy.hpp"

namespace d2dcache {

/// n = 4^M nodes on a regular grid of area A(n) = n^kappa.
///
/// Nodes are indexed in Z-order (Morton order) over grid coordinates, so the
/// level-m cluster containing node i is simply i >> 2m and the four children
/// of cluster c at level m are 4c..4c+3 at level m-1.
class NetworkGrid {
 public:
  NetworkGrid(int levels, double kappa, double alpha);

  int levels() const { return levels_; }
  double kappa() const { return kappa_; }
  double alpha() const { return alpha_; }

  std::uint64_t node_count() const { return std::uint64_t{1} << (2 * levels_); }
  std::uint64_t side() const { return std::uint64_t{1} << levels_; }
  std::uint64_t cluster_size(int level) const {
    return std::uint64_t{1} << (2 * level);
  }
  std::uint64_t clusters_at(int level) const {
    return std::uint64_t{1} << (2 * (levels_ - level));
  }

 private:
  int levels_;
  double kappa_;
  double alpha_;
};

struct ClusterRef {
  int level;
  std::uint64_t index;

  friend bool operator==(const ClusterRef&, const ClusterRef&) = default;
};

/// Ancestor of `node` at `level`; level 0 is the node itself, level M is 0.
std::uint64_t cluster_of(const NetworkGrid& grid, std::uint64_t node, int level);

/// (row, col) of a node on the sqrt(n) x sqrt(n) grid.
std::pair<std::uint64_t, std::uint64_t> node_coordinates(const NetworkGrid& grid,
                                                         std::uint64_t node);
std::uint64_t node_at(const NetworkGrid& grid, std::uint64_t row, std::uint64_t col);

/// Delivery path V_{m,g(i)} -> ... -> V_{0,i} for content cached at
/// `source_level`; empty for a local hit (source_level == 0).
std::vector<ClusterRef> routing_path(const NetworkGrid& grid, std::uint64_t node,
                                     int source_level);

/// Normalised edge capacities of the capacitated tree, one per level.
///
/// cbar(m) = 4 R_u(4^m) / 3 for m = 1..M. The absolute capacity of a level-m
/// edge when M_b levels are served round robin is cm(m, M_b) =
/// cbar(m) 4^{m-1} / M_b.
class LevelCapacities {
 public:
  /// `cbar` holds C̄_1..C̄_M. Throws kInvalidParameter for non-positive entries.
  explicit LevelCapacities(std::vector<double> cbar,
                           std::vector<ClusterRate> rates = {});

  int levels() const { return static_cast<int>(cbar_.size()); }
  /// C̄_m for m in 1..M; m == 0 yields +inf (unconstrained local level).
  double cbar(int level) const;
  double cm(int level, int active_levels) const;
  const std::vector<double>& cbar_values() const { return cbar_; }
  /// Empty when the capacities were supplied directly.
  const std::vector<ClusterRate>& rates() const { return rates_; }

 private:
  std::vector<double> cbar_;
  std::vector<ClusterRate> rates_;
};

LevelCapacities edge_capacities(const NetworkGrid& grid, const PhyParams& params,
                                ModePolicy policy = ModePolicy::kBest);

/// Unified-form bracket c^L 4^{-m gamma^L} <= C̄_m <= c^U 4^{-m gamma^U}.
struct CapacityBracket {
  double c_lower;
  double gamma_lower;
  double c_upper;
  double gamma_upper;
  double s_m;  // sqrt(M ln 4)
};

CapacityBracket capacity_bracket(const NetworkGrid& grid,
                                       const PhyParams& params);

}  // namespace d2dcache
