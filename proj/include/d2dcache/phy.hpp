#pragma once

#include <cstdint>

namespace d2dcache {

class NetworkGrid;

/// Physical-layer constants for one path-loss exponent. Rates are in
/// bit/s/Hz (log base 2).
struct PhyParams {
  double alpha = 4.0;
  double snr_hcoop = 0.0;
  double snr_multihop = 0.0;
  int reuse_hcoop = 0;
  int reuse_multihop = 0;
  /// Scale applied to log2(1 + SNR/(1 + P_I)) to obtain R_c(alpha, P_I) for
  /// the multi-stage h-coop rate. 1.0 is the upper bound.
  double rc_fraction = 1.0;

  /// Derives both SNR constants and reuse factors from alpha (> 2).
  static PhyParams from_alpha(double alpha, double rc_fraction = 1.0);
};

/// 2^{2(3 + alpha/ln 2)}
double hcoop_snr(double alpha);
/// 2^{2(3 + alpha/ln 4)}
double multihop_snr(double alpha);
/// ceil(SNR^{1/(2 alpha)} + 1)
int reuse_factor(double snr, double alpha);

/// P_I = sum_{i=1}^{floor(sqrt n)} 8 i SNR (t_r i - 1)^{-alpha}.
double interference_power(std::uint64_t n, double snr, int reuse, double alpha);

/// log2(1 + snr / (1 + interference))
double link_spectral_efficiency(double snr, double interference);

/// Improved hierarchical cooperation with `stages` stages on an n-node
/// network of unit area, for a given interference level.
double rate_hcoop(std::uint64_t n, int stages, const PhyParams& params,
                  double interference);
/// Same, with P_I evaluated for the n-node network itself.
double rate_hcoop(std::uint64_t n, int stages, const PhyParams& params);

/// Stage count maximising rate_hcoop over 1..ceil(4 sqrt(ln n)); ties go to
/// the smaller count.
int optimal_stages(std::uint64_t n, const PhyParams& params, double interference);
int optimal_stages(std::uint64_t n, const PhyParams& params);

/// Classical multihop rate under uniform permutation traffic.
double rate_multihop(std::uint64_t n, const PhyParams& params, double interference);
double rate_multihop(std::uint64_t n, const PhyParams& params);

enum class PhyMode { kHierCoop, kMultihop };

/// kBest picks the larger of the two modes per cluster size; kMultihopOnly
/// models the cache-assisted multihop baseline.
enum class ModePolicy { kBest, kMultihopOnly };

struct ClusterRate {
  std::uint64_t cluster_size = 0;
  double rate = 0.0;
  PhyMode mode = PhyMode::kMultihop;
  int stages = 0;  // h-coop stage count; 0 in multihop mode
  double interference = 0.0;           // P_I used by the h-coop candidate
  double multihop_interference = 0.0;  // P_I used by the multihop candidate
  double hcoop_rate = 0.0;             // area-penalised h-coop candidate
  double multihop_rate = 0.0;
  double area_penalty = 1.0;
};

/// Per-node rate R_u(N) for per-cluster uniform permutation traffic inside
/// clusters of N = 4^m nodes of `grid`. The interference sum always runs over
/// the whole network. The h-coop candidate is scaled by
/// min(N A_c^{-alpha/2}, 1) with cluster area A_c = N n^{kappa-1}.
ClusterRate cluster_rate(std::uint64_t cluster_size, const NetworkGrid& grid,
                         const PhyParams& params,
                         ModePolicy policy = ModePolicy::kBest);

}  // namespace d2dcache
