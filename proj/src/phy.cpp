#include "d2dcache/phy.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "d2dcache/error.hpp"
#include "d2dcache/hierarchy.hpp"

namespace d2dcache {

namespace {

bool is_power_of_four(std::uint64_t v) {
  return v != 0 && std::has_single_bit(v) && (std::countr_zero(v) % 2 == 0);
}

}  // namespace

double hcoop_snr(double alpha) {
  return std::exp2(2.0 * (3.0 + alpha / std::log(2.0)));
}

double multihop_snr(double alpha) {
  return std::exp2(2.0 * (3.0 + alpha / std::log(4.0)));
}

int reuse_factor(double snr, double alpha) {
  return static_cast<int>(std::ceil(std::pow(snr, 1.0 / (2.0 * alpha)) + 1.0));
}

PhyParams PhyParams::from_alpha(double alpha, double rc_fraction) {
  require(alpha > 2.0 && std::isfinite(alpha), ErrorKind::kInvalidParameter,
          "phy: path loss exponent must exceed 2");
  require(rc_fraction > 0.0 && rc_fraction <= 1.0, ErrorKind::kInvalidParameter,
          "phy: rc_fraction must lie in (0, 1]");
  PhyParams p;
  p.alpha = alpha;
  p.snr_hcoop = hcoop_snr(alpha);
  p.snr_multihop = multihop_snr(alpha);
  p.reuse_hcoop = reuse_factor(p.snr_hcoop, alpha);
  p.reuse_multihop = reuse_factor(p.snr_multihop, alpha);
  p.rc_fraction = rc_fraction;
  return p;
}

double interference_power(std::uint64_t n, double snr, int reuse, double alpha) {
  require(reuse - 1 > 0, ErrorKind::kInvalidParameter,
          "interference_power: reuse factor must exceed 1");
  const auto terms = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
  double sum = 0.0;
  for (std::uint64_t i = 1; i <= terms; ++i) {
    const double d = static_cast<double>(i);
    sum += 8.0 * d * snr * std::pow(reuse * d - 1.0, -alpha);
  }
  return sum;
}

double link_spectral_efficiency(double snr, double interference) {
  return std::log2(1.0 + snr / (1.0 + interference));
}

double rate_hcoop(std::uint64_t n, int stages, const PhyParams& params,
                  double interference) {
  require(stages >= 1, ErrorKind::kInvalidParameter,
          "rate_hcoop: stage count must be >= 1");
  const double nd = static_cast<double>(n);
  const double tr = params.reuse_hcoop;
  const double link = link_spectral_efficiency(params.snr_hcoop, interference);
  if (stages == 1) {
    return link * std::pow(nd, -0.5) / (2.0 * std::sqrt(2.0) * tr);
  }
  const double s = stages;
  const double rc = params.rc_fraction * link;
  const double denom = (1.0 + s) * std::pow(tr, 2.0 * s / (s + 1.0)) *
                       std::pow(3.0 * std::exp2(s - 1.0), s / (2.0 * (s + 1.0)));
  return rc * std::pow(nd, -1.0 / (s + 1.0)) / denom;
}

double rate_hcoop(std::uint64_t n, int stages, const PhyParams& params) {
  return rate_hcoop(
      n, stages, params,
      interference_power(n, params.snr_hcoop, params.reuse_hcoop, params.alpha));
}

int optimal_stages(std::uint64_t n, const PhyParams& params, double interference) {
  const int max_stages = static_cast<int>(
      std::ceil(4.0 * std::sqrt(std::log(static_cast<double>(n)))));
  int best = 1;
  double best_rate = rate_hcoop(n, 1, params, interference);
  for (int s = 2; s <= max_stages; ++s) {
    const double r = rate_hcoop(n, s, params, interference);
    if (r > best_rate) {
      best_rate = r;
      best = s;
    }
  }
  return best;
}

int optimal_stages(std::uint64_t n, const PhyParams& params) {
  return optimal_stages(
      n, params,
      interference_power(n, params.snr_hcoop, params.reuse_hcoop, params.alpha));
}

double rate_multihop(std::uint64_t n, const PhyParams& params, double interference) {
  const double tr = params.reuse_multihop;
  return link_spectral_efficiency(params.snr_multihop, interference) *
         std::pow(static_cast<double>(n), -0.5) / (tr * tr);
}

double rate_multihop(std::uint64_t n, const PhyParams& params) {
  return rate_multihop(n, params,
                       interference_power(n, params.snr_multihop,
                                          params.reuse_multihop, params.alpha));
}

ClusterRate cluster_rate(std::uint64_t cluster_size, const NetworkGrid& grid,
                         const PhyParams& params, ModePolicy policy) {
  require(is_power_of_four(cluster_size) && cluster_size >= 4,
          ErrorKind::kInvalidParameter,
          "cluster_rate: cluster size must be 4^m with m >= 1");
  require(cluster_size <= grid.node_count(), ErrorKind::kInvalidParameter,
          "cluster_rate: cluster larger than the network");

  const std::uint64_t n = grid.node_count();
  ClusterRate out;
  out.cluster_size = cluster_size;
  out.interference =
      interference_power(n, params.snr_hcoop, params.reuse_hcoop, params.alpha);
  out.multihop_interference = interference_power(
      n, params.snr_multihop, params.reuse_multihop, params.alpha);
  out.multihop_rate = rate_multihop(cluster_size, params, out.multihop_interference);

  // log4 of N * A_c^{-alpha/2} with A_c = N n^{kappa - 1}.
  const double m = std::countr_zero(cluster_size) / 2;
  const double big_m = grid.levels();
  const double log4_area = m + big_m * (grid.kappa() - 1.0);
  const double log4_penalty = m - 0.5 * params.alpha * log4_area;
  out.area_penalty = log4_penalty >= 0.0 ? 1.0 : std::pow(4.0, log4_penalty);

  if (policy == ModePolicy::kMultihopOnly) {
    out.mode = PhyMode::kMultihop;
    out.rate = out.multihop_rate;
    return out;
  }

  const int s = optimal_stages(cluster_size, params, out.interference);
  out.hcoop_rate =
      rate_hcoop(cluster_size, s, params, out.interference) * out.area_penalty;
  if (out.hcoop_rate > out.multihop_rate) {
    out.mode = PhyMode::kHierCoop;
    out.stages = s;
    out.rate = out.hcoop_rate;
  } else {
    out.mode = PhyMode::kMultihop;
    out.rate = out.multihop_rate;
  }
  return out;
}

}  // namespace d2dcache
