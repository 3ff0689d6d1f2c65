#include "d2dcache/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace d2dcache {

namespace {

constexpr double kBranchTol = 1e-12;

void set_label(std::string* label, const char* text) {
  if (label != nullptr) *label = text;
}

void check_bound_inputs(double tau, double L, double lc, int levels,
                        BoundCoefficients k) {
  require(tau >= 0.0 && std::isfinite(tau), ErrorKind::kInvalidParameter,
          "bounds: tau must be >= 0");
  require(L >= 1.0 && lc > 0.0 && lc < L, ErrorKind::kInvalidParameter,
          "bounds: need 0 < L_C < L");
  require(levels >= 1, ErrorKind::kInvalidParameter, "bounds: need M >= 1");
  require(k.c > 0.0 && k.gamma > 0.0, ErrorKind::kInvalidParameter,
          "bounds: coefficients must be positive");
}

}  // namespace

const char* to_string(Regime r) { return r == Regime::kI ? "I" : "II"; }

const char* to_string(TauCase c) {
  switch (c) {
    case TauCase::kLow:
      return "low";
    case TauCase::kMiddle:
      return "middle";
    case TauCase::kHigh:
      return "high";
  }
  return "?";
}

double relaxed_lower_bound(double tau, double L, double lc, int levels,
                           BoundCoefficients k, std::string* label) {
  check_bound_inputs(tau, L, lc, levels, k);
  const double c = k.c;
  const double g = k.gamma;
  const double e2 = std::exp(2.0);

  if (tau < 1.0 - kBranchTol) {
    set_label(label, "tau<1");
    const double a = std::pow((std::pow(4.0, g + 1.0) - 1.0) /
                                  (std::pow(4.0, g + 2.0) - 16.0) * lc / L,
                              g);
    const double b = 3.0 / (1.0 - lc / L) / (std::pow(4.0, g + 1.0) - 1.0);
    return c * std::min(a, b);
  }
  if (tau <= 1.0 + kBranchTol) {
    set_label(label, "tau=1");
    const double num = (e2 * L - L - 1.0) * std::pow(4.0, -levels) + lc;
    return std::pow(num / (4.0 * (e2 * L - 1.0)), g) * c;
  }
  if (tau < g + 1.0 - kBranchTol) {
    set_label(label, "1<tau<gamma+1");
    // (4^a - 1) / (4^{a+2} - 4) with a = (1 + g - tau)/(tau - 1) > 0, written
    // with 4^{-a} so tau close to 1 does not overflow.
    const double a = (1.0 + g - tau) / (tau - 1.0);
    const double inv = std::pow(4.0, -a);
    const double ratio = (1.0 - inv) / (16.0 - 4.0 * inv);
    return std::pow(ratio, g) * c * std::pow(lc, g) * std::pow(L, tau - 1.0 - g) / tau;
  }
  if (tau <= g + 1.0 + kBranchTol) {
    set_label(label, "tau=gamma+1");
    return std::pow(3.0 * std::log(L) / std::log(4.0) + 4.0, -g) * (c / tau) *
           std::pow(lc, tau - 1.0);
  }
  set_label(label, "tau>gamma+1");
  const double q = std::pow(4.0, (g + 1.0 - tau) / (tau - 1.0));
  const double denom =
      3.0 * std::pow(tau, 1.0 / (tau - 1.0)) * q / (1.0 - q) + 4.0 * std::pow(tau, 1.0 / g);
  return c * std::pow(lc, tau - 1.0) / std::pow(denom, tau - 1.0);
}

std::optional<double> relaxed_upper_bound(double tau, double L, double lc, int levels,
                                          BoundCoefficients k, std::string* label) {
  check_bound_inputs(tau, L, lc, levels, k);
  const double c = k.c;
  const double g = k.gamma;

  if (tau < 1.0 - kBranchTol) {
    set_label(label, "tau<1");
    return c / (1.0 - tau) *
           std::pow((std::pow(4.0, g + 1.0) - 1.0) / (std::pow(4.0, g) - 1.0), g) *
           std::pow(lc / L, g);
  }
  if (tau <= 1.0 + kBranchTol) {
    set_label(label, "tau=1");
    const double lnL = std::log(L);
    const double n = std::pow(4.0, levels);
    // L^{1 - 1/ln L} = L / e; written out to stay finite at L = 1.
    const double base = 4.0 * std::numbers::e * (n * lc + L + 1.0) /
                        (3.0 * n * L / std::numbers::e);
    return c * std::pow(base, g) * lnL;
  }
  if (tau < g + 1.0 - kBranchTol) {
    set_label(label, "1<tau<gamma+1");
    const double denom = std::pow(L, (1.0 + g - tau) / g) * std::pow(tau / c, 1.0 / g) /
                             std::exp2(tau - 1.0) -
                         4.0 * std::pow(c, -1.0 / g);
    if (!(denom > 0.0)) return std::nullopt;
    return std::pow(lc, g) / std::pow(denom, g);
  }
  set_label(label, "tau>=gamma+1");
  return (tau - std::pow(L, 1.0 - tau)) * c * std::pow(4.0, -g) /
         (std::pow(lc + 1.0, 1.0 - tau) - std::pow(L + 1.0, 1.0 - tau));
}

BoundCoefficients lower_coefficients(const NetworkGrid& grid, const PhyParams& params,
                                     BoundSide side) {
  if (side == BoundSide::kBaseline) return upper_coefficients(grid, params, side);
  const CapacityBracket b = capacity_bracket(grid, params);
  return {b.c_lower, b.gamma_lower};
}

BoundCoefficients upper_coefficients(const NetworkGrid& grid, const PhyParams& params,
                                     BoundSide side) {
  if (side == BoundSide::kBaseline) {
    const double tr = params.reuse_multihop;
    const double pi = interference_power(grid.node_count(), params.snr_multihop,
                                         params.reuse_multihop, params.alpha);
    return {4.0 / (3.0 * tr * tr) * link_spectral_efficiency(params.snr_multihop, pi),
            0.5};
  }
  const CapacityBracket b = capacity_bracket(grid, params);
  return {b.c_upper, b.gamma_upper};
}

BoundsResult throughput_bounds(const NetworkGrid& grid, const PhyParams& params,
                               double tau, double file_count, double cache_size,
                               BoundSide side) {
  BoundsResult r;
  r.side = side;
  r.lower_coeffs = lower_coefficients(grid, params, side);
  r.upper_coeffs = upper_coefficients(grid, params, side);
  const int M = grid.levels();
  r.r_lower = relaxed_lower_bound(tau, file_count, cache_size, M, r.lower_coeffs,
                                  &r.lower_case);
  r.r_upper = relaxed_upper_bound(tau, file_count, cache_size, M, r.upper_coeffs,
                                  &r.upper_case);
  r.guarantee_factor = 1.0 / (M * (1.0 + std::exp2(tau)));
  r.r_lower_floor = r.r_lower * r.guarantee_factor;
  return r;
}

double epsilon_alpha(double alpha, int levels) {
  if (alpha >= 3.0) return 0.0;
  return 1.0 / (std::sqrt(levels * std::log(4.0)) + 1.0);
}

}  // namespace d2dcache
