#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <type_traits>

#include "d2dcache/error.hpp"
#include "d2dcache/hierarchy.hpp"
#include "d2dcache/phy.hpp"

namespace d2dcache {

// ---------------------------------------------------------------------------
// Closed-form throughput bounds
// ---------------------------------------------------------------------------

enum class BoundSide { kProposed, kBaseline };

/// C̄_m is bracketed as c 4^{-m gamma}.
struct BoundCoefficients {
  double c = 0.0;
  double gamma = 0.0;
};

struct BoundsResult {
  BoundSide side = BoundSide::kProposed;
  BoundCoefficients lower_coeffs;
  BoundCoefficients upper_coeffs;
  double r_lower = 0.0;
  /// Empty when the tau in (1, gamma+1) denominator is not positive, which
  /// happens for libraries too small for that branch to say anything.
  std::optional<double> r_upper;
  double guarantee_factor = 0.0;  // 1 / (M (1 + 2^tau))
  double r_lower_floor = 0.0;     // r_lower * guarantee_factor
  std::string lower_case;
  std::string upper_case;
};

/// Lower bound on the relaxed optimum for a given (c, gamma) pair. The
/// branch is chosen by tau against 1 and gamma + 1 (1e-12 tolerance on the
/// two equality rows). `label` receives the branch name if non-null.
double relaxed_lower_bound(double tau, double file_count, double cache_size,
                           int levels, BoundCoefficients k,
                           std::string* label = nullptr);
std::optional<double> relaxed_upper_bound(double tau, double file_count,
                                          double cache_size, int levels,
                                          BoundCoefficients k,
                                          std::string* label = nullptr);

/// Coefficients of the h-coop bracket (lower, upper) or of the multihop-only
/// baseline, where both sides use gamma = 1/2 and c = 4 log2(...) / (3 T_r^2).
BoundCoefficients lower_coefficients(const NetworkGrid& grid, const PhyParams& params,
                                     BoundSide side);
BoundCoefficients upper_coefficients(const NetworkGrid& grid, const PhyParams& params,
                                     BoundSide side);

BoundsResult throughput_bounds(const NetworkGrid& grid, const PhyParams& params,
                               double tau, double file_count, double cache_size,
                               BoundSide side);

// ---------------------------------------------------------------------------
// Scaling exponents
// ---------------------------------------------------------------------------

/// Regime I: beta1 == beta2 with a1 > a2 (the cache holds a fixed fraction
/// of the library). Regime II: everything else that is feasible.
enum class Regime { kI, kII };

/// Branch of the piecewise exponent; the breakpoints are tau_a and tau_b.
enum class TauCase { kLow, kMiddle, kHigh };

const char* to_string(Regime r);
const char* to_string(TauCase c);

/// Works with double or with an exact rational type; equality tests use a
/// 1e-12 tolerance for floating point and are exact otherwise.
template <class T>
struct ScalingPoint {
  T beta1;
  T beta2;
  T a1;
  T a2;
  T tau;
  T alpha;
};

/// `exponent` excludes the vanishing correction; `epsilon_sign` is -1 when
/// the law holds up to n^{-eps} (achievable) and +1 for n^{+eps} (converse).
template <class T>
struct ScalingExponent {
  Regime regime;
  TauCase tau_case;
  T exponent;
  int epsilon_sign;
};

template <class T>
struct CriticalSkewness {
  T tau_a;
  T tau_b;
};

namespace detail {

template <class T>
bool same(const T& a, const T& b) {
  if constexpr (std::is_floating_point_v<T>) {
    using std::abs;
    return abs(a - b) <= T(1e-12);
  } else {
    return a == b;
  }
}

template <class T>
T min3_half(const T& alpha) {
  const T three(3);
  return (alpha < three ? alpha : three) / T(2);
}

// Shared shape of all three laws: Regime I flat then beta2 (tau - 1);
// Regime II three pieces with the middle break at `tau_b`.
template <class T>
ScalingExponent<T> piecewise(const ScalingPoint<T>& p, const T& tau_b, int sign) {
  const T one(1);
  const T zero(0);
  const Regime regime = [&] {
    const T gap = p.beta1 - p.beta2;
    require(p.beta1 > zero && p.a1 > zero && p.a2 > zero && !(p.tau < zero),
            ErrorKind::kDomain, "scaling: beta1, a1, a2 must be > 0 and tau >= 0");
    require(!(p.beta2 < zero) && !(p.beta2 > p.beta1 && !same(p.beta1, p.beta2)),
            ErrorKind::kDomain, "scaling: beta2 must lie in [0, beta1]");
    require(!(gap > one) || same(gap, one), ErrorKind::kDomain,
            "scaling: beta1 - beta2 must not exceed 1");
    if (same(p.beta1, p.beta2)) {
      require(p.a1 > p.a2, ErrorKind::kDomain,
              "scaling: beta1 == beta2 needs a1 > a2 (cache smaller than library)");
      return Regime::kI;
    }
    if (same(gap, one)) {
      require(!(p.a1 > p.a2), ErrorKind::kDomain,
              "scaling: beta1 - beta2 == 1 needs a1 <= a2 (cache can hold L/n)");
    }
    return Regime::kII;
  }();

  if (regime == Regime::kI) {
    if (!(p.tau > one)) return {regime, TauCase::kLow, zero, sign};
    return {regime, TauCase::kHigh, p.beta2 * (p.tau - one), sign};
  }
  if (!(p.tau > one)) {
    return {regime, TauCase::kLow, (p.beta2 - p.beta1) * (tau_b - one), sign};
  }
  if (!(p.tau > tau_b)) {
    return {regime, TauCase::kMiddle,
            p.beta1 * (p.tau - tau_b) + p.beta2 * (tau_b - one), sign};
  }
  return {regime, TauCase::kHigh, p.beta2 * (p.tau - one), sign};
}

}  // namespace detail

template <class T>
Regime classify_regime(const ScalingPoint<T>& p) {
  return detail::piecewise(p, T(1), -1).regime;
}

/// Cache-induced hierarchical cooperation in an extended network.
template <class T>
ScalingExponent<T> achievable_exponent(const ScalingPoint<T>& p) {
  return detail::piecewise(p, detail::min3_half(p.alpha), -1);
}

/// PHY caching and cache-assisted multihop; the middle break sits at 3/2.
template <class T>
ScalingExponent<T> baseline_exponent(const ScalingPoint<T>& p) {
  return detail::piecewise(p, T(3) / T(2), -1);
}

/// Upper bound for any scheme; same pieces as the achievable law.
template <class T>
ScalingExponent<T> converse_exponent(const ScalingPoint<T>& p) {
  return detail::piecewise(p, detail::min3_half(p.alpha), +1);
}

template <class T>
CriticalSkewness<T> critical_skewness(const T& alpha, BoundSide scheme) {
  require(alpha > T(2), ErrorKind::kDomain, "critical_skewness: alpha must exceed 2");
  if (scheme == BoundSide::kBaseline) return {T(1), T(3) / T(2)};
  return {T(1), detail::min3_half(alpha)};
}

/// The finite-n correction 1/(s_M + 1), s_M = sqrt(M ln 4), for alpha < 3.
double epsilon_alpha(double alpha, int levels);

}  // namespace d2dcache
