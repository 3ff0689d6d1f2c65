#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace d2dcache {

/// Zipf request distribution over a library of L files, ranked by popularity.
///
/// Besides the pmf this keeps two cumulative tables: `prefix_mass()[k]` is the
/// mass of files 1..k and `tail_at(k)` is the mass of files k..L. The tail is
/// accumulated from the least popular file upwards so that small tails keep
/// full relative precision; the optimizer divides by them constantly.
///
/// The tail-mass function f(x) is the piecewise-linear interpolation of
/// tail_at() over real x in [1, L+1]; it is strictly decreasing with
/// breakpoints at the integers, which is what makes its inverse exact.
class PopularityModel {
 public:
  /// Builds p_l = l^{-tau} / Z with Z = sum_{l=1}^{L} l^{-tau}.
  /// Throws kInvalidParameter for L == 0 or tau < 0.
  static PopularityModel zipf(std::size_t file_count, double tau);

  std::size_t file_count() const { return pmf_.size(); }
  double skewness() const { return tau_; }
  double normalization() const { return z_; }

  /// p_l for 1-based rank l.
  double pmf(std::size_t l) const { return pmf_[l - 1]; }
  std::span<const double> pmf() const { return pmf_; }

  /// Size L+1; element 0 is 0, element L is 1 up to rounding.
  std::span<const double> prefix_mass() const { return prefix_; }

  /// sum_{l=k}^{L} p_l for integer k in [1, L+1]; tail_at(L+1) == 0.
  double tail_at(std::size_t k) const { return tail_[k - 1]; }

  /// f(x) = (ceil(x) - x) p_floor(x) + sum_{l >= ceil(x)} p_l on [1, L+1].
  double tail_mass(double x) const;

  /// Exact inverse of tail_mass(). Values y >= 1 clamp to 1 (the constraint
  /// they come from is inactive); y == 0 maps to L+1.
  double tail_inverse(double y) const;

 private:
  PopularityModel() = default;

  double tau_ = 0.0;
  double z_ = 1.0;
  std::vector<double> pmf_;
  std::vector<double> prefix_;
  std::vector<double> tail_;  // tail_[k-1] = sum_{l >= k}, size L+1
};

/// Convenience spelling of PopularityModel::zipf.
inline PopularityModel zipf_pmf(std::size_t file_count, double tau) {
  return PopularityModel::zipf(file_count, tau);
}

struct InverseBounds {
  double lower;
  double upper;
};

/// Closed-form bracket on f^{-1}(y) used by the throughput-bound derivation.
///
/// The three skewness regimes use different units: for tau < 1 the pair
/// bounds (f^{-1}(y) - 1) / L, for tau >= 1 it bounds f^{-1}(y) itself.
/// The tau > 1 lower bound is asymptotic in L and does not hold for every
/// finite library when tau is close to 1.
InverseBounds tail_inverse_bounds(const PopularityModel& model, double y);

}  // namespace d2dcache
