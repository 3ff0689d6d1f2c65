#include "d2dcache/popularity.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "d2dcache/error.hpp"

namespace d2dcache {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidParameter: return "invalid parameter";
    case ErrorKind::kDomain: return "domain error";
    case ErrorKind::kInvariantViolation: return "invariant violation";
    case ErrorKind::kInfeasible: return "infeasible problem";
    case ErrorKind::kBracket: return "bracket error";
    case ErrorKind::kSizeGuard: return "instance too large";
  }
  return "error";
}

PopularityModel PopularityModel::zipf(std::size_t file_count, double tau) {
  require(file_count >= 1, ErrorKind::kInvalidParameter,
          "zipf: file count must be positive");
  require(tau >= 0.0 && std::isfinite(tau), ErrorKind::kInvalidParameter,
          "zipf: skewness must be finite and >= 0");

  PopularityModel model;
  model.tau_ = tau;
  const std::size_t L = file_count;

  std::vector<long double> weight(L);
  for (std::size_t l = 1; l <= L; ++l) {
    weight[l - 1] = tau == 0.0
                        ? 1.0L
                        : std::pow(static_cast<long double>(l),
                                   -static_cast<long double>(tau));
  }
  // Largest terms first.
  long double z = 0.0L;
  for (long double w : weight) z += w;
  model.z_ = static_cast<double>(z);

  model.pmf_.resize(L);
  for (std::size_t i = 0; i < L; ++i) {
    model.pmf_[i] = static_cast<double>(weight[i] / z);
  }

  model.prefix_.assign(L + 1, 0.0);
  long double acc = 0.0L;
  for (std::size_t i = 0; i < L; ++i) {
    acc += weight[i] / z;
    model.prefix_[i + 1] = static_cast<double>(acc);
  }

  model.tail_.assign(L + 1, 0.0);
  acc = 0.0L;
  for (std::size_t i = L; i-- > 0;) {
    acc += weight[i] / z;
    model.tail_[i] = static_cast<double>(acc);
  }
  return model;
}

double PopularityModel::tail_mass(double x) const {
  const double L = static_cast<double>(file_count());
  require(x >= 1.0 && x <= L + 1.0, ErrorKind::kDomain,
          "tail_mass: argument outside [1, L+1]");
  const double fl = std::floor(x);
  const auto k = static_cast<std::size_t>(fl);
  if (fl == x) return tail_at(k);
  // (ceil(x) - x) p_floor(x) + sum_{l >= ceil(x)} p_l
  return tail_[k] + ((fl + 1.0) - x) * pmf_[k - 1];
}

double PopularityModel::tail_inverse(double y) const {
  require(y >= 0.0, ErrorKind::kDomain, "tail_inverse: negative argument");
  const std::size_t L = file_count();
  if (y >= 1.0 || y >= tail_[0]) return 1.0;
  if (y == 0.0) return static_cast<double>(L) + 1.0;

  // First j with tail_[j] < y; tail_ is non-increasing and tail_[L] == 0.
  const auto it = std::partition_point(
      tail_.begin(), tail_.end(), [y](double t) { return t >= y; });
  const auto k = static_cast<std::size_t>(it - tail_.begin());  // 1..L
  // On [k, k+1] f is linear from tail(k) down to tail(k+1) with slope p_k.
  const double x =
      static_cast<double>(k + 1) - (y - tail_[k]) / pmf_[k - 1];
  return std::clamp(x, static_cast<double>(k), static_cast<double>(k + 1));
}

InverseBounds tail_inverse_bounds(const PopularityModel& model, double y) {
  require(y > 0.0 && y <= 1.0, ErrorKind::kDomain,
          "tail_inverse_bounds: argument outside (0, 1]");
  const double tau = model.skewness();
  const double L = static_cast<double>(model.file_count());
  if (tau < 1.0) {
    return {std::max(0.0, 1.0 - y / (1.0 - tau)), 1.0 - y};
  }
  if (tau == 1.0) {
    return {std::exp(-1.0) * std::pow(L, 1.0 - y), std::exp(2.0) * L};
  }
  const double e = 1.0 / (1.0 - tau);
  return {std::pow(2.0, 1.0 - tau) * std::min(std::pow(y * tau, e), L + 1.0),
          std::min(std::pow(y / tau, e), L + 1.0) + 1.0};
}

}  // namespace d2dcache
