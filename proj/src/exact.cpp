#include "d2dcache/exact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <omp.h>

#include "d2dcache/error.hpp"

namespace d2dcache {

namespace {

void check_instance(const LevelCapacities& caps, const PopularityModel& pop,
                    double cache_size) {
  const double L = static_cast<double>(pop.file_count());
  require(cache_size < L, ErrorKind::kInvalidParameter,
          "exact: cache must be smaller than the library");
  require(cache_size >= L * std::ldexp(1.0, -2 * caps.levels()) * (1.0 - kCacheSlack),
          ErrorKind::kInfeasible,
          "exact: problem is infeasible, the network cannot hold one copy of "
          "every file");
}

// Smallest theta in [0, L] with level_ratio(m, M_b, theta) >= rate.
std::int64_t min_threshold(double rate, int level, int active_levels,
                           const LevelCapacities& caps, const PopularityModel& pop) {
  std::int64_t lo = 0;
  auto hi = static_cast<std::int64_t>(pop.file_count());
  while (lo < hi) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (level_ratio(caps, pop, level, active_levels, mid) >= rate) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return lo;
}

struct Candidate {
  std::vector<std::int64_t> x;
  double rate = -1.0;
  bool found = false;
};

// Rate of a feasible composition, matching evaluate_throughput bit for bit.
double composition_rate(const std::vector<std::int64_t>& x,
                        const LevelCapacities& caps, const PopularityModel& pop) {
  int mb = 0;
  for (int m = static_cast<int>(x.size()) - 1; m >= 0; --m) {
    if (x[static_cast<std::size_t>(m)] > 0) {
      mb = m;
      break;
    }
  }
  if (mb == 0) return std::numeric_limits<double>::infinity();
  double rate = std::numeric_limits<double>::infinity();
  std::int64_t prefix = x[0];
  for (int m = 1; m <= mb; ++m) {
    rate = std::min(rate, level_ratio(caps, pop, m, mb, prefix));
    prefix += x[static_cast<std::size_t>(m)];
  }
  return rate;
}

void offer(Candidate& best, const std::vector<std::int64_t>& x, double rate) {
  if (!best.found || rate > best.rate) {
    best.x = x;
    best.rate = rate;
    best.found = true;
  }
}

// Lexicographic enumeration of x[pos..M] summing to `remaining`.
void enumerate(std::vector<std::int64_t>& x, std::size_t pos, std::int64_t remaining,
               double load, const LevelCapacities& caps, const PopularityModel& pop,
               double cache_size, Candidate& best) {
  const std::size_t last = x.size() - 1;
  if (load > cache_size * (1.0 + 1e-9)) return;
  if (pos == last) {
    x[last] = remaining;
    PlacementVector pv(x);
    if (cache_fits(pv.cache_load(), cache_size)) {
      offer(best, x, composition_rate(x, caps, pop));
    }
    return;
  }
  const double w = std::ldexp(1.0, -2 * static_cast<int>(pos));
  for (std::int64_t v = 0; v <= remaining; ++v) {
    x[pos] = v;
    enumerate(x, pos + 1, remaining - v, load + static_cast<double>(v) * w, caps,
              pop, cache_size, best);
  }
  x[pos] = 0;
}

void check_guard(const LevelCapacities& caps, const PopularityModel& pop) {
  require(composition_count(static_cast<std::int64_t>(pop.file_count()),
                            caps.levels()) <= kBruteForceLimit,
          ErrorKind::kSizeGuard, "brute_force: instance exceeds the enumeration limit");
}

ExactSolution finish(const Candidate& best, const LevelCapacities& caps,
                     const PopularityModel& pop, double cache_size) {
  require(best.found, ErrorKind::kInfeasible, "exact: no feasible placement");
  PlacementVector x(best.x);
  return {x, evaluate_throughput(x, caps, pop, cache_size)};
}

}  // namespace

ThresholdForm to_threshold(const PlacementVector& x) {
  ThresholdForm t;
  t.theta.reserve(static_cast<std::size_t>(x.levels()) + 2);
  t.theta.push_back(0);
  std::int64_t acc = 0;
  for (int m = 0; m <= x.levels(); ++m) {
    acc += x[m];
    t.theta.push_back(acc);
  }
  return t;
}

PlacementVector from_threshold(const ThresholdForm& t) {
  require(t.theta.size() >= 3, ErrorKind::kInvariantViolation,
          "threshold: need at least M+2 = 3 entries");
  require(t.theta.front() == 0, ErrorKind::kInvariantViolation,
          "threshold: theta_0 must be 0");
  std::vector<std::int64_t> x;
  x.reserve(t.theta.size() - 1);
  for (std::size_t m = 0; m + 1 < t.theta.size(); ++m) {
    require(t.theta[m + 1] >= t.theta[m], ErrorKind::kInvariantViolation,
            "threshold: theta must be non-decreasing");
    x.push_back(t.theta[m + 1] - t.theta[m]);
  }
  return PlacementVector(std::move(x));
}

double threshold_row_mass(const ThresholdForm& t, const PopularityModel& pop, int m) {
  double mass = 0.0;
  for (std::size_t l = pop.file_count(); l >= 1; --l) {
    if (t.delta(m, static_cast<std::int64_t>(l))) mass += pop.pmf(l);
  }
  return mass;
}

double threshold_cache_mass(const ThresholdForm& t) {
  const std::int64_t L = t.file_count();
  double mass = 0.0;
  for (int m = 0; m <= t.levels(); ++m) {
    std::int64_t files = 0;
    for (std::int64_t l = 1; l <= L; ++l) {
      files += static_cast<int>(t.delta(m, l)) - static_cast<int>(t.delta(m + 1, l));
    }
    mass += static_cast<double>(files) * std::ldexp(1.0, -2 * m);
  }
  return mass;
}

std::optional<PlacementVector> feasible_for_rate(double rate, int active_levels,
                                                 const LevelCapacities& caps,
                                                 const PopularityModel& pop,
                                                 double cache_size) {
  const int M = caps.levels();
  require(active_levels >= 1 && active_levels <= M, ErrorKind::kDomain,
          "feasible_for_rate: M_b out of range");
  const auto L = static_cast<std::int64_t>(pop.file_count());

  ThresholdForm t;
  t.theta.assign(static_cast<std::size_t>(M) + 2, L);
  t.theta[0] = 0;
  for (int m = 1; m <= active_levels; ++m) {
    t.theta[static_cast<std::size_t>(m)] =
        std::max(t.theta[static_cast<std::size_t>(m) - 1],
                 min_threshold(rate, m, active_levels, caps, pop));
  }
  if (t.theta[static_cast<std::size_t>(active_levels)] >= L) return std::nullopt;
  PlacementVector x = from_threshold(t);
  if (!cache_fits(x.cache_load(), cache_size)) return std::nullopt;
  return x;
}

ExactSolution solve_exact(const LevelCapacities& caps, const PopularityModel& pop,
                          double cache_size) {
  check_instance(caps, pop, cache_size);
  const auto L = static_cast<std::int64_t>(pop.file_count());

  std::optional<ExactSolution> best;
  for (int mb = 1; mb <= caps.levels(); ++mb) {
    std::vector<double> rates;
    rates.reserve(static_cast<std::size_t>(mb * L));
    for (int m = 1; m <= mb; ++m) {
      for (std::int64_t k = 0; k < L; ++k) {
        rates.push_back(level_ratio(caps, pop, m, mb, k));
      }
    }
    std::sort(rates.begin(), rates.end());
    rates.erase(std::unique(rates.begin(), rates.end()), rates.end());

    // Feasibility is monotone in the rate; rates[0] only ever needs theta = 0.
    if (!feasible_for_rate(rates.front(), mb, caps, pop, cache_size)) continue;
    std::size_t lo = 0;
    std::size_t hi = rates.size() - 1;
    while (lo < hi) {
      const std::size_t mid = lo + (hi - lo + 1) / 2;
      if (feasible_for_rate(rates[mid], mb, caps, pop, cache_size)) {
        lo = mid;
      } else {
        hi = mid - 1;
      }
    }
    PlacementVector x = *feasible_for_rate(rates[lo], mb, caps, pop, cache_size);
    ThroughputReport report = evaluate_throughput(x, caps, pop, cache_size);
    if (report.active_levels != mb) continue;
    if (!best || report.rate > best->report.rate) {
      best = ExactSolution{std::move(x), std::move(report)};
    }
  }
  require(best.has_value(), ErrorKind::kInfeasible, "solve_exact: no feasible placement");
  return *best;
}

std::uint64_t composition_count(std::int64_t file_count, int levels) {
  // C(L + M, M) computed incrementally; each partial product is itself a
  // binomial coefficient, so the division is exact.
  std::uint64_t c = 1;
  for (int i = 1; i <= levels; ++i) {
    const auto num = static_cast<std::uint64_t>(file_count) + static_cast<std::uint64_t>(i);
    if (c > std::numeric_limits<std::uint64_t>::max() / num) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    c = c * num / static_cast<std::uint64_t>(i);
  }
  return c;
}

ExactSolution brute_force_serial(const LevelCapacities& caps,
                                 const PopularityModel& pop, double cache_size) {
  check_instance(caps, pop, cache_size);
  check_guard(caps, pop);
  const auto L = static_cast<std::int64_t>(pop.file_count());
  std::vector<std::int64_t> x(static_cast<std::size_t>(caps.levels()) + 1, 0);
  Candidate best;
  enumerate(x, 0, L, 0.0, caps, pop, cache_size, best);
  return finish(best, caps, pop, cache_size);
}

ExactSolution brute_force(const LevelCapacities& caps, const PopularityModel& pop,
                          double cache_size) {
  check_instance(caps, pop, cache_size);
  check_guard(caps, pop);
  const auto L = static_cast<std::int64_t>(pop.file_count());
  const std::size_t width = static_cast<std::size_t>(caps.levels()) + 1;

  // One slot per value of x_0; slots are merged in ascending order so that
  // strict improvement keeps the lexicographically smallest optimum.
  std::vector<Candidate> slots(static_cast<std::size_t>(L) + 1);
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t first = 0; first <= L; ++first) {
    std::vector<std::int64_t> x(width, 0);
    x[0] = first;
    enumerate(x, 1, L - first, static_cast<double>(first), caps, pop, cache_size,
              slots[static_cast<std::size_t>(first)]);
  }
  Candidate best;
  for (const Candidate& c : slots) {
    if (c.found) offer(best, c.x, c.rate);
  }
  return finish(best, caps, pop, cache_size);
}

}  // namespace d2dcache
