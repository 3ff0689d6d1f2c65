#include "d2dcache/placement.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <json.hpp>

#include "d2dcache/error.hpp"

namespace d2dcache {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double pow4(int e) { return std::ldexp(1.0, 2 * e); }

int top_active(std::span<const std::int64_t> x) {
  for (int m = static_cast<int>(x.size()) - 1; m >= 0; --m) {
    if (x[static_cast<std::size_t>(m)] > 0) return m;
  }
  return -1;
}

double load_of(std::span<const std::int64_t> x) {
  double load = 0.0;
  for (std::size_t m = 0; m < x.size(); ++m) {
    load += static_cast<double>(x[m]) * pow4(-static_cast<int>(m));
  }
  return load;
}

// min_{m in [from, to]} C̄_m / f(sum_{i=from}^{m-1} x_i + 1)
double proxy_rate(std::span<const std::int64_t> x, int from, int to,
                  const LevelCapacities& caps, const PopularityModel& pop) {
  double best = kInf;
  std::int64_t partial = 0;
  for (int m = from; m <= to; ++m) {
    const double tail = pop.tail_at(static_cast<std::size_t>(partial) + 1);
    if (tail > 0.0) best = std::min(best, caps.cbar(m) / tail);
    partial += x[static_cast<std::size_t>(m)];
  }
  return best;
}

}  // namespace

PlacementVector::PlacementVector(std::vector<std::int64_t> counts)
    : x_(std::move(counts)) {
  require(x_.size() >= 2, ErrorKind::kInvalidParameter,
          "placement: need at least two levels");
}

std::int64_t PlacementVector::total() const {
  return std::accumulate(x_.begin(), x_.end(), std::int64_t{0});
}

std::int64_t PlacementVector::prefix(int m) const {
  return std::accumulate(x_.begin(), x_.begin() + m, std::int64_t{0});
}

double PlacementVector::cache_load() const { return load_of(x_); }

int PlacementVector::top_level() const { return std::max(0, top_active(x_)); }

bool cache_fits(double load, double cache_size) {
  return load <= cache_size * (1.0 + kCacheSlack);
}

bool PlacementVector::is_feasible(std::int64_t file_count, double cache_size) const {
  if (std::any_of(x_.begin(), x_.end(), [](std::int64_t v) { return v < 0; })) {
    return false;
  }
  return total() == file_count && cache_fits(cache_load(), cache_size);
}

void PlacementVector::validate(std::int64_t file_count, double cache_size) const {
  for (std::int64_t v : x_) {
    require(v >= 0, ErrorKind::kInvariantViolation, "placement: negative count");
  }
  require(total() == file_count, ErrorKind::kInvariantViolation,
          "placement: counts do not sum to L");
  require(cache_fits(cache_load(), cache_size), ErrorKind::kInvariantViolation,
          "placement: cache capacity exceeded");
}

double level_ratio(const LevelCapacities& caps, const PopularityModel& pop,
                   int level, int active_levels, std::int64_t prefix) {
  const double tail = pop.tail_at(static_cast<std::size_t>(prefix) + 1);
  if (tail <= 0.0) return kInf;
  return caps.cbar(level) / (active_levels * tail);
}

ThroughputReport evaluate_throughput(const PlacementVector& x,
                                     const LevelCapacities& caps,
                                     const PopularityModel& pop, double cache_size) {
  require(x.levels() == caps.levels(), ErrorKind::kInvalidParameter,
          "evaluate_throughput: level count mismatch");
  x.validate(static_cast<std::int64_t>(pop.file_count()), cache_size);

  ThroughputReport report;
  const int mb = x.top_level();
  report.active_levels = mb;
  if (mb == 0) {
    report.unbounded = true;
    return report;
  }

  std::vector<double> ratio(static_cast<std::size_t>(mb));
  std::int64_t prefix = x[0];
  report.rate = kInf;
  for (int m = 1; m <= mb; ++m) {
    ratio[static_cast<std::size_t>(m - 1)] = level_ratio(caps, pop, m, mb, prefix);
    if (ratio[static_cast<std::size_t>(m - 1)] < report.rate) {
      report.rate = ratio[static_cast<std::size_t>(m - 1)];
      report.binding_level = m;
    }
    prefix += x[m];
  }
  report.per_level_slack.resize(ratio.size());
  for (std::size_t i = 0; i < ratio.size(); ++i) {
    report.per_level_slack[i] = ratio[i] - report.rate;
  }
  return report;
}

double relaxed_throughput(std::span<const double> x, const LevelCapacities& caps,
                          const PopularityModel& pop) {
  const int M = caps.levels();
  require(static_cast<int>(x.size()) == M + 1, ErrorKind::kInvalidParameter,
          "relaxed_throughput: length mismatch");
  const double upper = static_cast<double>(pop.file_count()) + 1.0;
  double best = kInf;
  double partial = x[0];
  for (int m = 1; m <= M; ++m) {
    const double tail = pop.tail_mass(std::clamp(partial + 1.0, 1.0, upper));
    if (tail > 0.0) best = std::min(best, caps.cbar(m) / tail);
    partial += x[static_cast<std::size_t>(m)];
  }
  return best;
}

double relaxed_cache_usage(int m_star, double rate, const LevelCapacities& caps,
                           const PopularityModel& pop) {
  const int M = caps.levels();
  require(m_star >= 0 && m_star <= M, ErrorKind::kDomain,
          "relaxed_cache_usage: m* out of range");
  const double L = static_cast<double>(pop.file_count());
  double sum = 0.0;
  for (int m = m_star + 1; m <= M; ++m) {
    sum += 3.0 * pop.tail_inverse(caps.cbar(m) / rate) * pow4(-m);
  }
  return sum + (L + 1.0) * pow4(-M) - pow4(-m_star);
}

std::vector<double> relaxed_solution_at(int m_star, double rate,
                                        const LevelCapacities& caps,
                                        const PopularityModel& pop) {
  const int M = caps.levels();
  require(m_star >= 0 && m_star <= M, ErrorKind::kDomain,
          "relaxed_solution_at: m* out of range");
  const double L = static_cast<double>(pop.file_count());
  std::vector<double> x(static_cast<std::size_t>(M) + 1, 0.0);
  if (m_star == M) {
    x[static_cast<std::size_t>(M)] = L;
    return x;
  }
  auto finv = [&](int m) { return pop.tail_inverse(caps.cbar(m) / rate); };
  x[static_cast<std::size_t>(m_star)] = finv(m_star + 1) - 1.0;
  for (int m = m_star + 1; m <= M - 1; ++m) {
    x[static_cast<std::size_t>(m)] = finv(m + 1) - finv(m);
  }
  x[static_cast<std::size_t>(M)] = L - finv(M) + 1.0;
  for (double v : x) {
    require(v >= 0.0, ErrorKind::kBracket,
            "relaxed_solution_at: negative entry, rate outside the valid bracket");
  }
  return x;
}

RelaxedSolution solve_relaxed(const LevelCapacities& caps,
                              const PopularityModel& pop, double cache_size) {
  const int M = caps.levels();
  const double L = static_cast<double>(pop.file_count());
  const double floor_size = L * pow4(-M);
  require(cache_size < L, ErrorKind::kInvalidParameter,
          "solve_relaxed: cache must be smaller than the library");
  require(cache_size >= floor_size * (1.0 - kCacheSlack), ErrorKind::kInfeasible,
          "solve_relaxed: problem is infeasible, the network cannot hold one copy "
          "of every file");

  auto usage = [&](int m, double r) { return relaxed_cache_usage(m, r, caps, pop); };

  RelaxedSolution sol;
  int m_star = -1;
  if (usage(0, caps.cbar(1)) < cache_size) {
    m_star = 0;
  } else if (floor_size >= cache_size * (1.0 - kCacheSlack)) {
    sol.m_star = M;
    sol.r_star = caps.cbar(M);
    sol.x_star.assign(static_cast<std::size_t>(M) + 1, 0.0);
    sol.x_star[static_cast<std::size_t>(M)] = L;
    return sol;
  } else {
    int lo = 0;
    int hi = M;
    int m = (lo + hi) / 2;
    while (true) {
      if (usage(m, caps.cbar(m + 1)) >= cache_size) {
        lo = m;
      } else if (usage(m, caps.cbar(m)) < cache_size) {
        hi = m;
      } else {
        break;
      }
      if (hi - lo == 1) {
        m = hi;
        break;
      }
      m = (lo + hi) / 2;
    }
    m_star = m;
  }

  // L_{m*} is increasing in R on (C̄_{m*+1}, C̄_{m*}].
  double r_lo = m_star < M ? caps.cbar(m_star + 1) : caps.cbar(M);
  double r_hi = caps.cbar(m_star);
  if (std::isinf(r_hi)) {
    r_hi = 2.0 * r_lo;
    while (usage(m_star, r_hi) < cache_size) r_hi *= 2.0;
  }
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (r_lo + r_hi);
    if (mid <= r_lo || mid >= r_hi) break;
    if (usage(m_star, mid) < cache_size) {
      r_lo = mid;
    } else {
      r_hi = mid;
    }
  }
  const double err_lo = std::abs(usage(m_star, r_lo) - cache_size);
  const double err_hi = std::abs(usage(m_star, r_hi) - cache_size);
  sol.m_star = m_star;
  sol.r_star = err_lo < err_hi ? r_lo : r_hi;
  sol.x_star = relaxed_solution_at(m_star, sol.r_star, caps, pop);
  return sol;
}

double OptimalityResiduals::max() const {
  double r = std::max({bracket, total, cache, negativity});
  for (double b : balance) r = std::max(r, b);
  return r;
}

OptimalityResiduals check_optimality(const RelaxedSolution& sol,
                                     const LevelCapacities& caps,
                                     const PopularityModel& pop, double cache_size) {
  const int M = caps.levels();
  const double L = static_cast<double>(pop.file_count());
  OptimalityResiduals res;
  double partial = 0.0;
  for (int m = sol.m_star; m < M; ++m) {
    partial += sol.x_star[static_cast<std::size_t>(m)];
    const double arg = std::clamp(partial + 1.0, 1.0, L + 1.0);
    const double lhs = pop.tail_mass(arg) * sol.r_star;
    res.balance.push_back(std::abs(lhs - caps.cbar(m + 1)) / caps.cbar(m + 1));
  }
  if (sol.m_star > 0) {
    res.bracket = std::max(0.0, sol.r_star - caps.cbar(sol.m_star)) / sol.r_star;
  }
  double sum = 0.0;
  double load = 0.0;
  double lowest = 0.0;
  for (int m = 0; m <= M; ++m) {
    const double v = sol.x_star[static_cast<std::size_t>(m)];
    sum += v;
    load += v * pow4(-m);
    lowest = std::min(lowest, v);
  }
  res.total = std::abs(sum - L) / L;
  res.cache = std::abs(load - cache_size) / cache_size;
  res.negativity = -lowest / L;
  return res;
}

PlacementVector round_to_feasible(const RelaxedSolution& sol, std::int64_t file_count) {
  const int M = static_cast<int>(sol.x_star.size()) - 1;
  std::vector<std::int64_t> x(static_cast<std::size_t>(M) + 1, 0);
  double carry = 0.0;
  std::int64_t placed = 0;
  for (int m = sol.m_star; m <= M; ++m) {
    const double xs = sol.x_star[static_cast<std::size_t>(m)];
    auto xo = static_cast<std::int64_t>(std::floor(xs + carry * pow4(m)));
    xo = std::max<std::int64_t>(xo, 0);
    carry = xs * pow4(-m) + carry - static_cast<double>(xo) * pow4(-m);
    if (placed + xo >= file_count || m == M) {
      x[static_cast<std::size_t>(m)] = file_count - placed;
      break;
    }
    x[static_cast<std::size_t>(m)] = xo;
    placed += xo;
  }
  return PlacementVector(std::move(x));
}

PlacementVector rebalance(const PlacementVector& input, const LevelCapacities& caps,
                          const PopularityModel& pop, double cache_size) {
  const int M = input.levels();
  const auto L = static_cast<std::int64_t>(pop.file_count());
  input.validate(L, cache_size);

  std::vector<std::int64_t> cur(input.counts().begin(), input.counts().end());
  const std::int64_t cap = 10 * L * M;
  for (std::int64_t iter = 0;; ++iter) {
    require(iter < cap, ErrorKind::kInvariantViolation,
            "rebalance: iteration cap reached");
    // Lowest level holding more than one file, and the top active level.
    const int top = top_active(cur);
    int low = -1;
    for (int m = 0; m <= M; ++m) {
      if (cur[static_cast<std::size_t>(m)] > 1) {
        low = m;
        break;
      }
    }
    if (low < 0 || top - low <= 2) break;

    // Tentatively move one file from `low` up one level.
    std::vector<std::int64_t> next = cur;
    next[static_cast<std::size_t>(low)] -= 1;
    next[static_cast<std::size_t>(low) + 1] += 1;

    // Pull files down from the top level into low+1 while they fit.
    int next_top = top_active(next);
    while (next_top > low + 1 && next[static_cast<std::size_t>(next_top)] > 0) {
      const double load = load_of(next);
      const double delta = pow4(-(low + 1)) - pow4(-next_top);
      auto fits = [&](std::int64_t k) {
        return cache_fits(load + static_cast<double>(k) * delta, cache_size);
      };
      if (!fits(1)) break;
      const std::int64_t avail = next[static_cast<std::size_t>(next_top)];
      const double room = cache_size * (1.0 + kCacheSlack) - load;
      auto k = static_cast<std::int64_t>(
          std::min(static_cast<double>(avail), std::floor(room / delta)));
      k = std::clamp<std::int64_t>(k, 1, avail);
      while (k > 1 && !fits(k)) --k;
      while (k < avail && fits(k + 1)) ++k;
      next[static_cast<std::size_t>(next_top)] -= k;
      next[static_cast<std::size_t>(low) + 1] += k;
      next_top = top_active(next);
    }

    // Keep the move only if the balanced-load proxy strictly improves.
    const double r_next = proxy_rate(next, low, next_top, caps, pop);
    const double r_cur = proxy_rate(cur, low, top, caps, pop);
    if (!(r_next > r_cur)) break;
    cur = std::move(next);
  }
  return PlacementVector(std::move(cur));
}

ContentAssignment place_contents(const PlacementVector& x) {
  ContentAssignment out;
  for (int m = 0; m <= x.levels(); ++m) {
    out.file_level.insert(out.file_level.end(), static_cast<std::size_t>(x[m]), m);
  }
  out.per_node_load = x.cache_load();
  return out;
}

PlacementOutcome optimize_placement(const LevelCapacities& caps,
                                    const PopularityModel& pop, double cache_size) {
  const auto L = static_cast<std::int64_t>(pop.file_count());
  PlacementOutcome out;
  out.relaxed = solve_relaxed(caps, pop, cache_size);
  out.rounded = round_to_feasible(out.relaxed, L);
  out.placement = rebalance(out.rounded, caps, pop, cache_size);
  out.report = evaluate_throughput(out.placement, caps, pop, cache_size);
  out.report.guarantee_floor =
      out.relaxed.r_star /
      (caps.levels() * (1.0 + std::exp2(pop.skewness())));
  return out;
}

std::string placement_to_json(const PlacementVector& x, double cache_size,
                              const ThroughputReport& report) {
  nlohmann::ordered_json doc;
  doc["M"] = x.levels();
  doc["L"] = x.total();
  doc["L_C"] = cache_size;
  doc["x"] = std::vector<std::int64_t>(x.counts().begin(), x.counts().end());
  if (report.unbounded) {
    doc["rate_bits_per_s_hz"] = nullptr;
  } else {
    doc["rate_bits_per_s_hz"] = report.rate;
  }
  return doc.dump();
}

PlacementDocument placement_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kInvalidParameter, std::string("placement json: ") + e.what());
  }
  try {
    PlacementDocument out{doc.at("M").get<int>(), doc.at("L").get<std::int64_t>(),
                          doc.at("L_C").get<double>(),
                          PlacementVector(doc.at("x").get<std::vector<std::int64_t>>()),
                          std::nullopt};
    const auto& rate = doc.at("rate_bits_per_s_hz");
    if (!rate.is_null()) out.rate = rate.get<double>();
    require(out.x.levels() == out.levels, ErrorKind::kInvalidParameter,
            "placement json: x length does not match M");
    return out;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kInvalidParameter, std::string("placement json: ") + e.what());
  }
}

}  // namespace d2dcache
