#include "d2dcache/delivery.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <omp.h>

#include "d2dcache/error.hpp"

namespace d2dcache {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct Request {
  std::uint64_t node;
  std::size_t rank;  // 1-based
};

// Counter-based draw: request i depends only on (seed, i).
Request draw(std::uint64_t seed, std::uint64_t i, std::uint64_t node_mask,
             std::span<const double> prefix) {
  const std::uint64_t key = splitmix64(seed) ^ (i * 0xd1b54a32d192ed03ULL);
  const std::uint64_t a = splitmix64(key);
  const std::uint64_t b = splitmix64(key ^ 0x632be59bd9b4e019ULL);
  const double u = static_cast<double>(b >> 11) * 0x1.0p-53;
  const std::size_t L = prefix.size() - 1;
  const auto it = std::upper_bound(prefix.begin() + 1, prefix.end(), u);
  const auto rank =
      std::min<std::size_t>(static_cast<std::size_t>(it - prefix.begin()), L);
  return {a & node_mask, rank};
}

struct Tally {
  std::vector<std::uint64_t> by_source;  // size M+1
  std::vector<std::vector<std::uint64_t>> edges;

  Tally(int levels, const NetworkGrid& grid, bool histograms)
      : by_source(static_cast<std::size_t>(levels) + 1, 0) {
    if (histograms) {
      for (int m = 1; m <= levels; ++m) {
        edges.emplace_back(grid.clusters_at(m - 1), 0);
      }
    }
  }

  void add(const Tally& o) {
    for (std::size_t i = 0; i < by_source.size(); ++i) by_source[i] += o.by_source[i];
    for (std::size_t m = 0; m < edges.size(); ++m) {
      for (std::size_t j = 0; j < edges[m].size(); ++j) edges[m][j] += o.edges[m][j];
    }
  }
};

void validate(const SimConfig& cfg) {
  require(cfg.num_requests >= 1, ErrorKind::kInvalidParameter,
          "simulate: need at least one request");
  require(cfg.placement.levels() == cfg.grid.levels(), ErrorKind::kInvalidParameter,
          "simulate: placement and grid disagree on M");
  require(cfg.placement.total() == static_cast<std::int64_t>(cfg.pop.file_count()),
          ErrorKind::kInvalidParameter, "simulate: placement does not cover the library");
  require(!cfg.edge_histograms || cfg.grid.levels() <= 12, ErrorKind::kSizeGuard,
          "simulate: per-edge histograms limited to M <= 12");
}

std::vector<int> level_table(const PlacementVector& x) {
  return place_contents(x).file_level;
}

void record(Tally& t, const Request& r, const std::vector<int>& levels) {
  const int src = levels[r.rank - 1];
  ++t.by_source[static_cast<std::size_t>(src)];
  for (std::size_t m = 1; m <= t.edges.size() && static_cast<int>(m) <= src; ++m) {
    ++t.edges[m - 1][r.node >> (2 * (m - 1))];
  }
}

EdgeLoadReport build_report(const SimConfig& cfg, Tally&& t) {
  const int M = cfg.grid.levels();
  const auto n = static_cast<double>(cfg.num_requests);
  EdgeLoadReport rep;
  rep.num_requests = cfg.num_requests;
  rep.active_levels = cfg.placement.top_level();
  rep.local_hit_fraction = static_cast<double>(t.by_source[0]) / n;
  rep.analytic_fraction = analytic_edge_fraction(cfg.placement, cfg.pop);

  std::uint64_t crossing = 0;
  rep.traversals.assign(static_cast<std::size_t>(M), 0);
  for (int m = M; m >= 1; --m) {
    crossing += t.by_source[static_cast<std::size_t>(m)];
    rep.traversals[static_cast<std::size_t>(m) - 1] = crossing;
  }
  for (int m = 1; m <= M; ++m) {
    const double scale = std::ldexp(1.0, 2 * (m - 1));
    const auto i = static_cast<std::size_t>(m) - 1;
    rep.source_fraction.push_back(static_cast<double>(t.by_source[i + 1]) / n);
    rep.empirical_fraction.push_back(static_cast<double>(rep.traversals[i]) / n);
    rep.empirical_load.push_back(scale * rep.empirical_fraction.back());
    rep.analytic_load.push_back(scale * rep.analytic_fraction[i]);
  }
  rep.edge_counts = std::move(t.edges);
  return rep;
}

}  // namespace

int file_level(std::int64_t rank, const PlacementVector& x) {
  require(rank >= 1 && rank <= x.total(), ErrorKind::kDomain,
          "file_level: rank out of range");
  std::int64_t end = 0;
  for (int m = 0; m <= x.levels(); ++m) {
    end += x[m];
    if (rank <= end) return m;
  }
  return x.levels();
}

std::vector<double> analytic_edge_fraction(const PlacementVector& x,
                                           const PopularityModel& pop) {
  std::vector<double> out;
  const auto pmf = pop.pmf();
  for (int m = 1; m <= x.levels(); ++m) {
    const auto start = static_cast<std::size_t>(x.prefix(m));
    double sum = 0.0;
    for (std::size_t l = pmf.size(); l > start; --l) sum += pmf[l - 1];
    out.push_back(sum);
  }
  return out;
}

EdgeLoadReport simulate_serial(const SimConfig& cfg) {
  validate(cfg);
  const std::vector<int> levels = level_table(cfg.placement);
  const std::uint64_t mask = cfg.grid.node_count() - 1;
  Tally t(cfg.grid.levels(), cfg.grid, cfg.edge_histograms);
  for (std::uint64_t i = 0; i < cfg.num_requests; ++i) {
    record(t, draw(cfg.seed, i, mask, cfg.pop.prefix_mass()), levels);
  }
  return build_report(cfg, std::move(t));
}

EdgeLoadReport simulate(const SimConfig& cfg) {
  validate(cfg);
  const std::vector<int> levels = level_table(cfg.placement);
  const std::uint64_t mask = cfg.grid.node_count() - 1;
  Tally total(cfg.grid.levels(), cfg.grid, cfg.edge_histograms);
#pragma omp parallel
  {
    Tally local(cfg.grid.levels(), cfg.grid, cfg.edge_histograms);
#pragma omp for schedule(static) nowait
    for (std::uint64_t i = 0; i < cfg.num_requests; ++i) {
      record(local, draw(cfg.seed, i, mask, cfg.pop.prefix_mass()), levels);
    }
    // Integer sums commute, so merge order cannot change the result.
#pragma omp critical(d2dcache_simulate_merge)
    total.add(local);
  }
  return build_report(cfg, std::move(total));
}

std::vector<LevelCheck> capacity_check(const EdgeLoadReport& report,
                                       const LevelCapacities& caps, double rate) {
  std::vector<LevelCheck> out;
  const int mb = report.active_levels;
  for (int m = 1; m <= mb; ++m) {
    LevelCheck c;
    c.level = m;
    c.demand = report.analytic_fraction[static_cast<std::size_t>(m) - 1] * rate;
    c.capacity = caps.cbar(m) / mb;
    c.ok = c.demand <= c.capacity * (1.0 + 1e-9);
    out.push_back(c);
  }
  return out;
}

std::string edge_report_csv(const EdgeLoadReport& report) {
  std::string out = "level,empirical_load,analytic_load,relative_error\n";
  char buf[160];
  for (std::size_t i = 0; i < report.empirical_load.size(); ++i) {
    const double a = report.analytic_load[i];
    const double e = report.empirical_load[i];
    const double rel = a > 0.0 ? (e - a) / a : 0.0;
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g\n", i + 1, e, a, rel);
    out += buf;
  }
  return out;
}

}  // namespace d2dcache
