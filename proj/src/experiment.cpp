#include "d2dcache/experiment.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <variant>

#include <json.hpp>

#include "d2dcache/analysis.hpp"
#include "d2dcache/delivery.hpp"
#include "d2dcache/error.hpp"
#include "d2dcache/exact.hpp"

namespace d2dcache {

namespace {

using Cell = std::variant<std::monostate, double, std::int64_t, std::string>;

struct Table {
  std::string command;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

std::string schema_tag() { return std::string(kToolName) + " v" + kToolVersion; }

std::string cell_text(const Cell& c) {
  struct Visitor {
    std::string operator()(std::monostate) const { return ""; }
    std::string operator()(double v) const { return format_double(v); }
    std::string operator()(std::int64_t v) const { return std::to_string(v); }
    std::string operator()(const std::string& v) const { return v; }
  };
  return std::visit(Visitor{}, c);
}

nlohmann::ordered_json cell_json(const Cell& c) {
  struct Visitor {
    nlohmann::ordered_json operator()(std::monostate) const { return nullptr; }
    nlohmann::ordered_json operator()(double v) const { return v; }
    nlohmann::ordered_json operator()(std::int64_t v) const { return v; }
    nlohmann::ordered_json operator()(const std::string& v) const { return v; }
  };
  return std::visit(Visitor{}, c);
}

std::string render(const Table& t, OutputFormat format) {
  if (format == OutputFormat::kJson) {
    nlohmann::ordered_json doc;
    doc["schema"] = schema_tag();
    doc["command"] = t.command;
    doc["rows"] = nlohmann::ordered_json::array();
    for (const auto& row : t.rows) {
      nlohmann::ordered_json obj;
      for (std::size_t i = 0; i < t.columns.size(); ++i) obj[t.columns[i]] = cell_json(row[i]);
      doc["rows"].push_back(std::move(obj));
    }
    return doc.dump(2) + "\n";
  }
  std::string out = "# " + schema_tag() + "\n";
  for (std::size_t i = 0; i < t.columns.size(); ++i) {
    out += (i ? "," : "") + t.columns[i];
  }
  out += "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + cell_text(row[i]);
    out += "\n";
  }
  return out;
}

std::string join_counts(const PlacementVector& x) {
  std::string s;
  for (int m = 0; m <= x.levels(); ++m) s += (m ? " " : "") + std::to_string(x[m]);
  return s;
}

Cell optional_cell(const std::optional<double>& v, double scale) {
  if (!v) return std::monostate{};
  return *v * scale;
}

Cell rate_cell(const ThroughputReport& r, double scale) {
  if (r.unbounded) return std::string("unbounded");
  return r.rate * scale;
}

ExperimentConfig with_axis(ExperimentConfig cfg, const std::string& axis, double v) {
  if (axis == "beta2") {
    cfg.beta2 = v;
  } else if (axis == "tau") {
    cfg.tau = v;
  } else if (axis == "alpha") {
    cfg.alpha = v;
  } else {
    fail(ErrorKind::kInvalidParameter, "sweep: axis must be beta2, tau or alpha");
  }
  return cfg;
}

SweepRange default_range(const std::string& axis) {
  if (axis == "tau") return {0.0, 2.0, 0.1};
  if (axis == "alpha") return {2.5, 5.0, 0.25};
  return {0.0, 0.85, 0.05};
}

// Runs fn(i) for every i in parallel, rethrowing the lowest-index failure.
template <class Fn>
void parallel_map(std::size_t count, Fn fn) {
  std::vector<std::exception_ptr> errors(count);
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < count; ++i) {
    try {
      fn(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

std::vector<double> SweepRange::points() const {
  require(step > 0.0 && std::isfinite(step), ErrorKind::kInvalidParameter,
          "range: step must be positive");
  require(hi >= lo, ErrorKind::kInvalidParameter, "range: hi must be >= lo");
  const double span = (hi - lo) / step;
  require(span <= 1e6, ErrorKind::kInvalidParameter, "range: too many points");
  const auto count = static_cast<std::size_t>(std::floor(span + 1e-9)) + 1;
  std::vector<double> out;
  out.reserve(count);
  char buf[32];
  for (std::size_t i = 0; i < count; ++i) {
    // Snap to 12 significant digits so 0:1:0.1 yields 0.3, not 0.30000000000000004.
    std::snprintf(buf, sizeof buf, "%.12g", lo + static_cast<double>(i) * step);
    out.push_back(std::strtod(buf, nullptr));
  }
  return out;
}

SweepRange parse_range(const std::string& text) {
  double vals[3];
  const char* p = text.data();
  const char* end = text.data() + text.size();
  for (int i = 0; i < 3; ++i) {
    auto [next, ec] = std::from_chars(p, end, vals[i]);
    require(ec == std::errc() && next != p, ErrorKind::kInvalidParameter,
            "range: expected lo:hi:step, got '" + text + "'");
    p = next;
    if (i < 2) {
      require(p != end && *p == ':', ErrorKind::kInvalidParameter,
              "range: expected lo:hi:step, got '" + text + "'");
      ++p;
    }
  }
  require(p == end, ErrorKind::kInvalidParameter,
          "range: trailing characters in '" + text + "'");
  SweepRange r{vals[0], vals[1], vals[2]};
  r.points();
  return r;
}

std::int64_t ExperimentConfig::file_count() const {
  if (file_count_override) return *file_count_override;
  const double v = a1 * std::exp2(2.0 * levels * beta1);
  require(std::isfinite(v) && v < 9e15, ErrorKind::kInvalidParameter,
          "config: library size overflows");
  return static_cast<std::int64_t>(std::floor(v));
}

double ExperimentConfig::cache_size() const {
  if (cache_size_override) return *cache_size_override;
  return a2 * std::exp2(2.0 * levels * beta2);
}

Instance make_instance(const ExperimentConfig& cfg) {
  NetworkGrid grid(cfg.levels, cfg.kappa, cfg.alpha);
  const std::int64_t L = cfg.file_count();
  require(L >= 1, ErrorKind::kInvalidParameter, "config: library must hold >= 1 file");
  require(L <= 100'000'000, ErrorKind::kSizeGuard, "config: library larger than 1e8");
  const double lc = cfg.cache_size();
  require(lc > 0.0 && std::isfinite(lc), ErrorKind::kInvalidParameter,
          "config: cache size must be positive");
  require(lc < static_cast<double>(L), ErrorKind::kInvalidParameter,
          "config: cache size must be smaller than the library");
  require(lc >= static_cast<double>(L) / static_cast<double>(grid.node_count()) *
                    (1.0 - kCacheSlack),
          ErrorKind::kInfeasible,
          "config: infeasible, n L_C < L so the network cannot hold every file");
  return {grid, PhyParams::from_alpha(cfg.alpha, cfg.rc_fraction),
          PopularityModel::zipf(static_cast<std::size_t>(L), cfg.tau), lc};
}

PlacementOutcome place_instance(const Instance& inst, ModePolicy policy) {
  const LevelCapacities caps = edge_capacities(inst.grid, inst.params, policy);
  return optimize_placement(caps, inst.pop, inst.cache_size);
}

std::string run_place(const ExperimentConfig& cfg) {
  const Instance inst = make_instance(cfg);
  const LevelCapacities caps = edge_capacities(inst.grid, inst.params);
  const PlacementOutcome out = optimize_placement(caps, inst.pop, inst.cache_size);
  const BoundsResult b =
      throughput_bounds(inst.grid, inst.params, cfg.tau,
                        static_cast<double>(inst.pop.file_count()), inst.cache_size,
                        BoundSide::kProposed);
  const double bw = cfg.bandwidth_hz;

  if (cfg.format == OutputFormat::kJson) {
    nlohmann::ordered_json doc;
    doc["schema"] = schema_tag();
    doc["command"] = "place";
    doc["placement"] = nlohmann::ordered_json::parse(
        placement_to_json(out.placement, inst.cache_size, out.report));
    nlohmann::ordered_json rep;
    rep["bandwidth_hz"] = bw;
    rep["rate"] = out.report.unbounded ? nlohmann::ordered_json(nullptr)
                                       : nlohmann::ordered_json(out.report.rate * bw);
    rep["binding_level"] = out.report.binding_level;
    rep["active_levels"] = out.report.active_levels;
    rep["relaxed_rate"] = out.relaxed.r_star * bw;
    rep["m_star"] = out.relaxed.m_star;
    rep["guarantee_floor"] = *out.report.guarantee_floor * bw;
    rep["R_L"] = b.r_lower * bw;
    rep["R_L_floor"] = b.r_lower_floor * bw;
    rep["R_U"] = b.r_upper ? nlohmann::ordered_json(*b.r_upper * bw)
                           : nlohmann::ordered_json(nullptr);
    rep["lower_case"] = b.lower_case;
    rep["upper_case"] = b.upper_case;
    doc["report"] = std::move(rep);
    return doc.dump(2) + "\n";
  }

  Table t{"place", {"field", "value"}, {}};
  auto add = [&](const char* k, Cell v) { t.rows.push_back({std::string(k), std::move(v)}); };
  add("M", std::int64_t{inst.grid.levels()});
  add("L", static_cast<std::int64_t>(inst.pop.file_count()));
  add("L_C", inst.cache_size);
  add("x", join_counts(out.placement));
  add("bandwidth_hz", bw);
  add("rate", rate_cell(out.report, bw));
  add("binding_level", std::int64_t{out.report.binding_level});
  add("active_levels", std::int64_t{out.report.active_levels});
  add("relaxed_rate", out.relaxed.r_star * bw);
  add("m_star", std::int64_t{out.relaxed.m_star});
  add("guarantee_floor", *out.report.guarantee_floor * bw);
  add("R_L", b.r_lower * bw);
  add("R_L_floor", b.r_lower_floor * bw);
  add("R_U", optional_cell(b.r_upper, bw));
  add("lower_case", b.lower_case);
  add("upper_case", b.upper_case);
  return render(t, OutputFormat::kCsv);
}

std::string run_sweep(const ExperimentConfig& cfg) {
  const SweepRange range = cfg.range.value_or(default_range(cfg.axis));
  const std::vector<double> xs = range.points();
  const double bw = cfg.bandwidth_hz;
  Table t{"sweep",
          {"axis_value", "R_proposed", "R_multihop_baseline", "R_nocache", "R_L_floor",
           "R_U"},
          std::vector<std::vector<Cell>>(xs.size())};
  parallel_map(xs.size(), [&](std::size_t i) {
    const ExperimentConfig point = with_axis(cfg, cfg.axis, xs[i]);
    const Instance inst = make_instance(point);
    const PlacementOutcome hc = place_instance(inst, ModePolicy::kBest);
    const PlacementOutcome mh = place_instance(inst, ModePolicy::kMultihopOnly);
    const double nocache =
        cluster_rate(inst.grid.node_count(), inst.grid, inst.params).rate;
    const BoundsResult b = throughput_bounds(
        inst.grid, inst.params, point.tau, static_cast<double>(inst.pop.file_count()),
        inst.cache_size, BoundSide::kProposed);
    t.rows[i] = {xs[i],
                 rate_cell(hc.report, bw),
                 rate_cell(mh.report, bw),
                 nocache * bw,
                 b.r_lower_floor * bw,
                 optional_cell(b.r_upper, bw)};
  });
  return render(t, cfg.format);
}

std::string run_scaling(const ExperimentConfig& cfg) {
  const SweepRange range = cfg.range.value_or(SweepRange{0.0, 3.0, 0.05});
  const std::vector<double> taus = range.points();
  constexpr int kFirstM = 8;
  constexpr int kLastM = 12;

  Table t{"scaling",
          {"tau", "eta_proposed", "eta_baseline", "eta_converse", "eps_alpha", "marker"},
          std::vector<std::vector<Cell>>(taus.size())};
  for (int m = kFirstM; m <= kLastM; ++m) t.columns.push_back("R_L_M" + std::to_string(m));

  const auto prop = critical_skewness(cfg.alpha, BoundSide::kProposed);
  const auto base = critical_skewness(cfg.alpha, BoundSide::kBaseline);
  const double eps = epsilon_alpha(cfg.alpha, cfg.levels);

  parallel_map(taus.size(), [&](std::size_t i) {
    const double tau = taus[i];
    const ScalingPoint<double> p{cfg.beta1, cfg.beta2, cfg.a1, cfg.a2, tau, cfg.alpha};
    std::string marker;
    auto mark = [&](double at, const char* name) {
      if (std::abs(tau - at) <= 1e-9) marker += (marker.empty() ? "" : "|") + std::string(name);
    };
    mark(prop.tau_a, "tau_a");
    mark(prop.tau_b, "tau_b_proposed");
    mark(base.tau_b, "tau_b_baseline");

    std::vector<Cell> row{tau,
                          achievable_exponent(p).exponent,
                          baseline_exponent(p).exponent,
                          converse_exponent(p).exponent,
                          eps,
                          marker};
    // Extended network (A(n) = n), library and cache growing with n.
    for (int m = kFirstM; m <= kLastM; ++m) {
      ExperimentConfig point = cfg;
      point.levels = m;
      point.kappa = 1.0;
      point.file_count_override.reset();
      point.cache_size_override.reset();
      const NetworkGrid grid(m, 1.0, cfg.alpha);
      const PhyParams params = PhyParams::from_alpha(cfg.alpha, cfg.rc_fraction);
      const double L = static_cast<double>(point.file_count());
      const double lc = point.cache_size();
      if (L < 1.0 || !(lc < L)) {
        row.emplace_back(std::monostate{});
        continue;
      }
      row.emplace_back(
          relaxed_lower_bound(tau, L, lc, m,
                              lower_coefficients(grid, params, BoundSide::kProposed)));
    }
    t.rows[i] = std::move(row);
  });
  return render(t, cfg.format);
}

std::string run_oracle(const ExperimentConfig& cfg) {
  const Instance inst = make_instance(cfg);
  const LevelCapacities caps = edge_capacities(inst.grid, inst.params);
  const PlacementOutcome alg = optimize_placement(caps, inst.pop, inst.cache_size);
  const ExactSolution exact = solve_exact(caps, inst.pop, inst.cache_size);
  const ExactSolution brute = brute_force(caps, inst.pop, inst.cache_size);
  const double factor =
      1.0 / (inst.grid.levels() * (1.0 + std::exp2(inst.pop.skewness())));
  const double bw = cfg.bandwidth_hz;

  Table t{"oracle", {"method", "rate", "x"}, {}};
  t.rows.push_back({std::string("optimizer"), rate_cell(alg.report, bw),
                    join_counts(alg.placement)});
  t.rows.push_back({std::string("exact"), exact.rate() * bw, join_counts(exact.x)});
  t.rows.push_back({std::string("brute_force"), brute.rate() * bw, join_counts(brute.x)});
  t.rows.push_back({std::string("floor"), brute.rate() * factor * bw, std::string()});
  const std::string text = render(t, cfg.format);

  require(exact.rate() == brute.rate(), ErrorKind::kInvariantViolation,
          "oracle: exact and brute-force optima differ\n" + text);
  require(alg.report.rate <= brute.rate(), ErrorKind::kInvariantViolation,
          "oracle: algorithm beats the exhaustive optimum\n" + text);
  require(alg.report.rate >= brute.rate() * factor, ErrorKind::kInvariantViolation,
          "oracle: algorithm below its guarantee floor\n" + text);
  return text;
}

std::string run_simulate(const ExperimentConfig& cfg) {
  const Instance inst = make_instance(cfg);
  const PlacementOutcome out = place_instance(inst);
  const SimConfig sim{inst.grid, out.placement, inst.pop, cfg.requests, cfg.seed, false};
  const EdgeLoadReport rep = simulate(sim);

  Table t{"simulate", {"level", "empirical_load", "analytic_load", "relative_error"}, {}};
  for (std::size_t i = 0; i < rep.empirical_load.size(); ++i) {
    const double a = rep.analytic_load[i];
    const double e = rep.empirical_load[i];
    t.rows.push_back({static_cast<std::int64_t>(i + 1), e, a,
                      a > 0.0 ? Cell((e - a) / a) : Cell(0.0)});
  }
  return render(t, cfg.format);
}

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) return "nan";
  return std::string(buf, end);
}

}  // namespace d2dcache
