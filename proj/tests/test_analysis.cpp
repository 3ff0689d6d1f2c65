#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "d2dcache/analysis.hpp"
#include "d2dcache/experiment.hpp"
#include "exponent_table.hpp"

using namespace d2dcache;
using d2dtest::Q;

namespace {

double to_double(Q q) { return boost::rational_cast<double>(q); }

ScalingPoint<double> as_double(const ScalingPoint<Q>& p) {
  return {to_double(p.beta1), to_double(p.beta2), to_double(p.a1),
          to_double(p.a2),    to_double(p.tau),   to_double(p.alpha)};
}

}  // namespace

TEST_CASE("lower bound branches") {
  const BoundCoefficients k{2.0, 0.3};
  std::string label;
  const double L = 1000.0;
  const double lc = 50.0;
  const double uniform = relaxed_lower_bound(0.0, L, lc, 9, k, &label);
  CHECK(label == "tau<1");
  const double g = k.gamma;
  const double a = std::pow((std::pow(4.0, g + 1) - 1) / (std::pow(4.0, g + 2) - 16) * lc / L, g);
  const double b = 3.0 / (1.0 - lc / L) / (std::pow(4.0, g + 1) - 1);
  CHECK(uniform == doctest::Approx(k.c * std::min(a, b)).epsilon(1e-14));

  const double at_edge = relaxed_lower_bound(1.3, L, lc, 9, k, &label);
  CHECK(label == "tau=gamma+1");
  CHECK(at_edge == doctest::Approx(std::pow(3.0 * std::log(L) / std::log(4.0) + 4.0, -g) *
                                   (k.c / 1.3) * std::pow(lc, 0.3))
                       .epsilon(1e-14));

  relaxed_lower_bound(1.0, L, lc, 9, k, &label);
  CHECK(label == "tau=1");
  relaxed_lower_bound(1.1, L, lc, 9, k, &label);
  CHECK(label == "1<tau<gamma+1");
  relaxed_lower_bound(2.0, L, lc, 9, k, &label);
  CHECK(label == "tau>gamma+1");
  CHECK(relaxed_upper_bound(2.0, L, lc, 9, k, &label).has_value());
  CHECK(label == "tau>=gamma+1");
  CHECK_THROWS_AS(relaxed_lower_bound(0.5, L, L, 9, k), Error);
}

TEST_CASE("upper bound is inapplicable when its denominator is not positive") {
  const BoundCoefficients k{50.0, 0.5};
  std::string label;
  const auto r = relaxed_upper_bound(1.01, 4.0, 2.0, 1, k, &label);
  CHECK(label == "1<tau<gamma+1");
  CHECK_FALSE(r.has_value());
  CHECK(relaxed_upper_bound(1.01, 1e9, 2.0, 9, BoundCoefficients{0.1, 0.5}).has_value());
}

TEST_CASE("bounds bracket the optimizer on a reduced grid") {
  for (double tau : {0.0, 1.0, 2.0}) {
    for (double beta2 : {0.2, 0.5}) {
      ExperimentConfig cfg;
      cfg.levels = 7;
      cfg.tau = tau;
      cfg.beta2 = beta2;
      const Instance inst = make_instance(cfg);
      const auto out = place_instance(inst);
      const auto b = throughput_bounds(inst.grid, inst.params, tau,
                                       static_cast<double>(inst.pop.file_count()),
                                       inst.cache_size, BoundSide::kProposed);
      CHECK(b.guarantee_factor > 0.0);
      CHECK(b.guarantee_factor <= 1.0);
      CHECK(b.r_lower_floor <= out.report.rate);
      if (b.r_upper) CHECK(out.report.rate <= *b.r_upper);
    }
  }
}

TEST_CASE("baseline coefficients use gamma 1/2") {
  const NetworkGrid grid(9, 0.0, 4.0);
  const auto p = PhyParams::from_alpha(4.0);
  const auto lo = lower_coefficients(grid, p, BoundSide::kBaseline);
  const auto hi = upper_coefficients(grid, p, BoundSide::kBaseline);
  CHECK(lo.gamma == 0.5);
  CHECK(hi.gamma == 0.5);
  CHECK(lo.c == hi.c);
  const double tr = p.reuse_multihop;
  const double pi = interference_power(grid.node_count(), p.snr_multihop, p.reuse_multihop, 4.0);
  CHECK(lo.c == doctest::Approx(4.0 / (3.0 * tr * tr) * std::log2(1.0 + p.snr_multihop / (1.0 + pi))));
}

TEST_CASE("tabulated exponents, exact") {
  for (const auto& row : d2dtest::exponent_table()) {
    const auto p = d2dtest::point_of(row);
    const auto ach = achievable_exponent(p);
    const auto base = baseline_exponent(p);
    const auto conv = converse_exponent(p);
    CHECK(ach.exponent == row.achievable);
    CHECK(base.exponent == row.baseline);
    CHECK(conv.exponent == row.achievable);
    CHECK(ach.epsilon_sign == -1);
    CHECK(conv.epsilon_sign == +1);

    // The double instantiation agrees to rounding.
    const auto pd = as_double(p);
    CHECK(achievable_exponent(pd).exponent == doctest::Approx(to_double(row.achievable)).epsilon(1e-12));
    CHECK(baseline_exponent(pd).exponent == doctest::Approx(to_double(row.baseline)).epsilon(1e-12));
  }
}

TEST_CASE("regime classification and domain errors") {
  using P = ScalingPoint<Q>;
  CHECK(classify_regime(P{Q(1, 2), Q(1, 2), Q(2), Q(1), Q(1), Q(4)}) == Regime::kI);
  CHECK(classify_regime(P{Q(9, 10), Q(3, 10), Q(1), Q(1), Q(1), Q(4)}) == Regime::kII);
  CHECK_THROWS_AS(classify_regime(P{Q(1, 2), Q(1, 2), Q(1), Q(2), Q(1), Q(4)}), Error);
  CHECK_THROWS_AS(classify_regime(P{Q(1, 2), Q(3, 5), Q(1), Q(1), Q(1), Q(4)}), Error);
  CHECK_THROWS_AS(classify_regime(P{Q(3, 2), Q(1, 5), Q(1), Q(1), Q(1), Q(4)}), Error);
  CHECK_THROWS_AS(classify_regime(P{Q(1), Q(0), Q(2), Q(1), Q(1), Q(4)}), Error);
  try {
    achievable_exponent(P{Q(1, 2), Q(-1, 5), Q(1), Q(1), Q(1), Q(4)});
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kDomain);
  }
}

TEST_CASE("exponents are continuous at the critical skewness points") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int t = 0; t < 500; ++t) {
    const double beta1 = 0.1 + 0.9 * unit(rng);
    const double beta2 = beta1 * unit(rng);
    const double alpha = 2.1 + 3.0 * unit(rng);
    for (BoundSide side : {BoundSide::kProposed, BoundSide::kBaseline}) {
      const auto crit = critical_skewness(alpha, side);
      for (double at : {crit.tau_a, crit.tau_b}) {
        auto eval = [&](double tau) {
          const ScalingPoint<double> p{beta1, beta2, 1.0, 1.0, tau, alpha};
          return side == BoundSide::kProposed ? achievable_exponent(p).exponent
                                              : baseline_exponent(p).exponent;
        };
        CHECK(eval(at - 1e-9) == doctest::Approx(eval(at + 1e-9)).epsilon(1e-7));
      }
    }
  }
}

TEST_CASE("proposed scheme dominates the baseline") {
  std::mt19937_64 rng(6);
  for (int t = 0; t < 2000; ++t) {
    const Q beta1(1 + static_cast<long long>(rng() % 20), 20);
    const Q beta2 = beta1 * Q(static_cast<long long>(rng() % 21), 20);
    const Q tau(static_cast<long long>(rng() % 60), 20);
    const Q alpha(41 + static_cast<long long>(rng() % 60), 20);
    if (beta1 == beta2) continue;
    const ScalingPoint<Q> p{beta1, beta2, Q(1), Q(1), tau, alpha};
    const Q ach = achievable_exponent(p).exponent;
    const Q base = baseline_exponent(p).exponent;
    CHECK(ach >= base);
    if (alpha >= Q(3)) CHECK(ach == base);
    if (alpha < Q(3) && tau < Q(3, 2)) CHECK(ach > base);
  }
}

TEST_CASE("critical skewness") {
  const auto p = critical_skewness(Q(5, 2), BoundSide::kProposed);
  CHECK(p.tau_a == Q(1));
  CHECK(p.tau_b == Q(5, 4));
  CHECK(critical_skewness(Q(4), BoundSide::kProposed).tau_b == Q(3, 2));
  for (Q alpha : {Q(21, 10), Q(5, 2), Q(3), Q(7)}) {
    const auto b = critical_skewness(alpha, BoundSide::kBaseline);
    CHECK(b.tau_a == Q(1));
    CHECK(b.tau_b == Q(3, 2));
  }
  CHECK_THROWS_AS(critical_skewness(2.0, BoundSide::kProposed), Error);
}

TEST_CASE("finite-M slope of the lower bound tracks the exponent") {
  for (double alpha : {2.5, 4.0}) {
    for (double tau : {0.0, 0.5}) {
      ExperimentConfig cfg;
      cfg.alpha = alpha;
      const ScalingPoint<double> p{cfg.beta1, cfg.beta2, 1.0, 1.0, tau, alpha};
      const double eta = achievable_exponent(p).exponent;
      double worst = 0.0;
      for (int m = 8; m < 12; ++m) {
        auto rl = [&](int levels) {
          ExperimentConfig c = cfg;
          c.levels = levels;
          const NetworkGrid grid(levels, 1.0, alpha);
          const auto params = PhyParams::from_alpha(alpha);
          return relaxed_lower_bound(tau, static_cast<double>(c.file_count()), c.cache_size(),
                                     levels, lower_coefficients(grid, params, BoundSide::kProposed));
        };
        const double slope = std::log(rl(m + 1) / rl(m)) / std::log(4.0);
        const double s = std::sqrt(m * std::log(4.0));
        worst = std::max(worst, std::abs(slope - eta) * (s + 1.0));
        CHECK(std::abs(slope - eta) <= 1.0 / (s + 1.0));
      }
      MESSAGE("alpha " << alpha << " tau " << tau << ": |slope - eta| (s_M + 1) <= " << worst);
    }
  }
}
