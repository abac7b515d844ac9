#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "forbearance/econ_model.hpp"

using namespace forbearance;

namespace {

// mpmath, 30 digits: 1.2 ** 0.6
constexpr double kGrowthAtBase = 1.115600621729827525;

DemandSpec demand(double a, double b, double g) { return {a, b, g}; }

}  // namespace

TEST_CASE("growth_rate at the reference parameters") {
  CHECK(growth_rate({1.0, 1.2, 0.4}) == doctest::Approx(kGrowthAtBase).epsilon(1e-15));
  CHECK(std::abs(growth_rate({1.0, 1.2, 0.4}) - 1.11560) < 1e-5);
  CHECK(growth_rate({7.0, 3.1, 1.0}) == 7.0);
  CHECK(growth_rate({2.0, 1.0, 0.3}) == 2.0);
}

TEST_CASE("growth_rate rejects bad inputs") {
  CHECK_THROWS_AS(growth_rate({1.0, 1.2, 1.5}), std::invalid_argument);
  CHECK_THROWS_AS(growth_rate({-1.0, 1.2, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(growth_rate({1.0, std::nan(""), 0.5}), std::domain_error);
  CHECK_THROWS_AS(growth_rate({std::numeric_limits<double>::infinity(), 1.0, 0.5}),
                  std::domain_error);
}

TEST_CASE("growth_rate monotonicity in phi depends on sigma") {
  for (double sigma : {0.2, 0.7, 1.0, 1.3, 4.0}) {
    double prev = growth_rate({2.0, sigma, 0.0});
    for (int k = 1; k <= 50; ++k) {
      const double cur = growth_rate({2.0, sigma, k / 50.0});
      if (sigma < 1.0) CHECK(cur >= prev);
      if (sigma > 1.0) CHECK(cur <= prev);
      if (sigma == 1.0) CHECK(cur == prev);
      prev = cur;
    }
  }
}

TEST_CASE("growth_rate increases in sigma for phi < 1, sigma > 1") {
  double prev = growth_rate({1.0, 1.0, 0.3});
  for (double s = 1.1; s < 5.0; s += 0.1) {
    const double cur = growth_rate({1.0, s, 0.3});
    CHECK(cur > prev);
    prev = cur;
  }
}

TEST_CASE("stage_profit") {
  const DemandSpec d = demand(5, 2, 1);
  SUBCASE("zero margin leaves x + y") {
    const FirmState f{1.0, 1.1156, 2.0, 2.0};
    CHECK(stage_profit(f, d, 2.0, {}) == doctest::Approx(2.1156));
  }
  SUBCASE("hand example") {
    const FirmState f{1.0, 1.1156, 1.0, 2.0};
    CHECK(d.quantity(2.0, 2.0) == 3.0);
    CHECK(stage_profit(f, d, 2.0, {}) == doctest::Approx(5.1156).epsilon(1e-14));
  }
  SUBCASE("quantity clamps at zero") {
    const FirmState f{1.0, 1.1156, 1.0, 10.0};
    CHECK(d.quantity(10.0, 2.0) == 0.0);
    MarketEnv env;
    env.residual = 0.25;
    CHECK(stage_profit(f, d, 2.0, env) == doctest::Approx(1.0 + 1.1156 + 0.25));
  }
  SUBCASE("non-finite price") {
    const FirmState f{1.0, 1.0, 1.0, std::nan("")};
    CHECK_THROWS_AS(stage_profit(f, d, 2.0, {}), std::domain_error);
    const FirmState g{1.0, 1.0, 1.0, 2.0};
    CHECK_THROWS_AS(stage_profit(g, d, std::numeric_limits<double>::infinity(), {}),
                    std::domain_error);
  }
}

TEST_CASE("stage_profit is concave in own price where q > 0") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.1, 5.0);
  for (int trial = 0; trial < 200; ++trial) {
    const DemandSpec d = demand(5.0 + u(rng), 1.0 + u(rng), 0.5 * u(rng) / 5.0);
    const double rival = u(rng);
    const double c = 0.5 * u(rng);
    const double h = 0.01;
    for (double p = c; p + 2 * h < (d.intercept + d.cross_slope * rival) / d.own_slope;
         p += 0.1) {
      const auto pi = [&](double price) {
        return stage_profit({1.0, 1.0, c, price}, d, rival, {});
      };
      CHECK(pi(p) - 2.0 * pi(p + h) + pi(p + 2 * h) <= 1e-12);
    }
  }
}

TEST_CASE("constraint_satisfied") {
  MarketEnv env;
  const std::vector<double> ten{10.0};
  const std::vector<double> two_tens{10.0, 10.0};
  CHECK(constraint_satisfied(0.0, env, ten));
  CHECK(constraint_satisfied(10.0, env, two_tens));
  CHECK_FALSE(constraint_satisfied(10.1, env, two_tens));
  env.constraint_lambda = 0.5;
  CHECK(constraint_satisfied(5.0, env, two_tens));
  CHECK_FALSE(constraint_satisfied(5.0001, env, two_tens));
  CHECK_THROWS_AS(constraint_satisfied(1.0, env, std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("foc_residual") {
  const DemandSpec d = demand(5, 2, 1);
  const FirmState f{1.0, 1.0, 1.0, 2.0};
  CHECK(foc_residual(f, d, 2.0, {1.0, -2.0, 4.0}) == 4.0);
  CHECK(foc_residual(f, d, 2.0, {1.0, -2.0, 0.0}) == 0.0);
  CHECK(foc_residual(f, d, 2.0, {3.0, -2.0, 4.0}) == 0.0);
  CHECK_THROWS_AS(foc_residual(f, d, 2.0, {std::nan(""), -2.0, 4.0}), std::domain_error);
}

TEST_CASE("marginal-profit composite vanishes at the best response") {
  const DemandSpec d = demand(5, 2, 1);
  FirmState f{1.0, 1.0, 1.0, 2.25};
  CHECK(foc_residual(f, d, 2.0, marginal_profit_composite(f, d, 2.0)) ==
        doctest::Approx(0.0).epsilon(1e-12));
  f.price = 2.0;
  // Central difference of profit in own price.
  const double h = 1e-5;
  FirmState lo = f, hi = f;
  lo.price -= h;
  hi.price += h;
  const double slope = (stage_profit(hi, d, 2.0, {}) - stage_profit(lo, d, 2.0, {})) / (2 * h);
  CHECK(foc_residual(f, d, 2.0, marginal_profit_composite(f, d, 2.0)) ==
        doctest::Approx(slope).epsilon(1e-8));
}

TEST_CASE("growth-constraint composite uses x + y") {
  const DemandSpec d = demand(5, 2, 1);
  const FirmState f{1.5, 0.5, 1.0, 2.0};
  const FocComposite c = growth_constraint_composite(f, d);
  CHECK(c.demand_term == 2.0);
  CHECK(c.elasticity_term == -2.0);
  CHECK(c.endowment_sum == 2.0);
  CHECK(foc_residual(f, d, 2.0, c) == 0.0);
}

TEST_CASE("best_response_price examples") {
  const DemandSpec d = demand(5, 2, 1);
  const FirmState f{0.0, 0.0, 1.0, 0.0};
  const double p = best_response_price(f, d, 2.0, {0.0, 10.0});
  CHECK(std::abs(p - 2.25) < 1e-6);

  // Grid search at step 1e-5 over [1, 4].
  double best_p = 0.0, best_pi = -1e300;
  for (int k = 0; k <= 300000; ++k) {
    const double price = 1.0 + k * 1e-5;
    const double pi = stage_profit({0.0, 0.0, 1.0, price}, d, 2.0, {});
    if (pi > best_pi) {
      best_pi = pi;
      best_p = price;
    }
  }
  CHECK(std::abs(p - best_p) <= 1e-5);

  const double c = 3.0, b = 2.0;
  const DemandSpec d2 = demand(2 * b * c, b, 0.0);
  CHECK(std::abs(best_response_price({0, 0, c, 0}, d2, 7.0, {0.0, 20.0}) - 1.5 * c) < 1e-6);
}

TEST_CASE("best_response_price on a margin-only segment returns the better end") {
  const DemandSpec d = demand(5, 2, 1);
  const FirmState f{0.0, 0.0, 1.0, 0.0};
  // Profit increases on [1, 1.1]: optimum 2.25 is outside.
  CHECK(std::abs(best_response_price(f, d, 2.0, {1.0, 1.1}) - 1.1) < 1e-8);
  // And decreases on [3, 3.2].
  CHECK(std::abs(best_response_price(f, d, 2.0, {3.0, 3.2}) - 3.0) < 1e-8);
}

TEST_CASE("best_response_price matches the quadratic vertex on random draws") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int checked = 0;
  while (checked < 100) {
    const double b = 0.5 + 3.0 * u(rng);
    const double g = b * 0.9 * u(rng);
    const double a = 2.0 + 10.0 * u(rng);
    const double c = 2.0 * u(rng);
    const double pj = 5.0 * u(rng);
    const double vertex = (a + g * pj + b * c) / (2.0 * b);
    const DemandSpec d = demand(a, b, g);
    if (d.quantity(vertex, pj) <= 0.0 || vertex <= c) continue;
    const double p = best_response_price({0, 0, c, 0}, d, pj, {0.0, 2.0 * vertex + 10.0});
    CHECK(std::abs(p - vertex) < 1e-6);
    ++checked;
  }
}

TEST_CASE("best_response_price rejects bad bounds") {
  const DemandSpec d = demand(5, 2, 1);
  CHECK_THROWS_AS(best_response_price({0, 0, 1, 0}, d, 2.0, {-1.0, 3.0}), std::invalid_argument);
  CHECK_THROWS_AS(best_response_price({0, 0, 1, 0}, d, 2.0, {3.0, 3.0}), std::invalid_argument);
  CHECK_THROWS_AS(best_response_price({0, 0, 1, 0}, d, 2.0, {4.0, 3.0}), std::invalid_argument);
}

TEST_CASE("aggregate_demand") {
  MarketEnv env;
  env.market_scale = 100.0;
  CHECK(aggregate_demand(env, 2.0) == 200.0);
  env.discount_rate = 1.0;
  CHECK(aggregate_demand(env, 2.0) == 100.0);
  CHECK(aggregate_demand(env, 0.0) == 0.0);
  // Linear in revenue and in K.
  CHECK(aggregate_demand(env, 6.0) == doctest::Approx(3.0 * aggregate_demand(env, 2.0)));
  MarketEnv env2 = env;
  env2.market_scale = 250.0;
  CHECK(aggregate_demand(env2, 2.0) == doctest::Approx(2.5 * aggregate_demand(env, 2.0)));
}

TEST_CASE("cobb_douglas_output") {
  CHECK(cobb_douglas_output({3.0, 0.3, 0.7, 1.0, 1.0}) == doctest::Approx(3.0));
  CHECK(cobb_douglas_output({2.0, 1.0, 0.0, 5.0, 9.0}) == doctest::Approx(10.0));
  CHECK(cobb_douglas_output({1.0, 0.5, 0.5, 4.0, 9.0}) == doctest::Approx(6.0).epsilon(1e-15));
  CHECK_THROWS_AS(cobb_douglas_output({1.0, 0.5, 0.6, 4.0, 9.0}), std::invalid_argument);
}

TEST_CASE("cobb_douglas_output is homogeneous of degree one") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.01, 10.0);
  for (int k = 0; k < 200; ++k) {
    const double alpha = u(rng) / 10.0;
    ProductionParams p{u(rng), alpha, 1.0 - alpha, u(rng), u(rng)};
    const double t = u(rng);
    ProductionParams q = p;
    q.w_input *= t;
    q.z_input *= t;
    const double base = cobb_douglas_output(p);
    CHECK(std::abs(cobb_douglas_output(q) - t * base) <= 1e-10 * std::max(1.0, t * base));
  }
}

TEST_CASE("export_objective") {
  const DemandSpec d = demand(5, 2, 1);
  const GrowthParams g{1.0, 1.2, 0.4};
  const double y = growth_rate(g);
  FirmState f{5.0, y, 1.0, 1.0};
  CHECK(export_objective(f, g, {1.0, 1.0}, d, 2.0) == doctest::Approx(5.0 - y));
  f.price = 2.0;
  CHECK(export_objective(f, g, {0.0, 0.0}, d, 2.0) == doctest::Approx(5.0 - y));
  CHECK(export_objective(f, g, {1.0, 1.0}, d, 2.0) == doctest::Approx(5.0 - y + 3.0));
  CHECK(std::abs(export_objective(f, g, {1.0, 1.0}, d, 2.0) - 6.8844) < 1e-4);
  // With unit multipliers the margin equals the domestic one.
  const double domestic_margin = stage_profit(f, d, 2.0, {}) - f.endowment - f.growth;
  CHECK(export_objective(f, g, {}, d, 2.0) - (f.endowment - y) ==
        doctest::Approx(domestic_margin));
}

TEST_CASE("make_firm_state takes growth from the growth channel") {
  const FirmState f = make_firm_state(2.0, {1.0, 1.2, 0.4}, 1.0, 3.0);
  CHECK(f.growth == growth_rate({1.0, 1.2, 0.4}));
  CHECK(f.endowment == 2.0);
}
