#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "forbearance/game.hpp"

using namespace forbearance;

namespace {

GameConfig config(StagePayoffs p, double delta, int horizon, StrategyKind i, StrategyKind j) {
  GameConfig c;
  c.payoffs = p;
  c.delta = delta;
  c.horizon = horizon;
  c.strategy_i = i;
  c.strategy_j = j;
  return c;
}

}  // namespace

TEST_CASE("payoff validation") {
  CHECK_NOTHROW(StagePayoffs::make(1, 2, 0, 0, 1));
  CHECK_THROWS_AS(StagePayoffs::make(2, 1, 0, 0, 2), std::invalid_argument);
  CHECK_THROWS_AS(StagePayoffs::make(1, 2, 1.5, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(StagePayoffs::make(1, 2, 0, 1, 0), std::invalid_argument);
  CHECK_THROWS_AS(StagePayoffs::make(1, std::nan(""), 0, 0, 1), std::domain_error);
}

TEST_CASE("bertrand_stage_payoffs") {
  const DemandSpec d{5, 2, 1};
  const BertrandMarketRules r;
  SUBCASE("tie splits") {
    const auto [a, b] = bertrand_stage_payoffs(2.5, 2.5, d, 1.0, 1.0, r);
    CHECK(a == b);
    CHECK(a == doctest::Approx(0.5 * 1.5 * d.market_quantity(2.5)));
  }
  SUBCASE("lower price takes the market") {
    const auto [a, b] = bertrand_stage_payoffs(2.0, 3.0, d, 1.0, 1.0, r);
    CHECK(a == 3.0);
    CHECK(b == 0.0);
  }
  SUBCASE("anonymous") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 4.0);
    for (int k = 0; k < 200; ++k) {
      const double pi = u(rng), pj = u(rng), c = u(rng) / 4.0;
      const auto ab = bertrand_stage_payoffs(pi, pj, d, c, c, r);
      const auto ba = bertrand_stage_payoffs(pj, pi, d, c, c, r);
      CHECK(ab.first == ba.second);
      CHECK(ab.second == ba.first);
    }
  }
  SUBCASE("uneven sharing") {
    const auto [a, b] = bertrand_stage_payoffs(2.0, 2.0, d, 1.0, 1.0, {0.7});
    CHECK(a == doctest::Approx(0.7 * 3.0));
    CHECK(b == doctest::Approx(0.3 * 3.0));
  }
  CHECK_THROWS_AS(bertrand_stage_payoffs(-1.0, 2.0, d, 1.0, 1.0, r), std::invalid_argument);
}

TEST_CASE("critical_discount") {
  CHECK(critical_discount(StagePayoffs::make(2, 2, 0, 0, 2)) == 0.0);
  CHECK(critical_discount(StagePayoffs::make(1, 2, 0, 0, 1)) == 0.5);
  CHECK(critical_discount(StagePayoffs::make(1, 2, 1, 0, 1)) == 1.0);
  CHECK_THROWS_AS(critical_discount(StagePayoffs::make(1, 1, 1, 0, 1)), std::domain_error);
}

TEST_CASE("is_sustainable") {
  const auto p = StagePayoffs::make(1, 2, 0, 0, 1);
  CHECK_FALSE(is_sustainable(p, 0.0));
  CHECK(is_sustainable(p, 0.6));
  CHECK(is_sustainable(p, 0.5));
  CHECK_FALSE(is_sustainable(p, 0.4999));
  CHECK_THROWS_AS(is_sustainable(p, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(is_sustainable(p, -0.1), std::invalid_argument);
}

TEST_CASE("is_sustainable switches exactly at delta*") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int k = 0; k < 500; ++k) {
    double v[3] = {u(rng), u(rng), u(rng)};
    std::sort(v, v + 3);
    if (v[2] - v[0] < 1e-3) continue;
    const auto p = StagePayoffs::make(v[1], v[2], v[0], v[0], v[1]);
    const double ds = critical_discount(p);
    for (int g = 0; g <= 100; ++g) {
      const double delta = 0.99 * g / 100.0;
      if (std::abs(delta - ds) < 1e-9) continue;
      CHECK(is_sustainable(p, delta) == (delta >= ds));
    }
  }
}

TEST_CASE("simulate_repeated_game") {
  const auto p = StagePayoffs::make(1, 2, 0, 0, 1);
  SUBCASE("grim pair cooperates throughout") {
    const auto out = simulate_repeated_game(
        config(p, 0.9, 40, StrategyKind::GrimTrigger, StrategyKind::GrimTrigger));
    for (const auto& [a, b] : out.actions) {
      CHECK(a == Action::Cooperate);
      CHECK(b == Action::Cooperate);
    }
    CHECK(out.discounted_i == doctest::Approx((1 - std::pow(0.9, 40)) / 0.1).epsilon(1e-13));
  }
  SUBCASE("defector against grim") {
    const auto out = simulate_repeated_game(
        config(p, 0.5, 3, StrategyKind::AlwaysDefect, StrategyKind::GrimTrigger));
    CHECK(out.per_period[0] == std::pair{2.0, 0.0});
    CHECK(out.actions[1] == std::pair{Action::Defect, Action::Defect});
    CHECK(out.discounted_i == 2.0);
  }
  SUBCASE("one-shot") {
    const auto out = simulate_repeated_game(
        config(p, 0.5, 1, StrategyKind::AlwaysDefect, StrategyKind::AlwaysCooperate));
    REQUIRE(out.per_period.size() == 1);
    CHECK(out.per_period[0].first == p.pi_defect);
    CHECK(out.per_period[0].second == p.pi_punish);
  }
  SUBCASE("grim punishes forever") {
    const auto out = simulate_repeated_game(
        config(p, 0.5, 5, StrategyKind::GrimTrigger, StrategyKind::AlwaysDefect));
    CHECK(out.actions[0].first == Action::Cooperate);
    for (std::size_t t = 1; t < 5; ++t) CHECK(out.actions[t].first == Action::Defect);
  }
}

TEST_CASE("grim pairs never defect on random payoffs") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  for (int k = 0; k < 100; ++k) {
    double v[3] = {u(rng), u(rng), u(rng)};
    std::sort(v, v + 3);
    const auto out = simulate_repeated_game(config(StagePayoffs::make(v[1], v[2], v[0], v[0], v[1]),
                                                   0.95 * u(rng) / 5.0, 25,
                                                   StrategyKind::GrimTrigger,
                                                   StrategyKind::GrimTrigger));
    for (const auto& [a, b] : out.actions) CHECK((a == Action::Cooperate && b == Action::Cooperate));
  }
}

TEST_CASE("collusion_index") {
  const auto p = StagePayoffs::make(3, 4, 1, 1, 5);
  CHECK(collusion_index(1.0, p) == 0.0);
  CHECK(collusion_index(5.0, p) == 1.0);
  CHECK(collusion_index(3.0, p) == 0.5);
  CHECK_THROWS_AS(collusion_index(1.0, StagePayoffs::make(1, 2, 0, 1, 1)), std::domain_error);
}

TEST_CASE("collusion_index is affine invariant") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int k = 0; k < 300; ++k) {
    double v[5] = {u(rng), u(rng), u(rng), u(rng), u(rng)};
    std::sort(v, v + 5);
    // punish <= nash < coop <= monopoly <= defect
    const auto p = StagePayoffs::make(v[2], v[4], v[0], v[1], v[3]);
    const double obs = u(rng);
    const double shift = u(rng) - 5.0, scale = 0.1 + u(rng);
    const auto q = StagePayoffs::make(scale * v[2] + shift, scale * v[4] + shift,
                                      scale * v[0] + shift, scale * v[1] + shift,
                                      scale * v[3] + shift);
    if (v[3] - v[1] < 1.0) continue;
    CHECK(std::abs(collusion_index(obs, p) - collusion_index(scale * obs + shift, q)) < 1e-12);
  }
}

TEST_CASE("horizon_for_tail bounds the remaining discounted mass") {
  const auto p = StagePayoffs::make(1, 2, 0, 0, 1);
  for (double delta : {0.1, 0.5, 0.9, 0.99}) {
    const int t = horizon_for_tail(p, delta, 1e-9);
    CHECK(std::pow(delta, t) * 2.0 / (1.0 - delta) < 1e-9);
    CHECK(std::pow(delta, t - 1) * 2.0 / (1.0 - delta) >= 1e-9 * 0.999);
  }
}

TEST_CASE("game JSON") {
  const auto p = StagePayoffs::make(1, 2, 0, 0, 1);
  const auto cfg = config(p, 0.6, 3, StrategyKind::GrimTrigger, StrategyKind::GrimTrigger);
  const auto j = to_json(cfg, simulate_repeated_game(cfg));
  CHECK(j.at("critical_discount").get<double>() == 0.5);
  CHECK(j.at("sustainable").get<bool>());
  CHECK(j.dump() == to_json(cfg, simulate_repeated_game(cfg)).dump());
}

TEST_CASE("strategy names") {
  CHECK(parse_strategy("grim") == StrategyKind::GrimTrigger);
  CHECK(parse_strategy("always-defect") == StrategyKind::AlwaysDefect);
  CHECK(parse_strategy("cooperate") == StrategyKind::AlwaysCooperate);
  CHECK_THROWS_AS(parse_strategy("tit-for-tat"), std::invalid_argument);
}
