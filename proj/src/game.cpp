#include "forbearance/game.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "checks.hpp"

namespace forbearance {

using detail::require;
using detail::require_finite;

void StagePayoffs::validate() const {
  require_finite("pi_coop", pi_coop);
  require_finite("pi_defect", pi_defect);
  require_finite("pi_punish", pi_punish);
  require_finite("pi_nash", pi_nash);
  require_finite("pi_monopoly", pi_monopoly);
  require(pi_defect >= pi_coop, "stage payoffs require pi_defect >= pi_coop");
  require(pi_coop >= pi_punish, "stage payoffs require pi_coop >= pi_punish");
  require(pi_monopoly >= pi_nash, "stage payoffs require pi_monopoly >= pi_nash");
}

StagePayoffs StagePayoffs::make(double coop, double defect, double punish, double nash,
                                double monopoly) {
  StagePayoffs p{coop, defect, punish, nash, monopoly};
  p.validate();
  return p;
}

std::string_view to_string(StrategyKind s) {
  switch (s) {
    case StrategyKind::GrimTrigger: return "GrimTrigger";
    case StrategyKind::AlwaysCooperate: return "AlwaysCooperate";
    case StrategyKind::AlwaysDefect: return "AlwaysDefect";
  }
  return "?";
}

std::string_view to_string(Action a) { return a == Action::Cooperate ? "C" : "D"; }

StrategyKind parse_strategy(std::string_view name) {
  if (name == "grim" || name == "grim-trigger" || name == "GrimTrigger") {
    return StrategyKind::GrimTrigger;
  }
  if (name == "cooperate" || name == "always-cooperate" || name == "AlwaysCooperate") {
    return StrategyKind::AlwaysCooperate;
  }
  if (name == "defect" || name == "always-defect" || name == "AlwaysDefect") {
    return StrategyKind::AlwaysDefect;
  }
  throw std::invalid_argument("unknown strategy '" + std::string(name) + "'");
}

void GameConfig::validate() const {
  payoffs.validate();
  require_finite("delta", delta);
  require(delta >= 0.0 && delta < 1.0, "delta must lie in [0, 1)");
  require(horizon >= 1, "horizon must be >= 1");
}

void BertrandMarketRules::validate() const {
  require_finite("sharing", sharing);
  require(sharing >= 0.0 && sharing <= 1.0, "sharing must lie in [0, 1]");
}

std::pair<double, double> bertrand_stage_payoffs(double p_i, double p_j, const DemandSpec& d,
                                                 double c_i, double c_j,
                                                 const BertrandMarketRules& rules) {
  require_finite("p_i", p_i);
  require_finite("p_j", p_j);
  require(p_i >= 0.0 && p_j >= 0.0, "prices must be >= 0");
  d.validate();
  rules.validate();
  if (p_i < p_j) return {(p_i - c_i) * d.market_quantity(p_i), 0.0};
  if (p_j < p_i) return {0.0, (p_j - c_j) * d.market_quantity(p_j)};
  const double q = d.market_quantity(p_i);
  return {rules.sharing * (p_i - c_i) * q, (1.0 - rules.sharing) * (p_j - c_j) * q};
}

double critical_discount(const StagePayoffs& p) {
  p.validate();
  if (p.pi_defect == p.pi_punish) {
    throw std::domain_error("critical discount undefined when pi_defect == pi_punish");
  }
  const double d = (p.pi_defect - p.pi_coop) / (p.pi_defect - p.pi_punish);
  return std::clamp(d, 0.0, 1.0);
}

bool is_sustainable(const StagePayoffs& p, double delta) {
  p.validate();
  require_finite("delta", delta);
  require(delta >= 0.0 && delta < 1.0, "delta must lie in [0, 1)");
  // Multiplied through by (1 - delta) > 0; the slack absorbs rounding at the
  // weak boundary.
  const double lhs = p.pi_coop;
  const double rhs = (1.0 - delta) * p.pi_defect + delta * p.pi_punish;
  const double scale =
      std::max({std::abs(p.pi_coop), std::abs(p.pi_defect), std::abs(p.pi_punish), 1.0});
  return lhs >= rhs - 1e-12 * scale;
}

namespace {

Action choose(StrategyKind s, bool rival_has_defected) {
  switch (s) {
    case StrategyKind::AlwaysCooperate: return Action::Cooperate;
    case StrategyKind::AlwaysDefect: return Action::Defect;
    case StrategyKind::GrimTrigger:
      return rival_has_defected ? Action::Defect : Action::Cooperate;
  }
  return Action::Defect;
}

std::pair<double, double> stage(const StagePayoffs& p, Action a_i, Action a_j) {
  const bool ci = a_i == Action::Cooperate;
  const bool cj = a_j == Action::Cooperate;
  if (ci && cj) return {p.pi_coop, p.pi_coop};
  if (!ci && !cj) return {p.pi_punish, p.pi_punish};
  if (ci) return {p.pi_punish, p.pi_defect};
  return {p.pi_defect, p.pi_punish};
}

}  // namespace

GameOutcome simulate_repeated_game(const GameConfig& cfg) {
  cfg.validate();
  GameOutcome out;
  out.actions.reserve(static_cast<std::size_t>(cfg.horizon));
  out.per_period.reserve(static_cast<std::size_t>(cfg.horizon));
  bool i_saw_defection = false;
  bool j_saw_defection = false;
  double weight = 1.0;
  for (int t = 0; t < cfg.horizon; ++t) {
    const Action a_i = choose(cfg.strategy_i, i_saw_defection);
    const Action a_j = choose(cfg.strategy_j, j_saw_defection);
    const auto payoff = stage(cfg.payoffs, a_i, a_j);
    out.actions.emplace_back(a_i, a_j);
    out.per_period.push_back(payoff);
    out.discounted_i += weight * payoff.first;
    out.discounted_j += weight * payoff.second;
    weight *= cfg.delta;
    i_saw_defection = i_saw_defection || a_j == Action::Defect;
    j_saw_defection = j_saw_defection || a_i == Action::Defect;
  }
  return out;
}

double collusion_index(double observed, const StagePayoffs& p) {
  require_finite("observed", observed);
  p.validate();
  if (p.pi_monopoly == p.pi_nash) {
    throw std::domain_error("collusion index undefined when pi_monopoly == pi_nash");
  }
  return (observed - p.pi_nash) / (p.pi_monopoly - p.pi_nash);
}

int horizon_for_tail(const StagePayoffs& p, double delta, double tail) {
  require(delta >= 0.0 && delta < 1.0, "delta must lie in [0, 1)");
  require(tail > 0.0, "tail must be > 0");
  const double biggest = std::max({std::abs(p.pi_coop), std::abs(p.pi_defect),
                                   std::abs(p.pi_punish), 1e-300});
  if (delta == 0.0) return 1;
  // delta^T * biggest / (1 - delta) < tail
  const double t = std::log(tail * (1.0 - delta) / biggest) / std::log(delta);
  return std::max(1, static_cast<int>(std::floor(t)) + 1);
}

nlohmann::json to_json(const GameConfig& cfg, const GameOutcome& outcome) {
  nlohmann::json periods = nlohmann::json::array();
  for (std::size_t t = 0; t < outcome.actions.size(); ++t) {
    periods.push_back({{"period", t},
                       {"action_i", to_string(outcome.actions[t].first)},
                       {"action_j", to_string(outcome.actions[t].second)},
                       {"payoff_i", outcome.per_period[t].first},
                       {"payoff_j", outcome.per_period[t].second}});
  }
  const auto& p = cfg.payoffs;
  nlohmann::json j = {
      {"payoffs",
       {{"pi_coop", p.pi_coop},
        {"pi_defect", p.pi_defect},
        {"pi_punish", p.pi_punish},
        {"pi_nash", p.pi_nash},
        {"pi_monopoly", p.pi_monopoly}}},
      {"delta", cfg.delta},
      {"horizon", cfg.horizon},
      {"strategy_i", to_string(cfg.strategy_i)},
      {"strategy_j", to_string(cfg.strategy_j)},
      {"periods", periods},
      {"discounted_i", outcome.discounted_i},
      {"discounted_j", outcome.discounted_j},
  };
  if (p.pi_defect != p.pi_punish) {
    j["critical_discount"] = critical_discount(p);
    j["sustainable"] = is_sustainable(p, cfg.delta);
  }
  return j;
}

}  // namespace forbearance
