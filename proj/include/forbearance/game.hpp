#ifndef FORBEARANCE_GAME_HPP
#define FORBEARANCE_GAME_HPP

#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "forbearance/econ_model.hpp"

// Two-firm repeated Bertrand pricing game with grim-trigger (Nash reversion)
// punishment and perfect monitoring of the rival's realised action.

namespace forbearance {

/// Per-period payoffs of the stage game. Construction via `make` rejects
/// profiles where deviation is not tempting or punishment is not a threat.
struct StagePayoffs {
  double pi_coop = 0.0;
  double pi_defect = 0.0;
  double pi_punish = 0.0;
  double pi_nash = 0.0;
  double pi_monopoly = 0.0;

  void validate() const;
  static StagePayoffs make(double coop, double defect, double punish, double nash,
                           double monopoly);
};

enum class StrategyKind { GrimTrigger, AlwaysCooperate, AlwaysDefect };
enum class Action { Cooperate, Defect };

std::string_view to_string(StrategyKind s);
std::string_view to_string(Action a);
/// Accepts "grim", "grim-trigger", "cooperate", "always-cooperate", "defect", "always-defect".
StrategyKind parse_strategy(std::string_view name);

struct GameConfig {
  StagePayoffs payoffs;
  double delta = 0.9;
  int horizon = 1;
  StrategyKind strategy_i = StrategyKind::GrimTrigger;
  StrategyKind strategy_j = StrategyKind::GrimTrigger;

  void validate() const;
};

struct GameOutcome {
  std::vector<std::pair<Action, Action>> actions;
  std::vector<std::pair<double, double>> per_period;
  double discounted_i = 0.0;
  double discounted_j = 0.0;
};

struct BertrandMarketRules {
  double sharing = 0.5;  // firm i's share of the market at equal prices

  void validate() const;
};

/// Undifferentiated Bertrand stage: the lower-priced firm serves market demand
/// q(p, p) at margin p - c, a tie splits it by `sharing`, the dearer firm earns 0.
std::pair<double, double> bertrand_stage_payoffs(double p_i, double p_j, const DemandSpec& d,
                                                 double c_i, double c_j,
                                                 const BertrandMarketRules& rules = {});

/// delta* = (pi_D - pi_C) / (pi_D - pi_P), clamped to [0, 1].
/// Throws std::domain_error when pi_D == pi_P.
double critical_discount(const StagePayoffs& p);

/// pi_C / (1 - delta) >= pi_D + delta * pi_P / (1 - delta).
bool is_sustainable(const StagePayoffs& p, double delta);

GameOutcome simulate_repeated_game(const GameConfig& cfg);

/// Friedman normalisation (observed - pi_N) / (pi_M - pi_N).
double collusion_index(double observed, const StagePayoffs& p);

/// Smallest horizon T with delta^T * max|pi| / (1 - delta) < tail.
int horizon_for_tail(const StagePayoffs& p, double delta, double tail);

nlohmann::json to_json(const GameConfig& cfg, const GameOutcome& outcome);

}  // namespace forbearance

#endif  // FORBEARANCE_GAME_HPP
