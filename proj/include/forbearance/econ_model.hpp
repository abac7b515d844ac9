#ifndef FORBEARANCE_ECON_MODEL_HPP
#define FORBEARANCE_ECON_MODEL_HPP

#include <span>

// Static primitives of the two-firm model: growth under incomplete
// information, stage profit with linear differentiated demand, the
// first-order-condition composite, aggregate demand, Cobb-Douglas core
// output and the export-adjusted objective.
//
// Every function is pure. Invalid inputs raise std::invalid_argument;
// non-finite numeric arguments raise std::domain_error.

namespace forbearance {

/// Inputs to the growth channel: y = A * sigma^(1 - phi).
struct GrowthParams {
  double age = 0.0;               // A, years
  double export_intensity = 0.0;  // sigma
  double info_phi = 0.0;          // phi in [0, 1]; 1 is perfect information

  void validate() const;
};

struct FirmState {
  double endowment = 0.0;  // x
  double growth = 0.0;     // y
  double unit_cost = 0.0;  // c
  double price = 0.0;      // p

  void validate() const;
};

/// Linear differentiated Bertrand demand q_i = a - b p_i + g p_j, clamped at 0.
struct DemandSpec {
  double intercept = 0.0;    // alpha_d > 0
  double own_slope = 0.0;    // beta_d > cross_slope
  double cross_slope = 0.0;  // gamma_d >= 0

  void validate() const;
  double quantity(double own_price, double rival_price) const;
  /// Quantity sold when both firms post `price` (undifferentiated market demand).
  double market_quantity(double price) const { return quantity(price, price); }
};

struct MarketEnv {
  double market_scale = 1.0;       // K
  double discount_rate = 0.0;      // r
  double constraint_lambda = 1.0;  // lambda
  double residual = 0.0;           // e

  void validate() const;
};

struct ProductionParams {
  double tfp = 1.0;
  double alpha = 0.5;
  double omega = 0.5;
  double w_input = 1.0;
  double z_input = 1.0;

  void validate() const;
};

struct FocComposite {
  double demand_term = 0.0;      // D
  double elasticity_term = 0.0;  // E
  double endowment_sum = 0.0;    // S
};

struct ExportMultipliers {
  double mu = 1.0;    // revenue multiplier
  double beta = 1.0;  // cost multiplier

  void validate() const;
};

struct PriceBounds {
  double lo = 0.0;
  double hi = 0.0;
};

double growth_rate(const GrowthParams& g);

/// Builds a firm whose growth term is growth_rate(g).
FirmState make_firm_state(double endowment, const GrowthParams& g, double unit_cost, double price);

/// (x + y) + (p - c) * q(p, rival_price) + e.
double stage_profit(const FirmState& f, const DemandSpec& d, double rival_price,
                    const MarketEnv& env);

/// Feasibility of profit <= lambda * mean(market_scales). Boundary is feasible.
bool constraint_satisfied(double profit, const MarketEnv& env, std::span<const double> market_scales);

/// (D - c) * E + S.
double foc_residual(const FirmState& f, const DemandSpec& d, double rival_price,
                    const FocComposite& comp);

/// Composite with D = p, E = dq/dp = -beta_d and S = q(p, rival). Its residual
/// is exactly the own-price derivative of stage_profit on the region q > 0, so
/// its root is the interior best response.
FocComposite marginal_profit_composite(const FirmState& f, const DemandSpec& d, double rival_price);

/// Composite with D = p, E = -beta_d and S = x + y, the endowment-plus-growth
/// head of the objective. Its root is not the profit maximiser in general.
FocComposite growth_constraint_composite(const FirmState& f, const DemandSpec& d);

/// Golden-section maximisation of stage_profit in own price over `bounds`
/// (absolute tolerance 1e-8). Endpoints are compared against the interior
/// candidate so monotone segments return the better boundary.
double best_response_price(const FirmState& f, const DemandSpec& d, double rival_price,
                           PriceBounds bounds);

/// K * revenue_per_unit / (1 + r).
double aggregate_demand(const MarketEnv& env, double revenue_per_unit);

/// A * W^alpha * Z^omega with alpha + omega = 1.
double cobb_douglas_output(const ProductionParams& p);

/// (x - A sigma^(1-phi)) + (mu p - beta c) * q(p, rival) for one firm.
/// The growth term enters with a minus sign here, unlike stage_profit.
double export_objective(const FirmState& f, const GrowthParams& g, const ExportMultipliers& m,
                        const DemandSpec& d, double rival_price);

}  // namespace forbearance

#endif  // FORBEARANCE_ECON_MODEL_HPP
