#include "forbearance/econ_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "checks.hpp"

namespace forbearance {

using detail::require;
using detail::require_finite;

void GrowthParams::validate() const {
  require_finite("age", age);
  require_finite("export_intensity", export_intensity);
  require_finite("info_phi", info_phi);
  require(age >= 0.0, "age must be >= 0");
  require(export_intensity >= 0.0, "export_intensity must be >= 0");
  require(info_phi >= 0.0 && info_phi <= 1.0, "info_phi must lie in [0, 1]");
}

void FirmState::validate() const {
  require_finite("endowment", endowment);
  require_finite("growth", growth);
  require_finite("unit_cost", unit_cost);
  require_finite("price", price);
  require(unit_cost >= 0.0, "unit_cost must be >= 0");
  require(price >= 0.0, "price must be >= 0");
}

void DemandSpec::validate() const {
  require_finite("intercept", intercept);
  require_finite("own_slope", own_slope);
  require_finite("cross_slope", cross_slope);
  require(intercept > 0.0, "demand intercept must be > 0");
  require(cross_slope >= 0.0, "cross_slope must be >= 0");
  require(own_slope > cross_slope, "own_slope must exceed cross_slope");
}

double DemandSpec::quantity(double own_price, double rival_price) const {
  require_finite("own_price", own_price);
  require_finite("rival_price", rival_price);
  return std::max(0.0, intercept - own_slope * own_price + cross_slope * rival_price);
}

void MarketEnv::validate() const {
  require_finite("market_scale", market_scale);
  require_finite("discount_rate", discount_rate);
  require_finite("constraint_lambda", constraint_lambda);
  require_finite("residual", residual);
  require(market_scale > 0.0, "market_scale must be > 0");
  require(discount_rate >= 0.0, "discount_rate must be >= 0");
  require(constraint_lambda > 0.0, "constraint_lambda must be > 0");
}

void ProductionParams::validate() const {
  require_finite("tfp", tfp);
  require_finite("alpha", alpha);
  require_finite("omega", omega);
  require_finite("w_input", w_input);
  require_finite("z_input", z_input);
  require(alpha >= 0.0 && alpha <= 1.0, "alpha must lie in [0, 1]");
  require(omega >= 0.0 && omega <= 1.0, "omega must lie in [0, 1]");
  require(std::abs(alpha + omega - 1.0) <= 1e-12, "alpha + omega must equal 1");
  require(w_input > 0.0 && z_input > 0.0, "production inputs must be > 0");
}

void ExportMultipliers::validate() const {
  require_finite("mu", mu);
  require_finite("beta", beta);
  require(mu >= 0.0 && beta >= 0.0, "export multipliers must be >= 0");
}

double growth_rate(const GrowthParams& g) {
  g.validate();
  return g.age * std::pow(g.export_intensity, 1.0 - g.info_phi);
}

FirmState make_firm_state(double endowment, const GrowthParams& g, double unit_cost,
                          double price) {
  FirmState f{endowment, growth_rate(g), unit_cost, price};
  f.validate();
  return f;
}

double stage_profit(const FirmState& f, const DemandSpec& d, double rival_price,
                    const MarketEnv& env) {
  f.validate();
  d.validate();
  env.validate();
  const double q = d.quantity(f.price, rival_price);
  return (f.endowment + f.growth) + (f.price - f.unit_cost) * q + env.residual;
}

bool constraint_satisfied(double profit, const MarketEnv& env,
                          std::span<const double> market_scales) {
  require_finite("profit", profit);
  env.validate();
  require(!market_scales.empty(), "market_scales must be non-empty");
  const double sum = std::accumulate(market_scales.begin(), market_scales.end(), 0.0);
  const double mean = sum / static_cast<double>(market_scales.size());
  return profit <= env.constraint_lambda * mean;
}

double foc_residual(const FirmState& f, const DemandSpec& d, double rival_price,
                    const FocComposite& comp) {
  f.validate();
  d.validate();
  require_finite("rival_price", rival_price);
  require_finite("demand_term", comp.demand_term);
  require_finite("elasticity_term", comp.elasticity_term);
  require_finite("endowment_sum", comp.endowment_sum);
  return (comp.demand_term - f.unit_cost) * comp.elasticity_term + comp.endowment_sum;
}

FocComposite marginal_profit_composite(const FirmState& f, const DemandSpec& d,
                                       double rival_price) {
  d.validate();
  return {f.price, -d.own_slope, d.quantity(f.price, rival_price)};
}

FocComposite growth_constraint_composite(const FirmState& f, const DemandSpec& d) {
  f.validate();
  d.validate();
  return {f.price, -d.own_slope, f.endowment + f.growth};
}

double best_response_price(const FirmState& f, const DemandSpec& d, double rival_price,
                           PriceBounds bounds) {
  require_finite("bounds.lo", bounds.lo);
  require_finite("bounds.hi", bounds.hi);
  require(bounds.lo >= 0.0 && bounds.lo < bounds.hi, "price bounds must satisfy 0 <= lo < hi");
  f.validate();
  d.validate();
  require_finite("rival_price", rival_price);

  // Only the margin term depends on own price.
  const auto margin = [&](double p) { return (p - f.unit_cost) * d.quantity(p, rival_price); };

  constexpr double kInvPhi = 0.6180339887498949;  // (sqrt(5) - 1) / 2
  constexpr double kTol = 1e-8;
  double a = bounds.lo;
  double b = bounds.hi;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = margin(x1);
  double f2 = margin(x2);
  while (b - a > kTol) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = margin(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = margin(x1);
    }
  }
  double best = 0.5 * (a + b);
  double best_value = margin(best);
  for (double edge : {bounds.lo, bounds.hi}) {
    const double v = margin(edge);
    if (v > best_value) {
      best = edge;
      best_value = v;
    }
  }
  return best;
}

double aggregate_demand(const MarketEnv& env, double revenue_per_unit) {
  env.validate();
  require_finite("revenue_per_unit", revenue_per_unit);
  return env.market_scale * revenue_per_unit / (1.0 + env.discount_rate);
}

double cobb_douglas_output(const ProductionParams& p) {
  p.validate();
  return p.tfp * std::pow(p.w_input, p.alpha) * std::pow(p.z_input, p.omega);
}

double export_objective(const FirmState& f, const GrowthParams& g, const ExportMultipliers& m,
                        const DemandSpec& d, double rival_price) {
  f.validate();
  m.validate();
  d.validate();
  const double q = d.quantity(f.price, rival_price);
  return (f.endowment - growth_rate(g)) + (m.mu * f.price - m.beta * f.unit_cost) * q;
}

}  // namespace forbearance
