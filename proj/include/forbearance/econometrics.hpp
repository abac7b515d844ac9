#ifndef FORBEARANCE_ECONOMETRICS_HPP
#define FORBEARANCE_ECONOMETRICS_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "forbearance/paneldata.hpp"

// Linear estimation: Gaussian-identity GLM (OLS through Householder QR),
// the fixed-effects within estimator, and classical homoskedastic inference.

namespace forbearance {

/// Dense n x k design, row-major.
class DesignMatrix {
 public:
  DesignMatrix(std::size_t rows, std::vector<std::string> column_names);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return names_.size(); }
  const std::vector<std::string>& column_names() const { return names_; }

  double& operator()(std::size_t i, std::size_t j) { return values_[i * cols() + j]; }
  double operator()(std::size_t i, std::size_t j) const { return values_[i * cols() + j]; }

  std::vector<double> column(std::size_t j) const;
  /// True when some column is identically 1.
  bool has_intercept() const;

 private:
  std::size_t rows_;
  std::vector<std::string> names_;
  std::vector<double> values_;
};

inline constexpr std::string_view kInterceptName = "const";

/// Builds a design from observation columns, optionally prefixed with "const".
DesignMatrix design_from_observations(const std::vector<FirmObservation>& rows,
                                      std::span<const std::string> columns, bool intercept);
std::vector<double> response_from_observations(const std::vector<FirmObservation>& rows);

class RankDeficientError : public std::domain_error {
 public:
  RankDeficientError(const std::string& what, std::string column)
      : std::domain_error(what), column_(std::move(column)) {}
  const std::string& column() const { return column_; }

 private:
  std::string column_;
};

enum class Estimator { GlmGaussianIdentity, FixedEffectsWithin };
std::string_view to_string(Estimator e);

struct RegressionResult {
  Estimator estimator = Estimator::GlmGaussianIdentity;
  std::vector<std::string> names;
  std::vector<double> coefficients;
  std::vector<double> std_errors;
  std::vector<double> t_stats;
  std::vector<double> p_values;
  double r_squared = 0.0;
  double residual_variance = 0.0;
  std::size_t n_obs = 0;
  std::size_t df_resid = 0;
  /// Firm intercepts alpha_i (within estimator only), in first-appearance order.
  std::optional<std::vector<std::pair<std::string, double>>> fixed_effects;
  std::vector<std::string> dropped_columns;
  std::vector<std::string> notes;

  std::size_t index_of(std::string_view name) const;
};

/// OLS coefficients, classical SEs with residual variance RSS / (n - k),
/// two-sided Student-t p-values. Throws RankDeficientError naming the first
/// column that is linearly dependent on earlier ones (relative tol 1e-10).
RegressionResult fit_glm(const DesignMatrix& x, std::span<const double> y);

struct WithinTransform {
  DesignMatrix design;
  std::vector<double> response;
  std::vector<std::string> firm_ids;       // distinct firms, first-appearance order
  std::vector<std::size_t> firm_of_row;    // index into firm_ids
  std::vector<std::string> dropped_columns;
  std::vector<std::string> notes;
};

/// Subtracts firm means from the response and each named column. Columns with
/// no within-firm variation are dropped and reported.
WithinTransform within_transform(const std::vector<FirmObservation>& rows,
                                 std::span<const std::string> columns);

/// Within estimator with df = n - k - n_firms. Coefficients and SEs coincide
/// with least squares on firm dummies.
RegressionResult fit_fixed_effects(const std::vector<FirmObservation>& rows,
                                   std::span<const std::string> columns);

/// Regularized incomplete beta I_x(a, b).
double regularized_incomplete_beta(double a, double b, double x);

/// Student-t CDF.
double student_t_cdf(double t, double df);

/// Two-sided p-value 2 (1 - F_t(|t|; df)).
double t_pvalue(double t, double df);

enum class ExpectedSign { Positive, Negative, Any };

struct VariableExpectation {
  std::string name;
  ExpectedSign sign = ExpectedSign::Any;
  bool significant = false;
};

struct PatternExpectation {
  std::vector<VariableExpectation> variables;
  double alpha = 0.05;
};

struct VariableCheck {
  std::string name;
  double coefficient = 0.0;
  double p_value = 1.0;
  bool sign_ok = true;
  bool significance_ok = true;
  bool pass() const { return sign_ok && significance_ok; }
};

struct PatternReport {
  std::vector<VariableCheck> checks;
  bool pass = true;
};

/// Significant means p <= alpha (boundary counts as significant).
PatternReport check_pattern(const RegressionResult& result, const PatternExpectation& expected);

nlohmann::json to_json(const RegressionResult& r);
/// Aligned Coefficient / Std. Error / t-Statistic / p-Value table.
std::string format_table(const RegressionResult& r);

}  // namespace forbearance

#endif  // FORBEARANCE_ECONOMETRICS_HPP
