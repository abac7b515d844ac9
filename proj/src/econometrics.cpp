#include "forbearance/econometrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <unordered_map>

#include "checks.hpp"

namespace forbearance {

using detail::require;

DesignMatrix::DesignMatrix(std::size_t rows, std::vector<std::string> column_names)
    : rows_(rows), names_(std::move(column_names)), values_(rows * names_.size(), 0.0) {}

std::vector<double> DesignMatrix::column(std::size_t j) const {
  std::vector<double> c(rows_);
  for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
  return c;
}

bool DesignMatrix::has_intercept() const {
  for (std::size_t j = 0; j < cols(); ++j) {
    bool ones = rows_ > 0;
    for (std::size_t i = 0; i < rows_ && ones; ++i) ones = (*this)(i, j) == 1.0;
    if (ones) return true;
  }
  return false;
}

DesignMatrix design_from_observations(const std::vector<FirmObservation>& rows,
                                      std::span<const std::string> columns, bool intercept) {
  std::vector<std::string> names;
  if (intercept) names.emplace_back(kInterceptName);
  names.insert(names.end(), columns.begin(), columns.end());
  DesignMatrix x(rows.size(), names);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::size_t j = 0;
    if (intercept) x(i, j++) = 1.0;
    for (const auto& c : columns) x(i, j++) = observation_value(rows[i], c);
  }
  return x;
}

std::vector<double> response_from_observations(const std::vector<FirmObservation>& rows) {
  std::vector<double> y;
  y.reserve(rows.size());
  for (const auto& r : rows) y.push_back(r.growth);
  return y;
}

std::string_view to_string(Estimator e) {
  return e == Estimator::GlmGaussianIdentity ? "GlmGaussianIdentity" : "FixedEffectsWithin";
}

std::size_t RegressionResult::index_of(std::string_view name) const {
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) {
    throw std::invalid_argument("variable '" + std::string(name) + "' is not in the result");
  }
  return static_cast<std::size_t>(it - names.begin());
}

namespace {

struct LeastSquares {
  std::vector<double> beta;
  std::vector<double> cov_diag;  // diag of (X'X)^-1
  std::vector<double> residuals;
  double rss = 0.0;
};

// Householder QR without pivoting; dependence is judged per column against
// its own norm so the diagnostic names the offending column.
LeastSquares solve_least_squares(const DesignMatrix& x, std::span<const double> y) {
  const std::size_t n = x.rows();
  const std::size_t k = x.cols();
  require(y.size() == n, "response length must equal design rows");
  require(k >= 1, "design must have at least one column");
  if (n <= k) {
    throw std::invalid_argument("need more observations than columns (n = " + std::to_string(n) +
                                ", k = " + std::to_string(k) + ")");
  }
  for (double v : y) detail::require_finite("response", v);

  // Column-major working copy.
  std::vector<double> a(n * k);
  std::vector<double> col_norm(k, 0.0);
  for (std::size_t j = 0; j < k; ++j) {
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double v = x(i, j);
      detail::require_finite("design entry", v);
      a[j * n + i] = v;
      ss += v * v;
    }
    col_norm[j] = std::sqrt(ss);
  }
  std::vector<double> qty(y.begin(), y.end());
  std::vector<double> rdiag(k);

  for (std::size_t j = 0; j < k; ++j) {
    double* cj = &a[j * n];
    double norm = 0.0;
    for (std::size_t i = j; i < n; ++i) norm = std::hypot(norm, cj[i]);
    const double alpha = cj[j] > 0.0 ? -norm : norm;
    rdiag[j] = alpha;
    if (col_norm[j] == 0.0 || std::abs(alpha) <= 1e-10 * col_norm[j]) {
      throw RankDeficientError("design is rank deficient: column '" + x.column_names()[j] +
                                   "' is linearly dependent on the preceding columns",
                               x.column_names()[j]);
    }
    // v = c - alpha e_j stored in place; H = I - 2 v v' / (v'v).
    cj[j] -= alpha;
    double vtv = 0.0;
    for (std::size_t i = j; i < n; ++i) vtv += cj[i] * cj[i];
    const auto reflect = [&](double* target) {
      double dot = 0.0;
      for (std::size_t i = j; i < n; ++i) dot += cj[i] * target[i];
      const double s = 2.0 * dot / vtv;
      for (std::size_t i = j; i < n; ++i) target[i] -= s * cj[i];
    };
    for (std::size_t m = j + 1; m < k; ++m) reflect(&a[m * n]);
    reflect(qty.data());
  }

  // R(j, m) for m > j lives in a[m * n + j]; the diagonal is rdiag.
  const auto r = [&](std::size_t row, std::size_t col) {
    return row == col ? rdiag[row] : a[col * n + row];
  };

  LeastSquares out;
  out.beta.assign(k, 0.0);
  for (std::size_t jj = k; jj-- > 0;) {
    double s = qty[jj];
    for (std::size_t m = jj + 1; m < k; ++m) s -= r(jj, m) * out.beta[m];
    out.beta[jj] = s / rdiag[jj];
  }

  // R^-1 by back substitution, column by column; (X'X)^-1 = R^-1 R^-T.
  std::vector<double> rinv(k * k, 0.0);  // row-major upper triangle
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t row = c + 1; row-- > 0;) {
      double s = row == c ? 1.0 : 0.0;
      for (std::size_t m = row + 1; m <= c; ++m) s -= r(row, m) * rinv[m * k + c];
      rinv[row * k + c] = s / rdiag[row];
    }
  }
  out.cov_diag.assign(k, 0.0);
  for (std::size_t j = 0; j < k; ++j) {
    double s = 0.0;
    for (std::size_t m = j; m < k; ++m) s += rinv[j * k + m] * rinv[j * k + m];
    out.cov_diag[j] = s;
  }

  out.residuals.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double fit = 0.0;
    for (std::size_t j = 0; j < k; ++j) fit += x(i, j) * out.beta[j];
    out.residuals[i] = y[i] - fit;
    out.rss += out.residuals[i] * out.residuals[i];
  }
  return out;
}

void fill_inference(RegressionResult& res, const LeastSquares& ls, std::size_t df) {
  require(df >= 1, "no residual degrees of freedom");
  res.df_resid = df;
  res.residual_variance = ls.rss / static_cast<double>(df);
  const std::size_t k = ls.beta.size();
  res.coefficients = ls.beta;
  res.std_errors.resize(k);
  res.t_stats.resize(k);
  res.p_values.resize(k);
  for (std::size_t j = 0; j < k; ++j) {
    const double se = std::sqrt(res.residual_variance * ls.cov_diag[j]);
    res.std_errors[j] = se;
    if (se > 0.0) {
      res.t_stats[j] = ls.beta[j] / se;
      res.p_values[j] = t_pvalue(res.t_stats[j], static_cast<double>(df));
    } else if (ls.beta[j] == 0.0) {
      res.t_stats[j] = 0.0;
      res.p_values[j] = 1.0;
    } else {
      res.t_stats[j] = std::copysign(std::numeric_limits<double>::infinity(), ls.beta[j]);
      res.p_values[j] = 0.0;
    }
  }
}

double total_sum_of_squares(std::span<const double> y, bool centered) {
  double mean = 0.0;
  if (centered) {
    for (double v : y) mean += v;
    mean /= static_cast<double>(y.size());
  }
  double tss = 0.0;
  for (double v : y) tss += (v - mean) * (v - mean);
  return tss;
}

double r_squared(double rss, double tss) {
  if (tss <= 0.0) return 0.0;
  return std::clamp(1.0 - rss / tss, 0.0, 1.0);
}

}  // namespace

RegressionResult fit_glm(const DesignMatrix& x, std::span<const double> y) {
  const LeastSquares ls = solve_least_squares(x, y);
  RegressionResult res;
  res.estimator = Estimator::GlmGaussianIdentity;
  res.names = x.column_names();
  res.n_obs = x.rows();
  fill_inference(res, ls, x.rows() - x.cols());
  res.r_squared = r_squared(ls.rss, total_sum_of_squares(y, x.has_intercept()));
  return res;
}

WithinTransform within_transform(const std::vector<FirmObservation>& rows,
                                 std::span<const std::string> columns) {
  require(!rows.empty(), "no observations");
  require(!columns.empty(), "no regressor columns requested");

  std::vector<std::string> firm_ids;
  std::vector<std::size_t> firm_of_row(rows.size());
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto [it, inserted] = index.emplace(rows[i].firm_id, firm_ids.size());
    if (inserted) firm_ids.push_back(rows[i].firm_id);
    firm_of_row[i] = it->second;
  }
  std::vector<std::size_t> counts(firm_ids.size(), 0);
  for (std::size_t f : firm_of_row) ++counts[f];
  require(std::any_of(counts.begin(), counts.end(), [](std::size_t c) { return c >= 2; }),
          "within transform needs at least one firm observed in two or more periods");

  const auto demean = [&](const std::vector<double>& v) {
    std::vector<double> means(firm_ids.size(), 0.0);
    for (std::size_t i = 0; i < v.size(); ++i) means[firm_of_row[i]] += v[i];
    for (std::size_t f = 0; f < means.size(); ++f) means[f] /= static_cast<double>(counts[f]);
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] - means[firm_of_row[i]];
    return out;
  };

  std::vector<std::string> kept;
  std::vector<std::vector<double>> kept_values;
  std::vector<std::string> dropped;
  std::vector<std::string> notes;
  for (const auto& name : columns) {
    std::vector<double> raw(rows.size());
    double scale = 1.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      raw[i] = observation_value(rows[i], name);
      scale = std::max(scale, std::abs(raw[i]));
    }
    std::vector<double> dm = demean(raw);
    double biggest = 0.0;
    for (double v : dm) biggest = std::max(biggest, std::abs(v));
    if (biggest <= 1e-12 * scale) {
      dropped.push_back(name);
      notes.push_back(name + ": dropped by within transform (no within-firm variation)");
      continue;
    }
    // A demeaned column that depends on the period alone is a shared trend.
    if (firm_ids.size() > 1) {
      std::map<int, double> by_period;
      bool shared = true;
      for (std::size_t i = 0; i < rows.size() && shared; ++i) {
        auto [it, inserted] = by_period.emplace(rows[i].period, dm[i]);
        if (!inserted && std::abs(it->second - dm[i]) > 1e-9 * scale) shared = false;
      }
      if (shared) {
        notes.push_back(name +
                        ": within-firm variation is identical across firms (collinear with a "
                        "common time trend); kept");
      }
    }
    kept.push_back(name);
    kept_values.push_back(std::move(dm));
  }
  if (kept.empty()) {
    throw std::domain_error("insufficient within-firm variation: every regressor was dropped");
  }

  DesignMatrix design(rows.size(), kept);
  for (std::size_t j = 0; j < kept.size(); ++j) {
    for (std::size_t i = 0; i < rows.size(); ++i) design(i, j) = kept_values[j][i];
  }
  return WithinTransform{std::move(design),
                         demean(response_from_observations(rows)),
                         std::move(firm_ids),
                         std::move(firm_of_row),
                         std::move(dropped),
                         std::move(notes)};
}

RegressionResult fit_fixed_effects(const std::vector<FirmObservation>& rows,
                                   std::span<const std::string> columns) {
  const WithinTransform wt = within_transform(rows, columns);
  const LeastSquares ls = solve_least_squares(wt.design, wt.response);
  const std::size_t n = rows.size();
  const std::size_t k = wt.design.cols();
  const std::size_t g = wt.firm_ids.size();
  if (n <= k + g) {
    throw std::domain_error("insufficient within-firm variation: no residual degrees of freedom");
  }

  RegressionResult res;
  res.estimator = Estimator::FixedEffectsWithin;
  res.names = wt.design.column_names();
  res.n_obs = n;
  fill_inference(res, ls, n - k - g);
  res.r_squared = r_squared(ls.rss, total_sum_of_squares(wt.response, false));
  res.dropped_columns = wt.dropped_columns;
  res.notes = wt.notes;

  // alpha_i = mean(y_i) - mean(x_i)' beta
  std::vector<double> sum(g, 0.0);
  std::vector<std::size_t> count(g, 0);
  for (std::size_t i = 0; i < n; ++i) {
    double systematic = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      systematic += observation_value(rows[i], res.names[j]) * res.coefficients[j];
    }
    sum[wt.firm_of_row[i]] += rows[i].growth - systematic;
    ++count[wt.firm_of_row[i]];
  }
  std::vector<std::pair<std::string, double>> alphas;
  alphas.reserve(g);
  for (std::size_t f = 0; f < g; ++f) {
    alphas.emplace_back(wt.firm_ids[f], sum[f] / static_cast<double>(count[f]));
  }
  res.fixed_effects = std::move(alphas);
  return res;
}

PatternReport check_pattern(const RegressionResult& result, const PatternExpectation& expected) {
  PatternReport report;
  for (const auto& e : expected.variables) {
    const std::size_t j = result.index_of(e.name);
    VariableCheck c;
    c.name = e.name;
    c.coefficient = result.coefficients[j];
    c.p_value = result.p_values[j];
    switch (e.sign) {
      case ExpectedSign::Positive: c.sign_ok = c.coefficient > 0.0; break;
      case ExpectedSign::Negative: c.sign_ok = c.coefficient < 0.0; break;
      case ExpectedSign::Any: c.sign_ok = true; break;
    }
    const bool significant = c.p_value <= expected.alpha;
    c.significance_ok = significant == e.significant;
    report.pass = report.pass && c.pass();
    report.checks.push_back(c);
  }
  return report;
}

nlohmann::json to_json(const RegressionResult& r) {
  nlohmann::json vars = nlohmann::json::array();
  for (std::size_t j = 0; j < r.names.size(); ++j) {
    vars.push_back({{"name", r.names[j]},
                    {"coefficient", r.coefficients[j]},
                    {"std_error", r.std_errors[j]},
                    {"t_statistic", r.t_stats[j]},
                    {"p_value", r.p_values[j]}});
  }
  nlohmann::json j = {{"estimator", to_string(r.estimator)},
                      {"variables", vars},
                      {"r_squared", r.r_squared},
                      {"residual_variance", r.residual_variance},
                      {"n_obs", r.n_obs},
                      {"df_resid", r.df_resid},
                      {"dropped_columns", r.dropped_columns},
                      {"notes", r.notes}};
  if (r.fixed_effects) {
    nlohmann::json fe = nlohmann::json::array();
    for (const auto& [id, alpha] : *r.fixed_effects) fe.push_back({{"firm_id", id}, {"alpha", alpha}});
    j["fixed_effects"] = fe;
  }
  return j;
}

std::string format_table(const RegressionResult& r) {
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof(buf), "Estimator: %s  n = %zu  df = %zu  R^2 = %.6g\n",
                std::string(to_string(r.estimator)).c_str(), r.n_obs, r.df_resid, r.r_squared);
  out += buf;
  std::snprintf(buf, sizeof(buf), "%-18s %14s %14s %14s %12s\n", "Variable", "Coefficient",
                "Std. Error", "t-Statistic", "p-Value");
  out += buf;
  for (std::size_t j = 0; j < r.names.size(); ++j) {
    std::snprintf(buf, sizeof(buf), "%-18s %14.6g %14.6g %14.6g %12.6g\n", r.names[j].c_str(),
                  r.coefficients[j], r.std_errors[j], r.t_stats[j], r.p_values[j]);
    out += buf;
  }
  return out;
}

}  // namespace forbearance
