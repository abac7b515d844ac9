#ifndef FORBEARANCE_TESTS_ORACLES_HPP
#define FORBEARANCE_TESTS_ORACLES_HPP

// Reference computations used only by the tests. None of them share code
// with the library paths they check.

#include <boost/multiprecision/cpp_int.hpp>

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "forbearance/dynamics.hpp"
#include "forbearance/econometrics.hpp"
#include "forbearance/paneldata.hpp"

namespace oracle {

using Rational = boost::multiprecision::cpp_rational;

// (X'X)^{-1} X'y in exact rational arithmetic. X and y must hold values that
// are exactly representable (doubles convert without rounding).
inline std::vector<double> exact_normal_equations(const std::vector<std::vector<double>>& x,
                                                  const std::vector<double>& y) {
  const std::size_t n = x.size();
  const std::size_t k = x.front().size();
  std::vector<std::vector<Rational>> a(k, std::vector<Rational>(k + 1));
  for (std::size_t r = 0; r < k; ++r) {
    for (std::size_t c = 0; c < k; ++c) {
      Rational s = 0;
      for (std::size_t i = 0; i < n; ++i) s += Rational(x[i][r]) * Rational(x[i][c]);
      a[r][c] = s;
    }
    Rational s = 0;
    for (std::size_t i = 0; i < n; ++i) s += Rational(x[i][r]) * Rational(y[i]);
    a[r][k] = s;
  }
  for (std::size_t col = 0; col < k; ++col) {
    std::size_t piv = col;
    while (piv < k && a[piv][col] == 0) ++piv;
    if (piv == k) throw std::domain_error("oracle: singular normal equations");
    std::swap(a[col], a[piv]);
    for (std::size_t r = 0; r < k; ++r) {
      if (r == col || a[r][col] == 0) continue;
      const Rational f = a[r][col] / a[col][col];
      for (std::size_t c = col; c <= k; ++c) a[r][c] -= f * a[col][c];
    }
  }
  std::vector<double> beta(k);
  for (std::size_t r = 0; r < k; ++r) beta[r] = static_cast<double>(a[r][k] / a[r][r]);
  return beta;
}

// Least squares with one indicator column per firm and no common intercept.
inline forbearance::RegressionResult lsdv(const std::vector<forbearance::FirmObservation>& rows,
                                          const std::vector<std::string>& columns) {
  std::map<std::string, std::size_t> firm_index;
  std::vector<std::string> firms;
  for (const auto& r : rows) {
    if (firm_index.emplace(r.firm_id, firms.size()).second) firms.push_back(r.firm_id);
  }
  std::vector<std::string> names = columns;
  for (const auto& f : firms) names.push_back("d_" + f);
  forbearance::DesignMatrix x(rows.size(), names);
  std::vector<double> y(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < columns.size(); ++j) {
      x(i, j) = forbearance::observation_value(rows[i], columns[j]);
    }
    x(i, columns.size() + firm_index.at(rows[i].firm_id)) = 1.0;
    y[i] = rows[i].growth;
  }
  return forbearance::fit_glm(x, y);
}

// Exact state of x' = -a x + b y, y' = g - y at time t, for a != 1 and a != 0.
inline forbearance::Vec2 affine_solution(double a, double b, double g, forbearance::Vec2 s0,
                                         double t) {
  const double ys = g;
  const double xs = b * g / a;
  const double u0 = s0[0] - xs;
  const double v0 = s0[1] - ys;
  // v(t) = v0 e^{-t}; u' = -a u + b v  =>  u = (u0 - k v0) e^{-a t} + k v0 e^{-t}, k = b / (a - 1).
  const double k = b / (a - 1.0);
  const double v = v0 * std::exp(-t);
  const double u = (u0 - k * v0) * std::exp(-a * t) + k * v0 * std::exp(-t);
  return {xs + u, ys + v};
}

}  // namespace oracle

#endif  // FORBEARANCE_TESTS_ORACLES_HPP
