#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "forbearance/econometrics.hpp"

namespace forbearance {

namespace {

// Stirling remainder lgamma(z) - [(z - 1/2) ln z - z + ln(2 pi)/2], z >= 10.
double stirling_tail(double z) {
  const double z2 = z * z;
  return (1.0 / 12.0 - (1.0 / 360.0 - (1.0 / 1260.0 - 1.0 / (1680.0 * z2)) / z2) / z2) / z;
}

// ln B(a, b). When one argument is large, lgamma(big) - lgamma(big + small)
// is formed analytically instead of as a difference of two huge numbers.
double log_beta(double a, double b) {
  const double small = std::min(a, b);
  const double big = std::max(a, b);
  if (big < 10.0) return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
  const double diff = -(big - 0.5) * std::log1p(small / big) - small * std::log(big + small) +
                      small + stirling_tail(big) - stirling_tail(big + small);
  return std::lgamma(small) + diff;
}

// Continued fraction for I_x(a, b) (modified Lentz).
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 100000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) <= kEps) return h;
  }
  throw std::runtime_error("incomplete beta continued fraction did not converge");
}

// I_x(a, b) given both x and y = 1 - x, so callers can supply the small one exactly.
double incomplete_beta(double a, double b, double x, double y) {
  if (x <= 0.0) return 0.0;
  if (y <= 0.0) return 1.0;
  const double log_front = a * std::log(x) + b * std::log(y) - log_beta(a, b);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return std::exp(log_front) * beta_continued_fraction(a, b, x) / a;
  }
  return 1.0 - std::exp(log_front) * beta_continued_fraction(b, a, y) / b;
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
    throw std::domain_error("incomplete beta requires finite a, b > 0");
  }
  if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("incomplete beta requires x in [0, 1]");
  return incomplete_beta(a, b, x, 1.0 - x);
}

namespace {

// P(|T| > |t|) = I_{df / (df + t^2)}(df / 2, 1 / 2).
double two_sided_tail(double t, double df) {
  if (std::isinf(t)) return 0.0;
  const double t2 = t * t;
  if (t2 == 0.0) return 1.0;
  if (std::isinf(t2)) return 0.0;
  const double x = df / (df + t2);
  const double y = 1.0 / (1.0 + df / t2);
  const double a = 0.5 * df;
  const double b = 0.5;
  // ln x = -log1p(t^2 / df) keeps precision when x is close to 1.
  const double log_front = -a * std::log1p(t2 / df) + b * std::log(y) - log_beta(a, b);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return std::exp(log_front) * beta_continued_fraction(a, b, x) / a;
  }
  return 1.0 - std::exp(log_front) * beta_continued_fraction(b, a, y) / b;
}

void check_df(double df) {
  if (!std::isfinite(df) || df < 1.0) {
    throw std::domain_error("degrees of freedom must be finite and >= 1");
  }
}

}  // namespace

double t_pvalue(double t, double df) {
  check_df(df);
  if (std::isnan(t)) throw std::domain_error("t statistic is NaN");
  return std::clamp(two_sided_tail(t, df), 0.0, 1.0);
}

double student_t_cdf(double t, double df) {
  check_df(df);
  if (std::isnan(t)) throw std::domain_error("t statistic is NaN");
  const double half_tail = 0.5 * two_sided_tail(t, df);
  return t < 0.0 ? half_tail : 1.0 - half_tail;
}

}  // namespace forbearance
