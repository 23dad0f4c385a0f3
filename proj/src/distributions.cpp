#include "alphasign/distributions.hpp"

#include <cmath>
#include <limits>

#include "alphasign/types.hpp"

namespace alphasign {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kSqrtPi = 1.7724538509055160;

double std_normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / (kSqrt2 * kSqrtPi);
}

/// Rational initial guess for the normal quantile, then refined against the
/// erfc-based CDF.
double normal_quantile_guess(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  if (p < plow) {
    double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
            c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - plow) {
    double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
             c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  double q = p - 0.5;
  double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r +
          a[5]) *
         q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

/// Continued fraction for the incomplete beta, modified Lentz scheme.
double beta_cf(double a, double b, double x) {
  const double eps = 1e-15;
  const double tiny = 1e-300;
  double qab = a + b;
  double qap = a + 1.0;
  double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 400; ++m) {
    int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < eps) return h;
  }
  throw numeric_error("incomplete beta continued fraction did not converge");
}

}  // namespace

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double std_normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw data_error("normal quantile requires p in (0, 1)");
  double x = normal_quantile_guess(p);
  for (int i = 0; i < 2; ++i) {
    double err = std_normal_cdf(x) - p;
    double pdf = std_normal_pdf(x);
    if (pdf <= 0.0) break;
    x -= err / pdf;
  }
  return x;
}

double cauchy_cdf(double x) {
  return 0.5 + std::atan(x) / 3.141592653589793;
}

double gumbel_g_cdf(double x) {
  return std::exp(-std::exp(-x / 2.0) / kSqrtPi);
}

double gumbel_g_quantile(double q) {
  if (!(q > 0.0 && q < 1.0))
    throw data_error("gumbel quantile requires q in (0, 1)");
  return -2.0 * std::log(-kSqrtPi * std::log(q));
}

double reg_inc_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0))
    throw data_error("incomplete beta requires positive parameters");
  if (!(x >= 0.0 && x <= 1.0))
    throw data_error("incomplete beta requires x in [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  double lbeta = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b);
  double front = std::exp(lbeta + a * std::log(x) + b * std::log1p(-x));
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(a, b, x) / a;
  return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double f_cdf(double x, double d1, double d2) {
  if (!(d1 >= 1.0) || !(d2 >= 1.0))
    throw data_error("F distribution requires d1, d2 >= 1");
  if (!(x > 0.0)) return 0.0;
  double u = d1 * x / (d1 * x + d2);
  return reg_inc_beta(d1 / 2.0, d2 / 2.0, u);
}

}  // namespace alphasign
