#pragma once

namespace alphasign {

double std_normal_cdf(double x);
double std_normal_quantile(double p);

double cauchy_cdf(double x);

/// G(x) = exp(-exp(-x/2)/sqrt(pi)), the extreme-value law shared by the
/// max-type test statistics.
double gumbel_g_cdf(double x);
double gumbel_g_quantile(double q);

/// Regularized incomplete beta I_x(a, b) by continued fractions.
double reg_inc_beta(double a, double b, double x);
double f_cdf(double x, double d1, double d2);

}  // namespace alphasign
