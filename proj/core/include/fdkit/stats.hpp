#pragma once

#include <span>

namespace fdkit::stats {

// Regularized incomplete beta I_x(a, b), a, b > 0, x in [0, 1].
double incomplete_beta(double a, double b, double x);

// Student-t distribution with `df` degrees of freedom (df >= 1, may be
// fractional). Both throw Error{kInvalidArgument} outside their domain.
double t_cdf(double x, double df);
double t_quantile(double p, double df);

// Two-sided p-value of a t statistic.
double t_two_sided_p(double t, double df);

// Upper quantile of F(2, df2); closed form for two numerator dof.
double f2_quantile(double p, double df2);

// Survival function of the chi-square distribution with two degrees of
// freedom.
double chi2_2_sf(double x);

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // sample (n-1) standard deviation; 0 when n < 2
  std::size_t n = 0;
};

MeanStd mean_std(std::span<const double> xs);

struct JarqueBera {
  double statistic = 0.0;
  double p_value = 1.0;
  double skewness = 0.0;
  double kurtosis = 0.0;  // non-excess
};

// Jarque-Bera normality test with a chi-square(2) p-value. Requires n >= 8.
JarqueBera jarque_bera(std::span<const double> xs);

}  // namespace fdkit::stats
