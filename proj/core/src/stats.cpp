#include "fdkit/stats.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "fdkit/error.hpp"

namespace fdkit::stats {
namespace {

// Modified Lentz evaluation of the continued fraction for I_x(a, b).
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 10000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  throw Error(ErrorCode::kNoConvergence, "incomplete beta continued fraction");
}

double t_pdf(double x, double df) {
  const double log_norm = std::lgamma(0.5 * (df + 1.0)) - std::lgamma(0.5 * df) -
                          0.5 * std::log(df * M_PI);
  return std::exp(log_norm - 0.5 * (df + 1.0) * std::log1p(x * x / df));
}

void check_df(double df) {
  if (!(df >= 1.0) || !std::isfinite(df)) {
    throw Error(ErrorCode::kInvalidArgument, "degrees of freedom must be >= 1");
  }
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0) || !(x >= 0.0 && x <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "incomplete_beta domain");
  }
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_continued_fraction(a, b, x) / a;
  }
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double t_cdf(double x, double df) {
  check_df(df);
  if (std::isnan(x)) throw Error(ErrorCode::kInvalidArgument, "t_cdf of NaN");
  if (x == 0.0) return 0.5;
  if (std::isinf(x)) return x > 0 ? 1.0 : 0.0;
  // The tail mass is 0.5 * I_{df/(df+x^2)}(df/2, 1/2).
  const double z = df / (df + x * x);
  const double tail = 0.5 * incomplete_beta(0.5 * df, 0.5, z);
  return x > 0.0 ? 1.0 - tail : tail;
}

double t_two_sided_p(double t, double df) {
  check_df(df);
  if (std::isnan(t)) throw Error(ErrorCode::kInvalidArgument, "t statistic is NaN");
  if (std::isinf(t)) return 0.0;
  const double z = df / (df + t * t);
  return incomplete_beta(0.5 * df, 0.5, z);
}

double t_quantile(double p, double df) {
  check_df(df);
  if (!(p > 0.0 && p < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "t_quantile needs 0 < p < 1");
  }
  if (p == 0.5) return 0.0;
  // Solve on the upper half and mirror, which keeps the tail mass accurate.
  const bool upper = p > 0.5;
  const double q = upper ? 1.0 - p : p;  // target tail mass, < 0.5

  auto tail = [df](double x) { return 0.5 * incomplete_beta(0.5 * df, 0.5, df / (df + x * x)); };

  double lo = 0.0;
  double hi = 1.0;
  while (tail(hi) > q) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) break;
  }
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double f = tail(x) - q;  // decreasing in x
    if (f > 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    const double step = f / t_pdf(x, df);  // d tail/dx = -pdf
    double next = x + step;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::fabs(next - x) <= 1e-15 * std::max(1.0, std::fabs(x))) {
      x = next;
      break;
    }
    x = next;
  }
  return upper ? x : -x;
}

double f2_quantile(double p, double df2) {
  if (!(p > 0.0 && p < 1.0) || !(df2 > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "f2_quantile domain");
  }
  // F(2, m) has cdf 1 - (1 + 2x/m)^(-m/2).
  return 0.5 * df2 * (std::pow(1.0 - p, -2.0 / df2) - 1.0);
}

double chi2_2_sf(double x) {
  if (std::isnan(x)) throw Error(ErrorCode::kInvalidArgument, "chi2 of NaN");
  return x <= 0.0 ? 1.0 : std::exp(-0.5 * x);
}

MeanStd mean_std(std::span<const double> xs) {
  MeanStd out;
  out.n = xs.size();
  if (xs.empty()) return out;
  double sum = 0.0;
  for (double x : xs) sum += x;
  out.mean = sum / static_cast<double>(xs.size());
  if (xs.size() < 2) return out;
  double ss = 0.0;
  for (double x : xs) ss += (x - out.mean) * (x - out.mean);
  out.std = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  return out;
}

JarqueBera jarque_bera(std::span<const double> xs) {
  const std::size_t n = xs.size();
  if (n < 8) {
    throw Error(ErrorCode::kTooFewSamples,
                "Jarque-Bera needs at least 8 samples, got " + std::to_string(n));
  }
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(n);
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double x : xs) {
    const double d = x - mean;
    const double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  m2 /= static_cast<double>(n);
  m3 /= static_cast<double>(n);
  m4 /= static_cast<double>(n);

  JarqueBera out;
  if (m2 <= 0.0) {
    // Constant sample: no evidence against normality can be computed.
    return out;
  }
  out.skewness = m3 / std::pow(m2, 1.5);
  out.kurtosis = m4 / (m2 * m2);
  const double excess = out.kurtosis - 3.0;
  out.statistic = static_cast<double>(n) / 6.0 *
                  (out.skewness * out.skewness + 0.25 * excess * excess);
  out.p_value = chi2_2_sf(out.statistic);
  return out;
}

}  // namespace fdkit::stats
