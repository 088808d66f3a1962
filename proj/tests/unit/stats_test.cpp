#include <gtest/gtest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <random>
#include <vector>

#include "fdkit/error.hpp"
#include "fdkit/stats.hpp"

namespace {

namespace st = fdkit::stats;

TEST(Stats, IncompleteBetaAgainstBoost) {
  for (double a : {0.5, 1.0, 2.5, 7.0, 40.0}) {
    for (double b : {0.5, 1.0, 3.0, 12.0}) {
      for (double x : {0.0, 0.01, 0.2, 0.5, 0.77, 0.99, 1.0}) {
        EXPECT_NEAR(st::incomplete_beta(a, b, x), boost::math::ibeta(a, b, x), 1e-12)
            << a << " " << b << " " << x;
      }
    }
  }
}

TEST(Stats, TCdfAgainstBoost) {
  for (double df : {1.0, 2.0, 3.5, 10.0, 29.0, 120.0, 5000.0}) {
    boost::math::students_t dist(df);
    for (double x : {-40.0, -6.0, -2.0, -0.3, 0.0, 0.1, 1.96, 4.0, 30.0}) {
      EXPECT_NEAR(st::t_cdf(x, df), boost::math::cdf(dist, x), 1e-12) << df << " " << x;
    }
  }
}

TEST(Stats, TQuantileAgainstBoost) {
  EXPECT_NEAR(st::t_quantile(0.975, 10), 2.228139, 1e-5);
  for (double df : {1.0, 2.0, 4.0, 10.0, 47.0, 300.0}) {
    boost::math::students_t dist(df);
    for (double p : {1e-6, 0.001, 0.025, 0.3, 0.5, 0.8, 0.975, 0.9995}) {
      const double want = boost::math::quantile(dist, p);
      EXPECT_NEAR(st::t_quantile(p, df), want, 1e-9 * std::max(1.0, std::fabs(want)))
          << df << " " << p;
    }
  }
}

TEST(Stats, QuantileInvertsCdf) {
  for (double df : {1.5, 6.0, 80.0}) {
    for (double p = 0.01; p < 1.0; p += 0.07) {
      EXPECT_NEAR(st::t_cdf(st::t_quantile(p, df), df), p, 1e-12);
    }
  }
}

TEST(Stats, TwoSidedP) {
  boost::math::students_t dist(17);
  EXPECT_NEAR(st::t_two_sided_p(2.3, 17), 2 * boost::math::cdf(complement(dist, 2.3)), 1e-12);
  EXPECT_NEAR(st::t_two_sided_p(-2.3, 17), st::t_two_sided_p(2.3, 17), 1e-15);
  EXPECT_DOUBLE_EQ(st::t_two_sided_p(0.0, 17), 1.0);
}

TEST(Stats, F2QuantileAgainstBoost) {
  for (double df2 : {1.0, 3.0, 20.0, 200.0}) {
    boost::math::fisher_f dist(2, df2);
    for (double p : {0.5, 0.9, 0.95, 0.99}) {
      const double want = boost::math::quantile(dist, p);
      EXPECT_NEAR(st::f2_quantile(p, df2), want, 1e-9 * want);
    }
  }
}

TEST(Stats, Chi2SurvivalAgainstBoost) {
  boost::math::chi_squared dist(2);
  for (double x : {0.0, 0.5, 3.0, 9.21, 40.0}) {
    EXPECT_NEAR(st::chi2_2_sf(x), boost::math::cdf(complement(dist, x)), 1e-14);
  }
}

TEST(Stats, DomainErrors) {
  EXPECT_THROW(st::t_cdf(0.0, 0.0), fdkit::Error);
  EXPECT_THROW(st::t_quantile(0.0, 5.0), fdkit::Error);
  EXPECT_THROW(st::t_quantile(1.0, 5.0), fdkit::Error);
  EXPECT_THROW(st::t_quantile(0.5, -1.0), fdkit::Error);
}

TEST(Stats, MeanStd) {
  const std::vector<double> x{2, 4, 4, 4, 5, 5, 7, 9};
  const auto m = st::mean_std(x);
  EXPECT_DOUBLE_EQ(m.mean, 5.0);
  EXPECT_NEAR(m.std, std::sqrt(32.0 / 7.0), 1e-14);
  EXPECT_EQ(m.n, 8u);
  EXPECT_DOUBLE_EQ(st::mean_std(std::vector<double>{3.0}).std, 0.0);
}

TEST(Stats, JarqueBeraSeparatesShapes) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> a(500), b(500);
  for (auto& x : a) x = normal(rng);
  for (auto& x : b) x = expo(rng);
  EXPECT_GT(st::jarque_bera(a).p_value, 0.05);
  const auto jb = st::jarque_bera(b);
  EXPECT_LT(jb.p_value, 0.01);
  EXPECT_NEAR(jb.skewness, 2.0, 0.5);
  EXPECT_THROW(st::jarque_bera(std::vector<double>(7, 1.0)), fdkit::Error);
}

TEST(Stats, JarqueBeraFalseAlarmRate) {
  // Asymptotic test: at n = 500 the 5% level should be roughly honoured.
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal(0.0, 1.0);
  int rejects = 0;
  const int reps = 2000;
  std::vector<double> x(500);
  for (int r = 0; r < reps; ++r) {
    for (auto& v : x) v = normal(rng);
    rejects += st::jarque_bera(x).p_value < 0.05 ? 1 : 0;
  }
  const double rate = static_cast<double>(rejects) / reps;
  EXPECT_GT(rate, 0.02);
  EXPECT_LT(rate, 0.08);
}

}  // namespace
