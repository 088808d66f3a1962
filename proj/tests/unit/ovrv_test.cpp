#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <vector>

#include "fdkit/error.hpp"
#include "fdkit/nelder_mead.hpp"
#include "fdkit/ovrv.hpp"

namespace {

fdkit::LeaderSeries smooth_leader(double seconds, double rate) {
  fdkit::LeaderSeries l;
  double x = 300.0;
  const auto n = static_cast<std::size_t>(seconds * rate) + 1;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / rate;
    const double v = 20.0 + 3.0 * std::sin(0.05 * t);
    if (i > 0) x += 0.5 * (v + l.v.back()) / rate;
    l.t.push_back(t);
    l.v.push_back(v);
    l.x.push_back(x);
  }
  return l;
}

TEST(Ovrv, StaysOnEquilibrium) {
  fdkit::LeaderSeries l;
  for (int i = 0; i <= 600; ++i) {
    l.t.push_back(0.1 * i);
    l.v.push_back(20.0);
    l.x.push_back(500.0 + 2.0 * i);
  }
  const fdkit::OvrvParams p{0.1, 0.5, 1.2, 6.0};
  const auto f = fdkit::simulate_ovrv(p, l, 1.2 * 20.0 + 6.0, 20.0, 0.1);
  for (std::size_t i = 0; i < f.t.size(); ++i) {
    EXPECT_NEAR(f.s[i], 30.0, 1e-9);
    EXPECT_NEAR(f.v[i], 20.0, 1e-12);
    EXPECT_NEAR(f.a[i], 0.0, 1e-12);
  }
}

TEST(Ovrv, RelaxesToEquilibrium) {
  fdkit::LeaderSeries l;
  for (int i = 0; i <= 3000; ++i) {
    l.t.push_back(0.1 * i);
    l.v.push_back(25.0);
    l.x.push_back(800.0 + 2.5 * i);
  }
  const fdkit::OvrvParams p{0.3, 0.8, 1.5, 4.0};
  const auto f = fdkit::simulate_ovrv(p, l, 50.0, 22.0, 0.1);
  EXPECT_NEAR(f.s.back(), 1.5 * 25.0 + 4.0, 1e-6);
  EXPECT_NEAR(f.v.back(), 25.0, 1e-6);
}

TEST(Ovrv, EulerConvergesAtFirstOrder) {
  const auto l = smooth_leader(120.0, 10.0);
  const fdkit::OvrvParams p{0.1, 0.5, 1.2, 6.0};
  const double s0 = 1.2 * 20.0 + 6.0 + 3.0;
  const auto ref = fdkit::simulate_ovrv(p, l, s0, 20.0, 0.1 / 256);
  auto err = [&](double dt) {
    const auto f = fdkit::simulate_ovrv(p, l, s0, 20.0, dt);
    double worst = 0.0;
    for (std::size_t i = 0; i < f.s.size(); ++i) worst = std::max(worst, std::fabs(f.s[i] - ref.s[i]));
    return worst;
  };
  const double e1 = err(0.1), e2 = err(0.05), e3 = err(0.025);
  EXPECT_LT(e1, 0.05);
  EXPECT_NEAR(e1 / e2, 2.0, 0.3);
  EXPECT_NEAR(e2 / e3, 2.0, 0.3);
}

TEST(Ovrv, SubstepsIndependentOfLeaderRate) {
  // dt caps the step, so a 0.1 s cap on 10 Hz data equals one step per sample
  const auto l = smooth_leader(60.0, 10.0);
  const fdkit::OvrvParams p;
  const auto a = fdkit::simulate_ovrv(p, l, 30.0, 20.0, 0.1);
  const auto b = fdkit::simulate_ovrv(p, l, 30.0, 20.0, 0.1 - 1e-13);
  EXPECT_EQ(a.s, b.s);
}

TEST(Ovrv, Errors) {
  const auto l = smooth_leader(30.0, 10.0);
  EXPECT_THROW(fdkit::simulate_ovrv({0.0, 0.5, 1.2, 6.0}, l, 30.0, 20.0, 0.1), fdkit::Error);
  EXPECT_THROW(fdkit::simulate_ovrv({}, l, 30.0, 20.0, 0.2), fdkit::Error);
  try {
    fdkit::simulate_ovrv({}, l, 0.5, 30.0, 0.1);  // starts nearly touching, much faster
    FAIL();
  } catch (const fdkit::Error& e) {
    EXPECT_EQ(e.code(), fdkit::ErrorCode::kDiverged);
  }
}

TEST(NelderMead, Rosenbrock) {
  auto f = [](const std::vector<double>& x) {
    return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
  };
  fdkit::NelderMeadOptions o;
  o.max_iterations = 5000;
  o.tolerance = 1e-12;
  const auto r = fdkit::nelder_mead(f, {-1.2, 1.0}, o);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.x[0], 1.0, 1e-4);
  EXPECT_NEAR(r.x[1], 1.0, 1e-4);
}

TEST(NelderMead, QuadraticFourD) {
  auto f = [](const std::vector<double>& x) {
    double s = 0;
    for (std::size_t i = 0; i < x.size(); ++i) s += (i + 1.0) * std::pow(x[i] - 0.5 * i, 2);
    return s;
  };
  const auto r = fdkit::nelder_mead(f, {3.0, 3.0, 3.0, 3.0});
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(r.x[i], 0.5 * i, 1e-3);
}

TEST(NelderMead, RespectsBounds) {
  auto f = [](const std::vector<double>& x) { return std::pow(x[0] + 2.0, 2) + x[1] * x[1]; };
  fdkit::NelderMeadOptions o;
  o.lower = {0.0, -1.0};
  o.upper = {5.0, 1.0};
  const auto r = fdkit::nelder_mead(f, {2.0, 0.5}, o);
  EXPECT_NEAR(r.x[0], 0.0, 1e-6);
  EXPECT_NEAR(r.x[1], 0.0, 1e-3);
  EXPECT_GE(r.x[0], 0.0);
}

TEST(NelderMead, IterationCap) {
  auto f = [](const std::vector<double>& x) { return std::pow(x[0] - 1e3, 2); };
  fdkit::NelderMeadOptions o;
  o.max_iterations = 5;
  const auto r = fdkit::nelder_mead(f, {0.0}, o);
  EXPECT_FALSE(r.converged);
  EXPECT_LE(r.iterations, 5u);
}

}  // namespace
