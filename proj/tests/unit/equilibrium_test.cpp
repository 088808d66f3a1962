#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <vector>

#include "fdkit/equilibrium.hpp"
#include "fdkit/error.hpp"
#include "fdkit/pipeline.hpp"
#include "fdkit/simulate.hpp"
#include "oracles/oracles.hpp"
#include "oracles/random_series.hpp"

namespace {

using fdkit::BoundaryKind;
using fdkit::CycleBoundary;
using fdkit::PairSeries;
using fdkit::Thresholds;

PairSeries constant_pair(double seconds, double rate, double v, double s) {
  PairSeries p;
  const auto n = static_cast<std::size_t>(std::llround(seconds * rate)) + 1;
  for (std::size_t i = 0; i < n; ++i) {
    p.t.push_back(static_cast<double>(i) / rate);
    p.v_lead.push_back(v);
    p.v_follow.push_back(v);
    p.spacing.push_back(s);
    p.grade.push_back(0.0);
  }
  return p;
}

double covered(const std::vector<fdkit::EquilibriumInterval>& ivs) {
  double sum = 0.0;
  for (const auto& iv : ivs) sum += iv.t_end - iv.t_start;
  return sum;
}

std::vector<oracle::Window> windows_of(const std::vector<fdkit::EquilibriumInterval>& ivs) {
  std::vector<oracle::Window> out;
  for (const auto& iv : ivs) out.push_back({iv.first, iv.last});
  return out;
}

TEST(Equilibrium, ConstantPairIsOneInterval) {
  const auto p = constant_pair(60.0, 10.0, 20.0, 25.0);
  const auto ivs = fdkit::find_equilibrium_intervals(p, Thresholds{});
  ASSERT_EQ(ivs.size(), 1u);
  EXPECT_DOUBLE_EQ(ivs[0].t_start, 0.0);
  EXPECT_DOUBLE_EQ(ivs[0].t_end, 60.0);
  EXPECT_DOUBLE_EQ(ivs[0].v_mean, 20.0);
  EXPECT_DOUBLE_EQ(ivs[0].s_mean, 25.0);
  EXPECT_EQ(ivs[0].n_samples, 601u);
}

TEST(Equilibrium, SpacingRampMatchesBruteForce) {
  auto p = constant_pair(60.0, 10.0, 20.0, 25.0);
  for (std::size_t i = 0; i < p.size(); ++i) p.spacing[i] = 25.0 + 1.5 * p.t[i] / 60.0;
  const Thresholds th;
  const auto ivs = fdkit::find_equilibrium_intervals(p, th);
  ASSERT_FALSE(ivs.empty());
  for (const auto& iv : ivs) {
    EXPECT_LE(p.spacing[iv.last] - p.spacing[iv.first], th.max_spacing_var + 1e-12);
    EXPECT_GE(iv.t_end - iv.t_start, th.min_duration);
  }
  EXPECT_EQ(windows_of(ivs), oracle::equilibrium_windows(p, th, {}));
}

TEST(Equilibrium, ShortRecordGivesNothing) {
  const auto p = constant_pair(9.5, 10.0, 20.0, 25.0);
  EXPECT_TRUE(fdkit::find_equilibrium_intervals(p, Thresholds{}).empty());
  EXPECT_TRUE(fdkit::find_equilibrium_intervals(PairSeries{}, Thresholds{}).empty());
}

TEST(Equilibrium, PointwiseSpeedDifference) {
  auto p = constant_pair(60.0, 10.0, 20.0, 25.0);
  p.v_follow[300] = 20.5;  // breaks (ii) at one sample only
  const auto ivs = fdkit::find_equilibrium_intervals(p, Thresholds{});
  ASSERT_EQ(ivs.size(), 2u);
  EXPECT_EQ(ivs[0].last, 299u);
  EXPECT_EQ(ivs[1].first, 301u);
}

TEST(Equilibrium, GradeLookback) {
  auto p = constant_pair(60.0, 10.0, 20.0, 25.0);
  for (std::size_t i = 0; i <= 100; ++i) p.grade[i] = 4.0;  // steep until t = 10
  Thresholds th;
  th.grade_lookback = 10.0;
  const auto ivs = fdkit::find_equilibrium_intervals(p, th);
  ASSERT_EQ(ivs.size(), 1u);
  // the window may not begin within 10 s of a steep sample
  EXPECT_NEAR(ivs[0].t_start, 20.1, 1e-9);
  th.grade_lookback = 0.0;
  EXPECT_NEAR(fdkit::find_equilibrium_intervals(p, th)[0].t_start, 10.1, 1e-9);
}

TEST(Equilibrium, CycleGap) {
  auto p = constant_pair(120.0, 10.0, 20.0, 25.0);
  const std::vector<CycleBoundary> cycles{{30.0, BoundaryKind::kCycleStart},
                                          {50.0, BoundaryKind::kCycleEnd}};
  Thresholds th;
  th.enforce_cycle_gap = true;
  const auto ivs = fdkit::find_equilibrium_intervals(p, th, cycles);
  ASSERT_EQ(ivs.size(), 2u);
  EXPECT_NEAR(ivs[0].t_end, 29.9, 1e-9);
  EXPECT_NEAR(ivs[1].t_start, 60.0, 1e-9);
  th.enforce_cycle_gap = false;
  EXPECT_EQ(fdkit::find_equilibrium_intervals(p, th, cycles).size(), 1u);
}

TEST(Equilibrium, DisturbedMaskHandlesOpenEnds) {
  const std::vector<double> t{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  // record starts mid-cycle (end without start) and ends mid-cycle
  const std::vector<CycleBoundary> cycles{{1.0, BoundaryKind::kCycleEnd},
                                          {7.0, BoundaryKind::kCycleStart}};
  const auto m = fdkit::disturbed_mask(t, cycles, 2.0);
  const std::vector<bool> want{true, true, true, false, false, false, false, true, true, true};
  EXPECT_EQ(m, want);
}

TEST(Equilibrium, TighteningCounterexampleForGreedy) {
  // A first-fit tiling covers 10 s at 1.0 m but 15 s at 0.6 m here.
  PairSeries p;
  std::vector<double> s(5, -0.3);
  s.insert(s.end(), 6, 0.5);
  s.insert(s.end(), 10, 1.05);
  for (std::size_t i = 0; i < s.size(); ++i) {
    p.t.push_back(static_cast<double>(i));
    p.v_lead.push_back(20.0);
    p.v_follow.push_back(20.0);
    p.spacing.push_back(30.0 + s[i]);
    p.grade.push_back(0.0);
  }
  Thresholds loose, tight;
  loose.max_spacing_var = 1.0;
  tight.max_spacing_var = 0.6;
  const double c_loose = covered(fdkit::find_equilibrium_intervals(p, loose));
  const double c_tight = covered(fdkit::find_equilibrium_intervals(p, tight));
  EXPECT_DOUBLE_EQ(c_tight, 15.0);
  EXPECT_GE(c_loose, c_tight);
}

TEST(Equilibrium, MatchesWindowOracle) {
  std::size_t total = 0, with_any = 0;
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const auto c = oracle::random_case(seed, 3000);
    const auto got = fdkit::find_equilibrium_intervals(c.pair, c.th, c.cycles);
    EXPECT_EQ(windows_of(got), oracle::equilibrium_windows(c.pair, c.th, c.cycles))
        << "seed " << seed;
    total += got.size();
    with_any += got.empty() ? 0 : 1;
  }
  std::printf("oracle cases: %zu intervals, %zu/30 series non-empty\n", total, with_any);
  EXPECT_GE(with_any, 20u);  // the generator must exercise the tiling
}

TEST(Equilibrium, TighteningNeverGrowsCoverage) {
  for (std::uint64_t seed = 100; seed < 140; ++seed) {
    const auto c = oracle::random_case(seed, 2000);
    const double base = covered(fdkit::find_equilibrium_intervals(c.pair, c.th, c.cycles));
    for (int which = 0; which < 6; ++which) {
      Thresholds t = c.th;
      switch (which) {
        case 0: t.max_speed_var *= 0.7; break;
        case 1: t.max_dv *= 0.7; break;
        case 2: t.max_spacing_var *= 0.7; break;
        case 3: t.min_duration *= 1.5; break;
        case 4: t.grade_lookback += 5.0; break;
        case 5: t.min_gap_after_cycle += 5.0; break;
      }
      const double tighter = covered(fdkit::find_equilibrium_intervals(c.pair, t, c.cycles));
      EXPECT_LE(tighter, base + 1e-9) << "seed " << seed << " threshold " << which;
    }
  }
}

TEST(Equilibrium, DisjointSortedMaximal) {
  for (std::uint64_t seed = 200; seed < 220; ++seed) {
    const auto c = oracle::random_case(seed, 1500);
    const auto ivs = fdkit::find_equilibrium_intervals(c.pair, c.th, c.cycles);
    const auto earliest = oracle::earliest_starts(c.pair, c.th, c.cycles);
    const std::size_t n = c.pair.size();
    for (std::size_t k = 0; k < ivs.size(); ++k) {
      const auto& iv = ivs[k];
      if (k > 0) EXPECT_GT(iv.first, ivs[k - 1].last);
      EXPECT_LE(earliest[iv.last], iv.first);  // admissible
      const bool left_free = iv.first > 0 && (k == 0 || ivs[k - 1].last + 1 < iv.first);
      const bool right_free = iv.last + 1 < n && (k + 1 == ivs.size() || ivs[k + 1].first > iv.last + 1);
      if (left_free) EXPECT_GT(earliest[iv.last], iv.first - 1) << "seed " << seed;
      if (right_free) EXPECT_GT(earliest[iv.last + 1], iv.first) << "seed " << seed;
    }
  }
}

TEST(Equilibrium, SimulatedRunAvoidsCycles) {
  fdkit::ScenarioSpec scenario = fdkit::ma_preset(2);
  fdkit::NoiseSpec noise;
  noise.sigma_pos = 0.0;
  noise.sigma_speed = 0.0;
  const std::vector<fdkit::OvrvParams> followers{fdkit::kSettlingFollower};
  const auto platoon = fdkit::gen_platoon(scenario, followers, noise);
  const auto pair = fdkit::build_pair(platoon.record.tracks[0], platoon.record.tracks[1],
                                      fdkit::PairMode::kFromPositions);
  Thresholds th;
  th.enforce_cycle_gap = true;
  const auto& truth = platoon.ground_truth;
  const auto ivs = fdkit::find_equilibrium_intervals(pair, th, truth.boundaries);
  ASSERT_FALSE(ivs.empty());
  for (const auto& iv : ivs) {
    for (const auto& cyc : truth.cycles) {
      EXPECT_FALSE(iv.t_end >= cyc.t_start && iv.t_start < cyc.t_end + 10.0)
          << "interval [" << iv.t_start << ", " << iv.t_end << "] touches cycle at "
          << cyc.t_start;
    }
  }
  const auto points = fdkit::to_points(ivs);
  EXPECT_EQ(points.size(), ivs.size());
}

TEST(Equilibrium, ToPoints) {
  EXPECT_TRUE(fdkit::to_points({}).empty());
  fdkit::EquilibriumInterval iv;
  iv.v_mean = 20.0;
  iv.s_mean = 25.0;
  iv.n_samples = 101;
  const auto pts = fdkit::to_points(std::vector{iv});
  ASSERT_EQ(pts.size(), 1u);
  EXPECT_EQ(pts[0], (fdkit::EquilibriumPoint{20.0, 25.0, 101.0, 0}));
}

TEST(Equilibrium, RejectsBadThresholds) {
  Thresholds th;
  th.max_dv = 0.0;
  EXPECT_THROW(fdkit::find_equilibrium_intervals(constant_pair(20, 10, 20, 25), th),
               fdkit::Error);
}

}  // namespace
