#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fdkit/cycles.hpp"
#include "fdkit/ingest.hpp"

namespace fdkit {

// Steady-state criteria for a leader/follower window:
//   - leader and follower speed range <= max_speed_var
//   - |v_lead - v_follow| <= max_dv at every sample
//   - spacing range <= max_spacing_var
//   - |grade| <= max_abs_grade inside the window and grade_lookback before
//   - no overlap with a driving cycle or the min_gap_after_cycle after it
// A window must last at least min_duration.
struct Thresholds {
  double max_speed_var = 0.45;      // m/s
  double min_duration = 10.0;       // s
  double max_dv = 0.45;             // m/s
  double max_spacing_var = 1.0;     // m
  double max_abs_grade = 3.0;       // percent
  double grade_lookback = 10.0;     // s
  double min_gap_after_cycle = 10.0;  // s
  bool enforce_cycle_gap = false;
  // Centered moving-average width applied to the speed and spacing channels
  // before the tests above; 0 disables it. Summaries use the raw channels.
  double smoothing_window = 0.0;  // s

  void validate() const;  // throws Error{kConfig}
};

struct EquilibriumInterval {
  double t_start = 0.0;
  double t_end = 0.0;
  double v_mean = 0.0;  // follower
  double s_mean = 0.0;
  std::size_t n_samples = 0;
  double v_std = 0.0;
  double s_std = 0.0;
  std::size_t first = 0;  // sample indices into the pair, inclusive
  std::size_t last = 0;

  bool operator==(const EquilibriumInterval&) const = default;
};

struct EquilibriumPoint {
  double v = 0.0;
  double s = 0.0;
  double weight = 1.0;     // samples in the originating interval
  std::size_t origin = 0;  // index of the originating interval

  bool operator==(const EquilibriumPoint&) const = default;
};

// Centered moving average over `window_s` seconds of v_lead, v_follow and
// spacing; windows shrink at the record edges.
PairSeries smooth_pair(const PairSeries& pair, double window_s);

// Disjoint windows satisfying every enabled criterion, chosen to cover the
// most total time (ties go to later starts). Sorted; none can be grown on
// either side without breaking a criterion or running into its neighbour.
std::vector<EquilibriumInterval> find_equilibrium_intervals(
    const PairSeries& pair, const Thresholds& th, std::span<const CycleBoundary> cycles = {});

std::vector<EquilibriumPoint> to_points(std::span<const EquilibriumInterval> intervals);

// Per-sample cycle-gap flag: true when t lies inside a cycle or less
// than `gap` seconds after its end. Exposed for diagnostics and oracles.
std::vector<bool> disturbed_mask(std::span<const double> t,
                                 std::span<const CycleBoundary> cycles, double gap);

}  // namespace fdkit
