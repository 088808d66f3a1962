#include "fdkit/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "fdkit/error.hpp"
#include "fdkit/stats.hpp"

namespace fdkit {
namespace {

// Sliding-window range tracker over a channel with monotone deques.
class RangeWindow {
 public:
  explicit RangeWindow(const std::vector<double>& x) : x_(x) {}

  void clear() {
    max_.clear();
    min_.clear();
  }

  void drop_before(std::size_t first) {
    while (!max_.empty() && max_.front() < first) max_.pop_front();
    while (!min_.empty() && min_.front() < first) min_.pop_front();
  }

  // Range of the window if sample k were appended.
  double range_with(std::size_t k) const {
    const double v = x_[k];
    const double hi = max_.empty() ? v : std::max(x_[max_.front()], v);
    const double lo = min_.empty() ? v : std::min(x_[min_.front()], v);
    return hi - lo;
  }

  void push(std::size_t k) {
    while (!max_.empty() && x_[max_.back()] <= x_[k]) max_.pop_back();
    max_.push_back(k);
    while (!min_.empty() && x_[min_.back()] >= x_[k]) min_.pop_back();
    min_.push_back(k);
  }

 private:
  const std::vector<double>& x_;
  std::deque<std::size_t> max_;
  std::deque<std::size_t> min_;
};

std::vector<double> moving_average(const std::vector<double>& x, std::size_t half) {
  const std::size_t n = x.size();
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + x[i];
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= half ? i - half : 0;
    const std::size_t hi = std::min(n - 1, i + half);
    out[i] = (prefix[hi + 1] - prefix[lo]) / static_cast<double>(hi - lo + 1);
  }
  return out;
}

}  // namespace

void Thresholds::validate() const {
  const bool ok = max_speed_var > 0.0 && min_duration > 0.0 && max_dv > 0.0 &&
                  max_spacing_var > 0.0 && max_abs_grade > 0.0 && grade_lookback >= 0.0 &&
                  min_gap_after_cycle >= 0.0 && smoothing_window >= 0.0;
  if (!ok) throw Error(ErrorCode::kConfig, "equilibrium thresholds must be positive");
}

PairSeries smooth_pair(const PairSeries& pair, double window_s) {
  if (window_s <= 0.0 || pair.size() < 2) return pair;
  const double dt = median_dt(pair.t);
  const auto half = static_cast<std::size_t>(std::llround(0.5 * window_s / dt));
  if (half == 0) return pair;
  PairSeries out = pair;
  out.v_lead = moving_average(pair.v_lead, half);
  out.v_follow = moving_average(pair.v_follow, half);
  out.spacing = moving_average(pair.spacing, half);
  return out;
}

std::vector<bool> disturbed_mask(std::span<const double> t,
                                 std::span<const CycleBoundary> cycles, double gap) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  struct Zone {
    double from, to;  // [from, to)
  };
  std::vector<Zone> zones;
  double open_start = -kInf;
  bool open = false;
  for (const auto& c : cycles) {
    if (c.kind == BoundaryKind::kCycleStart) {
      open_start = c.t;
      open = true;
    } else {
      // An end with no start means the record began mid-cycle.
      zones.push_back({open ? open_start : -kInf, c.t + gap});
      open = false;
    }
  }
  if (open) zones.push_back({open_start, kInf});

  std::vector<bool> mask(t.size(), false);
  for (std::size_t i = 0; i < t.size(); ++i) {
    for (const auto& z : zones) {
      if (t[i] >= z.from && t[i] < z.to) {
        mask[i] = true;
        break;
      }
    }
  }
  return mask;
}

std::vector<EquilibriumInterval> find_equilibrium_intervals(
    const PairSeries& raw, const Thresholds& th, std::span<const CycleBoundary> cycles) {
  th.validate();
  std::vector<EquilibriumInterval> out;
  const std::size_t n = raw.size();
  if (n == 0) return out;

  const PairSeries pair = smooth_pair(raw, th.smoothing_window);

  std::vector<bool> point_ok(n, true);
  if (th.enforce_cycle_gap) {
    const auto disturbed = disturbed_mask(pair.t, cycles, th.min_gap_after_cycle);
    for (std::size_t i = 0; i < n; ++i) point_ok[i] = !disturbed[i];
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (std::fabs(pair.v_lead[i] - pair.v_follow[i]) > th.max_dv) point_ok[i] = false;
  }

  // bad_prefix[i] = number of steep-grade samples in [0, i).
  std::vector<std::size_t> bad_prefix(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    bad_prefix[i + 1] = bad_prefix[i] + (std::fabs(pair.grade[i]) > th.max_abs_grade ? 1 : 0);
  }
  // lookback[a] = first sample within grade_lookback seconds before sample a.
  std::vector<std::size_t> lookback(n, 0);
  for (std::size_t a = 0, j = 0; a < n; ++a) {
    while (pair.t[j] < pair.t[a] - th.grade_lookback) ++j;
    lookback[a] = j;
  }

  // Two-pointer pass: lo[j] is the earliest start s such that [s, j] passes
  // every criterion (n when none does). Validity only improves when a window
  // shrinks, so lo is nondecreasing and one set of deques suffices.
  std::vector<std::size_t> lo(n, n);
  {
    RangeWindow lead(pair.v_lead), follow(pair.v_follow), spacing(pair.spacing);
    std::size_t s = 0;
    auto fits = [&](std::size_t j) {
      return bad_prefix[j + 1] == bad_prefix[lookback[s]] &&
             lead.range_with(j) <= th.max_speed_var &&
             follow.range_with(j) <= th.max_speed_var &&
             spacing.range_with(j) <= th.max_spacing_var;
    };
    for (std::size_t j = 0; j < n; ++j) {
      if (!point_ok[j]) {
        lead.clear();
        follow.clear();
        spacing.clear();
        s = j + 1;
        continue;
      }
      while (s < j && !fits(j)) {
        ++s;
        lead.drop_before(s);
        follow.drop_before(s);
        spacing.drop_before(s);
      }
      if (!fits(j)) {  // a lone sample can still fail the grade lookback
        lead.clear();
        follow.clear();
        spacing.clear();
        s = j + 1;
        continue;
      }
      lead.push(j);
      follow.push(j);
      spacing.push(j);
      lo[j] = s;
    }
  }

  // Disjoint windows with the largest total covered time. best[k] is the
  // optimum over samples [0, k); a window [s, j] adds t[j] - t[s]. Starts that
  // are admissible for end j form the range [lo[j], hi] where hi is the last
  // start at least min_duration before t[j]; both ends move forward with j, so
  // a monotone deque over best[s] - t[s] gives the inner max.
  // Tightening any threshold removes candidate windows and can only lower the
  // optimum; an optimal set never holds a window that could still grow.
  std::vector<double> best(n + 1, 0.0);
  std::vector<std::size_t> start_of(n, n);  // chosen window start, n = none
  std::deque<std::size_t> cand;
  std::size_t next_start = 0;
  auto key = [&](std::size_t s) { return best[s] - pair.t[s]; };
  for (std::size_t j = 0; j < n; ++j) {
    best[j + 1] = best[j];
    while (next_start <= j && pair.t[j] - pair.t[next_start] >= th.min_duration) {
      while (!cand.empty() && key(cand.back()) <= key(next_start)) cand.pop_back();
      cand.push_back(next_start);
      ++next_start;
    }
    if (lo[j] == n) continue;
    while (!cand.empty() && cand.front() < lo[j]) cand.pop_front();
    if (cand.empty()) continue;
    const std::size_t s = cand.front();
    const double with = key(s) + pair.t[j];
    if (with > best[j]) {
      best[j + 1] = with;
      start_of[j] = s;
    }
  }

  for (std::size_t k = n; k > 0;) {
    const std::size_t last = k - 1;
    if (start_of[last] == n) {
      --k;
      continue;
    }
    const std::size_t a = start_of[last];
    EquilibriumInterval iv;
    iv.first = a;
    iv.last = last;
    iv.t_start = raw.t[a];
    iv.t_end = raw.t[last];
    iv.n_samples = last - a + 1;
    const auto v = stats::mean_std(std::span(raw.v_follow).subspan(a, iv.n_samples));
    const auto sp = stats::mean_std(std::span(raw.spacing).subspan(a, iv.n_samples));
    iv.v_mean = v.mean;
    iv.v_std = v.std;
    iv.s_mean = sp.mean;
    iv.s_std = sp.std;
    out.push_back(iv);
    k = a;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

std::vector<EquilibriumPoint> to_points(std::span<const EquilibriumInterval> intervals) {
  std::vector<EquilibriumPoint> out;
  out.reserve(intervals.size());
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    const auto& iv = intervals[i];
    out.push_back({iv.v_mean, iv.s_mean, static_cast<double>(iv.n_samples), i});
  }
  return out;
}

}  // namespace fdkit
