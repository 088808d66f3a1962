#include "fdkit/binning.hpp"

#include <algorithm>

#include "fdkit/error.hpp"

namespace fdkit {
namespace {

std::vector<double> spacings(const SpeedBin& bin) {
  std::vector<double> s;
  s.reserve(bin.points.size());
  for (const auto& p : bin.points) s.push_back(p.s);
  return s;
}

void finish(SpeedBin& bin) {
  bin.n = bin.points.size();
  bin.v_min = bin.points.front().v;
  bin.v_max = bin.points.back().v;
  const auto ms = stats::mean_std(spacings(bin));
  bin.s_mean = ms.mean;
  bin.s_std = ms.std;
}

}  // namespace

std::vector<SpeedBin> cluster_bins(std::span<const EquilibriumPoint> points,
                                   const BinRules& rules) {
  if (!(rules.max_range > 0.0) || !(rules.max_gap > 0.0)) {
    throw Error(ErrorCode::kConfig, "bin rules must be positive");
  }
  std::vector<EquilibriumPoint> sorted(points.begin(), points.end());
  std::sort(sorted.begin(), sorted.end(), [](const EquilibriumPoint& a, const EquilibriumPoint& b) {
    if (a.v != b.v) return a.v < b.v;
    if (a.s != b.s) return a.s < b.s;
    if (a.weight != b.weight) return a.weight < b.weight;
    return a.origin < b.origin;
  });

  std::vector<SpeedBin> bins;
  for (const auto& p : sorted) {
    if (!bins.empty()) {
      auto& cur = bins.back();
      const bool fits = p.v - cur.points.front().v <= rules.max_range &&
                        p.v - cur.points.back().v <= rules.max_gap;
      if (fits) {
        cur.points.push_back(p);
        continue;
      }
    }
    bins.emplace_back();
    bins.back().points.push_back(p);
  }
  for (auto& bin : bins) finish(bin);
  return bins;
}

BinStats bin_stats(const SpeedBin& bin) {
  if (bin.points.empty()) throw Error(ErrorCode::kTooFewSamples, "empty bin");
  const auto ms = stats::mean_std(spacings(bin));
  return {ms.n, ms.mean, ms.std, ms.n >= 2};
}

stats::JarqueBera normality_check(const SpeedBin& bin) {
  return stats::jarque_bera(spacings(bin));
}

std::vector<BinReportRow> bin_report(std::span<const SpeedBin> bins, const BinRules& rules) {
  std::vector<BinReportRow> rows;
  rows.reserve(bins.size());
  for (std::size_t i = 0; i < bins.size(); ++i) {
    const auto& bin = bins[i];
    BinReportRow row;
    row.index = i;
    row.v_min = bin.v_min;
    row.v_max = bin.v_max;
    row.n = bin.n;
    row.s_mean = bin.s_mean;
    row.s_std = bin.s_std;
    row.dense = bin.n >= rules.dense_min;
    if (bin.n >= 8) row.normality = normality_check(bin);
    rows.push_back(row);
  }
  return rows;
}

std::vector<StdSizeRow> std_vs_sample_size(std::span<const SpeedBin> bins) {
  std::vector<StdSizeRow> rows;
  rows.reserve(bins.size());
  for (const auto& bin : bins) rows.push_back({bin.n, bin.s_std, bin.v_center()});
  return rows;
}

}  // namespace fdkit
