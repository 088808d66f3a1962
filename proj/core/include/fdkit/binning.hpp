#pragma once

#include <optional>
#include <span>
#include <vector>

#include "fdkit/equilibrium.hpp"
#include "fdkit/stats.hpp"

namespace fdkit {

struct BinRules {
  double max_range = 2.0;  // m/s, v_max - v_min within a bin
  double max_gap = 0.5;    // m/s, between speed-adjacent members
  std::size_t dense_min = 10;
};

struct SpeedBin {
  std::vector<EquilibriumPoint> points;  // ascending by (v, s)
  double v_min = 0.0;
  double v_max = 0.0;
  double s_mean = 0.0;
  double s_std = 0.0;
  std::size_t n = 0;

  double v_center() const { return 0.5 * (v_min + v_max); }
};

// Sorts by speed and grows each bin greedily while both rules hold. Every
// point lands in exactly one bin; bins come out in ascending speed.
std::vector<SpeedBin> cluster_bins(std::span<const EquilibriumPoint> points,
                                   const BinRules& rules = {});

struct BinStats {
  std::size_t n = 0;
  double mean = 0.0;
  double std = 0.0;
  bool std_defined = false;  // false for a single point; std is then 0
};

BinStats bin_stats(const SpeedBin& bin);

// Jarque-Bera on member spacings; Error{kTooFewSamples} below 8 members.
stats::JarqueBera normality_check(const SpeedBin& bin);

struct BinReportRow {
  std::size_t index = 0;
  double v_min = 0.0;
  double v_max = 0.0;
  std::size_t n = 0;
  double s_mean = 0.0;
  double s_std = 0.0;
  bool dense = false;
  std::optional<stats::JarqueBera> normality;  // present when n >= 8
};

std::vector<BinReportRow> bin_report(std::span<const SpeedBin> bins, const BinRules& rules = {});

struct StdSizeRow {
  std::size_t n = 0;
  double s_std = 0.0;
  double v_center = 0.0;
};

std::vector<StdSizeRow> std_vs_sample_size(std::span<const SpeedBin> bins);

}  // namespace fdkit
