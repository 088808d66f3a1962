#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fdkit/binning.hpp"
#include "fdkit/cycles.hpp"
#include "fdkit/equilibrium.hpp"
#include "fdkit/ingest.hpp"
#include "fdkit/regression.hpp"
#include "fdkit/simulate.hpp"

namespace fdkit {

struct AnalysisConfig {
  Thresholds thresholds;
  CycleConfig cycles;
  bool detect_cycles = true;  // run the detector on the leader speed
  BinRules bins;
  FitOptions fit;
  bool all_pairs = true;  // every consecutive pair; else only the first
};

// Settings that survive GPS-grade noise (0.89 m, 0.1 m/s): 10 s smoothing
// and the post-cycle gap enforced.
AnalysisConfig noisy_analysis();

struct PairAnalysis {
  std::string pair_id;  // "<name>:<leader>:<follower>"
  PairSeries pair;
  std::vector<CycleBoundary> cycles;
  std::vector<EquilibriumInterval> intervals;
  std::vector<std::string> warnings;
};

PairAnalysis analyze_pair(PairSeries pair, std::string pair_id, const AnalysisConfig& config);

std::vector<PairAnalysis> detect_platoon(const PlatoonRecord& record, const AnalysisConfig& config,
                                         const std::string& name);

struct SystemAnalysis {
  std::string system;
  std::string headway;
  std::vector<PairAnalysis> pairs;
  std::vector<EquilibriumPoint> points;
  std::vector<SpeedBin> bins;
  std::optional<LinearFit> fit;  // absent when the points cannot be fitted
  std::vector<std::string> warnings;

  std::string name() const { return headway.empty() ? system : system + "-" + headway; }
};

// Bins and fits a point set. Too few points or a single speed leave `fit`
// empty with a warning; fewer than min_bins bins give an invalid fit.
SystemAnalysis fit_points(std::string system, std::string headway,
                          std::vector<EquilibriumPoint> points, const AnalysisConfig& config);

SystemAnalysis analyze_platoon(const PlatoonRecord& record, const AnalysisConfig& config,
                               std::string system, std::string headway);

// Simulate, then detect, bin and fit the first follower.
struct ClosedLoopSpec {
  ScenarioSpec scenario;
  std::vector<OvrvParams> followers{kSettlingFollower};
  NoiseSpec noise;
  AnalysisConfig analysis = noisy_analysis();
};

struct ClosedLoopResult {
  Platoon platoon;
  SystemAnalysis analysis;
};

ClosedLoopResult run_closed_loop(const ClosedLoopSpec& spec);

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

// Short closed-loop oracle suite: simulate -> detect -> fit -> compare with
// ground truth, plus calibration consistency.
std::vector<CheckResult> run_selftest(std::uint64_t seed);

}  // namespace fdkit
