#include "fdkit/pipeline.hpp"

#include <cmath>

#include "fdkit/calibrate.hpp"
#include "fdkit/compare.hpp"
#include "fdkit/csv.hpp"
#include "fdkit/error.hpp"
#include "fdkit/fd.hpp"

namespace fdkit {

AnalysisConfig noisy_analysis() {
  AnalysisConfig c;
  c.thresholds.smoothing_window = 10.0;
  c.thresholds.enforce_cycle_gap = true;
  return c;
}

PairAnalysis analyze_pair(PairSeries pair, std::string pair_id, const AnalysisConfig& config) {
  PairAnalysis a;
  a.pair_id = std::move(pair_id);
  for (const auto& w : validate_pair(pair)) a.warnings.push_back(a.pair_id + ": " + w.message);
  if (config.detect_cycles) {
    const double dt = median_dt(pair.t);
    try {
      a.cycles = detect_cycles(pair.v_lead, 1.0 / dt, config.cycles, pair.t.front());
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kTooShort) throw;
      a.warnings.push_back(a.pair_id + ": too short for cycle detection");
    }
  }
  a.intervals = find_equilibrium_intervals(pair, config.thresholds, a.cycles);
  a.pair = std::move(pair);
  return a;
}

std::vector<PairAnalysis> detect_platoon(const PlatoonRecord& record, const AnalysisConfig& config,
                                         const std::string& name) {
  config.thresholds.validate();
  if (record.tracks.size() < 2) throw Error(ErrorCode::kEmpty, "platoon has no follower");
  std::vector<PairAnalysis> out;
  const std::size_t last = config.all_pairs ? record.tracks.size() : 2;
  for (std::size_t i = 1; i < last; ++i) {
    const auto& lead = record.tracks[i - 1];
    const auto& fol = record.tracks[i];
    auto pair = build_pair(lead, fol, default_pair_mode(fol));
    out.push_back(analyze_pair(std::move(pair), name + ":" + lead.vehicle_id + ":" + fol.vehicle_id, config));
  }
  return out;
}

SystemAnalysis fit_points(std::string system, std::string headway,
                          std::vector<EquilibriumPoint> points, const AnalysisConfig& config) {
  SystemAnalysis s;
  s.system = std::move(system);
  s.headway = std::move(headway);
  s.points = std::move(points);
  s.bins = cluster_bins(s.points, config.bins);
  try {
    s.fit = fit_linear(s.points, s.bins.size(), config.fit);
    if (!s.fit->valid) {
      s.warnings.push_back(s.name() + ": only " + std::to_string(s.bins.size()) +
                           " speed bins; the fit is flagged invalid");
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kTooFewPoints && e.code() != ErrorCode::kDegenerateInput) throw;
    s.warnings.push_back(s.name() + ": no fit (" + e.what() + ")");
  }
  return s;
}

SystemAnalysis analyze_platoon(const PlatoonRecord& record, const AnalysisConfig& config,
                               std::string system, std::string headway) {
  const std::string name = headway.empty() ? system : system + "-" + headway;
  auto pairs = detect_platoon(record, config, name);
  std::vector<EquilibriumPoint> points;
  for (const auto& p : pairs) {
    const auto base = points.size();
    for (auto pt : to_points(p.intervals)) {
      pt.origin += base;
      points.push_back(pt);
    }
  }
  auto s = fit_points(std::move(system), std::move(headway), std::move(points), config);
  std::vector<std::string> warnings;
  for (const auto& p : pairs) warnings.insert(warnings.end(), p.warnings.begin(), p.warnings.end());
  warnings.insert(warnings.end(), s.warnings.begin(), s.warnings.end());
  s.warnings = std::move(warnings);
  s.pairs = std::move(pairs);
  return s;
}

ClosedLoopResult run_closed_loop(const ClosedLoopSpec& spec) {
  ClosedLoopResult r;
  r.platoon = gen_platoon(spec.scenario, spec.followers, spec.noise);
  AnalysisConfig a = spec.analysis;
  a.all_pairs = false;
  r.analysis = analyze_platoon(r.platoon.record, a, "synthetic", "");
  return r;
}

std::vector<CheckResult> run_selftest(std::uint64_t seed) {
  std::vector<CheckResult> out;
  auto check = [&](std::string name, bool pass, std::string detail) {
    out.push_back({std::move(name), pass, std::move(detail)});
  };

  // FD translation of a published-style fit.
  const auto fd = to_fd(2.21, 11.27);
  check("fd_capacity", std::lround(fd.capacity) == 1387, "capacity " + csv::format_g6(fd.capacity));

  // Noiseless recovery.
  ClosedLoopSpec clean;
  clean.scenario = ma_preset(4);
  clean.noise = {0.0, 0.0, seed, 0.0};
  clean.analysis = AnalysisConfig{};
  clean.analysis.thresholds.enforce_cycle_gap = true;
  const auto truth = clean.followers.front();
  const auto c = run_closed_loop(clean);
  const bool clean_ok = c.analysis.fit && std::abs(c.analysis.fit->tau0 - truth.tau) < 0.02 &&
                        std::abs(c.analysis.fit->delta0 - truth.eta) < 0.2;
  check("noiseless_recovery", clean_ok,
        c.analysis.fit ? "tau0 " + csv::format_g6(c.analysis.fit->tau0) + " delta0 " +
                             csv::format_g6(c.analysis.fit->delta0)
                       : "no fit");

  // GPS-grade noise.
  ClosedLoopSpec noisy;
  noisy.scenario = ma_preset(12);
  noisy.noise.seed = seed;
  const auto n = run_closed_loop(noisy);
  const bool noisy_ok = n.analysis.fit && n.analysis.fit->valid &&
                        std::abs(n.analysis.fit->tau0 - truth.tau) < 0.05 &&
                        std::abs(n.analysis.fit->delta0 - truth.eta) < 0.5 && n.analysis.fit->r2 >= 0.9;
  check("noisy_recovery", noisy_ok,
        n.analysis.fit ? "tau0 " + csv::format_g6(n.analysis.fit->tau0) + " delta0 " +
                             csv::format_g6(n.analysis.fit->delta0) + " r2 " +
                             csv::format_g6(n.analysis.fit->r2)
                       : "no fit");

  // Calibrated controller line inside the equilibrium fit's band.
  if (n.analysis.fit) {
    CalibrateOptions co;
    co.seed = seed;
    const auto rep = calibrate_ovrv(n.analysis.pairs.front().pair, OvrvParams{0.2, 0.6, 1.5, 4.0}, {}, co);
    const auto line = ovrv_equilibrium(rep.params);
    const auto cont = ci_containment(*n.analysis.fit, line.tau0, line.delta0, n.analysis.fit->v_min,
                                     n.analysis.fit->v_max);
    check("calibration_consistency", cont.fully_inside,
          "tau " + csv::format_g6(line.tau0) + " eta " + csv::format_g6(line.delta0) + " inside " +
              csv::format_g6(cont.fraction_inside));
  } else {
    check("calibration_consistency", false, "no equilibrium fit");
  }
  return out;
}

}  // namespace fdkit
