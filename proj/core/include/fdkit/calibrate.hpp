#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fdkit/ingest.hpp"
#include "fdkit/ovrv.hpp"

namespace fdkit {

struct OvrvBounds {
  OvrvParams lower{1e-3, 1e-3, 0.3, 0.0};
  OvrvParams upper{2.0, 3.0, 4.0, 30.0};

  void validate() const;  // throws Error{kConfig}
};

struct CalibrateOptions {
  std::size_t restarts = 5;
  std::size_t max_iterations = 2000;
  double tolerance = 1e-8;
  double jitter = 0.2;  // relative spread of restart initials
  std::uint64_t seed = 1;
  double dt = 0.1;      // s, upper bound on the integration step
  AccelLimits limits;
  bool parallel = true;  // run restarts on separate threads
  double min_duration = 60.0;  // s
};

struct CalibrationReport {
  OvrvParams params;
  double spacing_rmse = 0.0;  // m
  double speed_rmse = 0.0;    // m/s
  std::size_t iterations = 0;  // summed over restarts
  bool converged = false;
  // False when the objective is nearly flat along that gain, which happens
  // on equilibrium-only data.
  bool k1_identified = true;
  bool k2_identified = true;
  std::vector<std::string> warnings;
};

// Leader series implied by a pair. Uses the measured leader position when
// present, else integrates the follower speed and adds the spacing.
LeaderSeries leader_series(const PairSeries& pair);

// Spacing RMSE of a simulation started from the first observed sample.
// Returns +inf when the simulation diverges.
double spacing_rmse(const PairSeries& pair, const LeaderSeries& leader, const OvrvParams& params,
                    const CalibrateOptions& options);

// Nelder-Mead on spacing RMSE over (k1, k2, tau, eta), projected into the
// bounds, best of `restarts` jittered starts. A report with converged=false
// is returned rather than thrown when no restart met the tolerance.
// Throws kTooShort under min_duration and kDiverged when even the initial
// guess cannot be simulated.
CalibrationReport calibrate_ovrv(const PairSeries& pair, const OvrvParams& init,
                                 const OvrvBounds& bounds = {},
                                 const CalibrateOptions& options = {});

struct EquilibriumLine {
  double tau0 = 0.0;
  double delta0 = 0.0;
};

inline EquilibriumLine ovrv_equilibrium(const OvrvParams& p) { return {p.tau, p.eta}; }

}  // namespace fdkit
