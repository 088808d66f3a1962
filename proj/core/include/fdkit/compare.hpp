#pragma once

#include <span>
#include <string>
#include <vector>

#include "fdkit/equilibrium.hpp"
#include "fdkit/regression.hpp"

namespace fdkit {

// Pooled model s = tau0_K v + delta0_K + dtau0 v c_J + ddelta0 c_J, where
// c_J marks the J samples.
struct ComparisonResult {
  double dtau0 = 0.0;    // s, J minus K
  double ddelta0 = 0.0;  // m
  double se_dtau0 = 0.0;
  double se_ddelta0 = 0.0;
  double p_tau = 1.0;
  double p_delta = 1.0;
  double alpha = 0.05;
  bool tau_significant = false;
  bool delta_significant = false;
  std::size_t n_K = 0;
  std::size_t n_J = 0;
  double condition = 0.0;  // 1-norm condition estimate of X'X
  std::vector<std::string> warnings;
};

// Throws kTooFewPoints when either set has fewer than 3 points and
// kRankDeficient when the pooled design is singular.
ComparisonResult compare_fits(std::span<const EquilibriumPoint> points_K,
                              std::span<const EquilibriumPoint> points_J, double alpha = 0.05);
ComparisonResult compare_fits(std::span<const double> v_K, std::span<const double> s_K,
                              std::span<const double> v_J, std::span<const double> s_J,
                              double alpha = 0.05);

struct ContainmentOptions {
  double grid_step = 0.25;  // m/s
  double alpha = 0.05;
  BandKind band = BandKind::kMeanResponse;
  // When false the range is clipped to the reference fit's observed speeds.
  bool allow_extrapolation = false;
};

struct ContainmentResult {
  double fraction_inside = 0.0;
  bool fully_inside = false;
  std::vector<double> grid;
  std::vector<bool> inside;
};

// Evaluates s = tau0 v + delta0 against the reference band on a uniform grid
// over [v_lo, v_hi]. Throws kEmptyRange when nothing is left to evaluate.
ContainmentResult ci_containment(const LinearFit& fit_ref, double tau0, double delta0,
                                 double v_lo, double v_hi,
                                 const ContainmentOptions& options = {});

}  // namespace fdkit
