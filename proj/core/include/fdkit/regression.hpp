#pragma once

#include <span>

#include "fdkit/equilibrium.hpp"

namespace fdkit {

// s = tau0 * v + delta0, fitted by least squares.
struct LinearFit {
  double tau0 = 0.0;    // s
  double delta0 = 0.0;  // m
  double se_tau0 = 0.0;
  double se_delta0 = 0.0;
  double r2 = 0.0;
  std::size_t n = 0;
  double sigma_hat = 0.0;  // m
  double v_bar = 0.0;      // m/s
  double sxx = 0.0;
  std::size_t n_bins = 0;
  double v_min = 0.0;  // observed speed support
  double v_max = 0.0;
  bool valid = false;  // n_bins >= 3

  double predict(double v) const { return tau0 * v + delta0; }
};

struct FitOptions {
  // Weight each point by its `weight` (sample count). Off by default: one
  // interval is one observation.
  bool weighted = false;
  std::size_t min_bins = 3;
};

// Throws kTooFewPoints below 3 points and kDegenerateInput when every speed
// is equal.
LinearFit fit_linear(std::span<const EquilibriumPoint> points, std::size_t n_bins,
                     const FitOptions& options = {});
LinearFit fit_linear(std::span<const double> v, std::span<const double> s,
                     std::size_t n_bins = 0);

enum class BandKind { kMeanResponse, kPrediction, kWorkingHotelling };

BandKind parse_band_kind(std::string_view text);
std::string_view to_string(BandKind kind);

struct Band {
  double lower = 0.0;
  double upper = 0.0;
};

// Pointwise band around the fitted line. Throws kInvalidAlpha unless
// 0 < alpha < 1.
Band ci_band(const LinearFit& fit, double v, double alpha = 0.05,
             BandKind kind = BandKind::kMeanResponse);

// Half-width multiplier shared by every v; exposed so callers evaluating
// many speeds avoid repeated quantile solves.
double band_multiplier(const LinearFit& fit, double alpha, BandKind kind);
Band ci_band_with(const LinearFit& fit, double v, double multiplier, BandKind kind);

}  // namespace fdkit
