#pragma once

#include <span>
#include <vector>

namespace fdkit {

enum class BoundaryKind { kCycleStart, kCycleEnd };

struct CycleBoundary {
  double t = 0.0;
  BoundaryKind kind = BoundaryKind::kCycleStart;

  bool operator==(const CycleBoundary&) const = default;
};

// Mexican-hat CWT change-point detector for driving cycles.
//
// Coefficients are scaled by 1/a^2 so that a kink in the speed profile (a step
// in acceleration of size da) produces |W| ~= |da| at every scale; W is then
// in m/s^2 and the floor below has a physical meaning. A cycle's corners show
// up as energy peaks; peaks closer than `merge_gap_s` belong to one cycle,
// whose start and end are its first and last peak.
struct CycleConfig {
  std::vector<int> scales_samples = {8, 16, 32, 64};
  double peak_factor = 5.0;        // threshold multiple of the median energy
  double min_energy = 0.04;        // (m/s^2)^2 absolute floor on the threshold
  double min_separation_s = 5.0;   // between peaks of the same sign
  double merge_gap_s = 20.0;       // peaks closer than this form one cycle
  double kernel_support = 5.0;     // kernel half-width in units of scale
};

struct WaveletEnergy {
  std::vector<double> energy;     // mean over scales of W^2
  std::vector<double> mean_coef;  // mean over scales of W (sign of the corner)
};

WaveletEnergy wavelet_energy(std::span<const double> speed, double rate,
                             const CycleConfig& config = {});

// Requires at least 64 samples (Error{kTooShort}). Boundaries alternate
// start/end in time order; sample i is reported at t0 + i / rate.
std::vector<CycleBoundary> detect_cycles(std::span<const double> speed, double rate,
                                         const CycleConfig& config = {}, double t0 = 0.0);

}  // namespace fdkit
