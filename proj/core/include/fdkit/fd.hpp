#pragma once

#include <optional>
#include <span>

#include "fdkit/regression.hpp"

namespace fdkit {

// Triangular fundamental diagram in traffic units.
struct FdParams {
  double wave_speed = 0.0;   // km/h, negative
  double jam_density = 0.0;  // veh/km
  double capacity = 0.0;     // veh/h
  double u_f = 105.0;        // km/h
  double tau0 = 0.0;         // s, carried from the fit
  double delta0 = 0.0;       // m

  double critical_density() const { return capacity / u_f; }
};

inline constexpr double kDefaultFreeFlowKmh = 105.0;

FdParams to_fd(double tau0, double delta0, double u_f_kmh = kDefaultFreeFlowKmh);
FdParams to_fd(const LinearFit& fit, double u_f_kmh = kDefaultFreeFlowKmh);

struct FdSegment {
  double k0 = 0.0, q0 = 0.0;  // veh/km, veh/h
  double k1 = 0.0, q1 = 0.0;
};

struct FdCurve {
  FdSegment free_branch;
  FdSegment congested_branch;

  double flow(double k) const;  // 0 outside [0, k_j]
};

FdCurve fd_curve(const FdParams& params);

struct HdvLine {
  double tau0 = 0.0;
  double delta0 = 0.0;
};

struct HdvReference {
  double tau0_p15 = 0.91;          // s
  double delta0_p85 = 10.74;       // m
  double jam_spacing_direct = 7.0;  // m
  double jam_density_direct = 142.0;  // veh/km
  double capacity_p85 = 2581.0;    // veh/h
  double wave_speed_lo = -20.0;    // km/h
  double wave_speed_hi = -10.0;
  // Reference s-v lines drawn on plots; no defaults, user supplied.
  std::optional<HdvLine> mean_line;
  std::optional<HdvLine> p15_line;
  std::optional<HdvLine> p85_line;

  void validate() const;  // throws Error{kConfig}
};

// Strict inequalities: a value equal to the reference bound sets no flag.
struct HdvFlags {
  bool tau0_below_p15 = false;
  bool delta0_above_p85 = false;
  bool wave_outside_range = false;
  bool capacity_above_p85 = false;
};

HdvFlags compare_to_hdv(const FdParams& params, const HdvReference& ref = {});

struct HdvPoolSummary {
  std::size_t n = 0;
  double frac_tau0_below_p15 = 0.0;
  double frac_delta0_above_p85 = 0.0;
  double frac_wave_outside = 0.0;
  double frac_capacity_above_p85 = 0.0;
};

HdvPoolSummary summarize_hdv(std::span<const FdParams> pool, const HdvReference& ref = {});

}  // namespace fdkit
