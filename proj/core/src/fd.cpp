#include "fdkit/fd.hpp"

#include "fdkit/error.hpp"
#include "fdkit/units.hpp"

namespace fdkit {

FdParams to_fd(double tau0, double delta0, double u_f_kmh) {
  if (!(tau0 > 0.0) || !(delta0 > 0.0)) {
    throw Error(ErrorCode::kNonPositiveParams, "tau0 and delta0 must be positive for an FD");
  }
  if (!(u_f_kmh > 0.0)) throw Error(ErrorCode::kInvalidArgument, "u_f must be positive");
  FdParams p;
  p.tau0 = tau0;
  p.delta0 = delta0;
  p.u_f = u_f_kmh;
  p.wave_speed = units::mps_to_kmh(-delta0 / tau0);
  p.jam_density = units::per_m_to_per_km(1.0 / delta0);
  const double uf = units::kmh_to_mps(u_f_kmh);
  p.capacity = units::per_s_to_per_h(uf / (uf * tau0 + delta0));
  return p;
}

FdParams to_fd(const LinearFit& fit, double u_f_kmh) { return to_fd(fit.tau0, fit.delta0, u_f_kmh); }

double FdCurve::flow(double k) const {
  if (k < free_branch.k0 || k > congested_branch.k1) return 0.0;
  const FdSegment& s = k <= free_branch.k1 ? free_branch : congested_branch;
  return s.q0 + (s.q1 - s.q0) * (k - s.k0) / (s.k1 - s.k0);
}

FdCurve fd_curve(const FdParams& p) {
  const double kc = p.critical_density();
  FdCurve c;
  c.free_branch = {0.0, 0.0, kc, p.u_f * kc};
  c.congested_branch = {kc, -p.wave_speed * (p.jam_density - kc), p.jam_density, 0.0};
  return c;
}

void HdvReference::validate() const {
  if (!(tau0_p15 > 0.0) || !(delta0_p85 > 0.0) || !(capacity_p85 > 0.0)) {
    throw Error(ErrorCode::kConfig, "HDV reference values must be positive");
  }
  if (!(wave_speed_lo <= wave_speed_hi)) throw Error(ErrorCode::kConfig, "HDV wave range is inverted");
  if (mean_line && tau0_p15 > mean_line->tau0) {
    throw Error(ErrorCode::kConfig, "HDV P15 headway exceeds the mean-line slope");
  }
}

HdvFlags compare_to_hdv(const FdParams& p, const HdvReference& ref) {
  HdvFlags f;
  f.tau0_below_p15 = p.tau0 < ref.tau0_p15;
  f.delta0_above_p85 = p.delta0 > ref.delta0_p85;
  f.wave_outside_range = p.wave_speed < ref.wave_speed_lo || p.wave_speed > ref.wave_speed_hi;
  f.capacity_above_p85 = p.capacity > ref.capacity_p85;
  return f;
}

HdvPoolSummary summarize_hdv(std::span<const FdParams> pool, const HdvReference& ref) {
  HdvPoolSummary s;
  s.n = pool.size();
  if (pool.empty()) return s;
  for (const auto& p : pool) {
    const auto f = compare_to_hdv(p, ref);
    s.frac_tau0_below_p15 += f.tau0_below_p15;
    s.frac_delta0_above_p85 += f.delta0_above_p85;
    s.frac_wave_outside += f.wave_outside_range;
    s.frac_capacity_above_p85 += f.capacity_above_p85;
  }
  const double n = static_cast<double>(pool.size());
  s.frac_tau0_below_p15 /= n;
  s.frac_delta0_above_p85 /= n;
  s.frac_wave_outside /= n;
  s.frac_capacity_above_p85 /= n;
  return s;
}

}  // namespace fdkit
