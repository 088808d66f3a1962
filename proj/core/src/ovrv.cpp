#include "fdkit/ovrv.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fdkit/error.hpp"

namespace fdkit {

void OvrvParams::validate() const {
  if (!(k1 > 0.0) || !(k2 > 0.0) || !(tau > 0.0) || !(eta >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "OVRV needs k1, k2, tau > 0 and eta >= 0");
  }
}

FollowerSeries simulate_ovrv(const OvrvParams& p, const LeaderSeries& leader, double s0,
                             double v0, double dt, const AccelLimits& limits) {
  p.validate();
  const std::size_t n = leader.t.size();
  if (n < 2 || leader.v.size() != n || leader.x.size() != n) {
    throw Error(ErrorCode::kInvalidArgument, "leader series needs at least 2 aligned samples");
  }
  if (!(dt > 0.0) || dt > 0.1 + 1e-12) throw Error(ErrorCode::kInvalidArgument, "dt must lie in (0, 0.1]");

  FollowerSeries out;
  out.t = leader.t;
  out.x.resize(n);
  out.v.resize(n);
  out.s.resize(n);
  out.a.resize(n);

  double x = leader.x[0] - s0;
  double v = std::max(0.0, v0);
  auto accel = [&](double s, double vl) {
    return std::clamp(p.k1 * (s - p.eta - p.tau * v) + p.k2 * (vl - v), limits.min, limits.max);
  };
  auto check = [&](double s, double t) {
    if (!(s > 0.0 && s < 1000.0)) {
      throw Error(ErrorCode::kDiverged, "spacing left (0, 1000) m at t=" + std::to_string(t), t);
    }
  };

  for (std::size_t i = 0;; ++i) {
    const double s = leader.x[i] - x;
    check(s, leader.t[i]);
    out.x[i] = x;
    out.v[i] = v;
    out.s[i] = s;
    out.a[i] = accel(s, leader.v[i]);
    if (i + 1 == n) break;

    const double h = leader.t[i + 1] - leader.t[i];
    const auto m = static_cast<std::size_t>(std::max(1.0, std::ceil(h / dt - 1e-9)));
    const double step = h / static_cast<double>(m);
    for (std::size_t k = 0; k < m; ++k) {
      const double f = static_cast<double>(k) / static_cast<double>(m);
      const double xl = leader.x[i] + f * (leader.x[i + 1] - leader.x[i]);
      const double vl = leader.v[i] + f * (leader.v[i + 1] - leader.v[i]);
      const double a = accel(xl - x, vl);
      x += v * step;
      v = std::max(0.0, v + a * step);
    }
  }
  return out;
}

}  // namespace fdkit
