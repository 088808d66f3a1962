#pragma once

#include <vector>

namespace fdkit {

// a = k1 (s - eta - tau v) + k2 (v_lead - v), clamped to the accel limits.
// The equilibrium line is s = tau v + eta.
struct OvrvParams {
  double k1 = 0.1;   // 1/s^2
  double k2 = 0.5;   // 1/s
  double tau = 1.2;  // s
  double eta = 6.0;  // m

  bool operator==(const OvrvParams&) const = default;

  void validate() const;  // throws Error{kInvalidArgument}
};

struct AccelLimits {
  double min = -5.0;  // m/s^2
  double max = 3.0;
};

// Leader on a uniform grid; x is the front-bumper position.
struct LeaderSeries {
  std::vector<double> t;
  std::vector<double> v;
  std::vector<double> x;
};

// Follower state at each leader timestamp.
struct FollowerSeries {
  std::vector<double> t;
  std::vector<double> x;
  std::vector<double> v;
  std::vector<double> s;  // x_lead - x
  std::vector<double> a;
};

// Explicit Euler. Each leader interval is split into ceil(h/dt) equal steps
// with the leader linearly interpolated in between, so dt only caps the step.
// Throws Error{kDiverged} when spacing leaves (0, 1000) m.
FollowerSeries simulate_ovrv(const OvrvParams& params, const LeaderSeries& leader, double s0,
                             double v0, double dt, const AccelLimits& limits = {});

}  // namespace fdkit
