#include "fdkit/calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <random>

#include "fdkit/error.hpp"
#include "fdkit/nelder_mead.hpp"

namespace fdkit {
namespace {

std::vector<double> to_vec(const OvrvParams& p) { return {p.k1, p.k2, p.tau, p.eta}; }
OvrvParams from_vec(const std::vector<double>& x) { return {x[0], x[1], x[2], x[3]}; }

struct Rmse {
  double spacing = std::numeric_limits<double>::infinity();
  double speed = std::numeric_limits<double>::infinity();
};

Rmse evaluate(const PairSeries& pair, const LeaderSeries& leader, const OvrvParams& p,
              const CalibrateOptions& o) {
  Rmse r;
  try {
    const auto sim = simulate_ovrv(p, leader, pair.spacing.front(), pair.v_follow.front(), o.dt, o.limits);
    double es = 0.0, ev = 0.0;
    for (std::size_t i = 0; i < pair.size(); ++i) {
      es += (sim.s[i] - pair.spacing[i]) * (sim.s[i] - pair.spacing[i]);
      ev += (sim.v[i] - pair.v_follow[i]) * (sim.v[i] - pair.v_follow[i]);
    }
    const double n = static_cast<double>(pair.size());
    r.spacing = std::sqrt(es / n);
    r.speed = std::sqrt(ev / n);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kDiverged) throw;
  }
  return r;
}

}  // namespace

void OvrvBounds::validate() const {
  const auto lo = to_vec(lower), hi = to_vec(upper);
  for (std::size_t i = 0; i < lo.size(); ++i) {
    if (!(lo[i] <= hi[i])) throw Error(ErrorCode::kConfig, "calibration bounds are inverted");
  }
  if (!(lower.k1 > 0.0 && lower.k2 > 0.0 && lower.tau > 0.0 && lower.eta >= 0.0)) {
    throw Error(ErrorCode::kConfig, "calibration lower bounds must keep the parameters valid");
  }
}

LeaderSeries leader_series(const PairSeries& pair) {
  LeaderSeries l;
  l.t = pair.t;
  l.v = pair.v_lead;
  if (!pair.lead_position.empty()) {
    l.x = pair.lead_position;
    return l;
  }
  l.x.resize(pair.size());
  double xf = 0.0;
  for (std::size_t i = 0; i < pair.size(); ++i) {
    if (i > 0) xf += 0.5 * (pair.v_follow[i] + pair.v_follow[i - 1]) * (pair.t[i] - pair.t[i - 1]);
    l.x[i] = xf + pair.spacing[i];
  }
  return l;
}

double spacing_rmse(const PairSeries& pair, const LeaderSeries& leader, const OvrvParams& params,
                    const CalibrateOptions& options) {
  return evaluate(pair, leader, params, options).spacing;
}

CalibrationReport calibrate_ovrv(const PairSeries& pair, const OvrvParams& init,
                                 const OvrvBounds& bounds, const CalibrateOptions& o) {
  bounds.validate();
  init.validate();
  if (pair.size() < 2 || pair.t.back() - pair.t.front() < o.min_duration) {
    throw Error(ErrorCode::kTooShort, "calibration needs at least " +
                                          std::to_string(o.min_duration) + " s of data");
  }
  const LeaderSeries leader = leader_series(pair);
  if (!std::isfinite(evaluate(pair, leader, init, o).spacing)) {
    throw Error(ErrorCode::kDiverged, "initial OVRV guess diverges on this pair");
  }

  const auto lo = to_vec(bounds.lower), hi = to_vec(bounds.upper);
  std::vector<std::vector<double>> starts;
  starts.push_back(to_vec(init));
  std::mt19937_64 rng(o.seed);
  std::uniform_real_distribution<double> u(-o.jitter, o.jitter);
  for (std::size_t k = 1; k < std::max<std::size_t>(1, o.restarts); ++k) {
    auto x = to_vec(init);
    for (std::size_t j = 0; j < x.size(); ++j) x[j] = std::clamp(x[j] * (1.0 + u(rng)), lo[j], hi[j]);
    starts.push_back(std::move(x));
  }

  NelderMeadOptions nm;
  nm.max_iterations = o.max_iterations;
  nm.tolerance = o.tolerance;
  nm.lower = lo;
  nm.upper = hi;
  auto objective = [&](const std::vector<double>& x) {
    return evaluate(pair, leader, from_vec(x), o).spacing;
  };
  auto run = [&](std::size_t k) { return nelder_mead(objective, starts[k], nm); };

  std::vector<NelderMeadResult> results(starts.size());
  if (o.parallel && starts.size() > 1) {
    std::vector<std::future<NelderMeadResult>> futures;
    for (std::size_t k = 0; k < starts.size(); ++k) futures.push_back(std::async(std::launch::async, run, k));
    for (std::size_t k = 0; k < starts.size(); ++k) results[k] = futures[k].get();
  } else {
    for (std::size_t k = 0; k < starts.size(); ++k) results[k] = run(k);
  }

  // Lowest objective wins; ties go to the earliest restart so the choice
  // does not depend on thread timing.
  std::size_t best = 0;
  CalibrationReport rep;
  for (std::size_t k = 0; k < results.size(); ++k) {
    rep.iterations += results[k].iterations;
    if (results[k].f < results[best].f) best = k;
  }
  rep.params = from_vec(results[best].x);
  rep.converged = results[best].converged;
  const Rmse fit = evaluate(pair, leader, rep.params, o);
  rep.spacing_rmse = fit.spacing;
  rep.speed_rmse = fit.speed;
  if (!rep.converged) rep.warnings.push_back("optimizer hit the iteration cap before converging");

  // Second difference of the objective along each gain at +-10 %.
  const double f0 = fit.spacing;
  auto flat = [&](std::size_t j) {
    auto up = results[best].x, dn = results[best].x;
    up[j] = std::min(hi[j], up[j] * 1.1);
    dn[j] = std::max(lo[j], dn[j] * 0.9);
    const double curv = objective(up) + objective(dn) - 2.0 * f0;
    return !(curv > 1e-3 * f0 + 1e-9);
  };
  if (flat(0)) {
    rep.k1_identified = false;
    rep.warnings.push_back("objective is nearly flat in k1; the gain is not identified by this data");
  }
  if (flat(1)) {
    rep.k2_identified = false;
    rep.warnings.push_back("objective is nearly flat in k2; the gain is not identified by this data");
  }
  return rep;
}

}  // namespace fdkit
