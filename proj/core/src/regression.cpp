#include "fdkit/regression.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "fdkit/error.hpp"
#include "fdkit/stats.hpp"

namespace fdkit {
namespace {

LinearFit fit_weighted(std::span<const double> v, std::span<const double> s,
                       std::span<const double> w, std::size_t n_bins, std::size_t min_bins) {
  const std::size_t n = v.size();
  if (n < 3) throw Error(ErrorCode::kTooFewPoints, "regression needs at least 3 points");

  double sw = 0.0, sv = 0.0, ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sw += w[i];
    sv += w[i] * v[i];
    ss += w[i] * s[i];
  }
  const double vb = sv / sw;
  const double sb = ss / sw;
  // Centered sums keep the solve well conditioned at highway speeds.
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dv = v[i] - vb;
    const double ds = s[i] - sb;
    sxx += w[i] * dv * dv;
    sxy += w[i] * dv * ds;
    syy += w[i] * ds * ds;
  }
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  if (*lo == *hi || !(sxx > 0.0)) {
    throw Error(ErrorCode::kDegenerateInput, "all points share one speed");
  }

  LinearFit f;
  f.n = n;
  f.tau0 = sxy / sxx;
  f.delta0 = sb - f.tau0 * vb;
  f.v_bar = vb;
  f.sxx = sxx;
  f.v_min = *lo;
  f.v_max = *hi;
  f.n_bins = n_bins;
  f.valid = n_bins >= min_bins;

  double sse = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = s[i] - f.predict(v[i]);
    sse += w[i] * r * r;
  }
  // Weights are rescaled to sum to n, so the unweighted formulas carry over.
  const double n_eff = static_cast<double>(n);
  sse *= n_eff / sw;
  f.sxx = sxx * n_eff / sw;
  const double dof = static_cast<double>(n) - 2.0;
  f.sigma_hat = std::sqrt(sse / dof);
  f.se_tau0 = f.sigma_hat / std::sqrt(f.sxx);
  f.se_delta0 = f.sigma_hat * std::sqrt(1.0 / n_eff + vb * vb / f.sxx);
  f.r2 = syy > 0.0 ? std::clamp(1.0 - sse * sw / n_eff / syy, 0.0, 1.0) : 1.0;
  return f;
}

}  // namespace

LinearFit fit_linear(std::span<const EquilibriumPoint> points, std::size_t n_bins,
                     const FitOptions& options) {
  std::vector<double> v, s, w;
  v.reserve(points.size());
  s.reserve(points.size());
  w.reserve(points.size());
  for (const auto& p : points) {
    v.push_back(p.v);
    s.push_back(p.s);
    w.push_back(options.weighted ? p.weight : 1.0);
  }
  if (options.weighted) {
    for (double x : w) {
      if (!(x > 0.0)) throw Error(ErrorCode::kInvalidArgument, "weights must be positive");
    }
  }
  return fit_weighted(v, s, w, n_bins, options.min_bins);
}

LinearFit fit_linear(std::span<const double> v, std::span<const double> s, std::size_t n_bins) {
  if (v.size() != s.size()) throw Error(ErrorCode::kInvalidArgument, "v and s differ in length");
  const std::vector<double> w(v.size(), 1.0);
  return fit_weighted(v, s, w, n_bins, 3);
}

BandKind parse_band_kind(std::string_view text) {
  if (text == "mean" || text == "mean_response") return BandKind::kMeanResponse;
  if (text == "prediction") return BandKind::kPrediction;
  if (text == "working_hotelling" || text == "simultaneous") return BandKind::kWorkingHotelling;
  throw Error(ErrorCode::kConfig, "unknown band kind '" + std::string(text) + "'");
}

std::string_view to_string(BandKind kind) {
  switch (kind) {
    case BandKind::kMeanResponse: return "mean_response";
    case BandKind::kPrediction: return "prediction";
    case BandKind::kWorkingHotelling: return "working_hotelling";
  }
  return "?";
}

double band_multiplier(const LinearFit& fit, double alpha, BandKind kind) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorCode::kInvalidAlpha, "alpha must lie in (0, 1)");
  }
  const double dof = static_cast<double>(fit.n) - 2.0;
  if (kind == BandKind::kWorkingHotelling) {
    return std::sqrt(2.0 * stats::f2_quantile(1.0 - alpha, dof));
  }
  return stats::t_quantile(1.0 - alpha / 2.0, dof);
}

Band ci_band_with(const LinearFit& fit, double v, double multiplier, BandKind kind) {
  const double dv = v - fit.v_bar;
  double var = 1.0 / static_cast<double>(fit.n) + dv * dv / fit.sxx;
  if (kind == BandKind::kPrediction) var += 1.0;
  const double half = multiplier * fit.sigma_hat * std::sqrt(var);
  const double mid = fit.predict(v);
  return {mid - half, mid + half};
}

Band ci_band(const LinearFit& fit, double v, double alpha, BandKind kind) {
  return ci_band_with(fit, v, band_multiplier(fit, alpha, kind), kind);
}

}  // namespace fdkit
