#include "fdkit/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fdkit/error.hpp"

namespace fdkit {

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> x0, const NelderMeadOptions& o) {
  const std::size_t d = x0.size();
  if (d == 0) throw Error(ErrorCode::kInvalidArgument, "nelder_mead needs at least one variable");
  const bool boxed = !o.lower.empty() || !o.upper.empty();
  if (boxed && (o.lower.size() != d || o.upper.size() != d)) {
    throw Error(ErrorCode::kInvalidArgument, "bounds must match the dimension");
  }

  NelderMeadResult r;
  auto project = [&](std::vector<double>& x) {
    if (!boxed) return;
    for (std::size_t i = 0; i < d; ++i) x[i] = std::clamp(x[i], o.lower[i], o.upper[i]);
  };
  auto eval = [&](const std::vector<double>& x) {
    ++r.evaluations;
    const double v = f(x);
    return std::isnan(v) ? HUGE_VAL : v;
  };

  project(x0);
  std::vector<std::vector<double>> pts(d + 1, x0);
  for (std::size_t i = 0; i < d; ++i) {
    double step = o.initial_step * std::abs(x0[i]);
    if (step == 0.0) step = o.initial_step > 0.0 ? o.initial_step : 0.05;
    pts[i + 1][i] += step;
    project(pts[i + 1]);
    // Bounced off the box: step the other way instead.
    if (pts[i + 1][i] == x0[i]) {
      pts[i + 1][i] -= step;
      project(pts[i + 1]);
    }
  }
  std::vector<double> fv(d + 1);
  for (std::size_t i = 0; i <= d; ++i) fv[i] = eval(pts[i]);

  std::vector<std::size_t> order(d + 1);
  auto centroid_along = [&](const std::vector<double>& c, const std::vector<double>& w, double t) {
    std::vector<double> x(d);
    for (std::size_t j = 0; j < d; ++j) x[j] = c[j] + t * (w[j] - c[j]);
    project(x);
    return x;
  };

  while (true) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return fv[a] < fv[b]; });
    const std::size_t best = order.front(), worst = order.back(), second = order[d - 1];

    double xspread = 0.0;
    for (std::size_t i = 0; i <= d; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        xspread = std::max(xspread, std::abs(pts[i][j] - pts[best][j]));
      }
    }
    if (std::abs(fv[worst] - fv[best]) <= o.tolerance && xspread <= o.tolerance) {
      r.converged = true;
      break;
    }
    if (r.iterations >= o.max_iterations) break;
    ++r.iterations;

    std::vector<double> c(d, 0.0);
    for (std::size_t i = 0; i <= d; ++i) {
      if (i == worst) continue;
      for (std::size_t j = 0; j < d; ++j) c[j] += pts[i][j] / static_cast<double>(d);
    }

    auto xr = centroid_along(c, pts[worst], -1.0);
    const double fr = eval(xr);
    if (fr < fv[best]) {
      auto xe = centroid_along(c, pts[worst], -2.0);
      const double fe = eval(xe);
      if (fe < fr) {
        pts[worst] = std::move(xe);
        fv[worst] = fe;
      } else {
        pts[worst] = std::move(xr);
        fv[worst] = fr;
      }
      continue;
    }
    if (fr < fv[second]) {
      pts[worst] = std::move(xr);
      fv[worst] = fr;
      continue;
    }
    const bool outside = fr < fv[worst];
    auto xc = centroid_along(c, outside ? xr : pts[worst], 0.5);
    const double fc = eval(xc);
    if (fc < (outside ? fr : fv[worst])) {
      pts[worst] = std::move(xc);
      fv[worst] = fc;
      continue;
    }
    for (std::size_t i = 0; i <= d; ++i) {
      if (i == best) continue;
      pts[i] = centroid_along(pts[best], pts[i], 0.5);
      fv[i] = eval(pts[i]);
    }
  }

  const auto best = static_cast<std::size_t>(std::min_element(fv.begin(), fv.end()) - fv.begin());
  r.x = pts[best];
  r.f = fv[best];
  return r;
}

}  // namespace fdkit
