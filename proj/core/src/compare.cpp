#include "fdkit/compare.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "fdkit/error.hpp"
#include "fdkit/stats.hpp"

namespace fdkit {
namespace {

using Mat4 = std::array<std::array<double, 4>, 4>;

double norm1(const Mat4& m) {
  double best = 0.0;
  for (int j = 0; j < 4; ++j) {
    double col = 0.0;
    for (int i = 0; i < 4; ++i) col += std::abs(m[i][j]);
    best = std::max(best, col);
  }
  return best;
}

// Gauss-Jordan with partial pivoting; returns the inverse.
Mat4 invert(Mat4 a) {
  Mat4 inv{};
  for (int i = 0; i < 4; ++i) inv[i][i] = 1.0;
  const double scale = norm1(a);
  for (int col = 0; col < 4; ++col) {
    int piv = col;
    for (int r = col + 1; r < 4; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    }
    if (!(std::abs(a[piv][col]) > 1e-13 * scale)) {
      throw Error(ErrorCode::kRankDeficient, "pooled design matrix is singular");
    }
    std::swap(a[col], a[piv]);
    std::swap(inv[col], inv[piv]);
    const double d = a[col][col];
    for (int j = 0; j < 4; ++j) {
      a[col][j] /= d;
      inv[col][j] /= d;
    }
    for (int r = 0; r < 4; ++r) {
      if (r == col) continue;
      const double f = a[r][col];
      if (f == 0.0) continue;
      for (int j = 0; j < 4; ++j) {
        a[r][j] -= f * a[col][j];
        inv[r][j] -= f * inv[col][j];
      }
    }
  }
  return inv;
}

double two_sided(double coef, double se, double dof) {
  if (se > 0.0) return stats::t_two_sided_p(coef / se, dof);
  return coef == 0.0 ? 1.0 : 0.0;
}

}  // namespace

ComparisonResult compare_fits(std::span<const double> v_K, std::span<const double> s_K,
                              std::span<const double> v_J, std::span<const double> s_J,
                              double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::kInvalidAlpha, "alpha must lie in (0, 1)");
  if (v_K.size() != s_K.size() || v_J.size() != s_J.size()) {
    throw Error(ErrorCode::kInvalidArgument, "v and s differ in length");
  }
  if (v_K.size() < 3 || v_J.size() < 3) {
    throw Error(ErrorCode::kTooFewPoints, "each set needs at least 3 points");
  }

  // Regressor order: v, v*c, c, 1.
  Mat4 xtx{};
  std::array<double, 4> xty{};
  auto accumulate = [&](std::span<const double> v, std::span<const double> s, double c) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      const std::array<double, 4> x{v[i], v[i] * c, c, 1.0};
      for (int a = 0; a < 4; ++a) {
        xty[a] += x[a] * s[i];
        for (int b = 0; b < 4; ++b) xtx[a][b] += x[a] * x[b];
      }
    }
  };
  accumulate(v_K, s_K, 0.0);
  accumulate(v_J, s_J, 1.0);

  const Mat4 inv = invert(xtx);
  std::array<double, 4> beta{};
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) beta[a] += inv[a][b] * xty[b];
  }

  double sse = 0.0;
  auto residuals = [&](std::span<const double> v, std::span<const double> s, double c) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double fit = beta[0] * v[i] + beta[1] * v[i] * c + beta[2] * c + beta[3];
      sse += (s[i] - fit) * (s[i] - fit);
    }
  };
  residuals(v_K, s_K, 0.0);
  residuals(v_J, s_J, 1.0);

  ComparisonResult r;
  r.alpha = alpha;
  r.n_K = v_K.size();
  r.n_J = v_J.size();
  const double dof = static_cast<double>(r.n_K + r.n_J) - 4.0;
  const double sigma2 = sse / dof;
  r.dtau0 = beta[1];
  r.ddelta0 = beta[2];
  r.se_dtau0 = std::sqrt(std::max(0.0, sigma2 * inv[1][1]));
  r.se_ddelta0 = std::sqrt(std::max(0.0, sigma2 * inv[2][2]));
  r.p_tau = two_sided(r.dtau0, r.se_dtau0, dof);
  r.p_delta = two_sided(r.ddelta0, r.se_ddelta0, dof);
  r.tau_significant = r.p_tau < alpha;
  r.delta_significant = r.p_delta < alpha;
  r.condition = norm1(xtx) * norm1(inv);
  if (r.condition > 1e10) {
    r.warnings.push_back("ill-conditioned pooled design (condition " +
                         std::to_string(r.condition) + ")");
  }
  return r;
}

ComparisonResult compare_fits(std::span<const EquilibriumPoint> points_K,
                              std::span<const EquilibriumPoint> points_J, double alpha) {
  auto split = [](std::span<const EquilibriumPoint> pts, std::vector<double>& v,
                  std::vector<double>& s) {
    for (const auto& p : pts) {
      v.push_back(p.v);
      s.push_back(p.s);
    }
  };
  std::vector<double> vK, sK, vJ, sJ;
  split(points_K, vK, sK);
  split(points_J, vJ, sJ);
  return compare_fits(vK, sK, vJ, sJ, alpha);
}

ContainmentResult ci_containment(const LinearFit& fit_ref, double tau0, double delta0,
                                 double v_lo, double v_hi, const ContainmentOptions& options) {
  if (!(options.grid_step > 0.0)) throw Error(ErrorCode::kInvalidArgument, "grid_step must be positive");
  if (!options.allow_extrapolation) {
    v_lo = std::max(v_lo, fit_ref.v_min);
    v_hi = std::min(v_hi, fit_ref.v_max);
  }
  if (!(v_hi >= v_lo)) throw Error(ErrorCode::kEmptyRange, "containment range is empty");

  const double mult = band_multiplier(fit_ref, options.alpha, options.band);
  ContainmentResult r;
  const auto steps = static_cast<std::size_t>(std::floor((v_hi - v_lo) / options.grid_step + 1e-9));
  for (std::size_t i = 0; i <= steps; ++i) r.grid.push_back(v_lo + static_cast<double>(i) * options.grid_step);
  if (v_hi - r.grid.back() > 1e-9 * options.grid_step) r.grid.push_back(v_hi);

  std::size_t count = 0;
  for (double v : r.grid) {
    const Band b = ci_band_with(fit_ref, v, mult, options.band);
    const double s = tau0 * v + delta0;
    const double slack = 1e-9 * (1.0 + std::abs(s));
    const bool in = s >= b.lower - slack && s <= b.upper + slack;
    r.inside.push_back(in);
    if (in) ++count;
  }
  r.fraction_inside = static_cast<double>(count) / static_cast<double>(r.grid.size());
  r.fully_inside = count == r.grid.size();
  return r;
}

}  // namespace fdkit
