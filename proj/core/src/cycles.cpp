#include "fdkit/cycles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "fdkit/error.hpp"

namespace fdkit {
namespace {

constexpr std::size_t kMinSamples = 64;

// Whole-sample symmetric reflection (…, x2, x1, x0, x1, x2, …).
std::size_t reflect(std::ptrdiff_t i, std::size_t n) {
  if (n == 1) return 0;
  const auto period = static_cast<std::ptrdiff_t>(2 * (n - 1));
  i %= period;
  if (i < 0) i += period;
  if (i >= static_cast<std::ptrdiff_t>(n)) i = period - i;
  return static_cast<std::size_t>(i);
}

std::vector<double> mexican_hat_kernel(int scale, double support) {
  const int half = static_cast<int>(std::ceil(support * scale));
  std::vector<double> k(static_cast<std::size_t>(2 * half + 1));
  for (int j = -half; j <= half; ++j) {
    const double u = static_cast<double>(j) / scale;
    k[static_cast<std::size_t>(j + half)] = (1.0 - u * u) * std::exp(-0.5 * u * u);
  }
  // Truncation leaves a small DC response; remove it so constants map to 0.
  const double mean = std::accumulate(k.begin(), k.end(), 0.0) / static_cast<double>(k.size());
  for (double& v : k) v -= mean;
  return k;
}

void check_config(const CycleConfig& config) {
  if (config.scales_samples.empty()) {
    throw Error(ErrorCode::kConfig, "cycle detection needs at least one scale");
  }
  for (int s : config.scales_samples) {
    if (s < 1) throw Error(ErrorCode::kConfig, "wavelet scales must be positive");
  }
  if (!(config.peak_factor > 0.0) || !(config.min_energy >= 0.0) ||
      !(config.min_separation_s >= 0.0) || !(config.merge_gap_s >= 0.0) ||
      !(config.kernel_support > 0.0)) {
    throw Error(ErrorCode::kConfig, "invalid cycle detection parameters");
  }
}

struct Peak {
  std::size_t index;
  double energy;
  bool positive;
};

}  // namespace

WaveletEnergy wavelet_energy(std::span<const double> speed, double rate,
                             const CycleConfig& config) {
  check_config(config);
  if (!(rate > 0.0)) throw Error(ErrorCode::kInvalidArgument, "rate must be positive");
  const std::size_t n = speed.size();
  WaveletEnergy out;
  out.energy.assign(n, 0.0);
  out.mean_coef.assign(n, 0.0);
  if (n == 0) return out;

  const double dt = 1.0 / rate;
  const double inv_scales = 1.0 / static_cast<double>(config.scales_samples.size());
  for (int scale : config.scales_samples) {
    const auto kernel = mexican_hat_kernel(scale, config.kernel_support);
    const auto half = static_cast<std::ptrdiff_t>(kernel.size() / 2);
    // Riemann sum of (1/a^2) * integral f(t) psi((t - b)/a) dt with a = scale*dt.
    const double norm = 1.0 / (static_cast<double>(scale) * scale * dt);
    for (std::size_t b = 0; b < n; ++b) {
      double acc = 0.0;
      const auto center = static_cast<std::ptrdiff_t>(b);
      if (center - half >= 0 && center + half < static_cast<std::ptrdiff_t>(n)) {
        const double* x = speed.data() + (center - half);
        for (std::size_t j = 0; j < kernel.size(); ++j) acc += x[j] * kernel[j];
      } else {
        for (std::ptrdiff_t j = -half; j <= half; ++j) {
          acc += speed[reflect(center + j, n)] * kernel[static_cast<std::size_t>(j + half)];
        }
      }
      const double w = acc * norm;
      out.energy[b] += w * w * inv_scales;
      out.mean_coef[b] += w * inv_scales;
    }
  }
  return out;
}

std::vector<CycleBoundary> detect_cycles(std::span<const double> speed, double rate,
                                         const CycleConfig& config, double t0) {
  if (speed.size() < kMinSamples) {
    throw Error(ErrorCode::kTooShort, "cycle detection needs at least 64 samples, got " +
                                          std::to_string(speed.size()));
  }
  const WaveletEnergy we = wavelet_energy(speed, rate, config);
  const auto& e = we.energy;
  const std::size_t n = e.size();

  std::vector<double> sorted = e;
  auto mid = sorted.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(sorted.begin(), mid, sorted.end());
  const double threshold = std::max(config.peak_factor * *mid, config.min_energy);

  std::vector<Peak> candidates;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(e[i] > threshold)) continue;
    const bool left_ok = i == 0 || e[i] >= e[i - 1];
    const bool right_ok = i + 1 == n || e[i] > e[i + 1];
    if (left_ok && right_ok) candidates.push_back({i, e[i], we.mean_coef[i] >= 0.0});
  }

  // Strongest first; a weaker peak of the same sign within the separation
  // window is the same corner seen through noise.
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Peak& a, const Peak& b) { return a.energy > b.energy; });
  const double dt = 1.0 / rate;
  std::vector<Peak> kept;
  for (const Peak& p : candidates) {
    const bool crowded = std::any_of(kept.begin(), kept.end(), [&](const Peak& q) {
      return q.positive == p.positive &&
             std::fabs(static_cast<double>(q.index) - static_cast<double>(p.index)) * dt <
                 config.min_separation_s;
    });
    if (!crowded) kept.push_back(p);
  }
  std::sort(kept.begin(), kept.end(),
            [](const Peak& a, const Peak& b) { return a.index < b.index; });

  std::vector<CycleBoundary> out;
  std::size_t i = 0;
  while (i < kept.size()) {
    std::size_t j = i;
    while (j + 1 < kept.size() &&
           static_cast<double>(kept[j + 1].index - kept[j].index) * dt <= config.merge_gap_s) {
      ++j;
    }
    out.push_back({t0 + static_cast<double>(kept[i].index) * dt, BoundaryKind::kCycleStart});
    out.push_back({t0 + static_cast<double>(kept[j].index) * dt, BoundaryKind::kCycleEnd});
    i = j + 1;
  }
  return out;
}

}  // namespace fdkit
