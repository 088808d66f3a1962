#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "fdkit/calibrate.hpp"
#include "fdkit/compare.hpp"
#include "fdkit/cycles.hpp"
#include "fdkit/equilibrium.hpp"
#include "fdkit/ovrv.hpp"
#include "fdkit/pipeline.hpp"
#include "fdkit/regression.hpp"
#include "fdkit/simulate.hpp"

namespace {

// one noisy MA-style platoon, shared by the benchmarks below
const fdkit::Platoon& platoon() {
  static const fdkit::Platoon p = [] {
    fdkit::NoiseSpec n;
    n.seed = 3;
    const std::vector<fdkit::OvrvParams> f{fdkit::kSettlingFollower};
    return fdkit::gen_platoon(fdkit::ma_preset(12), f, n);
  }();
  return p;
}

const fdkit::PairSeries& pair() {
  static const fdkit::PairSeries s = fdkit::build_pair(
      platoon().record.tracks[0], platoon().record.tracks[1], fdkit::PairMode::kFromPositions);
  return s;
}

void BM_Cwt(benchmark::State& st) {
  std::vector<double> v;
  for (const auto& s : platoon().record.tracks[0].samples) v.push_back(s.speed);
  v.resize(std::min<std::size_t>(v.size(), static_cast<std::size_t>(st.range(0))));
  for (auto _ : st) benchmark::DoNotOptimize(fdkit::detect_cycles(v, 10.0));
  st.SetItemsProcessed(st.iterations() * static_cast<long>(v.size()));
}
BENCHMARK(BM_Cwt)->Arg(2000)->Arg(8000)->Arg(20000)->Unit(benchmark::kMillisecond);

void BM_Intervals(benchmark::State& st) {
  const auto cfg = fdkit::noisy_analysis();
  for (auto _ : st) benchmark::DoNotOptimize(fdkit::find_equilibrium_intervals(pair(), cfg.thresholds));
  st.SetItemsProcessed(st.iterations() * static_cast<long>(pair().t.size()));
}
BENCHMARK(BM_Intervals)->Unit(benchmark::kMillisecond);

void BM_AnalyzePair(benchmark::State& st) {
  const auto cfg = fdkit::noisy_analysis();
  for (auto _ : st) benchmark::DoNotOptimize(fdkit::analyze_pair(pair(), "b", cfg));
}
BENCHMARK(BM_AnalyzePair)->Unit(benchmark::kMillisecond);

struct Lines {
  std::vector<double> vk, sk, vj, sj;
};

Lines lines(std::size_t n) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(10.0, 32.0);
  std::normal_distribution<double> z(0.0, 1.5);
  Lines l;
  for (std::size_t i = 0; i < n; ++i) {
    l.vk.push_back(u(rng));
    l.sk.push_back(1.2 * l.vk.back() + 6.0 + z(rng));
    l.vj.push_back(u(rng));
    l.sj.push_back(2.0 * l.vj.back() + 8.0 + z(rng));
  }
  return l;
}

void BM_FitLinear(benchmark::State& st) {
  const auto l = lines(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(fdkit::fit_linear(l.vk, l.sk, 3));
}
BENCHMARK(BM_FitLinear)->Arg(50)->Arg(1000);

void BM_CompareFits(benchmark::State& st) {
  const auto l = lines(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(fdkit::compare_fits(l.vk, l.sk, l.vj, l.sj));
}
BENCHMARK(BM_CompareFits)->Arg(50)->Arg(1000);

void BM_OvrvSimulate(benchmark::State& st) {
  const auto leader = fdkit::leader_series(pair());
  for (auto _ : st) {
    benchmark::DoNotOptimize(
        fdkit::simulate_ovrv(fdkit::kSettlingFollower, leader, pair().spacing[0], pair().v_follow[0], 0.1));
  }
  st.SetItemsProcessed(st.iterations() * static_cast<long>(leader.t.size()));
}
BENCHMARK(BM_OvrvSimulate)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
