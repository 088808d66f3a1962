#include "fdkit/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "fdkit/error.hpp"

namespace fdkit {
namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw Error(ErrorCode::kInvalidSpec, msg);
}

struct Builder {
  LeaderProfile prof;
  GroundTruth truth;

  void hold(double duration) { go(duration, prof.v.back()); }
  void ramp_to(double v, double rate) { go(std::abs(v - prof.v.back()) / rate, v); }
  void go(double duration, double v) {
    const double t0 = prof.t.back(), v0 = prof.v.back();
    prof.t.push_back(t0 + duration);
    prof.v.push_back(v);
    prof.x.push_back(prof.x.back() + 0.5 * (v0 + v) * duration);
  }
};

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

std::pair<LeaderProfile, GroundTruth> build(const ScenarioSpec& spec) {
  spec.validate();
  Builder b;
  b.prof.t = {0.0};
  b.prof.v = {spec.levels.front().v_stable};
  b.prof.x = {spec.start_position};

  for (std::size_t li = 0; li < spec.levels.size(); ++li) {
    const auto& L = spec.levels[li];
    if (li > 0) {
      CycleTruth c;
      c.level_change = true;
      c.t_start = b.prof.t.back();
      c.v_from = b.prof.v.back();
      c.v_to = L.v_stable;
      b.ramp_to(L.v_stable, spec.level_change_accel);
      c.t_dip = c.t_end = b.prof.t.back();
      b.truth.cycles.push_back(c);
    }
    b.hold(L.stabilization());
    for (std::size_t k = 0; k < L.n_cycles; ++k) {
      CycleTruth c;
      c.t_start = b.prof.t.back();
      c.v_from = c.v_to = L.v_stable;
      b.ramp_to(L.v_dip, L.decel);
      c.t_dip = b.prof.t.back();
      b.ramp_to(L.v_stable, L.accel);
      c.t_end = b.prof.t.back();
      b.truth.cycles.push_back(c);
      b.hold(L.stabilization());
    }
  }
  for (const auto& c : b.truth.cycles) {
    b.truth.boundaries.push_back({c.t_start, BoundaryKind::kCycleStart});
    b.truth.boundaries.push_back({c.t_end, BoundaryKind::kCycleEnd});
  }
  b.truth.duration = b.prof.t.back();
  b.truth.final_position = b.prof.x.back();
  return {std::move(b.prof), std::move(b.truth)};
}

double grade_at(const ScenarioSpec& spec, double t) {
  double g = 0.0;
  for (const auto& s : spec.grade) {
    if (t >= s.t_start && t < s.t_end) g = s.grade;
  }
  return g;
}

}  // namespace

void DrivingCycleSpec::validate() const {
  require(v_stable > 0.0 && v_stable < 70.0, "v_stable must lie in (0, 70) m/s");
  require(n_cycles == 0 || (v_dip > 0.0 && v_dip < v_stable), "need 0 < v_dip < v_stable");
  require(decel > 0.0 && accel > 0.0, "decel and accel must be positive");
  require(stabilization_low > 0.0 && stabilization_high > 0.0, "stabilization must be positive");
  require(rate > 0.0 && rate <= 1000.0, "rate must lie in (0, 1000] Hz");
}

void ScenarioSpec::validate() const {
  require(!levels.empty(), "scenario needs at least one speed level");
  for (const auto& l : levels) l.validate();
  for (const auto& l : levels) require(l.rate == levels.front().rate, "all levels must share one rate");
  require(level_change_accel > 0.0, "level_change_accel must be positive");
  for (const auto& g : grade) require(g.t_end > g.t_start, "grade segment must have positive length");
}

void NoiseSpec::validate() const {
  if (!(sigma_pos >= 0.0) || !(sigma_speed >= 0.0) || !(bias_sigma >= 0.0)) {
    throw Error(ErrorCode::kInvalidSpec, "noise sigmas must be non-negative");
  }
}

ScenarioSpec ma_preset(std::size_t cycles_per_level) {
  ScenarioSpec s;
  for (double v : {15.0, 22.0, 29.0}) {
    DrivingCycleSpec l;
    l.v_stable = v;
    l.v_dip = v - 6.0;
    l.n_cycles = cycles_per_level;
    s.levels.push_back(l);
  }
  return s;
}

double LeaderProfile::speed(double tq) const {
  if (tq <= t.front()) return v.front();
  if (tq >= t.back()) return v.back();
  const auto k = static_cast<std::size_t>(std::upper_bound(t.begin(), t.end(), tq) - t.begin()) - 1;
  const double f = (tq - t[k]) / (t[k + 1] - t[k]);
  return v[k] + f * (v[k + 1] - v[k]);
}

double LeaderProfile::position(double tq) const {
  if (tq <= t.front()) return x.front() + v.front() * (tq - t.front());
  if (tq >= t.back()) return x.back() + v.back() * (tq - t.back());
  const auto k = static_cast<std::size_t>(std::upper_bound(t.begin(), t.end(), tq) - t.begin()) - 1;
  const double tau = tq - t[k];
  const double a = (v[k + 1] - v[k]) / (t[k + 1] - t[k]);
  return x[k] + v[k] * tau + 0.5 * a * tau * tau;
}

LeaderProfile leader_profile(const ScenarioSpec& spec) { return build(spec).first; }

std::pair<VehicleTrack, GroundTruth> gen_leader(const ScenarioSpec& spec) {
  auto [prof, truth] = build(spec);
  const double rate = spec.levels.front().rate;
  VehicleTrack track;
  track.vehicle_id = "leader";
  track.rate = rate;
  track.has_grade = !spec.grade.empty();
  const auto n = static_cast<std::size_t>(std::floor(truth.duration * rate + 1e-9)) + 1;
  track.samples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / rate;
    track.samples.push_back({t, prof.position(t), prof.speed(t), grade_at(spec, t)});
  }
  return {std::move(track), std::move(truth)};
}

std::pair<VehicleTrack, GroundTruth> gen_leader(const DrivingCycleSpec& spec) {
  ScenarioSpec s;
  s.levels = {spec};
  return gen_leader(s);
}

VehicleTrack add_noise(const VehicleTrack& track, const NoiseSpec& noise, std::uint64_t stream,
                       std::span<const double> bias_epochs) {
  noise.validate();
  VehicleTrack out = track;
  auto rng = make_rng(noise.seed, stream);
  std::normal_distribution<double> z(0.0, 1.0);
  const bool biased = noise.bias_sigma > 0.0;
  std::size_t next_epoch = 0;
  double bias = biased ? noise.bias_sigma * z(rng) : 0.0;
  for (auto& s : out.samples) {
    while (biased && next_epoch < bias_epochs.size() && bias_epochs[next_epoch] <= s.t) {
      bias = noise.bias_sigma * z(rng);
      ++next_epoch;
    }
    // Draw both channels every sample so a zero sigma does not shift the
    // stream for the other channel.
    const double ep = z(rng), ev = z(rng);
    s.position += noise.sigma_pos * ep + bias;
    s.speed = std::max(0.0, s.speed + noise.sigma_speed * ev);
  }
  return out;
}

Platoon gen_platoon(const ScenarioSpec& leader_spec, std::span<const OvrvParams> followers,
                    const NoiseSpec& noise, const PlatoonOptions& o) {
  if (followers.empty()) throw Error(ErrorCode::kInvalidSpec, "platoon needs at least one follower");
  noise.validate();
  if (!o.lengths.empty() && o.lengths.size() != followers.size() + 1) {
    throw Error(ErrorCode::kInvalidSpec, "lengths must list the leader and every follower");
  }
  auto [lead, truth] = gen_leader(leader_spec);
  lead.length = o.lengths.empty() ? 4.8 : o.lengths[0];

  Platoon p;
  p.truth.meta = {o.source, o.car_model, o.headway, std::nullopt};
  p.truth.tracks.push_back(lead);
  for (std::size_t i = 0; i < followers.size(); ++i) {
    const auto& ahead = p.truth.tracks.back();
    LeaderSeries ls;
    for (const auto& s : ahead.samples) {
      ls.t.push_back(s.t);
      ls.v.push_back(s.speed);
      ls.x.push_back(s.position);
    }
    const double v0 = ls.v.front();
    const double s0 = followers[i].tau * v0 + followers[i].eta;
    const auto sim = simulate_ovrv(followers[i], ls, s0, v0, o.dt, o.limits);

    VehicleTrack f;
    f.vehicle_id = "acc" + std::to_string(i + 1);
    f.length = o.lengths.empty() ? 4.8 : o.lengths[i + 1];
    f.rate = lead.rate;
    f.has_grade = lead.has_grade;
    for (std::size_t k = 0; k < sim.t.size(); ++k) {
      f.samples.push_back({sim.t[k], sim.x[k], sim.v[k], lead.samples[k].grade});
    }
    p.truth.tracks.push_back(std::move(f));
    truth.followers.push_back(followers[i]);
    truth.lines.push_back(ovrv_equilibrium(followers[i]));
  }

  std::vector<double> epochs;
  for (const auto& c : truth.cycles) epochs.push_back(c.t_start);
  p.record.meta = p.truth.meta;
  for (std::size_t i = 0; i < p.truth.tracks.size(); ++i) {
    p.record.tracks.push_back(add_noise(p.truth.tracks[i], noise, i, epochs));
  }
  p.ground_truth = std::move(truth);
  return p;
}

}  // namespace fdkit
