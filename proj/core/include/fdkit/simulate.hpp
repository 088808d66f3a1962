#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fdkit/calibrate.hpp"
#include "fdkit/cycles.hpp"
#include "fdkit/ingest.hpp"
#include "fdkit/ovrv.hpp"

namespace fdkit {

// One speed level of the leader: stable speed, then n_cycles of
// decelerate-to-dip / accelerate-back, each followed by a stabilization
// period. n_cycles = 0 is a single stabilization period.
struct DrivingCycleSpec {
  double v_stable = 20.0;  // m/s
  double v_dip = 15.0;     // m/s
  double decel = 1.0;      // m/s^2, magnitude
  double accel = 1.0;      // m/s^2
  std::size_t n_cycles = 1;
  double stabilization_low = 30.0;   // s, used below low_speed_cutoff
  double stabilization_high = 45.0;  // s
  double low_speed_cutoff = 20.1;    // m/s
  double rate = 10.0;                // Hz

  void validate() const;  // throws Error{kInvalidSpec}
  double stabilization() const {
    return v_stable < low_speed_cutoff ? stabilization_low : stabilization_high;
  }
};

struct GradeSegment {
  double t_start = 0.0;
  double t_end = 0.0;
  double grade = 0.0;  // percent
};

// Several speed levels back to back, joined by constant-acceleration ramps.
struct ScenarioSpec {
  std::vector<DrivingCycleSpec> levels;
  double level_change_accel = 0.5;  // m/s^2, magnitude
  double start_position = 500.0;    // m, leader front bumper at t = 0
  std::vector<GradeSegment> grade;

  void validate() const;
};

// Three-level MA-style preset: 15, 22 and 29 m/s with 6 m/s dips at
// 1 m/s^2. The leader's ramp rates are not published, so these are chosen.
ScenarioSpec ma_preset(std::size_t cycles_per_level);

struct CycleTruth {
  double t_start = 0.0;  // first ramp begins
  double t_dip = 0.0;    // lowest speed
  double t_end = 0.0;    // back at the stable speed
  double v_from = 0.0;
  double v_to = 0.0;
  bool level_change = false;
};

struct GroundTruth {
  std::vector<CycleTruth> cycles;
  std::vector<CycleBoundary> boundaries;  // start/end per entry of `cycles`
  std::vector<OvrvParams> followers;
  std::vector<EquilibriumLine> lines;  // per follower
  double duration = 0.0;               // s
  double final_position = 0.0;         // m, leader
};

struct NoiseSpec {
  double sigma_pos = 0.89;   // m
  double sigma_speed = 0.10;  // m/s
  std::uint64_t seed = 1;
  // Optional slowly varying position error: a Gaussian offset per vehicle
  // that is redrawn at each epoch passed to add_noise. 0 disables it.
  double bias_sigma = 0.0;  // m

  void validate() const;
};

std::pair<VehicleTrack, GroundTruth> gen_leader(const DrivingCycleSpec& spec);
std::pair<VehicleTrack, GroundTruth> gen_leader(const ScenarioSpec& spec);

// Speed and position of the leader profile at time t, evaluated exactly.
struct LeaderProfile {
  std::vector<double> t;  // knots
  std::vector<double> v;
  std::vector<double> x;  // exact position at each knot

  double speed(double t) const;
  double position(double t) const;
};

LeaderProfile leader_profile(const ScenarioSpec& spec);

// Adds zero-mean Gaussian noise to position and speed; speeds are floored at
// 0 so the track stays valid. `stream` separates vehicles under one seed.
// Bias offsets, if enabled, change at each time in `bias_epochs`.
VehicleTrack add_noise(const VehicleTrack& track, const NoiseSpec& noise,
                       std::uint64_t stream = 0, std::span<const double> bias_epochs = {});

// A follower that settles within the 10 s post-cycle gap, so equilibrium
// windows see no leftover transient. Used by presets and the self-test.
inline constexpr OvrvParams kSettlingFollower{0.3, 0.8, 1.2, 6.0};

struct PlatoonOptions {
  std::vector<double> lengths;  // leader first; 4.8 m each when empty
  double dt = 0.1;              // s, follower integration step cap
  AccelLimits limits;
  std::string source = "synthetic";
  std::string car_model = "ovrv";
  HeadwaySetting headway;
};

struct Platoon {
  PlatoonRecord record;  // noisy
  PlatoonRecord truth;   // noiseless
  GroundTruth ground_truth;
};

// Follower i trails vehicle i-1 and starts on its own equilibrium line.
// Bias epochs, when enabled, are the starts of the leader's cycles.
Platoon gen_platoon(const ScenarioSpec& leader, std::span<const OvrvParams> followers,
                    const NoiseSpec& noise, const PlatoonOptions& options = {});

}  // namespace fdkit
