#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fdkit {

struct TrajectorySample {
  double t = 0.0;         // s since file epoch
  double position = 0.0;  // m along the common path (front bumper)
  double speed = 0.0;     // m/s
  double grade = 0.0;     // percent

  bool operator==(const TrajectorySample&) const = default;
};

// What an IVS-style file records about the vehicle ahead, per sample.
struct LeaderObservation {
  double ivs = 0.0;         // bumper-to-bumper gap, m
  double lead_speed = 0.0;  // m/s

  bool operator==(const LeaderObservation&) const = default;
};

enum class TrackFormat { kCanonicalCsv, kIvsCsv };

std::string_view to_string(TrackFormat format);
TrackFormat parse_track_format(std::string_view tag);

struct VehicleTrack {
  std::string vehicle_id;
  double length = 4.8;  // m
  double rate = 10.0;   // Hz, nominal
  bool has_grade = false;
  std::vector<TrajectorySample> samples;
  // Non-empty only for tracks read from an IVS file; aligned with samples.
  std::vector<LeaderObservation> leader_obs;

  bool operator==(const VehicleTrack&) const = default;

  double t_begin() const { return samples.front().t; }
  double t_end() const { return samples.back().t; }
};

enum class HeadwayKind { kMin, kMedium, kMax, kLabeled };

struct HeadwaySetting {
  HeadwayKind kind = HeadwayKind::kMin;
  std::string label;  // used when kind == kLabeled

  bool operator==(const HeadwaySetting&) const = default;
};

std::string to_string(const HeadwaySetting& headway);
HeadwaySetting parse_headway(std::string_view text);

struct PlatoonMeta {
  std::string source;
  std::string car_model;
  HeadwaySetting headway;
  std::optional<std::string> engine_mode;

  bool operator==(const PlatoonMeta&) const = default;
};

struct PlatoonRecord {
  std::vector<VehicleTrack> tracks;  // index 0 is the leader
  PlatoonMeta meta;

  bool operator==(const PlatoonRecord&) const = default;
};

// Leader/follower channels on the follower's timestamps.
struct PairSeries {
  std::string leader_id;
  std::string follower_id;
  std::vector<double> t;
  std::vector<double> v_lead;
  std::vector<double> v_follow;
  std::vector<double> spacing;  // front bumper to front bumper, m
  std::vector<double> grade;
  // Leader front-bumper position when it was measured; empty for IVS data.
  std::vector<double> lead_position;

  std::size_t size() const { return t.size(); }
};

enum class PairMode { kFromPositions, kFromIvs };

// Parses one track file. Throws Error with kEmptyFile, kMalformedRow(row) or
// kNonMonotonicTime(row); rows are counted from 1 after the header.
VehicleTrack parse_track(std::string_view bytes, TrackFormat format,
                         std::string vehicle_id = "", double length = 4.8);

// Writes the track in its own format. Values are printed in shortest
// round-trip form, so parse_track(write_track(x)) == x.
std::string write_track(const VehicleTrack& track);

// Checks the VehicleTrack invariants; throws Error{kInvalidTrack}.
void validate_track(const VehicleTrack& track);

// Reconstructs the vehicle ahead from an IVS-sourced follower track.
VehicleTrack leader_from_ivs(const VehicleTrack& follower, std::string leader_id,
                             double leader_length);

PairSeries build_pair(const VehicleTrack& leader, const VehicleTrack& follower,
                      PairMode mode);

// Picks kFromIvs when the follower carries IVS observations.
PairMode default_pair_mode(const VehicleTrack& follower);

enum class PairWarningKind { kGap, kImplausibleSpacing, kImplausibleSpeed };

struct PairWarning {
  PairWarningKind kind;
  double t_start = 0.0;
  double t_end = 0.0;
  std::string message;
};

// Median sample interval of the pair, seconds.
double median_dt(const std::vector<double>& t);

std::vector<PairWarning> validate_pair(const PairSeries& pair);

// Manifest: {source, car_model, headway_setting, engine_mode?,
//            vehicles: [{id, file, length_m, format?}]}. Paths are relative to
// the manifest's directory. An IVS leader may omit `file`.
PlatoonRecord parse_manifest(std::string_view json_text,
                             const std::filesystem::path& base_dir);
PlatoonRecord load_manifest(const std::filesystem::path& manifest_path);

// Writes <dir>/<vehicle_id>.csv per track plus <dir>/manifest.json.
void write_platoon(const PlatoonRecord& record, const std::filesystem::path& dir);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace fdkit
