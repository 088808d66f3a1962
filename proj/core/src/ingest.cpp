#include "fdkit/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <nlohmann/json.hpp>
#include <sstream>

#include "fdkit/csv.hpp"
#include "fdkit/error.hpp"

namespace fdkit {
namespace {

constexpr double kMinOverlapSeconds = 10.0;

double nominal_rate(const std::vector<TrajectorySample>& samples) {
  std::vector<double> t;
  t.reserve(samples.size());
  for (const auto& s : samples) t.push_back(s.t);
  const double dt = median_dt(t);
  // Quantize so that 1/median(dt) of a 10 Hz grid reads back as exactly 10.
  return std::round(1e6 / dt) / 1e6;
}

std::vector<double> parse_row(std::string_view line, std::size_t row, std::size_t min_fields,
                              std::size_t max_fields) {
  const auto fields = csv::split_fields(line);
  if (fields.size() < min_fields || fields.size() > max_fields) {
    throw Error(ErrorCode::kMalformedRow, "expected " + std::to_string(min_fields) +
                                              " fields, got " + std::to_string(fields.size()),
                row);
  }
  std::vector<double> values;
  values.reserve(fields.size());
  for (std::size_t i = 0; i < fields.size(); ++i) {
    auto v = csv::parse_double(fields[i]);
    if (!v) {
      // An empty trailing optional column is treated as absent.
      if (i >= min_fields && fields[i].empty()) break;
      throw Error(ErrorCode::kMalformedRow,
                  "field " + std::to_string(i + 1) + " is not a number", row);
    }
    values.push_back(*v);
  }
  return values;
}

// Segment index and weight of x within xs, advancing `hint` monotonically.
struct Bracket {
  std::size_t i = 0;
  double w = 0.0;
};

Bracket locate(const std::vector<double>& xs, double x, std::size_t& hint) {
  while (hint + 2 < xs.size() && xs[hint + 1] < x) ++hint;
  const double x0 = xs[hint];
  const double x1 = xs[hint + 1];
  return {hint, std::clamp((x - x0) / (x1 - x0), 0.0, 1.0)};
}

double lerp_at(const std::vector<double>& ys, Bracket b) {
  return b.w == 0.0 ? ys[b.i] : ys[b.i] + b.w * (ys[b.i + 1] - ys[b.i]);
}

}  // namespace

std::string_view to_string(TrackFormat format) {
  return format == TrackFormat::kCanonicalCsv ? "canonical_csv" : "ivs_csv";
}

TrackFormat parse_track_format(std::string_view tag) {
  if (tag == "canonical_csv") return TrackFormat::kCanonicalCsv;
  if (tag == "ivs_csv") return TrackFormat::kIvsCsv;
  throw Error(ErrorCode::kConfig, "unknown track format '" + std::string(tag) + "'");
}

std::string to_string(const HeadwaySetting& headway) {
  switch (headway.kind) {
    case HeadwayKind::kMin: return "min";
    case HeadwayKind::kMedium: return "medium";
    case HeadwayKind::kMax: return "max";
    case HeadwayKind::kLabeled: return headway.label;
  }
  return headway.label;
}

HeadwaySetting parse_headway(std::string_view text) {
  if (text == "min") return {HeadwayKind::kMin, ""};
  if (text == "medium") return {HeadwayKind::kMedium, ""};
  if (text == "max") return {HeadwayKind::kMax, ""};
  return {HeadwayKind::kLabeled, std::string(text)};
}

double median_dt(const std::vector<double>& t) {
  if (t.size() < 2) return 0.0;
  std::vector<double> gaps;
  gaps.reserve(t.size() - 1);
  for (std::size_t i = 1; i < t.size(); ++i) gaps.push_back(t[i] - t[i - 1]);
  const auto mid = gaps.begin() + static_cast<std::ptrdiff_t>(gaps.size() / 2);
  std::nth_element(gaps.begin(), mid, gaps.end());
  if (gaps.size() % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(gaps.begin(), mid);
  return 0.5 * (lower + upper);
}

VehicleTrack parse_track(std::string_view bytes, TrackFormat format, std::string vehicle_id,
                         double length) {
  auto lines = csv::split_lines(bytes);
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) throw Error(ErrorCode::kEmptyFile, "no header");

  VehicleTrack track;
  track.vehicle_id = std::move(vehicle_id);
  track.length = length;

  const std::string_view header = lines.front();
  if (format == TrackFormat::kCanonicalCsv) {
    if (header == "t_s,pos_m,speed_mps,grade_pct") {
      track.has_grade = true;
    } else if (header != "t_s,pos_m,speed_mps") {
      throw Error(ErrorCode::kMalformedRow, "unexpected header '" + std::string(header) + "'",
                  std::size_t{0});
    }
  } else if (header != "t_s,ivs_m,v_lead_mps,v_follow_mps") {
    throw Error(ErrorCode::kMalformedRow, "unexpected header '" + std::string(header) + "'",
                std::size_t{0});
  }
  if (lines.size() == 1) throw Error(ErrorCode::kEmptyFile, "header only");

  const std::size_t ncols = format == TrackFormat::kIvsCsv ? 4 : (track.has_grade ? 4 : 3);
  track.samples.reserve(lines.size() - 1);
  double position = 0.0;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t row = i;
    if (lines[i].empty()) throw Error(ErrorCode::kMalformedRow, "blank line", row);
    const auto v = parse_row(lines[i], row, ncols, ncols);
    if (v.size() < ncols) throw Error(ErrorCode::kMalformedRow, "missing value", row);
    TrajectorySample s;
    s.t = v[0];
    if (!track.samples.empty() && !(s.t > track.samples.back().t)) {
      throw Error(ErrorCode::kNonMonotonicTime, "timestamps must increase", row);
    }
    if (format == TrackFormat::kCanonicalCsv) {
      s.position = v[1];
      s.speed = v[2];
      if (track.has_grade) s.grade = v[3];
    } else {
      s.speed = v[3];
      if (!track.samples.empty()) {
        const auto& prev = track.samples.back();
        position += 0.5 * (prev.speed + s.speed) * (s.t - prev.t);
      }
      s.position = position;
      if (v[1] < 0.0 || v[2] < 0.0) {
        throw Error(ErrorCode::kMalformedRow, "negative gap or leader speed", row);
      }
      track.leader_obs.push_back({v[1], v[2]});
    }
    if (s.speed < 0.0) throw Error(ErrorCode::kMalformedRow, "negative speed", row);
    track.samples.push_back(s);
  }
  if (track.samples.size() >= 2) track.rate = nominal_rate(track.samples);
  return track;
}

std::string write_track(const VehicleTrack& track) {
  std::string out;
  out.reserve(track.samples.size() * 48);
  const bool ivs = !track.leader_obs.empty();
  if (ivs) {
    out += "t_s,ivs_m,v_lead_mps,v_follow_mps\n";
  } else {
    out += track.has_grade ? "t_s,pos_m,speed_mps,grade_pct\n" : "t_s,pos_m,speed_mps\n";
  }
  for (std::size_t i = 0; i < track.samples.size(); ++i) {
    const auto& s = track.samples[i];
    out += csv::format_exact(s.t);
    out += ',';
    if (ivs) {
      out += csv::format_exact(track.leader_obs[i].ivs);
      out += ',';
      out += csv::format_exact(track.leader_obs[i].lead_speed);
      out += ',';
      out += csv::format_exact(s.speed);
    } else {
      out += csv::format_exact(s.position);
      out += ',';
      out += csv::format_exact(s.speed);
      if (track.has_grade) {
        out += ',';
        out += csv::format_exact(s.grade);
      }
    }
    out += '\n';
  }
  return out;
}

void validate_track(const VehicleTrack& track) {
  const std::string who = "track '" + track.vehicle_id + "': ";
  if (!(track.length > 0.0 && track.length < 30.0)) {
    throw Error(ErrorCode::kInvalidTrack, who + "vehicle length must be in (0, 30) m");
  }
  if (track.samples.size() < 2) {
    throw Error(ErrorCode::kInvalidTrack, who + "needs at least 2 samples");
  }
  if (!track.leader_obs.empty() && track.leader_obs.size() != track.samples.size()) {
    throw Error(ErrorCode::kInvalidTrack, who + "IVS channel length mismatch");
  }
  for (std::size_t i = 0; i < track.samples.size(); ++i) {
    if (track.samples[i].speed < 0.0) {
      throw Error(ErrorCode::kInvalidTrack, who + "negative speed", track.samples[i].t);
    }
    if (i > 0 && !(track.samples[i].t > track.samples[i - 1].t)) {
      throw Error(ErrorCode::kInvalidTrack, who + "timestamps not increasing",
                  track.samples[i].t);
    }
  }
  if (!(track.rate > 0.0)) throw Error(ErrorCode::kInvalidTrack, who + "rate must be positive");
  std::vector<double> t;
  for (const auto& s : track.samples) t.push_back(s.t);
  const double dt = median_dt(t);
  if (std::fabs(dt * track.rate - 1.0) > 0.2) {
    throw Error(ErrorCode::kInvalidTrack, who + "median sample interval disagrees with rate");
  }
}

VehicleTrack leader_from_ivs(const VehicleTrack& follower, std::string leader_id,
                             double leader_length) {
  if (follower.leader_obs.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "track '" + follower.vehicle_id + "' carries no IVS observations");
  }
  VehicleTrack leader;
  leader.vehicle_id = std::move(leader_id);
  leader.length = leader_length;
  leader.rate = follower.rate;
  leader.has_grade = follower.has_grade;
  leader.samples.reserve(follower.samples.size());
  for (std::size_t i = 0; i < follower.samples.size(); ++i) {
    const auto& f = follower.samples[i];
    const auto& obs = follower.leader_obs[i];
    leader.samples.push_back({f.t, f.position + obs.ivs + leader_length, obs.lead_speed, f.grade});
  }
  return leader;
}

PairMode default_pair_mode(const VehicleTrack& follower) {
  return follower.leader_obs.empty() ? PairMode::kFromPositions : PairMode::kFromIvs;
}

PairSeries build_pair(const VehicleTrack& leader, const VehicleTrack& follower, PairMode mode) {
  PairSeries pair;
  pair.leader_id = leader.vehicle_id;
  pair.follower_id = follower.vehicle_id;
  if (follower.samples.size() < 2) throw Error(ErrorCode::kNoOverlap, "follower too short");

  if (mode == PairMode::kFromIvs) {
    if (follower.leader_obs.size() != follower.samples.size()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "IVS pairing needs a follower track read from an IVS file");
    }
    if (follower.t_end() - follower.t_begin() < kMinOverlapSeconds) {
      throw Error(ErrorCode::kNoOverlap, "IVS record shorter than 10 s");
    }
    const std::size_t n = follower.samples.size();
    pair.t.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& f = follower.samples[i];
      const double spacing = follower.leader_obs[i].ivs + leader.length;
      if (!(spacing > 0.0)) throw Error(ErrorCode::kNegativeSpacing, "non-positive spacing", f.t);
      pair.t.push_back(f.t);
      pair.v_lead.push_back(follower.leader_obs[i].lead_speed);
      pair.v_follow.push_back(f.speed);
      pair.spacing.push_back(spacing);
      pair.grade.push_back(f.grade);
    }
    return pair;
  }

  if (leader.samples.size() < 2) throw Error(ErrorCode::kNoOverlap, "leader too short");
  const double t0 = std::max(leader.t_begin(), follower.t_begin());
  const double t1 = std::min(leader.t_end(), follower.t_end());
  if (t1 - t0 < kMinOverlapSeconds) {
    throw Error(ErrorCode::kNoOverlap, "tracks overlap for less than 10 s");
  }

  std::vector<double> lt, lx, lv, lg;
  lt.reserve(leader.samples.size());
  for (const auto& s : leader.samples) {
    lt.push_back(s.t);
    lx.push_back(s.position);
    lv.push_back(s.speed);
    lg.push_back(s.grade);
  }
  const bool grade_from_leader = !follower.has_grade && leader.has_grade;

  std::size_t hint = 0;
  for (const auto& f : follower.samples) {
    if (f.t < t0 || f.t > t1) continue;
    const Bracket b = locate(lt, f.t, hint);
    const double xl = lerp_at(lx, b);
    const double vl = lerp_at(lv, b);
    const double grade = grade_from_leader ? lerp_at(lg, b) : f.grade;
    const double spacing = xl - f.position;
    if (!(spacing > 0.0)) {
      throw Error(ErrorCode::kNegativeSpacing, "leader not ahead of follower", f.t);
    }
    pair.t.push_back(f.t);
    pair.v_lead.push_back(vl);
    pair.v_follow.push_back(f.speed);
    pair.spacing.push_back(spacing);
    pair.grade.push_back(grade);
    pair.lead_position.push_back(xl);
  }
  if (pair.t.size() < 2) throw Error(ErrorCode::kNoOverlap, "no common samples");
  return pair;
}

std::vector<PairWarning> validate_pair(const PairSeries& pair) {
  std::vector<PairWarning> out;
  if (pair.t.size() < 2) return out;
  const double dt = median_dt(pair.t);
  const double max_gap = 3.0 * dt;
  for (std::size_t i = 1; i < pair.t.size(); ++i) {
    const double gap = pair.t[i] - pair.t[i - 1];
    if (gap > max_gap) {
      out.push_back({PairWarningKind::kGap, pair.t[i - 1], pair.t[i],
                     "gap of " + csv::format_g6(gap) + " s"});
    }
  }

  auto flag_runs = [&](PairWarningKind kind, auto&& bad, const std::string& what) {
    std::size_t i = 0;
    while (i < pair.t.size()) {
      if (!bad(i)) {
        ++i;
        continue;
      }
      const std::size_t start = i;
      while (i < pair.t.size() && bad(i)) ++i;
      out.push_back({kind, pair.t[start], pair.t[i - 1], what});
    }
  };
  flag_runs(PairWarningKind::kImplausibleSpacing,
            [&](std::size_t i) { return pair.spacing[i] > 200.0; }, "spacing above 200 m");
  flag_runs(PairWarningKind::kImplausibleSpeed,
            [&](std::size_t i) { return pair.v_lead[i] > 45.0 || pair.v_follow[i] > 45.0; },
            "speed above 45 m/s");
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write '" + path.string() + "'");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error(ErrorCode::kIoError, "short write to '" + path.string() + "'");
}

PlatoonRecord parse_manifest(std::string_view json_text, const std::filesystem::path& base_dir) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfig, std::string("manifest is not valid JSON: ") + e.what());
  }
  PlatoonRecord record;
  try {
    record.meta.source = j.value("source", "");
    record.meta.car_model = j.value("car_model", "");
    record.meta.headway = parse_headway(j.value("headway_setting", "min"));
    if (j.contains("engine_mode") && !j["engine_mode"].is_null()) {
      record.meta.engine_mode = j["engine_mode"].get<std::string>();
    }
    if (!j.contains("vehicles") || !j["vehicles"].is_array()) {
      throw Error(ErrorCode::kConfig, "manifest lacks a 'vehicles' array");
    }
    const auto& vehicles = j["vehicles"];
    if (vehicles.size() < 2) {
      throw Error(ErrorCode::kEmpty, "manifest must list at least two vehicles");
    }
    std::vector<bool> deferred(vehicles.size(), false);
    record.tracks.resize(vehicles.size());
    for (std::size_t i = 0; i < vehicles.size(); ++i) {
      const auto& v = vehicles[i];
      const std::string id = v.at("id").get<std::string>();
      const double length = v.at("length_m").get<double>();
      if (!v.contains("file")) {
        deferred[i] = true;
        record.tracks[i].vehicle_id = id;
        record.tracks[i].length = length;
        continue;
      }
      const auto format = parse_track_format(v.value("format", "canonical_csv"));
      const auto path = base_dir / v.at("file").get<std::string>();
      record.tracks[i] = parse_track(read_file(path), format, id, length);
    }
    // A vehicle without a file is reconstructed from the IVS record of the
    // vehicle behind it.
    for (std::size_t i = 0; i < vehicles.size(); ++i) {
      if (!deferred[i]) continue;
      if (i + 1 >= vehicles.size() || record.tracks[i + 1].leader_obs.empty()) {
        throw Error(ErrorCode::kConfig, "vehicle '" + record.tracks[i].vehicle_id +
                                            "' has no file and no IVS follower");
      }
      record.tracks[i] = leader_from_ivs(record.tracks[i + 1], record.tracks[i].vehicle_id,
                                         record.tracks[i].length);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfig, std::string("manifest field error: ") + e.what());
  }
  for (const auto& track : record.tracks) validate_track(track);
  return record;
}

PlatoonRecord load_manifest(const std::filesystem::path& manifest_path) {
  return parse_manifest(read_file(manifest_path), manifest_path.parent_path());
}

void write_platoon(const PlatoonRecord& record, const std::filesystem::path& dir) {
  nlohmann::ordered_json j;
  j["source"] = record.meta.source;
  j["car_model"] = record.meta.car_model;
  j["headway_setting"] = to_string(record.meta.headway);
  if (record.meta.engine_mode) j["engine_mode"] = *record.meta.engine_mode;
  j["vehicles"] = nlohmann::ordered_json::array();
  for (const auto& track : record.tracks) {
    const std::string file = track.vehicle_id + ".csv";
    write_file(dir / file, write_track(track));
    nlohmann::ordered_json v;
    v["id"] = track.vehicle_id;
    v["file"] = file;
    v["length_m"] = track.length;
    if (!track.leader_obs.empty()) v["format"] = "ivs_csv";
    j["vehicles"].push_back(v);
  }
  write_file(dir / "manifest.json", j.dump(2) + "\n");
}

}  // namespace fdkit
