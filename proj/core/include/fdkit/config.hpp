#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fdkit/calibrate.hpp"
#include "fdkit/compare.hpp"
#include "fdkit/fd.hpp"
#include "fdkit/pipeline.hpp"
#include "fdkit/simulate.hpp"

namespace fdkit {

struct InputSpec {
  std::string manifest;  // resolved against the config directory
  std::string system;    // defaults to the manifest's car_model
  std::string headway;   // defaults to the manifest's headway setting
};

struct CompareSpec {
  double alpha = 0.05;
  std::vector<std::pair<std::string, std::string>> pairs;  // system names, K then J
  ContainmentOptions containment;
};

struct CalibrateSpec {
  OvrvParams init{0.2, 0.6, 1.5, 4.0};
  OvrvBounds bounds;
  CalibrateOptions options;
};

struct ScenarioConfig {
  ScenarioSpec spec = ma_preset(12);
  std::vector<OvrvParams> followers{kSettlingFollower};
  NoiseSpec noise;
  PlatoonOptions platoon;
};

// A fit given directly in the config, e.g. a published table row.
struct FitRow {
  std::string system;
  std::string headway;
  double tau0 = 0.0;
  double delta0 = 0.0;
  double r2 = 0.0;
  std::size_t n = 0;
};

struct ReportSpec {
  std::string results_dir;  // default: <output_dir>/<run_id>
  std::vector<FitRow> fits;
};

struct RunConfig {
  std::string run_id = "run";
  std::string output_dir = "out";
  std::uint64_t seed = 1;
  std::vector<InputSpec> inputs;
  std::string intervals;  // optional intervals CSV for `fit`
  AnalysisConfig analysis;
  double alpha = 0.05;
  BandKind band = BandKind::kMeanResponse;
  double u_f_kmh = kDefaultFreeFlowKmh;
  HdvReference hdv;
  CompareSpec compare;
  CalibrateSpec calibrate;
  ScenarioConfig scenario;
  ReportSpec report;
  std::filesystem::path base_dir;  // not serialized

  std::filesystem::path resolve(const std::string& p) const;
  std::filesystem::path run_dir() const;  // output_dir / run_id
  // Sets the seed everywhere it is consumed (noise, calibration restarts).
  void apply_seed(std::uint64_t value);
};

// `text` is TOML unless `json` is set. Unknown keys are errors, so typos
// cannot silently fall back to defaults. Throws Error{kConfig}.
RunConfig parse_config(std::string_view text, bool json, const std::filesystem::path& base_dir);

// Picks the format from the extension: .json is JSON, anything else TOML.
RunConfig load_config(const std::filesystem::path& path);

// Canonical JSON form; parse_config(config_to_json(c), true, dir) == c.
std::string config_to_json(const RunConfig& config);

}  // namespace fdkit
