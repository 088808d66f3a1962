#include <gtest/gtest.h>

#include <filesystem>
#include <string>

#include "fdkit/config.hpp"
#include "fdkit/error.hpp"
#include "fdkit/ingest.hpp"
#include "fdkit/toml.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

TEST(Toml, Subset) {
  const auto j = fdkit::toml::parse(R"(
# comment
title = "a \"q\" b"   # trailing
lit = 'C:\path'
n = -12
x = 1.5e3
ok = true
arr = [1, 2,
       3,]
inline = { a = 1, b.c = "d" }
"quoted key" = 1
[t.u]
v = [[1, 2], ["x"]]
[[items]]
name = "one"
[[items]]
name = "two"
[items.sub]
k = false
)");
  EXPECT_EQ(j["title"], "a \"q\" b");
  EXPECT_EQ(j["lit"], "C:\\path");
  EXPECT_EQ(j["n"], -12);
  EXPECT_TRUE(j["n"].is_number_integer());
  EXPECT_DOUBLE_EQ(j["x"].get<double>(), 1500.0);
  EXPECT_EQ(j["ok"], true);
  EXPECT_EQ(j["arr"], json({1, 2, 3}));
  EXPECT_EQ(j["inline"]["b"]["c"], "d");
  EXPECT_EQ(j["quoted key"], 1);
  EXPECT_EQ(j["t"]["u"]["v"][1][0], "x");
  ASSERT_EQ(j["items"].size(), 2u);
  EXPECT_EQ(j["items"][1]["name"], "two");
  EXPECT_EQ(j["items"][1]["sub"]["k"], false);
}

TEST(Toml, Errors) {
  for (const char* bad : {"a = ", "a = \"open", "[t\nx=1", "a = 1\na = 2", "= 3", "a = [1, 2",
                          "a = 1979-05-27", "a = 1 b"}) {
    try {
      fdkit::toml::parse(bad);
      ADD_FAILURE() << "accepted: " << bad;
    } catch (const fdkit::Error& e) {
      EXPECT_EQ(e.code(), fdkit::ErrorCode::kConfig) << bad;
    }
  }
}

const char* kFull = R"(
run_id = "r1"
output_dir = "results"
seed = 42
alpha = 0.1
band = "prediction"
u_f_kmh = 100
inputs = ["a/manifest.json", { manifest = "b/manifest.json", system = "S", headway = "min" }]

[equilibrium]
min_duration = 12
enforce_cycle_gap = true
smoothing_window = 10
all_pairs = false

[cycles]
scales = [8, 16]
peak_factor = 4.0

[binning]
max_gap = 0.4

[regression]
weighted = true

[hdv]
tau0_p15 = 0.9
wave_speed_range = [-22, -11]
mean_line = { tau0 = 1.4, delta0 = 8 }

[compare]
alpha = 0.01
pairs = [["S-min", "S-max"]]

[calibrate]
restarts = 2
init = { k1 = 0.1, k2 = 0.5, tau = 1.2, eta = 6.0 }
upper = { k1 = 1, k2 = 2, tau = 3, eta = 20 }

[scenario]
preset = "ma"
cycles_per_level = 4
headway = "max"
[[scenario.followers]]
k1 = 0.3
k2 = 0.8
tau = 2.0
eta = 9.0
[scenario.noise]
sigma_pos = 0.5
bias_sigma = 0.1

[report]
fits = [{ system = "X", headway = "max", tau0 = 2.21, delta0 = 11.27, r2 = 0.99, n = 40 }]
)";

TEST(Config, ParsesEverySection) {
  const auto c = fdkit::parse_config(kFull, false, "/base");
  EXPECT_EQ(c.run_id, "r1");
  EXPECT_EQ(c.seed, 42u);
  EXPECT_EQ(c.band, fdkit::BandKind::kPrediction);
  ASSERT_EQ(c.inputs.size(), 2u);
  EXPECT_EQ(c.inputs[0].manifest, "a/manifest.json");
  EXPECT_EQ(c.inputs[1].system, "S");
  EXPECT_DOUBLE_EQ(c.analysis.thresholds.min_duration, 12.0);
  EXPECT_TRUE(c.analysis.thresholds.enforce_cycle_gap);
  EXPECT_FALSE(c.analysis.all_pairs);
  EXPECT_DOUBLE_EQ(c.analysis.bins.max_gap, 0.4);
  EXPECT_TRUE(c.analysis.fit.weighted);
  EXPECT_DOUBLE_EQ(c.hdv.wave_speed_lo, -22.0);
  ASSERT_TRUE(c.hdv.mean_line.has_value());
  EXPECT_DOUBLE_EQ(c.hdv.mean_line->delta0, 8.0);
  ASSERT_EQ(c.compare.pairs.size(), 1u);
  EXPECT_EQ(c.compare.pairs[0].second, "S-max");
  EXPECT_EQ(c.calibrate.options.restarts, 2u);
  EXPECT_DOUBLE_EQ(c.calibrate.bounds.upper.eta, 20.0);
  EXPECT_EQ(c.scenario.followers.size(), 1u);
  EXPECT_DOUBLE_EQ(c.scenario.noise.sigma_pos, 0.5);
  EXPECT_EQ(c.scenario.noise.seed, 42u);  // top-level seed reaches the noise
  EXPECT_EQ(c.calibrate.options.seed, 42u);
  ASSERT_EQ(c.report.fits.size(), 1u);
  EXPECT_EQ(c.report.fits[0].n, 40u);
  EXPECT_EQ(c.resolve("a/manifest.json"), fs::path("/base/a/manifest.json"));
  EXPECT_EQ(c.resolve("/abs/x"), fs::path("/abs/x"));
}

TEST(Config, JsonRoundTrip) {
  const auto c = fdkit::parse_config(kFull, false, "/base");
  const auto text = fdkit::config_to_json(c);
  const auto again = fdkit::parse_config(text, true, "/base");
  EXPECT_EQ(fdkit::config_to_json(again), text);
  // defaults round-trip as well
  const auto d = fdkit::parse_config("", false, "/base");
  EXPECT_EQ(fdkit::config_to_json(fdkit::parse_config(fdkit::config_to_json(d), true, "/")),
            fdkit::config_to_json(d));
}

TEST(Config, UnknownKeysAndBadTypes) {
  for (const char* bad : {"run_idd = \"x\"", "[equilibrium]\nmin_durration = 3", "[calibrate]\nrestarts = -1",
                          "seed = \"one\"", "band = \"pointwise\"", "[scenario]\npreset = \"xx\"\ncycles_per_level = 2",
                          "[equilibrium]\nmin_duration = -1", "[calibrate.init]\nk3 = 1", "inputs = 3",
                          "[compare]\npairs = [[\"a\"]]"}) {
    try {
      fdkit::parse_config(bad, false, "/");
      ADD_FAILURE() << "accepted: " << bad;
    } catch (const fdkit::Error& e) {
      EXPECT_EQ(e.code(), fdkit::ErrorCode::kConfig) << bad;
    }
  }
}

TEST(Config, LoadPicksFormatByExtension) {
  const fs::path dir = fs::temp_directory_path() / "fdkit_config_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  fdkit::write_file(dir / "c.toml", "run_id = \"t\"\n");
  fdkit::write_file(dir / "c.json", "{\"run_id\": \"j\"}");
  EXPECT_EQ(fdkit::load_config(dir / "c.toml").run_id, "t");
  const auto j = fdkit::load_config(dir / "c.json");
  EXPECT_EQ(j.run_id, "j");
  EXPECT_EQ(j.base_dir, dir);
  EXPECT_EQ(j.run_dir(), dir / "out" / "j");
  EXPECT_THROW(fdkit::load_config(dir / "missing.toml"), fdkit::Error);
  fs::remove_all(dir);
}

}  // namespace
