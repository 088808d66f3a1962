// Acceptance run: one PASS/FAIL line per criterion, exit 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <nlohmann/json.hpp>

#include "fdkit/calibrate.hpp"
#include "fdkit/compare.hpp"
#include "fdkit/config.hpp"
#include "fdkit/csv.hpp"
#include "fdkit/equilibrium.hpp"
#include "fdkit/fd.hpp"
#include "fdkit/ingest.hpp"
#include "fdkit/pipeline.hpp"
#include "fdkit/regression.hpp"
#include "fdkit/serialize.hpp"
#include "fdkit/simulate.hpp"
#include "fdkit/stats.hpp"
#include "fdkit_cli/cli.hpp"
#include "oracles/oracles.hpp"
#include "oracles/random_series.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string g6(double x) { return fdkit::csv::format_g6(x); }

void note(Outcome& o, bool ok, const std::string& what) {
  if (!ok) o.pass = false;
  if (!o.detail.empty()) o.detail += "; ";
  o.detail += (ok ? "" : "!") + what;
}

// 1 ------------------------------------------------------------------------

Outcome fd_translation() {
  Outcome o;
  const auto x = fdkit::to_fd(2.21, 11.27, 105.0);
  const auto s = fdkit::to_fd(2.39, 9.63, 105.0);
  note(o, std::lround(x.capacity) == 1387, "X-max q " + g6(x.capacity));
  note(o, std::lround(s.capacity) == 1323, "S-max q " + g6(s.capacity));
  const auto h = fdkit::to_fd(0.60, 11.78, 105.0);
  note(o, std::fabs(h.wave_speed + 70.7) <= 0.005 * 70.7, "H-min w " + g6(h.wave_speed));
  note(o, std::fabs(h.jam_density - 85.0) <= 0.005 * 85.0, "H-min kj " + g6(h.jam_density));
  const auto g = fdkit::to_fd(0.61, 17.44, 105.0);
  note(o, std::fabs(g.wave_speed + 103.8) <= 0.015 * 103.8, "G-min w " + g6(g.wave_speed));
  return o;
}

// 2 ------------------------------------------------------------------------

Outcome closed_loop_recovery() {
  Outcome o;
  std::size_t good = 0;
  double worst_tau = 0, worst_delta = 0, min_r2 = 1;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    fdkit::ClosedLoopSpec spec;
    spec.scenario = fdkit::ma_preset(12);
    spec.noise.seed = seed;  // 0.89 m, 0.10 m/s
    const auto r = fdkit::run_closed_loop(spec);
    const auto& f = r.analysis.fit;
    if (!f || !f->valid) {
      note(o, false, "seed " + std::to_string(seed) + " no fit");
      continue;
    }
    const double dt = std::fabs(f->tau0 - 1.2), dd = std::fabs(f->delta0 - 6.0);
    worst_tau = std::max(worst_tau, dt);
    worst_delta = std::max(worst_delta, dd);
    min_r2 = std::min(min_r2, f->r2);
    if (dt <= 0.05 && dd <= 0.5 && f->r2 >= 0.9) ++good;
  }
  note(o, good == 20, std::to_string(good) + "/20 seeds");
  o.detail += "; max|dtau0| " + g6(worst_tau) + " max|ddelta0| " + g6(worst_delta) + " min r2 " + g6(min_r2);
  return o;
}

// 3 ------------------------------------------------------------------------

struct Draw {
  std::vector<double> v, s;
};

Draw line_sample(std::mt19937_64& rng, std::size_t n, double tau, double delta, double sd) {
  // speeds spread over the three test levels
  static const double levels[] = {15.0, 22.0, 29.0};
  std::normal_distribution<double> jitter(0.0, 0.6), z(0.0, sd);
  Draw d;
  for (std::size_t i = 0; i < n; ++i) {
    d.v.push_back(levels[i % 3] + jitter(rng));
    d.s.push_back(tau * d.v.back() + delta + z(rng));
  }
  return d;
}

Outcome comparison_calibration() {
  Outcome o;
  std::mt19937_64 rng(2024);
  const int reps = 10000;
  int fire_tau = 0, fire_delta = 0;
  for (int r = 0; r < reps; ++r) {
    const auto k = line_sample(rng, 50, 1.2, 6.0, 1.5);
    const auto j = line_sample(rng, 50, 1.2, 6.0, 1.5);
    const auto c = fdkit::compare_fits(k.v, k.s, j.v, j.s, 0.05);
    fire_tau += c.tau_significant;
    fire_delta += c.delta_significant;
  }
  const double ft = double(fire_tau) / reps, fd = double(fire_delta) / reps;
  note(o, std::fabs(ft - 0.05) <= 0.02, "null slope rate " + g6(ft));
  note(o, std::fabs(fd - 0.05) <= 0.02, "null intercept rate " + g6(fd));

  const int power_reps = 2000;
  int fired = 0;
  for (int r = 0; r < power_reps; ++r) {
    const auto k = line_sample(rng, 50, 1.0, 7.0, 1.5);
    const auto j = line_sample(rng, 50, 2.0, 7.0, 1.5);
    fired += fdkit::compare_fits(k.v, k.s, j.v, j.s, 0.05).tau_significant;
  }
  const double power = double(fired) / power_reps;
  note(o, power > 0.99, "dtau0=1 slope rate " + g6(power));
  return o;
}

// 4 ------------------------------------------------------------------------

Outcome oracle_equivalence() {
  Outcome o;
  std::mt19937_64 rng(77);
  double worst_fit = 0, worst_cmp = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::uniform_real_distribution<double> u(2.0, 35.0), tau(0.4, 2.5), del(2.0, 20.0), sd(0.1, 3.0);
    auto sample = [&](std::size_t n) {
      const double a = tau(rng), b = del(rng);
      std::normal_distribution<double> z(0.0, sd(rng));
      Draw d;
      for (std::size_t i = 0; i < n; ++i) {
        d.v.push_back(u(rng));
        d.s.push_back(a * d.v.back() + b + z(rng));
      }
      return d;
    };
    const auto k = sample(3 + rng() % 200);
    const auto j = sample(3 + rng() % 200);

    const auto f = fdkit::fit_linear(k.v, k.s);
    const auto w = oracle::normal_equations(k.v, k.s);
    for (double e : {oracle::rel_err(f.tau0, w.tau0), oracle::rel_err(f.delta0, w.delta0),
                     oracle::rel_err(f.se_tau0, w.se_tau0), oracle::rel_err(f.se_delta0, w.se_delta0),
                     oracle::rel_err(f.r2, w.r2), oracle::rel_err(f.sigma_hat, w.sigma)}) {
      worst_fit = std::max(worst_fit, e);
    }
    const auto c = fdkit::compare_fits(k.v, k.s, j.v, j.s);
    const auto cw = oracle::separate_fits(k.v, k.s, j.v, j.s);
    for (double e : {oracle::rel_err(c.dtau0, cw.dtau0), oracle::rel_err(c.ddelta0, cw.ddelta0),
                     oracle::rel_err(c.se_dtau0, cw.se_dtau0), oracle::rel_err(c.se_ddelta0, cw.se_ddelta0)}) {
      worst_cmp = std::max(worst_cmp, e);
    }
  }
  note(o, worst_fit <= 1e-9, "fit_linear worst rel " + g6(worst_fit));
  note(o, worst_cmp <= 1e-9, "compare_fits worst rel " + g6(worst_cmp));

  std::size_t same = 0, windows = 0, longest = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto c = oracle::random_case(1000 + seed, 5000);
    longest = std::max(longest, c.pair.t.size());
    const auto got = fdkit::find_equilibrium_intervals(c.pair, c.th, c.cycles);
    const auto want = oracle::equilibrium_windows(c.pair, c.th, c.cycles);
    bool eq = got.size() == want.size();
    for (std::size_t i = 0; eq && i < got.size(); ++i) {
      eq = got[i].first == want[i].first && got[i].last == want[i].last;
    }
    same += eq;
    windows += want.size();
  }
  note(o, same == 100, "windows " + std::to_string(same) + "/100 series (" + std::to_string(windows) +
                           " intervals, n <= " + std::to_string(longest) + ")");
  return o;
}

// 5 ------------------------------------------------------------------------

Outcome method_consistency() {
  Outcome o;
  std::size_t inside = 0, recovered = 0;
  std::string misses;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    fdkit::ClosedLoopSpec spec;
    spec.scenario = fdkit::ma_preset(12);
    spec.noise.seed = seed;
    const auto r = fdkit::run_closed_loop(spec);
    if (!r.analysis.fit) {
      misses += " " + std::to_string(seed) + "(no fit)";
      continue;
    }
    const auto& fit = *r.analysis.fit;
    fdkit::CalibrateOptions co;
    co.seed = seed;
    const auto rep = fdkit::calibrate_ovrv(r.analysis.pairs.front().pair, {0.2, 0.6, 1.5, 4.0}, {}, co);
    const auto line = fdkit::ovrv_equilibrium(rep.params);
    if (std::fabs(line.tau0 - 1.2) <= 0.05 && std::fabs(line.delta0 - 6.0) <= 0.5) ++recovered;
    const auto cont = fdkit::ci_containment(fit, line.tau0, line.delta0, fit.v_min, fit.v_max);
    if (cont.fully_inside) {
      ++inside;
    } else {
      misses += " " + std::to_string(seed) + "(" + g6(cont.fraction_inside) + ")";
    }
  }
  note(o, recovered == 20, "calibrated line recovered " + std::to_string(recovered) + "/20");
  note(o, inside >= 19, "fully_inside " + std::to_string(inside) + "/20, need >= 19");
  if (!misses.empty()) o.detail += "; misses:" + misses;
  return o;
}

// 6 ------------------------------------------------------------------------

Outcome spacing_variance() {
  Outcome o;
  std::size_t bins_in = 0, bins_total = 0, ratio_ok = 0;
  double lo = 1e9, hi = 0, worst_ratio = 1e9;
  const int trials = 20;
  for (int trial = 1; trial <= trials; ++trial) {
    // held offsets of 1.0607 m per vehicle: spacing error sqrt(2) x 1.0607 = 1.5 m
    fdkit::ClosedLoopSpec gps;
    gps.scenario = fdkit::ma_preset(100);
    gps.noise = {0.89, 0.10, static_cast<std::uint64_t>(trial), 1.5 / std::sqrt(2.0)};
    const auto a = fdkit::run_closed_loop(gps);
    fdkit::ClosedLoopSpec az = gps;
    az.noise = {0.02, 0.02, static_cast<std::uint64_t>(trial), 0.0};
    const auto b = fdkit::run_closed_loop(az);

    const auto ra = fdkit::bin_report(a.analysis.bins), rb = fdkit::bin_report(b.analysis.bins);
    double sum_a = 0, sum_b = 0;
    std::size_t na = 0, nb = 0;
    for (const auto& row : ra) {
      if (row.n < 40) continue;
      ++bins_total;
      lo = std::min(lo, row.s_std);
      hi = std::max(hi, row.s_std);
      if (row.s_std >= 1.2 && row.s_std <= 1.8) ++bins_in;
      sum_a += row.s_std;
      ++na;
    }
    for (const auto& row : rb) {
      if (row.n < 40) continue;
      sum_b += row.s_std;
      ++nb;
    }
    if (na > 0 && nb > 0) {
      const double ratio = (sum_a / na) / (sum_b / nb);
      worst_ratio = std::min(worst_ratio, ratio);
      if (ratio >= 5.0) ++ratio_ok;
    }
  }
  note(o, bins_total > 0 && bins_in >= 0.95 * bins_total,
       "s_std in [1.2,1.8] for " + std::to_string(bins_in) + "/" + std::to_string(bins_total) +
           " bins with n>=40 (range " + g6(lo) + ".." + g6(hi) + ")");
  note(o, ratio_ok == static_cast<std::size_t>(trials),
       "low-noise s_std >= 5x smaller in " + std::to_string(ratio_ok) + "/" + std::to_string(trials) +
           " trials (worst ratio " + g6(worst_ratio) + ")");
  return o;
}

// 7 ------------------------------------------------------------------------

Outcome statistical_primitives() {
  Outcome o;
  const double q = fdkit::stats::t_quantile(0.975, 10.0);
  note(o, std::fabs(q - 2.228139) <= 1e-5, "t_quantile(0.975,10) " + fdkit::csv::format_exact(q));

  std::mt19937_64 rng(5);
  const int reps = 10000;
  int covered = 0;
  std::uniform_real_distribution<double> u(12.0, 32.0);
  std::normal_distribution<double> z(0.0, 1.5);
  for (int r = 0; r < reps; ++r) {
    std::vector<double> v, s;
    for (int i = 0; i < 25; ++i) {
      v.push_back(u(rng));
      s.push_back(1.2 * v.back() + 6.0 + z(rng));
    }
    auto fit = fdkit::fit_linear(v, s, 3);
    const double v0 = u(rng);
    const auto band = fdkit::ci_band(fit, v0, 0.05, fdkit::BandKind::kMeanResponse);
    const double truth = 1.2 * v0 + 6.0;
    covered += band.lower <= truth && truth <= band.upper;
  }
  const double cov = double(covered) / reps;
  note(o, std::fabs(cov - 0.95) <= 0.02, "mean-band coverage " + g6(cov));

  std::mt19937_64 a(11), b(12);
  std::normal_distribution<double> nd(0.0, 1.0);
  std::exponential_distribution<double> ed(1.0);
  std::vector<double> xn(500), xe(500);
  for (auto& x : xn) x = nd(a);
  for (auto& x : xe) x = ed(b);
  const auto jn = fdkit::stats::jarque_bera(xn), je = fdkit::stats::jarque_bera(xe);
  note(o, jn.p_value > 0.05, "JB normal p " + g6(jn.p_value));
  note(o, je.p_value < 0.01, "JB exponential p " + g6(je.p_value));
  return o;
}

// 8 ------------------------------------------------------------------------

const char* kSimMin = R"(run_id = "sim_min"
output_dir = "out"
seed = 7
[scenario]
preset = "ma"
cycles_per_level = 6
car_model = "synthetic"
headway = "min"
[[scenario.followers]]
k1 = 0.3
k2 = 0.8
tau = 1.0
eta = 7.0
[[scenario.followers]]
k1 = 0.3
k2 = 0.8
tau = 1.0
eta = 7.0
)";

const char* kSimMax = R"(run_id = "sim_max"
output_dir = "out"
seed = 8
[scenario]
preset = "ma"
cycles_per_level = 6
car_model = "synthetic"
headway = "max"
[[scenario.followers]]
k1 = 0.3
k2 = 0.8
tau = 2.0
eta = 9.0
)";

const char* kAnalyze = R"(run_id = "analysis"
output_dir = "out"
seed = 3
inputs = [
  { manifest = "out/sim_min/dataset/manifest.json", system = "synthetic", headway = "min" },
  { manifest = "out/sim_max/dataset/manifest.json", system = "synthetic", headway = "max" },
]
[equilibrium]
enforce_cycle_gap = true
smoothing_window = 10
[compare]
pairs = [["synthetic-min", "synthetic-max"]]
[calibrate]
restarts = 2
max_iterations = 600
[report]
fits = [ { system = "X", headway = "max", tau0 = 2.21, delta0 = 11.27, r2 = 0.99, n = 40 } ]
)";

std::map<std::string, std::string> snapshot(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) files[fs::relative(e.path(), root).generic_string()] = fdkit::read_file(e.path());
  }
  return files;
}

int run_workflow(const fs::path& dir, std::string& log) {
  fs::remove_all(dir);
  fs::create_directories(dir);
  fdkit::write_file(dir / "sim_min.toml", kSimMin);
  fdkit::write_file(dir / "sim_max.toml", kSimMax);
  fdkit::write_file(dir / "analyze.toml", kAnalyze);
  const std::vector<std::vector<std::string>> steps = {
      {"simulate", "sim_min.toml"}, {"simulate", "sim_max.toml"}, {"detect", "analyze.toml"},
      {"fit", "analyze.toml"},      {"compare", "analyze.toml"},  {"calibrate", "analyze.toml"},
      {"report", "analyze.toml"}};
  for (const auto& s : steps) {
    std::ostringstream out, err;
    const int rc = fdkit::cli::run_cli({"fdkit", s[0], "--config", (dir / s[1]).string()}, out, err);
    if (rc != 0) {
      log = s[0] + " rc " + std::to_string(rc) + ": " + err.str();
      return rc;
    }
  }
  return 0;
}

// Re-emits each numeric CSV field in 6-digit form; a table that round-trips
// comes back byte for byte.
bool csv_roundtrips(const std::string& text) {
  std::string rebuilt;
  const auto lines = fdkit::csv::split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i + 1 == lines.size() && lines[i].empty()) break;
    std::vector<std::string> fields;
    for (auto f : fdkit::csv::split_fields(lines[i])) {
      const auto d = i == 0 ? std::nullopt : fdkit::csv::parse_double(f);
      fields.push_back(d ? g6(*d) : std::string(f));
    }
    rebuilt += fdkit::csv::join(fields) + "\n";
  }
  return rebuilt == text;
}

Outcome determinism_and_formats() {
  Outcome o;
  const fs::path base = fs::temp_directory_path() / ("fdkit_accept_" + std::to_string(::getpid()));
  std::string log;
  const int rc_a = run_workflow(base / "a", log);
  const int rc_b = rc_a == 0 ? run_workflow(base / "b", log) : rc_a;
  if (rc_a != 0 || rc_b != 0) {
    note(o, false, "workflow failed: " + log);
    fs::remove_all(base);
    return o;
  }
  const auto ta = snapshot(base / "a" / "out"), tb = snapshot(base / "b" / "out");
  std::size_t svgs = 0;
  for (const auto& [k, _] : ta) svgs += k.size() > 4 && k.substr(k.size() - 4) == ".svg";
  note(o, ta == tb, std::to_string(ta.size()) + " files (" + std::to_string(svgs) + " svg) byte-identical");

  std::size_t csv_ok = 0, csv_n = 0, json_ok = 0, json_n = 0;
  std::string bad;
  for (const auto& [name, text] : ta) {
    const bool is_csv = name.ends_with(".csv"), is_json = name.ends_with(".json");
    if (is_csv && name.find("/dataset/") == std::string::npos) {
      ++csv_n;
      if (csv_roundtrips(text)) ++csv_ok; else bad += " " + name;
    } else if (is_json && !name.ends_with("manifest.json")) {
      ++json_n;
      if (fdkit::io::dump(json::parse(text)) == text) ++json_ok; else bad += " " + name;
    }
  }
  // typed readers on top of the textual check
  const auto& iv_text = ta.at("analysis/tables/intervals.csv");
  const auto rows = fdkit::io::parse_intervals_csv(iv_text);
  std::string iv_again = std::string(fdkit::io::kIntervalsHeader) + "\n";
  for (const auto& r : rows) {
    const auto& iv = r.interval;
    iv_again += fdkit::csv::join({r.pair_id, g6(iv.t_start), g6(iv.t_end), g6(iv.v_mean), g6(iv.s_mean),
                                  std::to_string(iv.n_samples), g6(iv.v_std), g6(iv.s_std)}) + "\n";
  }
  if (iv_again == iv_text) ++csv_ok; else bad += " intervals(typed)";
  ++csv_n;

  const auto fits = json::parse(ta.at("analysis/fits.json"));
  for (const auto& s : fits.at("systems")) {
    ++json_n;
    const auto r = fdkit::io::system_from_json(s, 105.0, {});
    std::vector<std::string> warnings = s.value("warnings", std::vector<std::string>{});
    if (fdkit::io::dump(fdkit::io::system_to_json(r, warnings)) == fdkit::io::dump(s)) ++json_ok;
    else bad += " fits(typed)";
  }

  std::size_t tracks_ok = 0, tracks_n = 0;
  for (const char* m : {"sim_min", "sim_max"}) {
    const fs::path dataset = base / "a" / "out" / m / "dataset";
    const auto rec = fdkit::load_manifest(dataset / "manifest.json");
    for (const auto& t : rec.tracks) {
      ++tracks_n;
      const auto text = fdkit::read_file(dataset / (t.vehicle_id + ".csv"));
      if (fdkit::write_track(t) == text) ++tracks_ok; else bad += " track " + t.vehicle_id;
    }
    // manifests keep insertion order, so they go through their own writer
    const fs::path again = base / "rewrite" / m;
    fdkit::write_platoon(rec, again);
    ++json_n;
    if (fdkit::read_file(again / "manifest.json") == fdkit::read_file(dataset / "manifest.json")) ++json_ok;
    else bad += std::string(" manifest ") + m;
  }

  const auto cfg = fdkit::load_config(base / "a" / "analyze.toml");
  const auto cj = fdkit::config_to_json(cfg);
  const bool cfg_ok = fdkit::config_to_json(fdkit::parse_config(cj, true, base / "a")) == cj;

  note(o, csv_ok == csv_n && json_ok == json_n && tracks_ok == tracks_n && cfg_ok,
       "round-trip csv " + std::to_string(csv_ok) + "/" + std::to_string(csv_n) + ", json " +
           std::to_string(json_ok) + "/" + std::to_string(json_n) + ", tracks " + std::to_string(tracks_ok) +
           "/" + std::to_string(tracks_n) + ", config " + (cfg_ok ? "ok" : "differs") + bad);
  fs::remove_all(base);
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"fd translation", fd_translation},
      {"closed-loop recovery", closed_loop_recovery},
      {"comparison calibration", comparison_calibration},
      {"oracle equivalence", oracle_equivalence},
      {"method consistency", method_consistency},
      {"spacing variance", spacing_variance},
      {"statistical primitives", statistical_primitives},
      {"determinism and formats", determinism_and_formats},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %zu %s (%.1f s): %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), secs,
                o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
