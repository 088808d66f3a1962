#include "fdkit/config.hpp"

#include <set>

#include <nlohmann/json.hpp>

#include "fdkit/error.hpp"
#include "fdkit/ingest.hpp"
#include "fdkit/toml.hpp"

namespace fdkit {
namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& where, const std::string& msg) {
  throw Error(ErrorCode::kConfig, where + ": " + msg);
}

// Reads keys from one object and complains about any it did not consume.
class Section {
 public:
  Section(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) bad(where_, "expected a table");
  }
  ~Section() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (const auto& [k, _] : j_.items()) {
      if (!used_.count(k)) bad(where_, "unknown key '" + k + "'");
    }
  }
  Section(const Section&) = delete;
  Section& operator=(const Section&) = delete;

  bool has(const std::string& k) const { return j_.contains(k); }

  template <typename T>
  void get(const std::string& k, T& out) {
    if (!j_.contains(k)) return;
    used_.insert(k);
    try {
      if constexpr (std::is_same_v<T, double>) {
        if (!j_[k].is_number()) throw std::runtime_error("expected a number");
      } else if constexpr (std::is_same_v<T, bool>) {
        if (!j_[k].is_boolean()) throw std::runtime_error("expected true or false");
      } else if constexpr (std::is_unsigned_v<T>) {
        if (!j_[k].is_number_integer() || j_[k].get<long long>() < 0) {
          throw std::runtime_error("expected a non-negative integer");
        }
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!j_[k].is_string()) throw std::runtime_error("expected a string");
      }
      out = j_[k].get<T>();
    } catch (const std::exception& e) {
      bad(where_ + "." + k, e.what());
    }
  }

  const json* child(const std::string& k) {
    if (!j_.contains(k)) return nullptr;
    used_.insert(k);
    return &j_[k];
  }

  std::string path(const std::string& k) const { return where_ + "." + k; }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> used_;
};

void read(const json& j, const std::string& where, OvrvParams& p) {
  Section s(j, where);
  s.get("k1", p.k1);
  s.get("k2", p.k2);
  s.get("tau", p.tau);
  s.get("eta", p.eta);
}

json write(const OvrvParams& p) { return {{"k1", p.k1}, {"k2", p.k2}, {"tau", p.tau}, {"eta", p.eta}}; }

void read_levels(const json& arr, const std::string& where, std::vector<DrivingCycleSpec>& out) {
  if (!arr.is_array() || arr.empty()) bad(where, "expected a non-empty array of tables");
  out.clear();
  for (std::size_t i = 0; i < arr.size(); ++i) {
    DrivingCycleSpec l;
    Section s(arr[i], where + "[" + std::to_string(i) + "]");
    s.get("v_stable", l.v_stable);
    s.get("v_dip", l.v_dip);
    s.get("decel", l.decel);
    s.get("accel", l.accel);
    s.get("n_cycles", l.n_cycles);
    s.get("stabilization_low", l.stabilization_low);
    s.get("stabilization_high", l.stabilization_high);
    s.get("low_speed_cutoff", l.low_speed_cutoff);
    s.get("rate", l.rate);
    out.push_back(l);
  }
}

void read_scenario(const json& j, ScenarioConfig& sc) {
  Section s(j, "scenario");
  std::string preset;
  std::size_t cycles = 12;
  s.get("preset", preset);
  s.get("cycles_per_level", cycles);
  if (!preset.empty()) {
    if (preset != "ma") bad("scenario.preset", "unknown preset '" + preset + "'");
    sc.spec = ma_preset(cycles);
  } else if (s.has("cycles_per_level")) {
    sc.spec = ma_preset(cycles);
  }
  if (const json* levels = s.child("levels")) read_levels(*levels, "scenario.levels", sc.spec.levels);
  s.get("level_change_accel", sc.spec.level_change_accel);
  s.get("start_position", sc.spec.start_position);
  if (const json* g = s.child("grade")) {
    if (!g->is_array()) bad("scenario.grade", "expected an array of tables");
    sc.spec.grade.clear();
    for (std::size_t i = 0; i < g->size(); ++i) {
      GradeSegment seg;
      Section gs((*g)[i], "scenario.grade[" + std::to_string(i) + "]");
      gs.get("t_start", seg.t_start);
      gs.get("t_end", seg.t_end);
      gs.get("grade", seg.grade);
      sc.spec.grade.push_back(seg);
    }
  }
  if (const json* f = s.child("followers")) {
    if (!f->is_array() || f->empty()) bad("scenario.followers", "expected a non-empty array of tables");
    sc.followers.clear();
    for (std::size_t i = 0; i < f->size(); ++i) {
      OvrvParams p;
      read((*f)[i], "scenario.followers[" + std::to_string(i) + "]", p);
      sc.followers.push_back(p);
    }
  }
  if (const json* n = s.child("noise")) {
    Section ns(*n, "scenario.noise");
    ns.get("sigma_pos", sc.noise.sigma_pos);
    ns.get("sigma_speed", sc.noise.sigma_speed);
    ns.get("bias_sigma", sc.noise.bias_sigma);
  }
  if (const json* l = s.child("lengths")) {
    try {
      sc.platoon.lengths = l->get<std::vector<double>>();
    } catch (const json::exception&) {
      bad("scenario.lengths", "expected an array of numbers");
    }
  }
  s.get("dt", sc.platoon.dt);
  s.get("car_model", sc.platoon.car_model);
  std::string headway;
  s.get("headway", headway);
  if (!headway.empty()) sc.platoon.headway = parse_headway(headway);
}

void read_equilibrium(const json& j, AnalysisConfig& a) {
  Section s(j, "equilibrium");
  auto& t = a.thresholds;
  s.get("max_speed_var", t.max_speed_var);
  s.get("min_duration", t.min_duration);
  s.get("max_dv", t.max_dv);
  s.get("max_spacing_var", t.max_spacing_var);
  s.get("max_abs_grade", t.max_abs_grade);
  s.get("grade_lookback", t.grade_lookback);
  s.get("min_gap_after_cycle", t.min_gap_after_cycle);
  s.get("enforce_cycle_gap", t.enforce_cycle_gap);
  s.get("smoothing_window", t.smoothing_window);
  s.get("detect_cycles", a.detect_cycles);
  s.get("all_pairs", a.all_pairs);
}

void read_cycles(const json& j, CycleConfig& c) {
  Section s(j, "cycles");
  if (const json* sc = s.child("scales")) {
    try {
      c.scales_samples = sc->get<std::vector<int>>();
    } catch (const json::exception&) {
      bad("cycles.scales", "expected an array of integers");
    }
  }
  s.get("peak_factor", c.peak_factor);
  s.get("min_energy", c.min_energy);
  s.get("min_separation_s", c.min_separation_s);
  s.get("merge_gap_s", c.merge_gap_s);
  s.get("kernel_support", c.kernel_support);
}

void read_hdv(const json& j, HdvReference& h) {
  Section s(j, "hdv");
  s.get("tau0_p15", h.tau0_p15);
  s.get("delta0_p85", h.delta0_p85);
  s.get("jam_spacing_direct", h.jam_spacing_direct);
  s.get("jam_density_direct", h.jam_density_direct);
  s.get("capacity_p85", h.capacity_p85);
  if (const json* w = s.child("wave_speed_range")) {
    std::vector<double> r;
    try {
      r = w->get<std::vector<double>>();
    } catch (const json::exception&) {
    }
    if (r.size() != 2) bad("hdv.wave_speed_range", "expected [lo, hi]");
    h.wave_speed_lo = r[0];
    h.wave_speed_hi = r[1];
  }
  auto line = [&](const char* key, std::optional<HdvLine>& out) {
    if (const json* l = s.child(key)) {
      HdvLine v;
      Section ls(*l, s.path(key));
      ls.get("tau0", v.tau0);
      ls.get("delta0", v.delta0);
      out = v;
    }
  };
  line("mean_line", h.mean_line);
  line("p15_line", h.p15_line);
  line("p85_line", h.p85_line);
}

void read_calibrate(const json& j, CalibrateSpec& c) {
  Section s(j, "calibrate");
  if (const json* v = s.child("init")) read(*v, "calibrate.init", c.init);
  if (const json* v = s.child("lower")) read(*v, "calibrate.lower", c.bounds.lower);
  if (const json* v = s.child("upper")) read(*v, "calibrate.upper", c.bounds.upper);
  s.get("restarts", c.options.restarts);
  s.get("max_iterations", c.options.max_iterations);
  s.get("tolerance", c.options.tolerance);
  s.get("jitter", c.options.jitter);
  s.get("dt", c.options.dt);
  s.get("accel_min", c.options.limits.min);
  s.get("accel_max", c.options.limits.max);
  s.get("min_duration", c.options.min_duration);
}

void read_compare(const json& j, CompareSpec& c) {
  Section s(j, "compare");
  s.get("alpha", c.alpha);
  s.get("grid_step", c.containment.grid_step);
  s.get("allow_extrapolation", c.containment.allow_extrapolation);
  if (const json* p = s.child("pairs")) {
    if (!p->is_array()) bad("compare.pairs", "expected an array of [K, J] pairs");
    for (const auto& e : *p) {
      if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_string()) {
        bad("compare.pairs", "each entry must be [\"K\", \"J\"]");
      }
      c.pairs.emplace_back(e[0].get<std::string>(), e[1].get<std::string>());
    }
  }
}

void read_report(const json& j, ReportSpec& r) {
  Section s(j, "report");
  s.get("results_dir", r.results_dir);
  if (const json* f = s.child("fits")) {
    if (!f->is_array()) bad("report.fits", "expected an array of tables");
    for (std::size_t i = 0; i < f->size(); ++i) {
      FitRow row;
      Section fs((*f)[i], "report.fits[" + std::to_string(i) + "]");
      fs.get("system", row.system);
      fs.get("headway", row.headway);
      fs.get("tau0", row.tau0);
      fs.get("delta0", row.delta0);
      fs.get("r2", row.r2);
      fs.get("n", row.n);
      if (row.system.empty()) bad("report.fits", "entry without a system name");
      r.fits.push_back(row);
    }
  }
}

}  // namespace

std::filesystem::path RunConfig::resolve(const std::string& p) const {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : base_dir / path;
}

std::filesystem::path RunConfig::run_dir() const { return resolve(output_dir) / run_id; }

void RunConfig::apply_seed(std::uint64_t value) {
  seed = value;
  calibrate.options.seed = value;
  scenario.noise.seed = value;
}

RunConfig parse_config(std::string_view text, bool is_json, const std::filesystem::path& base_dir) {
  json root;
  if (is_json) {
    try {
      root = json::parse(text);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kConfig, std::string("config is not valid JSON: ") + e.what());
    }
  } else {
    root = toml::parse(text);
  }

  RunConfig c;
  c.base_dir = base_dir;
  {
    Section s(root, "config");
    s.get("run_id", c.run_id);
    s.get("output_dir", c.output_dir);
    s.get("seed", c.seed);
    s.get("intervals", c.intervals);
    s.get("alpha", c.alpha);
    s.get("u_f_kmh", c.u_f_kmh);
    std::string band;
    s.get("band", band);
    if (!band.empty()) c.band = parse_band_kind(band);
    if (const json* in = s.child("inputs")) {
      if (!in->is_array()) bad("inputs", "expected an array");
      for (std::size_t i = 0; i < in->size(); ++i) {
        InputSpec spec;
        if ((*in)[i].is_string()) {
          spec.manifest = (*in)[i].get<std::string>();
        } else {
          Section is((*in)[i], "inputs[" + std::to_string(i) + "]");
          is.get("manifest", spec.manifest);
          is.get("system", spec.system);
          is.get("headway", spec.headway);
        }
        if (spec.manifest.empty()) bad("inputs", "entry without a manifest");
        c.inputs.push_back(spec);
      }
    }
    if (const json* e = s.child("equilibrium")) read_equilibrium(*e, c.analysis);
    if (const json* e = s.child("cycles")) read_cycles(*e, c.analysis.cycles);
    if (const json* b = s.child("binning")) {
      Section bs(*b, "binning");
      bs.get("max_range", c.analysis.bins.max_range);
      bs.get("max_gap", c.analysis.bins.max_gap);
      bs.get("dense_min", c.analysis.bins.dense_min);
    }
    if (const json* r = s.child("regression")) {
      Section rs(*r, "regression");
      rs.get("weighted", c.analysis.fit.weighted);
      rs.get("min_bins", c.analysis.fit.min_bins);
    }
    if (const json* h = s.child("hdv")) read_hdv(*h, c.hdv);
    if (const json* v = s.child("compare")) read_compare(*v, c.compare);
    if (const json* v = s.child("calibrate")) read_calibrate(*v, c.calibrate);
    if (const json* v = s.child("scenario")) read_scenario(*v, c.scenario);
    if (const json* v = s.child("report")) read_report(*v, c.report);
  }
  if (c.run_id.empty() || c.run_id.find_first_of("/\\") != std::string::npos || c.run_id == "." ||
      c.run_id == "..") {
    bad("run_id", "must be a plain directory name");
  }
  if (!(c.alpha > 0.0 && c.alpha < 1.0)) bad("alpha", "must lie in (0, 1)");
  if (!(c.compare.alpha > 0.0 && c.compare.alpha < 1.0)) bad("compare.alpha", "must lie in (0, 1)");
  if (!(c.u_f_kmh > 0.0)) bad("u_f_kmh", "must be positive");
  c.analysis.thresholds.validate();
  c.hdv.validate();
  c.calibrate.bounds.validate();
  c.apply_seed(c.seed);
  c.compare.containment.alpha = c.alpha;
  c.compare.containment.band = c.band;
  try {
    c.scenario.spec.validate();
    c.scenario.noise.validate();
  } catch (const Error& e) {
    bad("scenario", e.what());
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfig, e.what());
  }
  return parse_config(text, path.extension() == ".json", path.parent_path());
}

std::string config_to_json(const RunConfig& c) {
  json j;
  j["run_id"] = c.run_id;
  j["output_dir"] = c.output_dir;
  j["seed"] = c.seed;
  j["alpha"] = c.alpha;
  j["band"] = std::string(to_string(c.band));
  j["u_f_kmh"] = c.u_f_kmh;
  if (!c.intervals.empty()) j["intervals"] = c.intervals;
  json inputs = json::array();
  for (const auto& in : c.inputs) {
    inputs.push_back({{"manifest", in.manifest}, {"system", in.system}, {"headway", in.headway}});
  }
  j["inputs"] = inputs;

  const auto& t = c.analysis.thresholds;
  j["equilibrium"] = {{"max_speed_var", t.max_speed_var},
                      {"min_duration", t.min_duration},
                      {"max_dv", t.max_dv},
                      {"max_spacing_var", t.max_spacing_var},
                      {"max_abs_grade", t.max_abs_grade},
                      {"grade_lookback", t.grade_lookback},
                      {"min_gap_after_cycle", t.min_gap_after_cycle},
                      {"enforce_cycle_gap", t.enforce_cycle_gap},
                      {"smoothing_window", t.smoothing_window},
                      {"detect_cycles", c.analysis.detect_cycles},
                      {"all_pairs", c.analysis.all_pairs}};
  const auto& cy = c.analysis.cycles;
  j["cycles"] = {{"scales", cy.scales_samples},         {"peak_factor", cy.peak_factor},
                 {"min_energy", cy.min_energy},         {"min_separation_s", cy.min_separation_s},
                 {"merge_gap_s", cy.merge_gap_s},       {"kernel_support", cy.kernel_support}};
  j["binning"] = {{"max_range", c.analysis.bins.max_range},
                  {"max_gap", c.analysis.bins.max_gap},
                  {"dense_min", c.analysis.bins.dense_min}};
  j["regression"] = {{"weighted", c.analysis.fit.weighted}, {"min_bins", c.analysis.fit.min_bins}};

  json hdv = {{"tau0_p15", c.hdv.tau0_p15},
              {"delta0_p85", c.hdv.delta0_p85},
              {"jam_spacing_direct", c.hdv.jam_spacing_direct},
              {"jam_density_direct", c.hdv.jam_density_direct},
              {"capacity_p85", c.hdv.capacity_p85},
              {"wave_speed_range", {c.hdv.wave_speed_lo, c.hdv.wave_speed_hi}}};
  auto line = [&](const char* key, const std::optional<HdvLine>& l) {
    if (l) hdv[key] = {{"tau0", l->tau0}, {"delta0", l->delta0}};
  };
  line("mean_line", c.hdv.mean_line);
  line("p15_line", c.hdv.p15_line);
  line("p85_line", c.hdv.p85_line);
  j["hdv"] = hdv;

  json pairs = json::array();
  for (const auto& [k, jj] : c.compare.pairs) pairs.push_back({k, jj});
  j["compare"] = {{"alpha", c.compare.alpha},
                  {"grid_step", c.compare.containment.grid_step},
                  {"allow_extrapolation", c.compare.containment.allow_extrapolation},
                  {"pairs", pairs}};

  const auto& co = c.calibrate.options;
  j["calibrate"] = {{"init", write(c.calibrate.init)},
                    {"lower", write(c.calibrate.bounds.lower)},
                    {"upper", write(c.calibrate.bounds.upper)},
                    {"restarts", co.restarts},
                    {"max_iterations", co.max_iterations},
                    {"tolerance", co.tolerance},
                    {"jitter", co.jitter},
                    {"dt", co.dt},
                    {"accel_min", co.limits.min},
                    {"accel_max", co.limits.max},
                    {"min_duration", co.min_duration}};

  const auto& sc = c.scenario;
  json levels = json::array();
  for (const auto& l : sc.spec.levels) {
    levels.push_back({{"v_stable", l.v_stable},
                      {"v_dip", l.v_dip},
                      {"decel", l.decel},
                      {"accel", l.accel},
                      {"n_cycles", l.n_cycles},
                      {"stabilization_low", l.stabilization_low},
                      {"stabilization_high", l.stabilization_high},
                      {"low_speed_cutoff", l.low_speed_cutoff},
                      {"rate", l.rate}});
  }
  json grade = json::array();
  for (const auto& g : sc.spec.grade) grade.push_back({{"t_start", g.t_start}, {"t_end", g.t_end}, {"grade", g.grade}});
  json followers = json::array();
  for (const auto& f : sc.followers) followers.push_back(write(f));
  j["scenario"] = {{"levels", levels},
                   {"level_change_accel", sc.spec.level_change_accel},
                   {"start_position", sc.spec.start_position},
                   {"grade", grade},
                   {"followers", followers},
                   {"noise", {{"sigma_pos", sc.noise.sigma_pos},
                              {"sigma_speed", sc.noise.sigma_speed},
                              {"bias_sigma", sc.noise.bias_sigma}}},
                   {"lengths", sc.platoon.lengths},
                   {"dt", sc.platoon.dt},
                   {"car_model", sc.platoon.car_model},
                   {"headway", to_string(sc.platoon.headway)}};

  json fits = json::array();
  for (const auto& f : c.report.fits) {
    fits.push_back({{"system", f.system}, {"headway", f.headway}, {"tau0", f.tau0},
                    {"delta0", f.delta0}, {"r2", f.r2}, {"n", f.n}});
  }
  j["report"] = {{"results_dir", c.report.results_dir}, {"fits", fits}};
  return j.dump(2) + "\n";
}

}  // namespace fdkit
