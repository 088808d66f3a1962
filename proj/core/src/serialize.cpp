#include "fdkit/serialize.hpp"

#include <cmath>

#include "fdkit/csv.hpp"
#include "fdkit/error.hpp"

namespace fdkit::io {
namespace {

void round_tree(json& j) {
  if (j.is_number_float()) {
    const double v = j.get<double>();
    j = std::isfinite(v) ? json(csv::round_g6(v)) : json(nullptr);
  } else if (j.is_structured()) {
    for (auto& child : j) round_tree(child);
  }
}

double need_double(std::string_view field, std::size_t row) {
  const auto v = csv::parse_double(field);
  if (!v) throw Error(ErrorCode::kMalformedRow, "bad number '" + std::string(field) + "'", row);
  return *v;
}

}  // namespace

std::string dump(const json& j) {
  json copy = j;
  round_tree(copy);
  return copy.dump(2) + "\n";
}

std::string intervals_csv(std::span<const PairAnalysis> pairs) {
  std::string out = std::string(kIntervalsHeader) + "\n";
  for (const auto& p : pairs) {
    for (const auto& iv : p.intervals) {
      out += csv::join({p.pair_id, csv::format_g6(iv.t_start), csv::format_g6(iv.t_end),
                        csv::format_g6(iv.v_mean), csv::format_g6(iv.s_mean),
                        std::to_string(iv.n_samples), csv::format_g6(iv.v_std),
                        csv::format_g6(iv.s_std)}) + "\n";
    }
  }
  return out;
}

std::vector<IntervalRow> parse_intervals_csv(std::string_view text) {
  auto lines = csv::split_lines(text);
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) throw Error(ErrorCode::kEmptyFile, "intervals file is empty");
  if (lines.front() != kIntervalsHeader) {
    throw Error(ErrorCode::kMalformedRow, "unexpected intervals header", std::size_t{0});
  }
  std::vector<IntervalRow> rows;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto f = csv::split_fields(lines[r]);
    if (f.size() != 8) throw Error(ErrorCode::kMalformedRow, "expected 8 fields", r);
    IntervalRow row;
    row.pair_id = std::string(f[0]);
    row.interval.t_start = need_double(f[1], r);
    row.interval.t_end = need_double(f[2], r);
    row.interval.v_mean = need_double(f[3], r);
    row.interval.s_mean = need_double(f[4], r);
    const double n = need_double(f[5], r);
    if (!(n >= 1.0) || n != std::floor(n)) throw Error(ErrorCode::kMalformedRow, "bad sample count", r);
    row.interval.n_samples = static_cast<std::size_t>(n);
    row.interval.v_std = need_double(f[6], r);
    row.interval.s_std = need_double(f[7], r);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string bins_csv(std::span<const BinReportRow> rows) {
  std::string out = std::string(kBinsHeader) + "\n";
  for (const auto& b : rows) {
    out += csv::join({std::to_string(b.index), csv::format_g6(b.v_min), csv::format_g6(b.v_max),
                      std::to_string(b.n), csv::format_g6(b.s_mean), csv::format_g6(b.s_std),
                      b.normality ? csv::format_g6(b.normality->statistic) : "",
                      b.normality ? csv::format_g6(b.normality->p_value) : ""}) + "\n";
  }
  return out;
}

json to_json(const LinearFit& f) {
  return {{"tau0_s", f.tau0},       {"delta0_m", f.delta0}, {"se_tau0", f.se_tau0},
          {"se_delta0", f.se_delta0}, {"r2", f.r2},         {"n", f.n},
          {"n_bins", f.n_bins},     {"sigma_hat_m", f.sigma_hat}, {"v_bar", f.v_bar},
          {"sxx", f.sxx},           {"valid", f.valid},     {"v_min", f.v_min},
          {"v_max", f.v_max}};
}

LinearFit fit_from_json(const json& j) {
  try {
    LinearFit f;
    f.tau0 = j.at("tau0_s").get<double>();
    f.delta0 = j.at("delta0_m").get<double>();
    f.se_tau0 = j.value("se_tau0", 0.0);
    f.se_delta0 = j.value("se_delta0", 0.0);
    f.r2 = j.value("r2", 0.0);
    f.n = j.value("n", std::size_t{0});
    f.n_bins = j.value("n_bins", std::size_t{0});
    f.sigma_hat = j.value("sigma_hat_m", 0.0);
    f.v_bar = j.value("v_bar", 0.0);
    f.sxx = j.value("sxx", 0.0);
    f.valid = j.value("valid", f.n_bins >= 3);
    f.v_min = j.value("v_min", 0.0);
    f.v_max = j.value("v_max", 0.0);
    return f;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfig, std::string("bad fit record: ") + e.what());
  }
}

json to_json(const HdvFlags& f) {
  return {{"tau0_below_p15", f.tau0_below_p15},
          {"delta0_above_p85", f.delta0_above_p85},
          {"wave_outside_range", f.wave_outside_range},
          {"capacity_above_p85", f.capacity_above_p85}};
}

json to_json(const FdParams& fd, const HdvFlags& flags) {
  return {{"tau0_s", fd.tau0},        {"delta0_m", fd.delta0},   {"u_f_kmh", fd.u_f},
          {"wave_kmh", fd.wave_speed}, {"kj_vpkm", fd.jam_density}, {"cap_vph", fd.capacity},
          {"flags", to_json(flags)}};
}

json to_json(const OvrvParams& p) {
  return {{"k1", p.k1}, {"k2", p.k2}, {"tau_s", p.tau}, {"eta_m", p.eta}};
}

json to_json(const CalibrationReport& r) {
  return {{"k1", r.params.k1},
          {"k2", r.params.k2},
          {"tau_s", r.params.tau},
          {"eta_m", r.params.eta},
          {"spacing_rmse_m", r.spacing_rmse},
          {"speed_rmse_mps", r.speed_rmse},
          {"converged", r.converged},
          {"iterations", r.iterations},
          {"k1_identified", r.k1_identified},
          {"k2_identified", r.k2_identified},
          {"warnings", r.warnings}};
}

json to_json(const ComparisonResult& r) {
  return {{"dtau0", r.dtau0},         {"ddelta0", r.ddelta0},
          {"se_dtau0", r.se_dtau0},   {"se_ddelta0", r.se_ddelta0},
          {"p_tau", r.p_tau},         {"p_delta", r.p_delta},
          {"alpha", r.alpha},         {"sig_tau", r.tau_significant},
          {"sig_delta", r.delta_significant}, {"n_K", r.n_K},
          {"n_J", r.n_J},             {"condition", r.condition},
          {"warnings", r.warnings}};
}

json to_json(const ContainmentResult& r) {
  return {{"fraction_inside", r.fraction_inside},
          {"fully_inside", r.fully_inside},
          {"v_lo", r.grid.empty() ? 0.0 : r.grid.front()},
          {"v_hi", r.grid.empty() ? 0.0 : r.grid.back()},
          {"grid_points", r.grid.size()}};
}

json to_json(const BinReportRow& b) {
  json j = {{"bin_idx", b.index}, {"v_min", b.v_min},   {"v_max", b.v_max}, {"n", b.n},
            {"s_mean", b.s_mean}, {"s_std", b.s_std},   {"dense", b.dense}};
  if (b.normality) {
    j["jb_stat"] = b.normality->statistic;
    j["jb_p"] = b.normality->p_value;
  }
  return j;
}

json to_json(const GroundTruth& t) {
  json cycles = json::array();
  for (const auto& c : t.cycles) {
    cycles.push_back({{"t_start", c.t_start}, {"t_dip", c.t_dip}, {"t_end", c.t_end},
                      {"v_from", c.v_from}, {"v_to", c.v_to}, {"level_change", c.level_change}});
  }
  json followers = json::array();
  for (std::size_t i = 0; i < t.followers.size(); ++i) {
    json f = to_json(t.followers[i]);
    f["line"] = {{"tau0_s", t.lines[i].tau0}, {"delta0_m", t.lines[i].delta0}};
    followers.push_back(f);
  }
  return {{"cycles", cycles},
          {"followers", followers},
          {"duration_s", t.duration},
          {"final_position_m", t.final_position}};
}

json to_json(const PoolSummary& p) {
  json groups = json::array();
  for (const auto& g : p.groups) {
    groups.push_back({{"headway", g.headway},       {"systems", g.systems},
                      {"tau0_s", g.tau0},           {"delta0_m", g.delta0},
                      {"cap_vph", g.capacity},      {"wave_kmh", g.wave_speed},
                      {"kj_vpkm", g.jam_density}});
  }
  return {{"n", p.n},
          {"groups", groups},
          {"exceedance",
           {{"tau0_below_p15", p.exceedance.frac_tau0_below_p15},
            {"delta0_above_p85", p.exceedance.frac_delta0_above_p85},
            {"wave_outside_range", p.exceedance.frac_wave_outside},
            {"capacity_above_p85", p.exceedance.frac_capacity_above_p85}}},
          {"min_tau0_s", p.min_tau0},
          {"min_tau0_system", p.min_tau0_system},
          {"fastest_wave_kmh", p.fastest_wave},
          {"fastest_wave_system", p.fastest_wave_system}};
}

json system_to_json(const SystemResult& r, std::span<const std::string> warnings) {
  json bins = json::array();
  for (const auto& b : r.bins) bins.push_back(to_json(b));
  json j = {{"system", r.system}, {"headway", r.headway}, {"fit", to_json(r.fit)}, {"bins", bins},
            {"warnings", std::vector<std::string>(warnings.begin(), warnings.end())}};
  return j;
}

SystemResult system_from_json(const json& j, double u_f_kmh, const HdvReference& ref) {
  try {
    std::vector<BinReportRow> bins;
    for (const auto& b : j.value("bins", json::array())) {
      BinReportRow row;
      row.index = b.at("bin_idx").get<std::size_t>();
      row.v_min = b.at("v_min").get<double>();
      row.v_max = b.at("v_max").get<double>();
      row.n = b.at("n").get<std::size_t>();
      row.s_mean = b.at("s_mean").get<double>();
      row.s_std = b.at("s_std").get<double>();
      row.dense = b.value("dense", false);
      if (b.contains("jb_stat")) row.normality = stats::JarqueBera{b["jb_stat"], b["jb_p"], 0.0, 0.0};
      bins.push_back(row);
    }
    return make_system_result(j.at("system").get<std::string>(), j.value("headway", std::string()),
                              fit_from_json(j.at("fit")), std::move(bins), u_f_kmh, ref);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfig, std::string("bad system record: ") + e.what());
  }
}

}  // namespace fdkit::io
