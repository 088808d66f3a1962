#include "fdkit/report.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>

#include "fdkit/csv.hpp"
#include "fdkit/error.hpp"
#include "fdkit/ingest.hpp"
#include "fdkit/svg.hpp"

namespace fdkit {
namespace {

constexpr std::array<const char*, 8> kPalette = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                                 "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

void write_or_throw(const std::filesystem::path& path, const std::string& text) {
  try {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    write_file(path, text);
  } catch (const std::filesystem::filesystem_error& e) {
    throw Error(ErrorCode::kIoError, e.what());
  }
}

std::string bool01(bool b) { return b ? "1" : "0"; }

}  // namespace

SystemResult make_system_result(std::string system, std::string headway, const LinearFit& fit,
                                std::vector<BinReportRow> bins, double u_f_kmh,
                                const HdvReference& ref) {
  SystemResult r;
  r.system = std::move(system);
  r.headway = std::move(headway);
  r.fit = fit;
  r.bins = std::move(bins);
  if (fit.tau0 > 0.0 && fit.delta0 > 0.0) {
    r.has_fd = true;
    r.fd = to_fd(fit, u_f_kmh);
    r.flags = compare_to_hdv(r.fd, ref);
  }
  return r;
}

PoolSummary build_pool(std::span<const SystemResult> results, const HdvReference& ref) {
  std::map<std::string, PoolGroup> groups;
  std::vector<FdParams> all;
  PoolSummary s;
  for (const auto& r : results) {
    if (!r.has_fd) continue;
    auto& g = groups[r.headway];
    g.headway = r.headway;
    g.systems.push_back(r.system);
    g.tau0.push_back(r.fd.tau0);
    g.delta0.push_back(r.fd.delta0);
    g.capacity.push_back(r.fd.capacity);
    g.wave_speed.push_back(r.fd.wave_speed);
    g.jam_density.push_back(r.fd.jam_density);
    if (all.empty() || r.fd.tau0 < s.min_tau0) {
      s.min_tau0 = r.fd.tau0;
      s.min_tau0_system = r.name();
    }
    if (all.empty() || r.fd.wave_speed < s.fastest_wave) {
      s.fastest_wave = r.fd.wave_speed;
      s.fastest_wave_system = r.name();
    }
    all.push_back(r.fd);
  }
  if (all.empty()) throw Error(ErrorCode::kEmpty, "no system result carries an FD");
  s.n = all.size();
  for (auto& [_, g] : groups) s.groups.push_back(std::move(g));
  s.exceedance = summarize_hdv(all, ref);
  return s;
}

std::string render_sv_svg(std::span<const EquilibriumPoint> points, const LinearFit& fit,
                          const SvPlotOptions& o) {
  double vmax = fit.v_max, smax = fit.predict(fit.v_max);
  for (const auto& p : points) {
    vmax = std::max(vmax, p.v);
    smax = std::max(smax, p.s);
  }
  svg::Axes ax;
  ax.x0 = 0.0;
  ax.x1 = svg::nice_ceil(std::max(1.0, vmax * 1.05));
  ax.y0 = 0.0;
  ax.y1 = svg::nice_ceil(std::max({1.0, smax * 1.1, fit.predict(ax.x1) * 1.05}));

  svg::Document doc(ax.left + ax.width + 20, ax.top + ax.height + 50);
  if (!o.title.empty()) {
    doc.text(ax.left + ax.width / 2, 18, o.title, "font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\"");
  }
  doc.axes(ax, "speed v (m/s)", "spacing s (m)");

  // Band over the plotted speed range, then the fit line on top.
  const double mult = band_multiplier(fit, o.alpha, o.band);
  std::vector<std::pair<double, double>> upper, lower;
  constexpr int kSteps = 60;
  for (int i = 0; i <= kSteps; ++i) {
    const double v = ax.x0 + (ax.x1 - ax.x0) * i / kSteps;
    const Band b = ci_band_with(fit, v, mult, o.band);
    upper.emplace_back(ax.px(v), ax.py(std::clamp(b.upper, ax.y0, ax.y1)));
    lower.emplace_back(ax.px(v), ax.py(std::clamp(b.lower, ax.y0, ax.y1)));
  }
  std::vector<std::pair<double, double>> band(upper);
  band.insert(band.end(), lower.rbegin(), lower.rend());
  doc.polygon(band, "fill=\"#1f77b4\" fill-opacity=\"0.15\" stroke=\"none\"");

  if (o.hdv) {
    auto draw = [&](const HdvLine& l, std::string_view style) {
      doc.line(ax.px(ax.x0), ax.py(l.tau0 * ax.x0 + l.delta0), ax.px(ax.x1),
               ax.py(l.tau0 * ax.x1 + l.delta0), style);
    };
    if (o.hdv->mean_line) draw(*o.hdv->mean_line, "stroke=\"#d62728\" stroke-width=\"1.5\" stroke-dasharray=\"6,4\"");
    if (o.hdv->p15_line) draw(*o.hdv->p15_line, "stroke=\"#ff7f0e\" stroke-width=\"1.2\" stroke-dasharray=\"2,3\"");
    if (o.hdv->p85_line) draw(*o.hdv->p85_line, "stroke=\"#ff7f0e\" stroke-width=\"1.2\" stroke-dasharray=\"2,3\"");
  }

  for (const auto& p : points) {
    doc.circle(ax.px(p.v), ax.py(p.s), 2.5, "fill=\"#333\" fill-opacity=\"0.7\"");
  }
  doc.line(ax.px(ax.x0), ax.py(fit.predict(ax.x0)), ax.px(ax.x1), ax.py(fit.predict(ax.x1)),
           "stroke=\"#1f77b4\" stroke-width=\"2\"");
  doc.text(ax.left + 10, ax.top + 16,
           "s = " + csv::format_g6(fit.tau0) + " v + " + csv::format_g6(fit.delta0) +
               "  R2 = " + csv::format_g6(fit.r2) + "  n = " + std::to_string(fit.n),
           "font-family=\"sans-serif\" font-size=\"12\"");
  return doc.str();
}

void emit_sv_plot(std::span<const EquilibriumPoint> points, const LinearFit& fit,
                  const SvPlotOptions& options, const std::filesystem::path& path) {
  write_or_throw(path, render_sv_svg(points, fit, options));
}

std::string render_fd_svg(std::span<const FdPlotEntry> entries, const HdvReference* hdv) {
  if (entries.empty()) throw Error(ErrorCode::kEmpty, "FD plot needs at least one entry");
  double kmax = 0.0, qmax = 0.0;
  for (const auto& e : entries) {
    kmax = std::max(kmax, e.params.jam_density);
    qmax = std::max(qmax, e.params.capacity);
  }
  if (hdv) {
    kmax = std::max(kmax, hdv->jam_density_direct);
    qmax = std::max(qmax, hdv->capacity_p85);
  }
  svg::Axes ax;
  ax.x1 = svg::nice_ceil(kmax * 1.05);
  ax.y1 = svg::nice_ceil(qmax * 1.1);
  const double legend_w = 150;
  svg::Document doc(ax.left + ax.width + legend_w, ax.top + ax.height + 50);
  doc.axes(ax, "density k (veh/km)", "flow q (veh/h)");

  if (hdv) {
    doc.line(ax.px(ax.x0), ax.py(hdv->capacity_p85), ax.px(ax.x1), ax.py(hdv->capacity_p85),
             "stroke=\"#ff7f0e\" stroke-width=\"1.2\" stroke-dasharray=\"2,3\"");
    doc.circle(ax.px(hdv->jam_density_direct), ax.py(0.0), 4, "fill=\"none\" stroke=\"#ff7f0e\" stroke-width=\"1.5\"");
  }
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto c = fd_curve(entries[i].params);
    const std::string color = kPalette[i % kPalette.size()];
    doc.polyline({{ax.px(c.free_branch.k0), ax.py(c.free_branch.q0)},
                  {ax.px(c.free_branch.k1), ax.py(c.free_branch.q1)},
                  {ax.px(c.congested_branch.k1), ax.py(c.congested_branch.q1)}},
                 "stroke=\"" + color + "\" stroke-width=\"1.5\"");
    doc.circle(ax.px(c.free_branch.k1), ax.py(c.free_branch.q1), 3, "fill=\"" + color + "\"");
    const double ly = ax.top + 14 + 16 * static_cast<double>(i);
    doc.line(ax.left + ax.width + 12, ly - 4, ax.left + ax.width + 32, ly - 4,
             "stroke=\"" + color + "\" stroke-width=\"2\"");
    doc.text(ax.left + ax.width + 36, ly, entries[i].label, "font-family=\"sans-serif\" font-size=\"11\"");
  }
  return doc.str();
}

void emit_fd_plot(std::span<const FdPlotEntry> entries, const HdvReference* hdv,
                  const std::filesystem::path& path) {
  write_or_throw(path, render_fd_svg(entries, hdv));
}

std::string systems_table(std::span<const SystemResult> results) {
  std::string out = std::string(kSystemsHeader) + "\n";
  for (const auto& r : results) {
    out += csv::join({r.system, r.headway, csv::format_g6(r.fit.tau0), csv::format_g6(r.fit.delta0),
                      std::to_string(r.fit.n)}) + "\n";
  }
  return out;
}

std::string comparisons_table(std::span<const NamedComparison> comparisons) {
  std::string out = std::string(kComparisonsHeader) + "\n";
  for (const auto& c : comparisons) {
    const auto& r = c.result;
    out += csv::join({c.system_K, c.system_J, csv::format_g6(r.dtau0), csv::format_g6(r.p_tau),
                      bool01(r.tau_significant), csv::format_g6(r.ddelta0), csv::format_g6(r.p_delta),
                      bool01(r.delta_significant)}) + "\n";
  }
  return out;
}

void emit_tables(std::span<const SystemResult> results, std::span<const NamedComparison> comparisons,
                 const std::string& path_prefix) {
  write_or_throw(path_prefix + "systems.csv", systems_table(results));
  write_or_throw(path_prefix + "comparisons.csv", comparisons_table(comparisons));
}

}  // namespace fdkit
