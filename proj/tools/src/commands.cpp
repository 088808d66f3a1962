#include <algorithm>
#include <atomic>
#include <exception>
#include <map>
#include <ostream>
#include <thread>

#include "fdkit/calibrate.hpp"
#include "fdkit/csv.hpp"
#include "fdkit/error.hpp"
#include "fdkit/ingest.hpp"
#include "fdkit/report.hpp"
#include "fdkit/serialize.hpp"
#include "fdkit_cli/cli.hpp"

namespace fdkit::cli {
namespace {

namespace fs = std::filesystem;
using io::json;

// Runs fn(i) for i in [0, n) on up to `jobs` threads. Results keep input
// order; the lowest-index failure is rethrown so errors are deterministic.
template <typename T, typename F>
std::vector<T> parallel_map(std::size_t n, std::size_t jobs, F fn) {
  std::vector<T> out(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        out[i] = fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::min(std::max<std::size_t>(jobs, 1), std::max<std::size_t>(n, 1));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

std::string safe_name(const std::string& name) {
  std::string s;
  for (char c : name) s += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.') ? c : '_';
  return s;
}

void emit(Context& ctx, const fs::path& path, const std::string& text) {
  write_file(path, text);
  *ctx.out << path.string() << "\n";
}

void warn_all(Context& ctx, const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) *ctx.err << "warning: " << w << "\n";
}

void require_inputs(const RunConfig& c) {
  if (c.inputs.empty()) throw Error(ErrorCode::kEmpty, "config lists no inputs");
}

std::vector<SystemAnalysis> analyze_inputs(Context& ctx) {
  const auto& c = ctx.config;
  require_inputs(c);
  return parallel_map<SystemAnalysis>(c.inputs.size(), ctx.jobs, [&](std::size_t i) {
    const auto& in = c.inputs[i];
    const auto record = load_manifest(c.resolve(in.manifest));
    const std::string system = in.system.empty() ? record.meta.car_model : in.system;
    const std::string headway = in.headway.empty() ? to_string(record.meta.headway) : in.headway;
    return analyze_platoon(record, c.analysis, system, headway);
  });
}

std::vector<SystemAnalysis> systems_from_intervals(Context& ctx) {
  const auto& c = ctx.config;
  const auto rows = io::parse_intervals_csv(read_file(c.resolve(c.intervals)));
  // pair_id is "<system>-<headway>:<leader>:<follower>"; group by the part
  // before the first colon, keeping first-seen order.
  std::vector<std::string> order;
  std::map<std::string, std::vector<EquilibriumPoint>> groups;
  for (const auto& r : rows) {
    const std::string name = r.pair_id.substr(0, r.pair_id.find(':'));
    if (!groups.count(name)) order.push_back(name);
    auto& pts = groups[name];
    pts.push_back({r.interval.v_mean, r.interval.s_mean, static_cast<double>(r.interval.n_samples), pts.size()});
  }
  std::vector<SystemAnalysis> out;
  for (const auto& name : order) {
    out.push_back(fit_points(name, "", groups[name], c.analysis));
  }
  return out;
}

SystemResult to_result(const SystemAnalysis& s, const RunConfig& c) {
  return make_system_result(s.system, s.headway, *s.fit, bin_report(s.bins, c.analysis.bins), c.u_f_kmh,
                             c.hdv);
}

void write_intervals(Context& ctx, const std::vector<SystemAnalysis>& systems) {
  std::vector<PairAnalysis> pairs;
  for (const auto& s : systems) pairs.insert(pairs.end(), s.pairs.begin(), s.pairs.end());
  emit(ctx, ctx.config.run_dir() / "tables" / "intervals.csv", io::intervals_csv(pairs));
}

}  // namespace

int cmd_detect(Context& ctx) {
  const auto systems = analyze_inputs(ctx);
  for (const auto& s : systems) {
    warn_all(ctx, s.warnings);
  }
  write_intervals(ctx, systems);
  return kOk;
}

int cmd_fit(Context& ctx) {
  const auto& c = ctx.config;
  const bool from_intervals = !c.intervals.empty();
  const auto systems = from_intervals ? systems_from_intervals(ctx) : analyze_inputs(ctx);
  if (!from_intervals) write_intervals(ctx, systems);

  json fits = json::array();
  json fds = json::array();
  std::vector<SystemResult> results;
  const fs::path dir = c.run_dir();
  for (const auto& s : systems) {
    warn_all(ctx, s.warnings);
    if (!s.fit) continue;
    auto r = to_result(s, c);
    fits.push_back(io::system_to_json(r, s.warnings));
    json fd = {{"system", r.system}, {"headway", r.headway}, {"valid", r.has_fd && r.fit.valid}};
    if (r.has_fd) {
      fd["fd"] = io::to_json(r.fd, r.flags);
    } else {
      *ctx.err << "warning: " << s.name() << ": tau0 or delta0 is not positive; no FD\n";
    }
    fds.push_back(fd);
    const std::string stem = safe_name(s.name());
    emit(ctx, dir / "tables" / ("bins_" + stem + ".csv"), io::bins_csv(r.bins));
    SvPlotOptions po;
    po.alpha = c.alpha;
    po.band = c.band;
    po.title = s.name();
    po.hdv = &c.hdv;
    emit(ctx, dir / "plots" / ("sv_" + stem + ".svg"), render_sv_svg(s.points, *s.fit, po));
    results.push_back(std::move(r));
  }
  emit(ctx, dir / "fits.json", io::dump({{"systems", fits}}));
  emit(ctx, dir / "fd.json", io::dump({{"u_f_kmh", c.u_f_kmh}, {"systems", fds}}));
  emit(ctx, dir / "tables" / "systems.csv", systems_table(results));
  return kOk;
}

int cmd_compare(Context& ctx) {
  const auto& c = ctx.config;
  const auto systems = analyze_inputs(ctx);
  std::map<std::string, const SystemAnalysis*> by_name;
  for (const auto& s : systems) {
    warn_all(ctx, s.warnings);
    if (!by_name.emplace(s.name(), &s).second) {
      throw Error(ErrorCode::kConfig, "two inputs share the system name '" + s.name() + "'");
    }
  }
  auto pairs = c.compare.pairs;
  if (pairs.empty()) {
    for (std::size_t i = 0; i < systems.size(); ++i) {
      for (std::size_t j = i + 1; j < systems.size(); ++j) pairs.emplace_back(systems[i].name(), systems[j].name());
    }
  }
  auto find = [&](const std::string& name) {
    const auto it = by_name.find(name);
    if (it == by_name.end()) throw Error(ErrorCode::kConfig, "compare.pairs names unknown system '" + name + "'");
    return it->second;
  };
  std::vector<NamedComparison> results;
  json arr = json::array();
  for (const auto& [k, j] : pairs) {
    const auto* K = find(k);
    const auto* J = find(j);
    NamedComparison nc{k, j, compare_fits(K->points, J->points, c.compare.alpha)};
    warn_all(ctx, nc.result.warnings);
    json e = io::to_json(nc.result);
    e["system_K"] = k;
    e["system_J"] = j;
    arr.push_back(e);
    results.push_back(std::move(nc));
  }
  const fs::path dir = c.run_dir();
  emit(ctx, dir / "tables" / "comparisons.csv", comparisons_table(results));
  emit(ctx, dir / "comparisons.json", io::dump({{"comparisons", arr}}));
  return kOk;
}

int cmd_calibrate(Context& ctx) {
  const auto& c = ctx.config;
  const auto systems = analyze_inputs(ctx);
  struct Job {
    std::size_t system;
    std::size_t pair;
  };
  std::vector<Job> jobs;
  for (std::size_t i = 0; i < systems.size(); ++i) {
    warn_all(ctx, systems[i].warnings);
    for (std::size_t p = 0; p < systems[i].pairs.size(); ++p) jobs.push_back({i, p});
  }
  CalibrateOptions opts = c.calibrate.options;
  opts.parallel = ctx.jobs > 1;
  const auto reports = parallel_map<CalibrationReport>(jobs.size(), ctx.jobs, [&](std::size_t k) {
    const auto& pa = systems[jobs[k].system].pairs[jobs[k].pair];
    return calibrate_ovrv(pa.pair, c.calibrate.init, c.calibrate.bounds, opts);
  });

  json out = json::array();
  for (std::size_t k = 0; k < jobs.size(); ++k) {
    const auto& s = systems[jobs[k].system];
    const auto& rep = reports[k];
    warn_all(ctx, rep.warnings);
    json e = {{"system", s.system}, {"headway", s.headway}, {"pair_id", s.pairs[jobs[k].pair].pair_id},
              {"calibration", io::to_json(rep)}};
    if (s.fit) {
      const auto line = ovrv_equilibrium(rep.params);
      e["containment"] = io::to_json(ci_containment(*s.fit, line.tau0, line.delta0, s.fit->v_min,
                                                    s.fit->v_max, c.compare.containment));
    } else {
      *ctx.err << "warning: " << s.name() << ": no equilibrium fit to compare the calibration with\n";
    }
    out.push_back(e);
  }
  emit(ctx, c.run_dir() / "calibration.json", io::dump({{"calibrations", out}}));
  return kOk;
}

int cmd_simulate(Context& ctx) {
  const auto& c = ctx.config;
  PlatoonOptions po = c.scenario.platoon;
  const auto p = gen_platoon(c.scenario.spec, c.scenario.followers, c.scenario.noise, po);
  const fs::path dir = c.run_dir() / "dataset";
  write_platoon(p.record, dir);
  *ctx.out << (dir / "manifest.json").string() << "\n";
  json gt = io::to_json(p.ground_truth);
  gt["seed"] = c.seed;
  gt["noise"] = {{"sigma_pos", c.scenario.noise.sigma_pos},
                 {"sigma_speed", c.scenario.noise.sigma_speed},
                 {"bias_sigma", c.scenario.noise.bias_sigma}};
  emit(ctx, dir / "ground_truth.json", io::dump(gt));
  return kOk;
}

int cmd_report(Context& ctx) {
  const auto& c = ctx.config;
  const fs::path results_dir = c.report.results_dir.empty() ? c.run_dir() : c.resolve(c.report.results_dir);
  std::vector<SystemResult> results;
  const fs::path fits_path = results_dir / "fits.json";
  if (fs::exists(fits_path)) {
    json j;
    try {
      j = json::parse(read_file(fits_path));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kConfig, "fits.json: " + std::string(e.what()));
    }
    for (const auto& s : j.value("systems", json::array())) results.push_back(io::system_from_json(s, c.u_f_kmh, c.hdv));
  }
  for (const auto& row : c.report.fits) {
    LinearFit f;
    f.tau0 = row.tau0;
    f.delta0 = row.delta0;
    f.r2 = row.r2;
    f.n = row.n;
    f.valid = true;
    results.push_back(make_system_result(row.system, row.headway, f, {}, c.u_f_kmh, c.hdv));
  }
  if (results.empty()) throw Error(ErrorCode::kEmpty, "no fits found in " + results_dir.string() + " or the config");

  std::vector<NamedComparison> comparisons;
  const fs::path cmp_path = results_dir / "comparisons.json";
  if (fs::exists(cmp_path)) {
    try {
      const json j = json::parse(read_file(cmp_path));
      for (const auto& e : j.value("comparisons", json::array())) {
        NamedComparison nc;
        nc.system_K = e.at("system_K").get<std::string>();
        nc.system_J = e.at("system_J").get<std::string>();
        nc.result.dtau0 = e.at("dtau0").get<double>();
        nc.result.ddelta0 = e.at("ddelta0").get<double>();
        nc.result.p_tau = e.at("p_tau").get<double>();
        nc.result.p_delta = e.at("p_delta").get<double>();
        nc.result.tau_significant = e.at("sig_tau").get<bool>();
        nc.result.delta_significant = e.at("sig_delta").get<bool>();
        comparisons.push_back(nc);
      }
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kConfig, "comparisons.json: " + std::string(e.what()));
    }
  }

  const auto pool = build_pool(results, c.hdv);
  std::vector<FdPlotEntry> entries;
  for (const auto& r : results) {
    if (r.has_fd) entries.push_back({r.name(), r.fd});
  }
  const fs::path dir = c.run_dir();
  fs::create_directories(dir / "tables");
  emit_tables(results, comparisons, (dir / "tables").string() + "/");
  *ctx.out << (dir / "tables" / "systems.csv").string() << "\n" << (dir / "tables" / "comparisons.csv").string() << "\n";
  emit(ctx, dir / "plots" / "fd.svg", render_fd_svg(entries, &c.hdv));
  emit(ctx, dir / "pool.json", io::dump(io::to_json(pool)));
  return kOk;
}

int cmd_selftest(Context& ctx) {
  const auto checks = run_selftest(ctx.config.seed);
  bool ok = true;
  for (const auto& ch : checks) {
    *ctx.out << (ch.pass ? "PASS " : "FAIL ") << ch.name << ": " << ch.detail << "\n";
    ok = ok && ch.pass;
  }
  return ok ? kOk : kInternal;
}

}  // namespace fdkit::cli
