#include "fdkit_cli/cli.hpp"

#include <charconv>
#include <cstdlib>
#include <ostream>

#include <CLI11.hpp>

#include "fdkit/error.hpp"

namespace fdkit::cli {
namespace {

std::optional<std::uint64_t> env_seed(std::ostream& err, bool& bad) {
  const char* raw = std::getenv("FDKIT_SEED");
  if (!raw || !*raw) return std::nullopt;
  std::uint64_t v = 0;
  const std::string_view s(raw);
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    err << "error: FDKIT_SEED must be a non-negative integer, got '" << s << "'\n";
    bad = true;
    return std::nullopt;
  }
  return v;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"fdkit: equilibrium spacing, fundamental diagrams and ACC platoon analysis"};
  app.name("fdkit");
  app.require_subcommand(1, 1);

  std::string config_path;
  std::size_t jobs = 1;
  std::string out_dir;
  const std::vector<std::string> names = {"detect", "fit", "compare", "calibrate", "simulate", "report",
                                          "selftest"};
  const std::vector<std::string> help = {
      "find equilibrium intervals in each input platoon",
      "fit the spacing-speed line and derive fundamental-diagram parameters",
      "test two systems' lines for slope and intercept differences",
      "calibrate an OVRV follower model and check it against the equilibrium fit",
      "generate a synthetic platoon dataset with ground truth",
      "aggregate fits into tables, plots and a pool summary",
      "run the closed-loop oracle checks"};
  for (std::size_t i = 0; i < names.size(); ++i) {
    auto* sub = app.add_subcommand(names[i], help[i]);
    auto* cfg = sub->add_option("--config", config_path, "run configuration (TOML or .json)");
    if (names[i] != "selftest") cfg->required();
    sub->add_option("--jobs", jobs, "worker threads")->check(CLI::Range(std::size_t{1}, std::size_t{256}));
    sub->add_option("--out", out_dir, "output root; the run goes to <out>/<run_id>");
  }

  std::vector<std::string> rev(args.rbegin(), args.rend());
  if (!rev.empty()) rev.pop_back();  // program name
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kDataError;
  }

  const std::string cmd = app.get_subcommands().front()->get_name();
  try {
    Context ctx;
    ctx.jobs = jobs;
    ctx.out = &out;
    ctx.err = &err;
    if (!config_path.empty()) ctx.config = load_config(config_path);
    bool bad_seed = false;
    if (auto seed = env_seed(err, bad_seed)) ctx.config.apply_seed(*seed);
    if (bad_seed) return kDataError;
    if (!out_dir.empty()) ctx.config.output_dir = std::filesystem::absolute(out_dir).string();

    if (cmd == "detect") return cmd_detect(ctx);
    if (cmd == "fit") return cmd_fit(ctx);
    if (cmd == "compare") return cmd_compare(ctx);
    if (cmd == "calibrate") return cmd_calibrate(ctx);
    if (cmd == "simulate") return cmd_simulate(ctx);
    if (cmd == "report") return cmd_report(ctx);
    return cmd_selftest(ctx);
  } catch (const Error& e) {
    err << "error: " << e.what() << " [" << to_string(e.code()) << "]\n";
    return e.is_data_error() ? kDataError : kInternal;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternal;
  }
}

}  // namespace fdkit::cli
