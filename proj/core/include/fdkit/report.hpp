#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "fdkit/binning.hpp"
#include "fdkit/compare.hpp"
#include "fdkit/fd.hpp"
#include "fdkit/regression.hpp"

namespace fdkit {

struct SystemResult {
  std::string system;
  std::string headway;  // label such as "min" or "max"
  LinearFit fit;
  bool has_fd = false;  // false when the fit cannot make an FD
  FdParams fd;
  HdvFlags flags;
  std::vector<BinReportRow> bins;

  std::string name() const { return headway.empty() ? system : system + "-" + headway; }
};

// Fills fd and flags from the fit. has_fd is false for non-positive tau0 or
// delta0.
SystemResult make_system_result(std::string system, std::string headway, const LinearFit& fit,
                                std::vector<BinReportRow> bins, double u_f_kmh,
                                const HdvReference& ref = {});

struct PoolGroup {
  std::string headway;
  std::vector<std::string> systems;
  std::vector<double> tau0;
  std::vector<double> delta0;
  std::vector<double> capacity;
  std::vector<double> wave_speed;
  std::vector<double> jam_density;
};

struct PoolSummary {
  std::size_t n = 0;  // results with an FD
  std::vector<PoolGroup> groups;  // sorted by headway label
  HdvPoolSummary exceedance;
  double min_tau0 = 0.0;
  std::string min_tau0_system;
  double fastest_wave = 0.0;  // most negative, km/h
  std::string fastest_wave_system;
};

// Throws kEmpty when no result carries an FD.
PoolSummary build_pool(std::span<const SystemResult> results, const HdvReference& ref = {});

struct NamedComparison {
  std::string system_K;
  std::string system_J;
  ComparisonResult result;
};

struct SvPlotOptions {
  double alpha = 0.05;
  BandKind band = BandKind::kMeanResponse;
  std::string title;
  const HdvReference* hdv = nullptr;  // draws reference lines when set
};

std::string render_sv_svg(std::span<const EquilibriumPoint> points, const LinearFit& fit,
                          const SvPlotOptions& options = {});
void emit_sv_plot(std::span<const EquilibriumPoint> points, const LinearFit& fit,
                  const SvPlotOptions& options, const std::filesystem::path& path);

struct FdPlotEntry {
  std::string label;
  FdParams params;
};

std::string render_fd_svg(std::span<const FdPlotEntry> entries, const HdvReference* hdv = nullptr);
void emit_fd_plot(std::span<const FdPlotEntry> entries, const HdvReference* hdv,
                  const std::filesystem::path& path);

// Header lines of the two tables.
inline constexpr const char* kSystemsHeader = "system,headway,tau0,delta0,n";
inline constexpr const char* kComparisonsHeader =
    "system_K,system_J,dtau0,p_tau,sig_tau,ddelta0,p_delta,sig_delta";

std::string systems_table(std::span<const SystemResult> results);
std::string comparisons_table(std::span<const NamedComparison> comparisons);

// Writes <prefix>systems.csv and <prefix>comparisons.csv.
void emit_tables(std::span<const SystemResult> results, std::span<const NamedComparison> comparisons,
                 const std::string& path_prefix);

}  // namespace fdkit
