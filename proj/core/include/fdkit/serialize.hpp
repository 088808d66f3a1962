#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "fdkit/binning.hpp"
#include "fdkit/calibrate.hpp"
#include "fdkit/compare.hpp"
#include "fdkit/fd.hpp"
#include "fdkit/pipeline.hpp"
#include "fdkit/regression.hpp"
#include "fdkit/report.hpp"
#include "fdkit/simulate.hpp"

namespace fdkit::io {

using nlohmann::json;

// Rounds every float in the tree to 6 significant digits and pretty-prints
// it with a trailing newline. Keys keep nlohmann's sorted order.
std::string dump(const json& j);

inline constexpr const char* kIntervalsHeader = "pair_id,t_start,t_end,v_mean,s_mean,n,v_std,s_std";
inline constexpr const char* kBinsHeader = "bin_idx,v_min,v_max,n,s_mean,s_std,jb_stat,jb_p";

struct IntervalRow {
  std::string pair_id;
  EquilibriumInterval interval;  // first/last are not stored
};

std::string intervals_csv(std::span<const PairAnalysis> pairs);
std::vector<IntervalRow> parse_intervals_csv(std::string_view text);

std::string bins_csv(std::span<const BinReportRow> rows);

json to_json(const LinearFit& fit);
LinearFit fit_from_json(const json& j);

json to_json(const FdParams& fd, const HdvFlags& flags);
json to_json(const HdvFlags& flags);
json to_json(const CalibrationReport& report);
json to_json(const ComparisonResult& result);
json to_json(const ContainmentResult& result);
json to_json(const BinReportRow& row);
json to_json(const GroundTruth& truth);
json to_json(const PoolSummary& pool);
json to_json(const OvrvParams& p);

// fits.json entry: {system, headway, fit, bins, warnings}.
json system_to_json(const SystemResult& result, std::span<const std::string> warnings = {});
SystemResult system_from_json(const json& j, double u_f_kmh, const HdvReference& ref);

}  // namespace fdkit::io
