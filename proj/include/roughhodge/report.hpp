/**
 * Report emission: canonical JSON (sorted keys, two-space indent, LF), a flat
 * CSV of scalar task metrics, the refinement table, and optional SVG plots.
 */
#ifndef ROUGHHODGE_REPORT_HPP
#define ROUGHHODGE_REPORT_HPP

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "roughhodge/refine.hpp"

namespace rhodge {

struct EmitOptions {
    std::string dir = ".";
    std::string stem = "report";
    bool csv = true;
    bool svg = false;
};

struct EmitResult {
    std::vector<std::string> written;
    std::vector<std::string> notices;
};

/// Sorted keys, two-space indent, trailing LF.
std::string canonical_json(const nlohmann::json& value);

nlohmann::json to_json(const RefineResult& result);

/// Rows "task,key,value" for every scalar under tasks[i].results.
std::string report_csv(const nlohmann::json& report);
/// Columns level,N,r,slope.
std::string refine_csv(const nlohmann::json& refine);

/// Eigenvalue scatter of every spectrum in the report; empty when there is none.
std::string spectrum_svg(const nlohmann::json& report);
/// log2 r against log2 N; empty when the report has no refinement.
std::string refine_svg(const nlohmann::json& report);

/// Writes <stem>.json, <stem>.csv, <stem>_refine.csv and SVGs as requested. Throws IoError.
EmitResult emit_report(const nlohmann::json& report, const EmitOptions& options);

}  // namespace rhodge

#endif
