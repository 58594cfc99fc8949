/**
 * Scenario execution: assemble the complex and weights, run the tasks in
 * declared order, and collect a report whose exit code follows
 * 0 = all pass, 1 = assertion or oracle failure, 2 = input error.
 */
#ifndef ROUGHHODGE_RUNNER_HPP
#define ROUGHHODGE_RUNNER_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "roughhodge/report.hpp"
#include "roughhodge/scenario.hpp"

namespace rhodge {

inline constexpr int kExitPass = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitInput = 2;

struct BuiltComplex {
    CochainComplex complex;
    NilpotentOperator gamma;
    GradedStructure betti_grading;  // degrees, or parities for a Koszul model
    bool degree_graded = true;      // Gamma raises the degree by one
    bool smith_applicable = false;  // untwisted integer complex
    std::string kind;
    nlohmann::json info;
};

BuiltComplex build_complex(const ComplexSpec& spec, const Tolerances& tol, const std::string& base_dir = {});

struct BuiltWeights {
    WeightSpec weights;
    std::optional<MetricField> field;
    nlohmann::json info;
};

BuiltWeights build_weights(const MetricSpec& spec, const BuiltComplex& built);

struct RunOptions {
    std::optional<std::string> out_dir;
    bool timings = true;
    std::optional<std::uint64_t> seed;  // metric i receives seed + i
    std::vector<std::string> tolerance_overrides;  // KEY=VAL
    bool write = true;
};

struct RunOutcome {
    nlohmann::json report;
    int exit_code = kExitPass;
    EmitResult files;
};

/// Never throws for scenario content problems: they become exit code 2 with a report.
RunOutcome run_scenario(Scenario scenario, const RunOptions& options);
/// Parse errors are reported with exit code 2 and no report file.
RunOutcome run_scenario_file(const std::string& path, const RunOptions& options);

/// `hodge betti --fixture NAME --metric SPEC`
RunOutcome betti_command(const std::string& fixture, const std::string& metric);
/// `hodge oracle --fixture NAME`: Smith betti, torsion, Euler characteristic.
RunOutcome oracle_command(const std::string& fixture);
/// `hodge refine --model M --levels J`
RunOutcome refine_command(const std::string& model, int levels);

}  // namespace rhodge

#endif
