/**
 * Scenario files: a JSON description of one complex, up to two metrics and a
 * list of tasks. The published schema lives in scenarios/scenario.schema.json;
 * unknown keys are rejected with the JSON path of the offending entry.
 */
#ifndef ROUGHHODGE_SCENARIO_HPP
#define ROUGHHODGE_SCENARIO_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "roughhodge/refine.hpp"
#include "roughhodge/roughmetrics.hpp"

namespace rhodge {

struct GridSpec {
    std::vector<Index> sizes;
    std::vector<bool> periodic;
    std::vector<double> lengths;
};

struct KoszulSpec {
    int n = 0;
    std::vector<std::pair<std::vector<unsigned>, Scalar>> omega;
};

struct LocalSystemSpec {
    std::vector<Scalar> scalar;       // one transport per edge
    std::optional<Scalar> holonomy;   // transport on the first edge, identity elsewhere
};

struct ComplexSpec {
    std::string fixture;
    std::string file;
    std::optional<GridSpec> grid;
    std::optional<KoszulSpec> koszul;
    std::string boundary = "absolute";  // absolute | relative
    std::optional<LocalSystemSpec> local_system;
    std::optional<std::vector<Scalar>> cup_magnet;  // 1-cochain alpha, one value per edge
};

struct MetricSpec {
    std::string model = "identity";  // identity | log_gaussian | weierstrass | explicit | block_spd | weights
    std::uint64_t seed = 0;
    bool has_seed = false;
    double clamp = 4.0;
    int terms = 24;
    std::vector<std::vector<double>> matrix;   // explicit: constant n x n metric
    std::vector<std::vector<double>> weights;  // weights: diagonal per degree
};

struct TaskSpec {
    std::string type;
    int power = 2;                 // graded_isomorphism
    std::vector<int> powers{2, 3};  // power_check
};

struct Tolerances {
    double rank_gap = 1e3;
    double residual = 1e-10;
    double isomorphism = 1e-8;
    double self_adjoint = 1e-12;
    double nilpotency = 1e-12;
    double split = 1e-12;
    double flatness = 1e-12;
};

/// Apply "key=value" to a tolerance set. Throws ParseError on unknown keys or bad numbers.
void set_tolerance(Tolerances& tol, const std::string& assignment);
nlohmann::json to_json(const Tolerances& tol);

struct OutputSpec {
    std::string dir = ".";
    std::string stem;  // defaults to the scenario name
    bool csv = true;
    bool svg = false;
};

struct Scenario {
    std::string name = "scenario";
    ComplexSpec complex;
    std::vector<MetricSpec> metrics;
    std::vector<TaskSpec> tasks;
    Tolerances tolerances;
    std::optional<RefineConfig> refine;
    OutputSpec output;
    std::string expect_error;  // error kind the setup is expected to raise
    std::string base_dir;      // directory of the scenario file, for relative paths
    nlohmann::json source;     // the document as read
};

const std::vector<std::string>& task_names();

/// Throws Error(ParseError) carrying the JSON path (or line/column for syntax errors).
Scenario parse_scenario(const nlohmann::json& doc);
Scenario parse_scenario_text(const std::string& text);
Scenario load_scenario(const std::string& path);

/// "identity" | "random:<seed>:<C>" as used by the CLI.
MetricSpec parse_metric_shorthand(const std::string& text);

}  // namespace rhodge

#endif
