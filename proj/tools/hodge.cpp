// hodge: scenario runner and quick fixture queries.

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "roughhodge/report.hpp"
#include "roughhodge/runner.hpp"

namespace {

int print_json(const rhodge::RunOutcome& out)
{
    std::cout << rhodge::canonical_json(out.report);
    return out.exit_code;
}

int print_run_summary(const rhodge::RunOutcome& out)
{
    const auto& report = out.report;
    if (report.contains("setup") && report["setup"].contains("error")) {
        const auto& err = report["setup"]["error"];
        std::cerr << "hodge: " << err["message"].get<std::string>() << "\n";
        if (report["setup"].value("expected_rejection", false))
            std::cout << "PASS setup rejected as expected (" << err["kind"].get<std::string>() << ")\n";
    }
    if (report.contains("tasks")) {
        for (const auto& task : report["tasks"]) {
            std::cout << (task["passed"].get<bool>() ? "PASS " : "FAIL ") << task["type"].get<std::string>() << "\n";
            for (const auto& f : task["failures"])
                std::cout << "     " << f.get<std::string>() << "\n";
        }
    }
    for (const auto& path : out.files.written)
        std::cout << "wrote " << path << "\n";
    for (const auto& note : out.files.notices)
        std::cout << "note: " << note << "\n";
    return out.exit_code;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Discrete Hodge theory under rough metrics"};
    app.set_version_flag("--version", std::string(ROUGHHODGE_VERSION));
    app.require_subcommand(1);

    std::string scenario_path;
    std::optional<std::string> out_dir;
    bool no_timings = false;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> tolerances;
    auto* run = app.add_subcommand("run", "Execute a scenario file and write its report");
    run->add_option("scenario", scenario_path, "Scenario JSON")->required();
    run->add_option("--out", out_dir, "Output directory (overrides the scenario)");
    run->add_flag("--no-timings", no_timings, "Omit wall-clock timings for byte-identical reports");
    run->add_option("--seed", seed, "Base seed; metric i uses seed + i");
    run->add_option("--tol", tolerances, "Tolerance override KEY=VAL (repeatable)");

    std::string fixture;
    std::string metric = "identity";
    auto* betti = app.add_subcommand("betti", "Spectral Betti numbers of a fixture");
    betti->add_option("--fixture", fixture, "Fixture name")->required();
    betti->add_option("--metric", metric, "identity | random:<seed>:<C>");

    auto* oracle = app.add_subcommand("oracle", "Smith-form homology of a fixture");
    oracle->add_option("--fixture", fixture, "Fixture name")->required();

    std::string model;
    int levels = 4;
    bool csv = false;
    auto* refine = app.add_subcommand("refine", "Codifferential refinement study on [0,1]^2");
    refine->add_option("--model", model, "weierstrass | smooth | constant")
        ->required()
        ->check(CLI::IsMember({"weierstrass", "smooth", "constant"}));
    refine->add_option("--levels", levels, "Number of levels, N = 32 * 2^j")->check(CLI::Range(1, 8));
    refine->add_flag("--csv", csv, "Print level,N,r,slope instead of JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : rhodge::kExitInput;
    }

    if (*run) {
        rhodge::RunOptions options;
        options.out_dir = out_dir;
        options.timings = !no_timings;
        options.seed = seed;
        options.tolerance_overrides = tolerances;
        try {
            return print_run_summary(rhodge::run_scenario_file(scenario_path, options));
        } catch (const std::exception& e) {
            std::cerr << "hodge: " << e.what() << "\n";
            return rhodge::kExitInput;
        }
    }
    if (*betti)
        return print_json(rhodge::betti_command(fixture, metric));
    if (*oracle)
        return print_json(rhodge::oracle_command(fixture));
    if (*refine) {
        const rhodge::RunOutcome out = rhodge::refine_command(model, levels);
        if (csv && out.exit_code == 0) {
            std::cout << rhodge::refine_csv(out.report);
            return 0;
        }
        return print_json(out);
    }
    return rhodge::kExitInput;
}
