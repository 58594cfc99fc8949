#include <cctype>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "roughhodge/errors.hpp"
#include "roughhodge/runner.hpp"

using namespace rhodge;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path fresh_dir(const std::string& tag)
{
    std::random_device rd;
    fs::path dir = fs::temp_directory_path() / ("roughhodge_" + tag + "_" + std::to_string(rd()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string parse_error_message(const std::string& text)
{
    try {
        parse_scenario_text(text);
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::ParseError);
        return e.what();
    }
    ADD_FAILURE() << "accepted: " << text;
    return {};
}

const std::string kScenarioDir = ROUGHHODGE_SCENARIO_DIR;

}  // namespace

TEST(ScenarioParse, MinimalDocument)
{
    const Scenario s = parse_scenario_text(R"({"complex": {"fixture": "cycle_3"}, "tasks": ["betti"]})");
    EXPECT_EQ(s.complex.fixture, "cycle_3");
    ASSERT_EQ(s.tasks.size(), 1u);
    EXPECT_EQ(s.tasks[0].type, "betti");
    ASSERT_EQ(s.metrics.size(), 1u);
    EXPECT_EQ(s.metrics[0].model, "identity");
    EXPECT_DOUBLE_EQ(s.tolerances.isomorphism, 1e-8);
}

TEST(ScenarioParse, UnknownKeysCarryTheirPath)
{
    EXPECT_NE(parse_error_message(R"({"complex": {"fixture": "cycle_3"}, "tasks": ["betti"], "colour": 1})")
                  .find("colour"),
              std::string::npos);
    const std::string nested =
        parse_error_message(R"({"complex": {"fixture": "cycle_3", "bounds": "x"}, "tasks": ["betti"]})");
    EXPECT_NE(nested.find("$.complex"), std::string::npos);
    EXPECT_NE(nested.find("bounds"), std::string::npos);
    EXPECT_NE(parse_error_message(
                  R"({"complex": {"fixture": "cycle_3"}, "metrics": [{"model": "identity", "sead": 1}], "tasks": ["betti"]})")
                  .find("$.metrics[0]"),
              std::string::npos);
}

TEST(ScenarioParse, StructuralErrors)
{
    parse_error_message("{\"complex\": ");
    parse_error_message(R"({"complex": {"fixture": "cycle_3"}, "tasks": []})");
    parse_error_message(R"({"complex": {"fixture": "cycle_3"}, "tasks": ["integrate"]})");
    parse_error_message(R"({"complex": {"fixture": "cycle_3"}, "tasks": ["isomorphism"]})");
    parse_error_message(R"({"complex": {}, "tasks": ["betti"]})");
    parse_error_message(R"({"complex": {"fixture": "cycle_3", "boundary": "mixed"}, "tasks": ["betti"]})");
    parse_error_message(R"({"complex": {"fixture": "cycle_3"}, "tolerances": {"residual": -1}, "tasks": ["betti"]})");
}

TEST(ScenarioParse, ToleranceOverrides)
{
    Tolerances t;
    set_tolerance(t, "isomorphism=1e-6");
    EXPECT_DOUBLE_EQ(t.isomorphism, 1e-6);
    EXPECT_THROW(set_tolerance(t, "nonsense=1"), Error);
    EXPECT_THROW(set_tolerance(t, "residual=abc"), Error);
    EXPECT_THROW(set_tolerance(t, "residual"), Error);
}

TEST(ScenarioParse, MetricShorthand)
{
    EXPECT_EQ(parse_metric_shorthand("identity").model, "identity");
    const MetricSpec r = parse_metric_shorthand("random:17:3");
    EXPECT_EQ(r.model, "log_gaussian");
    EXPECT_EQ(r.seed, 17u);
    EXPECT_DOUBLE_EQ(r.clamp, 3.0);
    EXPECT_THROW(parse_metric_shorthand("random:x"), Error);
}

TEST(ScenarioParse, ShippedScenariosLoad)
{
    int count = 0;
    for (const auto& entry : fs::directory_iterator(kScenarioDir)) {
        if (entry.path().extension() != ".json" || entry.path().filename() == "scenario.schema.json")
            continue;
        EXPECT_NO_THROW(load_scenario(entry.path().string())) << entry.path();
        ++count;
    }
    EXPECT_GE(count, 8);
}

TEST(Run, ReportRoundTripAndCsv)
{
    const fs::path dir = fresh_dir("roundtrip");
    RunOptions opts;
    opts.out_dir = dir.string();
    opts.timings = false;
    const RunOutcome out = run_scenario_file(kScenarioDir + "/octahedron_graded.json", opts);
    EXPECT_EQ(out.exit_code, kExitPass) << out.report.dump(2);
    const std::string text = read_file(dir / "octahedron_graded.json");
    EXPECT_EQ(text.find('\r'), std::string::npos);
    ASSERT_FALSE(text.empty());
    EXPECT_EQ(text.back(), '\n');
    const json parsed = json::parse(text);
    EXPECT_EQ(parsed, out.report);
    EXPECT_EQ(canonical_json(parsed), text);
    EXPECT_FALSE(parsed.contains("timings"));
    EXPECT_EQ(parsed["exit_code"], 0);
    EXPECT_EQ(parsed["tasks"].size(), 4u);

    const std::string csv = read_file(dir / "octahedron_graded.csv");
    EXPECT_EQ(csv.rfind("task,key,value\n", 0), 0u);
    EXPECT_NE(csv.find("betti,passed,true"), std::string::npos);
    fs::remove_all(dir);
}

TEST(Run, KeysAreSorted)
{
    RunOptions opts;
    opts.write = false;
    const RunOutcome out = run_scenario_file(kScenarioDir + "/cycle_twisted.json", opts);
    std::vector<std::string> keys;
    for (const auto& item : out.report.items())
        keys.push_back(item.key());
    EXPECT_TRUE(std::is_sorted(keys.begin(), keys.end()));
}

TEST(Run, ByteIdenticalWithoutTimings)
{
    const fs::path a = fresh_dir("a"), b = fresh_dir("b");
    RunOptions opts;
    opts.timings = false;
    opts.out_dir = a.string();
    run_scenario_file(kScenarioDir + "/koszul_magnet.json", opts);
    opts.out_dir = b.string();
    run_scenario_file(kScenarioDir + "/koszul_magnet.json", opts);
    for (const char* name : {"koszul_magnet.json", "koszul_magnet.csv"})
        EXPECT_EQ(read_file(a / name), read_file(b / name)) << name;
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST(Run, SeedOverrideChangesMetrics)
{
    RunOptions opts;
    opts.write = false;
    opts.timings = false;
    opts.seed = 100;
    const RunOutcome out = run_scenario_file(kScenarioDir + "/octahedron_graded.json", opts);
    EXPECT_EQ(out.exit_code, kExitPass);
    EXPECT_EQ(out.report["metrics"][0]["seed"], 100);
    EXPECT_EQ(out.report["metrics"][1]["seed"], 101);
}

TEST(Run, SvgNoticeWhenNothingToPlot)
{
    const fs::path dir = fresh_dir("svg");
    Scenario s = parse_scenario_text(
        R"({"name": "plain", "complex": {"fixture": "cycle_3"}, "tasks": ["betti"], "output": {"svg": true}})");
    RunOptions opts;
    opts.out_dir = dir.string();
    const RunOutcome out = run_scenario(s, opts);
    EXPECT_EQ(out.exit_code, kExitPass);
    ASSERT_EQ(out.files.notices.size(), 1u);
    EXPECT_NE(out.files.notices[0].find("SVG omitted"), std::string::npos);
    EXPECT_FALSE(fs::exists(dir / "plain_spectrum.svg"));

    Scenario d = parse_scenario_text(
        R"({"name": "spec", "complex": {"fixture": "cycle_3"}, "tasks": ["decompose"], "output": {"svg": true}})");
    run_scenario(d, opts);
    EXPECT_TRUE(fs::exists(dir / "spec_spectrum.svg"));
    EXPECT_NE(read_file(dir / "spec_spectrum.svg").find("<svg"), std::string::npos);
    fs::remove_all(dir);
}

TEST(Run, ExitCodes)
{
    RunOptions opts;
    opts.write = false;
    EXPECT_EQ(run_scenario_file("/nonexistent/scenario.json", opts).exit_code, kExitInput);
    EXPECT_EQ(run_scenario(parse_scenario_text(R"({"complex": {"fixture": "nowhere"}, "tasks": ["betti"]})"), opts)
                  .exit_code,
              kExitInput);
    // The setup rejection is expected, so the run passes.
    EXPECT_EQ(run_scenario_file(kScenarioDir + "/cup_magnet_rejected.json", opts).exit_code, kExitPass);
    // Same magnet without the expectation is an input error.
    EXPECT_EQ(run_scenario(parse_scenario_text(
                               R"({"complex": {"fixture": "triangle", "magnet": {"cup": [1, 2, 1]}}, "tasks": ["betti"]})"),
                           opts)
                  .exit_code,
              kExitInput);
    // An expectation that does not materialize is a failure.
    EXPECT_EQ(run_scenario(parse_scenario_text(
                               R"({"complex": {"fixture": "cycle_3"}, "tasks": ["betti"], "expect_error": "NotFlat"})"),
                           opts)
                  .exit_code,
              kExitFailure);
    // A tolerance too tight for the isomorphism residuals is an assertion failure.
    opts.tolerance_overrides = {"isomorphism=1e-300"};
    const RunOutcome tight = run_scenario(
        parse_scenario_text(R"({"complex": {"fixture": "octahedron"},
            "metrics": [{"model": "log_gaussian", "seed": 1}, {"model": "log_gaussian", "seed": 2}],
            "tasks": ["isomorphism"]})"),
        opts);
    EXPECT_EQ(tight.exit_code, kExitFailure);
    opts.tolerance_overrides = {"bogus=1"};
    EXPECT_EQ(run_scenario(parse_scenario_text(R"({"complex": {"fixture": "cycle_3"}, "tasks": ["betti"]})"), opts)
                  .exit_code,
              kExitInput);
}

TEST(Commands, BettiOracleRefine)
{
    const RunOutcome b = betti_command("octahedron", "random:3:4");
    EXPECT_EQ(b.exit_code, kExitPass) << b.report.dump(2);
    EXPECT_EQ(betti_command("octahedron", "random:zz").exit_code, kExitInput);
    EXPECT_EQ(betti_command("no_such", "identity").exit_code, kExitInput);

    const RunOutcome o = oracle_command("torus_triangulated");
    EXPECT_EQ(o.exit_code, kExitPass);
    EXPECT_EQ(o.report["smith_betti"], json({1, 2, 1}));
    EXPECT_EQ(o.report["euler_cells"], 0);

    const RunOutcome r = refine_command("constant", 2);
    EXPECT_EQ(r.exit_code, kExitPass);
    for (const json& level : r.report["levels"])
        EXPECT_LE(level["r"].get<double>(), 1e-12);
    const std::string csv = refine_csv(r.report);
    EXPECT_EQ(csv.rfind("level,N,r,slope\n0,32,", 0), 0u);
    EXPECT_EQ(refine_command("fractal", 2).exit_code, kExitInput);
}

TEST(FieldText, SeventeenDigitsAndHeader)
{
    const CochainComplex c = build_cubical({2, 2}, {false, false});
    SamplerConfig cfg;
    cfg.seed = 9;
    cfg.model = MetricModel::LogGaussian;
    const std::string text = serialize_field(sample_metric_field(c, cfg));
    EXPECT_NE(text.find("\ncarrier cubical:"), std::string::npos);
    EXPECT_NE(text.find("\nseed 9\n"), std::string::npos);
    EXPECT_NE(text.find("\nmodel log_gaussian\n"), std::string::npos);
    // A non-dyadic entry printed with 17 significant digits.
    std::istringstream in(text);
    std::string line, last;
    while (std::getline(in, line))
        last = line;
    std::istringstream row(last);
    std::string token;
    row >> token;
    const std::string digits = token.substr(0, token.find_first_of("eE"));
    std::size_t count = 0;
    for (char ch : digits)
        count += std::isdigit(static_cast<unsigned char>(ch)) ? 1 : 0;
    EXPECT_GE(count, 16u) << token;
}
