#include "roughhodge/runner.hpp"

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <numeric>
#include <sstream>

#include "roughhodge/errors.hpp"

namespace rhodge {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

json index_list(const std::vector<Index>& v)
{
    json out = json::array();
    for (Index x : v)
        out.push_back(x);
    return out;
}

json real_list(const RealVector& v)
{
    json out = json::array();
    for (Index i = 0; i < v.size(); ++i)
        out.push_back(v(i));
    return out;
}

json error_json(const Error& e)
{
    json out = {{"kind", to_string(e.kind())}, {"message", e.what()}};
    if (std::isfinite(e.diagnostic()))
        out["diagnostic"] = e.diagnostic();
    return out;
}

RankPolicy policy_of(const Tolerances& tol)
{
    RankPolicy p;
    p.min_gap = tol.rank_gap;
    return p;
}

void apply_env_threads()
{
    if (const char* env = std::getenv("HODGE_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0)
            Eigen::setNbThreads(n);
    }
}

/// Collects pass/fail checks for one task.
struct TaskRecord {
    json results = json::object();
    json failures = json::array();

    void check(bool ok, const std::string& what)
    {
        if (!ok)
            failures.push_back(what);
    }
};

struct Context {
    const Scenario& scenario;
    const BuiltComplex& built;
    std::vector<BuiltWeights> weights;
    RankPolicy policy;
};

std::vector<Index> algebraic_betti(const BuiltComplex& built, const RankPolicy& policy)
{
    if (built.degree_graded)
        return cohomology_dims(built.gamma, built.complex.grading, policy);
    // Z/2-graded (Koszul): split dim ker Gamma - rank Gamma by parity.
    std::vector<Index> out;
    const GradedStructure& g = built.betti_grading;
    for (Index p = 0; p < g.degree_count(); ++p) {
        const Matrix e = g.inclusion(p);
        const Index ker = kernel(built.gamma.map * e, policy).dim();
        const Index incoming = range(g.projector(p) * built.gamma.map, policy).dim();
        out.push_back(ker - incoming);
    }
    return out;
}

void run_betti(Context& ctx, TaskRecord& rec)
{
    const BuiltComplex& b = ctx.built;
    const HodgeDiracOperator op = build_dirac(b.gamma, ctx.weights[0].weights.total);
    const std::vector<Index> spectral = spectral_betti(op, b.betti_grading, ctx.policy);
    const std::vector<Index> algebraic = algebraic_betti(b, ctx.policy);
    rec.results["grading"] = b.degree_graded ? "degree" : "parity";
    rec.results["spectral"] = index_list(spectral);
    rec.results["algebraic"] = index_list(algebraic);
    rec.check(spectral == algebraic, "spectral kernel dimensions differ from algebraic cohomology");
    if (b.smith_applicable) {
        const SmithHomology smith = betti_smith(b.complex);
        rec.results["smith"] = index_list(smith.betti);
        json torsion = json::array();
        for (const auto& t : smith.torsion)
            torsion.push_back(t);
        rec.results["torsion"] = torsion;
        const bool match = smith.betti == spectral;
        rec.results["oracle_match"] = match;
        rec.check(match, "spectral Betti numbers differ from the Smith oracle");
    } else {
        rec.results["oracle_match"] = spectral == algebraic;
    }
    if (b.degree_graded) {
        const int chi_cells = euler_characteristic(b.complex.grading.sizes());
        const int chi_betti = euler_characteristic(spectral);
        rec.results["euler_cells"] = chi_cells;
        rec.results["euler_betti"] = chi_betti;
        rec.check(chi_cells == chi_betti, "Euler characteristics from cells and Betti numbers differ");
    }
}

void run_decompose(Context& ctx, TaskRecord& rec)
{
    const Tolerances& tol = ctx.scenario.tolerances;
    const HodgeDiracOperator op = build_dirac(ctx.built.gamma, ctx.weights[0].weights.total);
    const HodgeDecomposition d = hodge_decompose(op, ctx.policy);
    const Index n = op.dim();
    rec.results["ambient_dim"] = n;
    rec.results["kernel_dim"] = d.kernel_dim;
    rec.results["pencil_kernel_dim"] = d.pencil_kernel_dim;
    rec.results["range_gamma_dim"] = d.range_gamma_dim;
    rec.results["range_gamma_star_dim"] = d.range_gamma_star_dim;
    rec.results["orthogonality_residual"] = d.orthogonality_residual;
    rec.results["self_adjoint_residual"] = op.self_adjoint_residual;
    rec.results["representation_residual"] = op.representation_residual;
    rec.results["nilpotency_residual"] = ctx.built.gamma.nilpotency_residual;
    rec.results["spectrum"] = real_list(d.spectrum);
    rec.check(d.kernel_dim + d.range_gamma_dim + d.range_gamma_star_dim == n,
              "dim ker + rank Gamma + rank Gamma* differs from the ambient dimension");
    rec.check(d.kernel_dim == d.pencil_kernel_dim, "pencil kernel disagrees with ker Gamma cap ker Gamma*");
    rec.check(d.orthogonality_residual <= tol.residual, "Hodge summands are not B-orthogonal within tolerance");
    rec.check(op.self_adjoint_residual <= tol.self_adjoint, "B Pi is not Hermitian within tolerance");
}

json iso_json(const KernelIsomorphism& iso)
{
    return {{"mode", to_string(iso.mode)},
            {"dim", iso.dim()},
            {"forward_inverse_residual", iso.forward_inverse_residual},
            {"inverse_forward_residual", iso.inverse_forward_residual},
            {"image_residual", iso.image_residual},
            {"condition", iso.condition},
            {"mutual_bound", iso.mutual_bound}};
}

Matrix ambient_map(const KernelIsomorphism& iso)
{
    return iso.target.basis * iso.forward * iso.source.basis.adjoint() * iso.source.metric->form();
}

void run_isomorphism(Context& ctx, TaskRecord& rec)
{
    const Tolerances& tol = ctx.scenario.tolerances;
    const MetricPtr b1 = ctx.weights[0].weights.total;
    const MetricPtr b2 = ctx.weights[1].weights.total;
    json modes = json::array();
    std::vector<Matrix> maps;
    for (IsomorphismMode mode : {IsomorphismMode::AlongRanPi, IsomorphismMode::AlongRanGamma}) {
        try {
            const KernelIsomorphism iso = kernel_isomorphism(ctx.built.gamma, b1, b2, mode, ctx.policy);
            modes.push_back(iso_json(iso));
            rec.check(iso.forward_inverse_residual <= tol.isomorphism &&
                          iso.inverse_forward_residual <= tol.isomorphism,
                      to_string(mode) + ": Phi Phi^-1 or Phi^-1 Phi is not the identity within tolerance");
            rec.check(iso.image_residual <= tol.isomorphism, to_string(mode) + ": image leaves the target kernel");
            maps.push_back(ambient_map(iso));
            rec.results["kernel_dim"] = iso.dim();
        } catch (const Error& e) {
            modes.push_back({{"mode", to_string(mode)}, {"error", error_json(e)}});
            rec.check(false, to_string(mode) + ": " + e.what());
        }
    }
    rec.results["modes"] = modes;
    if (maps.size() == 2) {
        const double scale = std::max(op_norm(maps[0]), 1.0);
        rec.results["mode_difference"] = op_norm(maps[0] - maps[1]) / scale;
    }
    if (ctx.built.smith_applicable && rec.results.contains("kernel_dim")) {
        const auto smith = betti_smith(ctx.built.complex).betti;
        const Index total = std::accumulate(smith.begin(), smith.end(), Index{0});
        rec.results["smith_total"] = total;
        rec.check(rec.results["kernel_dim"].get<Index>() == total, "kernel dimension differs from the Smith oracle");
    }
}

void run_graded_isomorphism(Context& ctx, const TaskSpec& task, TaskRecord& rec)
{
    const Tolerances& tol = ctx.scenario.tolerances;
    if (!ctx.built.degree_graded)
        throw Error(ErrorKind::GradingViolation, "graded isomorphism needs a degree-graded complex");
    const GradedStructure& grading = ctx.built.complex.grading;
    json splits = json::array();
    for (const BuiltWeights* w : {&ctx.weights[0], &ctx.weights[1]}) {
        const HodgeDiracOperator op = build_dirac(ctx.built.gamma, w->weights.total);
        const SplitCheck check = graded_split_check(op, grading, task.power, tol.split);
        splits.push_back({{"passed", check.passed}, {"residuals", check.residuals}, {"threshold", check.threshold}});
        rec.check(check.passed, "[P_j, Pi^k] exceeds the split tolerance");
    }
    rec.results["power"] = task.power;
    rec.results["split_checks"] = splits;
    const auto isos = restricted_kernel_isomorphism(ctx.built.gamma, ctx.weights[0].weights.total,
                                                    ctx.weights[1].weights.total, grading, task.power, ctx.policy);
    json degrees = json::array();
    std::vector<Index> dims;
    for (const KernelIsomorphism& iso : isos) {
        degrees.push_back(iso_json(iso));
        dims.push_back(iso.dim());
        rec.check(iso.forward_inverse_residual <= tol.isomorphism && iso.inverse_forward_residual <= tol.isomorphism,
                  "degree isomorphism is not invertible within tolerance");
        rec.check(iso.image_residual <= tol.isomorphism, "degree isomorphism leaves the target kernel");
    }
    rec.results["degrees"] = degrees;
    rec.results["dims"] = index_list(dims);
    if (ctx.built.smith_applicable) {
        const auto smith = betti_smith(ctx.built.complex).betti;
        rec.results["smith"] = index_list(smith);
        rec.results["oracle_match"] = smith == dims;
        rec.check(smith == dims, "per-degree kernel dimensions differ from the Smith oracle");
    }
}

void run_power_check(Context& ctx, const TaskSpec& task, TaskRecord& rec)
{
    json checks = json::array();
    for (std::size_t m = 0; m < ctx.weights.size(); ++m) {
        const HodgeDiracOperator op = build_dirac(ctx.built.gamma, ctx.weights[m].weights.total);
        for (int k : task.powers) {
            const PowerKernelCheck c = power_kernel_check(op, k, ctx.policy);
            checks.push_back({{"metric", m},
                              {"power", k},
                              {"kernel_dim", c.kernel_dim},
                              {"power_kernel_dim", c.power_kernel_dim},
                              {"rank", c.rank},
                              {"power_rank", c.power_rank},
                              {"equal", c.equal}});
            rec.check(c.equal, "ker Pi^" + std::to_string(k) + " differs from ker Pi");
        }
    }
    rec.results["checks"] = checks;
}

void run_refine(Context& ctx, TaskRecord& rec)
{
    const RefineResult r = refine_divergence(*ctx.scenario.refine);
    rec.results = to_json(r);
}

json metric_info(const MetricSpec& spec, const BuiltWeights& w)
{
    json info = {{"model", spec.model},
                 {"lambda_min", w.weights.total->lambda_min()},
                 {"lambda_max", w.weights.total->lambda_max()},
                 {"provenance", w.weights.provenance}};
    if (spec.model == "log_gaussian" || spec.model == "block_spd")
        info["seed"] = spec.seed;
    if (w.field) {
        info["c_lo"] = w.field->c_lo;
        info["c_hi"] = w.field->c_hi;
        info["carrier"] = w.field->carrier_id;
    }
    return info;
}

std::string resolve_path(const std::string& file, const std::string& base_dir)
{
    const std::filesystem::path p(file);
    if (p.is_absolute() || base_dir.empty())
        return file;
    return (std::filesystem::path(base_dir) / p).string();
}

}  // namespace

// ---------------------------------------------------------------------------

BuiltComplex build_complex(const ComplexSpec& spec, const Tolerances& tol, const std::string& base_dir)
{
    BuiltComplex b;
    if (spec.koszul) {
        ExteriorElement omega;
        for (const auto& [indices, coeff] : spec.koszul->omega)
            omega = omega + ExteriorElement::basis(indices) * coeff;
        const KoszulModel model = koszul_wedge(spec.koszul->n, omega);
        b.kind = "koszul";
        b.complex.name = "koszul_" + std::to_string(spec.koszul->n);
        b.complex.grading = model.degree_grading();
        b.complex.integral = false;
        b.gamma = model.op;
        bool linear = true;
        for (const auto& [mask, c] : model.omega.terms)
            if (c != Scalar(0) && std::popcount(mask) != 1)
                linear = false;
        b.degree_graded = linear;
        b.betti_grading = linear ? model.degree_grading() : model.parity_grading();
        b.info = {{"kind", b.kind}, {"n", model.n}, {"dims", index_list(b.complex.grading.sizes())}};
        return b;
    }

    if (!spec.fixture.empty()) {
        b.complex = build_fixture(spec.fixture);
        b.kind = b.complex.cubical ? "cubical" : "simplicial";
    } else if (!spec.file.empty()) {
        b.complex = build_simplicial(parse_simplices_file(resolve_path(spec.file, base_dir)),
                                     std::filesystem::path(spec.file).stem().string());
        b.kind = "simplicial";
    } else {
        b.complex = build_cubical(spec.grid->sizes, spec.grid->periodic, spec.grid->lengths);
        b.kind = "cubical";
    }

    if (spec.cup_magnet && (spec.local_system || spec.boundary == "relative"))
        throw Error(ErrorKind::ParseError, "a cup-product magnet cannot be combined with a twist or boundary marking");

    std::optional<Matrix> magnet;
    if (spec.cup_magnet)
        magnet = cup_product_operator(b.complex, *spec.cup_magnet);

    if (spec.local_system) {
        if (!b.complex.simplicial)
            throw Error(ErrorKind::CarrierMismatch, "local systems need a simplicial complex");
        std::vector<Scalar> values = spec.local_system->scalar;
        if (spec.local_system->holonomy) {
            values.assign(static_cast<std::size_t>(b.complex.simplicial->count(1)), Scalar(1));
            if (values.empty())
                throw Error(ErrorKind::DimensionMismatch, "holonomy needs at least one edge");
            values[0] = *spec.local_system->holonomy;
        }
        b.complex = twisted_coboundary(b.complex, LocalSystem::scalar(values), tol.flatness);
    }

    if (spec.boundary == "relative") {
        BoundaryMarking marking;
        if (b.complex.cubical)
            marking = topological_boundary(*b.complex.cubical);
        else
            marking = topological_boundary(*b.complex.simplicial);
        b.complex = relative_complex(b.complex, marking);
    }

    if (magnet) {
        b.gamma = magnet_operator(b.complex.total_gamma(), *magnet, tol.nilpotency);
        b.complex.integral = false;
        b.kind += "+magnet";
    } else {
        b.gamma = certify_nilpotent(b.complex.gamma_matrix(), tol.nilpotency);
    }
    b.betti_grading = b.complex.grading;
    b.degree_graded = true;
    b.smith_applicable = b.complex.integral && b.complex.fiber_rank == 1 && !magnet;
    b.info = {{"kind", b.kind},
              {"name", b.complex.name},
              {"boundary", spec.boundary},
              {"dims", index_list(b.complex.grading.sizes())},
              {"total_dim", b.complex.total_dim()},
              {"fiber_rank", b.complex.fiber_rank},
              {"nilpotency_residual", b.gamma.nilpotency_residual},
              {"exact_integer", b.gamma.exact_integer}};
    return b;
}

BuiltWeights build_weights(const MetricSpec& spec, const BuiltComplex& built)
{
    BuiltWeights w;
    const CochainComplex& c = built.complex;
    if (spec.model == "identity") {
        w.weights = identity_weights(c.grading);
    } else if (spec.model == "block_spd") {
        w.weights = random_block_weights(c.grading, spec.seed, spec.clamp);
    } else if (spec.model == "weights") {
        if (static_cast<Index>(spec.weights.size()) != c.grading.degree_count())
            throw Error(ErrorKind::DimensionMismatch, "weights need one diagonal per degree");
        std::vector<Matrix> blocks;
        for (Index k = 0; k < c.grading.degree_count(); ++k) {
            const auto& diag = spec.weights[static_cast<std::size_t>(k)];
            if (static_cast<Index>(diag.size()) != c.grading.size(k))
                throw Error(ErrorKind::DimensionMismatch,
                            "weights for degree " + std::to_string(k) + " need " + std::to_string(c.grading.size(k)) +
                                " entries");
            RealVector d = Eigen::Map<const RealVector>(diag.data(), static_cast<Index>(diag.size()));
            blocks.push_back(d.cast<Scalar>().asDiagonal());
        }
        w.weights = weights_from_blocks(c.grading, std::move(blocks), "weights");
    } else {
        if (built.kind == "koszul")
            throw Error(ErrorKind::CarrierMismatch, "metric fields need a geometric carrier; use identity, "
                                                    "block_spd or weights for Koszul models");
        SamplerConfig config;
        config.seed = spec.seed;
        config.clamp = spec.clamp;
        config.weierstrass_terms = spec.terms;
        config.model = parse_metric_model(spec.model);
        if (config.model == MetricModel::Explicit) {
            const Index n = static_cast<Index>(spec.matrix.size());
            config.explicit_metric = RealMatrix(n, n);
            for (Index i = 0; i < n; ++i) {
                if (static_cast<Index>(spec.matrix[static_cast<std::size_t>(i)].size()) != n)
                    throw Error(ErrorKind::DimensionMismatch, "explicit metric must be square");
                for (Index j = 0; j < n; ++j)
                    config.explicit_metric(i, j) = spec.matrix[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            }
        }
        w.field = sample_metric_field(c, config);
        w.weights = induce_weights(*w.field, c);
    }
    w.info = metric_info(spec, w);
    return w;
}

RunOutcome run_scenario(Scenario scenario, const RunOptions& options)
{
    apply_env_threads();
    const auto t_start = Clock::now();
    RunOutcome outcome;
    json& report = outcome.report;
    report["tool"] = {{"name", "roughhodge"}, {"version", ROUGHHODGE_VERSION}};
    report["scenario"] = scenario.source;
    report["name"] = scenario.name;

    auto finish = [&](int code) {
        outcome.exit_code = code;
        report["exit_code"] = code;
        report["passed"] = code == kExitPass;
        if (options.timings)
            report["timings"]["total_s"] = seconds_since(t_start);
        if (options.write) {
            EmitOptions emit;
            emit.dir = options.out_dir ? *options.out_dir : scenario.output.dir;
            emit.stem = scenario.output.stem;
            emit.csv = scenario.output.csv;
            emit.svg = scenario.output.svg;
            outcome.files = emit_report(report, emit);
            if (!outcome.files.notices.empty())
                report["notices"] = outcome.files.notices;
        }
        return outcome;
    };

    // Overrides
    try {
        for (const std::string& t : options.tolerance_overrides)
            set_tolerance(scenario.tolerances, t);
    } catch (const Error& e) {
        report["setup"] = {{"error", error_json(e)}};
        return finish(kExitInput);
    }
    if (options.seed) {
        for (std::size_t i = 0; i < scenario.metrics.size(); ++i) {
            scenario.metrics[i].seed = *options.seed + i;
            scenario.metrics[i].has_seed = true;
        }
    }
    report["tolerances"] = to_json(scenario.tolerances);

    // Setup: complex and weights
    std::optional<BuiltComplex> built;
    std::vector<BuiltWeights> weights;
    try {
        built = build_complex(scenario.complex, scenario.tolerances, scenario.base_dir);
        for (const MetricSpec& m : scenario.metrics)
            weights.push_back(build_weights(m, *built));
    } catch (const Error& e) {
        report["setup"] = {{"error", error_json(e)}};
        if (!scenario.expect_error.empty() && to_string(e.kind()) == scenario.expect_error) {
            report["setup"]["expected_rejection"] = true;
            return finish(kExitPass);
        }
        return finish(kExitInput);
    }
    if (!scenario.expect_error.empty()) {
        report["setup"] = {{"expected_rejection", false},
                           {"message", "expected " + scenario.expect_error + " but setup succeeded"}};
        return finish(kExitFailure);
    }
    report["complex"] = built->info;
    json metrics = json::array();
    for (std::size_t i = 0; i < weights.size(); ++i)
        metrics.push_back(weights[i].info);
    report["metrics"] = metrics;
    if (weights.size() == 2)
        report["metric_mutual_bound"] = mutual_bound(*weights[0].weights.total, *weights[1].weights.total).constant;

    Context ctx{scenario, *built, std::move(weights), policy_of(scenario.tolerances)};
    json tasks = json::array();
    bool all_passed = true;
    json task_times = json::array();
    for (const TaskSpec& task : scenario.tasks) {
        const auto t0 = Clock::now();
        TaskRecord rec;
        try {
            if (task.type == "betti")
                run_betti(ctx, rec);
            else if (task.type == "decompose")
                run_decompose(ctx, rec);
            else if (task.type == "isomorphism")
                run_isomorphism(ctx, rec);
            else if (task.type == "graded_isomorphism")
                run_graded_isomorphism(ctx, task, rec);
            else if (task.type == "power_check")
                run_power_check(ctx, task, rec);
            else if (task.type == "refine_divergence")
                run_refine(ctx, rec);
        } catch (const Error& e) {
            rec.failures.push_back(std::string("task failure: ") + e.what());
            rec.results["error"] = error_json(e);
        }
        const bool passed = rec.failures.empty();
        all_passed = all_passed && passed;
        tasks.push_back({{"type", task.type}, {"passed", passed}, {"results", rec.results}, {"failures", rec.failures}});
        task_times.push_back({{"type", task.type}, {"seconds", seconds_since(t0)}});
    }
    report["tasks"] = tasks;
    if (options.timings)
        report["timings"]["tasks"] = task_times;
    return finish(all_passed ? kExitPass : kExitFailure);
}

RunOutcome run_scenario_file(const std::string& path, const RunOptions& options)
{
    Scenario scenario;
    try {
        scenario = load_scenario(path);
    } catch (const Error& e) {
        RunOutcome out;
        out.exit_code = kExitInput;
        out.report = {{"setup", {{"error", error_json(e)}}}, {"exit_code", kExitInput}, {"passed", false}};
        return out;
    }
    return run_scenario(std::move(scenario), options);
}

RunOutcome betti_command(const std::string& fixture, const std::string& metric)
{
    RunOutcome out;
    try {
        Tolerances tol;
        const BuiltComplex built = build_complex(ComplexSpec{fixture, {}, {}, {}, "absolute", {}, {}}, tol);
        const BuiltWeights w = build_weights(parse_metric_shorthand(metric), built);
        std::vector<BuiltWeights> ws{w};
        Scenario dummy;
        Context ctx{dummy, built, ws, policy_of(tol)};
        TaskRecord rec;
        run_betti(ctx, rec);
        out.report = {{"fixture", fixture},
                      {"metric", w.info},
                      {"complex", built.info},
                      {"results", rec.results},
                      {"failures", rec.failures}};
        out.exit_code = rec.failures.empty() ? kExitPass : kExitFailure;
    } catch (const Error& e) {
        out.report = {{"error", error_json(e)}};
        out.exit_code = e.kind() == ErrorKind::ParseError || e.kind() == ErrorKind::IoError ? kExitInput : kExitFailure;
    }
    out.report["exit_code"] = out.exit_code;
    return out;
}

RunOutcome oracle_command(const std::string& fixture)
{
    RunOutcome out;
    try {
        const CochainComplex c = build_fixture(fixture);
        const SmithHomology h = betti_smith(c);
        json torsion = json::array();
        for (const auto& t : h.torsion)
            torsion.push_back(t);
        out.report = {{"fixture", fixture},
                      {"cells", index_list(c.grading.sizes())},
                      {"smith_betti", index_list(h.betti)},
                      {"coboundary_ranks", index_list(h.ranks)},
                      {"torsion", torsion},
                      {"euler_cells", euler_characteristic(c.grading.sizes())},
                      {"euler_betti", euler_characteristic(h.betti)}};
        out.exit_code = out.report["euler_cells"] == out.report["euler_betti"] ? kExitPass : kExitFailure;
    } catch (const Error& e) {
        out.report = {{"error", error_json(e)}};
        out.exit_code = kExitInput;
    }
    out.report["exit_code"] = out.exit_code;
    return out;
}

RunOutcome refine_command(const std::string& model, int levels)
{
    RunOutcome out;
    try {
        RefineConfig config;
        config.model = parse_refine_model(model);
        config.levels = levels;
        if (config.model == RefineModel::Constant)
            config.form = RefineForm::Constant;
        out.report = to_json(refine_divergence(config));
        out.exit_code = kExitPass;
    } catch (const Error& e) {
        out.report = {{"error", error_json(e)}};
        out.exit_code = kExitInput;
    }
    out.report["exit_code"] = out.exit_code;
    return out;
}

}  // namespace rhodge
