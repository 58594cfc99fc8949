#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "roughhodge/errors.hpp"
#include "roughhodge/hodge.hpp"
#include "roughhodge/report.hpp"
#include "roughhodge/runner.hpp"

namespace py = pybind11;
using namespace rhodge;

namespace {

MetricPtr weights_or_identity(const CochainComplex& c, const std::optional<Matrix>& b)
{
    if (!b)
        return identity_metric(c.total_dim());
    return make_metric(*b);
}

/// Total weight matrix: "identity", "random:<seed>:<C>" or "block_spd:<seed>:<C>".
Matrix sample_weights(const CochainComplex& c, const std::string& spec)
{
    if (spec.rfind("block_spd:", 0) == 0) {
        MetricSpec m = parse_metric_shorthand("random:" + spec.substr(10));
        return random_block_weights(c.grading, m.seed, m.clamp).total->form();
    }
    BuiltComplex built;
    built.complex = c;
    built.kind = c.cubical ? "cubical" : "simplicial";
    return build_weights(parse_metric_shorthand(spec), built).weights.total->form();
}

}  // namespace

PYBIND11_MODULE(_roughhodge, m)
{
    m.doc() = "Hodge-Dirac operators, kernel isomorphisms and rough metric weights";
    m.attr("__version__") = ROUGHHODGE_VERSION;

    static py::exception<Error> hodge_error(m, "HodgeError", PyExc_RuntimeError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p)
                std::rethrow_exception(p);
        } catch (const Error& e) {
            py::object kind = py::str(to_string(e.kind()));
            PyErr_SetObject(hodge_error.ptr(), py::make_tuple(kind, e.what()).ptr());
        }
    });

    py::class_<CochainComplex>(m, "Complex")
        .def_readonly("name", &CochainComplex::name)
        .def_property_readonly("dims", &CochainComplex::dims)
        .def_property_readonly("total_dim", &CochainComplex::total_dim)
        .def_property_readonly("gamma", &CochainComplex::gamma_matrix)
        .def("exactly_nilpotent", &CochainComplex::exactly_nilpotent)
        .def("__repr__", [](const CochainComplex& c) {
            std::string dims;
            for (Index d : c.dims())
                dims += (dims.empty() ? "" : ", ") + std::to_string(d);
            return "<Complex " + c.name + " dims=(" + dims + ")>";
        });

    m.def("build_fixture", [](const std::string& name) { return build_fixture(name); }, py::arg("name"));
    m.def("build_cubical", &build_cubical, py::arg("sizes"), py::arg("periodic"),
          py::arg("lengths") = std::vector<double>{});

    m.def("betti_smith", [](const CochainComplex& c) { return betti_smith(c).betti; }, py::arg("complex"));

    m.def("sample_weights", &sample_weights, py::arg("complex"), py::arg("spec") = "identity",
          "Total SPD weight matrix from 'identity', 'random:<seed>:<C>' or 'block_spd:<seed>:<C>'.");

    m.def(
        "certify_nilpotent",
        [](const Matrix& a, double tol) {
            const NilpotentOperator op = certify_nilpotent(a, tol);
            return py::dict(py::arg("residual") = op.nilpotency_residual, py::arg("exact") = op.exact_integer);
        },
        py::arg("a"), py::arg("tol") = 1e-12);

    m.def(
        "spectral_betti",
        [](const CochainComplex& c, std::optional<Matrix> b) {
            const HodgeDiracOperator op = build_dirac(c.total_gamma(), weights_or_identity(c, b));
            return spectral_betti(op, c.grading);
        },
        py::arg("complex"), py::arg("weights") = py::none());

    m.def(
        "decompose",
        [](const CochainComplex& c, std::optional<Matrix> b) {
            const HodgeDiracOperator op = build_dirac(c.total_gamma(), weights_or_identity(c, b));
            const HodgeDecomposition d = hodge_decompose(op);
            return py::dict(py::arg("kernel_dim") = d.kernel_dim, py::arg("range_gamma_dim") = d.range_gamma_dim,
                            py::arg("range_gamma_star_dim") = d.range_gamma_star_dim,
                            py::arg("orthogonality_residual") = d.orthogonality_residual,
                            py::arg("self_adjoint_residual") = op.self_adjoint_residual,
                            py::arg("pi") = op.pi, py::arg("spectrum") = RealVector(d.spectrum));
        },
        py::arg("complex"), py::arg("weights") = py::none());

    m.def(
        "kernel_isomorphism",
        [](const CochainComplex& c, const Matrix& b1, const Matrix& b2, const std::string& mode) {
            const IsomorphismMode im = mode == "ran_gamma" ? IsomorphismMode::AlongRanGamma
                                                           : IsomorphismMode::AlongRanPi;
            if (mode != "ran_gamma" && mode != "ran_pi")
                throw Error(ErrorKind::ParseError, "mode must be 'ran_pi' or 'ran_gamma'");
            const KernelIsomorphism iso = kernel_isomorphism(c.total_gamma(), make_metric(b1), make_metric(b2), im);
            return py::dict(py::arg("dim") = iso.dim(), py::arg("forward") = iso.forward,
                            py::arg("inverse") = iso.inverse,
                            py::arg("forward_inverse_residual") = iso.forward_inverse_residual,
                            py::arg("inverse_forward_residual") = iso.inverse_forward_residual,
                            py::arg("condition") = iso.condition, py::arg("mutual_bound") = iso.mutual_bound);
        },
        py::arg("complex"), py::arg("b1"), py::arg("b2"), py::arg("mode") = "ran_pi");

    m.def("weierstrass_partial_sum", &weierstrass_partial_sum, py::arg("x"), py::arg("terms") = 24);

    m.def(
        "refine_divergence",
        [](const std::string& model, int levels, Index base) {
            RefineConfig config;
            config.model = parse_refine_model(model);
            config.levels = levels;
            config.base = base;
            if (config.model == RefineModel::Constant)
                config.form = RefineForm::Constant;
            const RefineResult r = refine_divergence(config);
            std::vector<double> values;
            for (const RefineLevel& l : r.levels)
                values.push_back(l.r);
            return values;
        },
        py::arg("model") = "weierstrass", py::arg("levels") = 4, py::arg("base") = 32);

    m.def(
        "run_scenario",
        [](const std::string& text, bool timings) {
            RunOptions options;
            options.timings = timings;
            options.write = false;
            Scenario s = parse_scenario_text(text);
            const RunOutcome out = run_scenario(std::move(s), options);
            return py::make_tuple(out.exit_code, canonical_json(out.report));
        },
        py::arg("scenario_json"), py::arg("timings") = false,
        "Run a scenario given as JSON text; returns (exit_code, report_json).");
}
